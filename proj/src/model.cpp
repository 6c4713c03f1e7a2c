#include "model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace privlens {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Entity: return "entity";
        case Kind::Identifier: return "identifier";
        case Kind::Data: return "data";
        case Kind::NonPersonal: return "nonpersonal";
    }
    return "?";
}

AtomId Model::atom_id(const std::string& name) const {
    auto it = atom_by_name.find(name);
    if (it == atom_by_name.end()) throw std::out_of_range("unknown atom: " + name);
    return it->second;
}

ItemId Model::find_item(const std::string& var, const ContextRef& ctx) const {
    auto it = item_by_key.find({var, ctx.domain, ctx.profile});
    return it == item_by_key.end() ? -1 : it->second;
}

bool Model::is_actor(AtomId a) const {
    return std::find(actors.begin(), actors.end(), a) != actors.end();
}

std::optional<AtomId> Model::actor_by_name(const std::string& name) const {
    auto it = atom_by_name.find(name);
    if (it == atom_by_name.end() || !is_actor(it->second)) return std::nullopt;
    return it->second;
}

std::vector<ItemId> Model::personal_items() const {
    std::vector<ItemId> out;
    for (ItemId i = 0; i < (ItemId)items.size(); ++i)
        if (items[i].kind != Kind::NonPersonal) out.push_back(i);
    return out;
}

std::vector<ItemId> Model::items_in_ctx(const ContextRef& ctx) const {
    std::vector<ItemId> out;
    for (ItemId i = 0; i < (ItemId)items.size(); ++i)
        if (items[i].ctx == ctx) out.push_back(i);
    return out;
}

std::vector<ItemId> Model::reps_of_atom(AtomId a) const {
    std::vector<ItemId> out;
    for (ItemId i = 0; i < (ItemId)items.size(); ++i)
        if (items[i].atom == a) out.push_back(i);
    return out;
}

std::optional<ItemId> Model::prop_image(int prop, ItemId it) const {
    const auto& pm = props[prop].item_map;
    auto f = pm.find(it);
    if (f == pm.end()) return std::nullopt;
    return f->second;
}

std::vector<std::pair<int, ItemId>> Model::prop_images(ItemId it) const {
    std::vector<std::pair<int, ItemId>> out;
    for (int p = 0; p < (int)props.size(); ++p)
        if (auto img = prop_image(p, it)) out.emplace_back(p, *img);
    return out;
}

std::vector<std::pair<int, ItemId>> Model::prop_preimages(ItemId it) const {
    std::vector<std::pair<int, ItemId>> out;
    for (int p = 0; p < (int)props.size(); ++p)
        for (const auto& [src, img] : props[p].item_map)
            if (img == it) out.emplace_back(p, src);
    return out;
}

std::string Model::item_str(ItemId it) const {
    const ContextItem& c = items[it];
    return c.var + "@" + c.ctx.domain + "." + c.ctx.profile;
}

std::vector<std::string> validate_model(const Model& m) {
    std::vector<std::string> bad;
    auto fail = [&](std::string s) { bad.push_back(std::move(s)); };

    // Atom-level checks.
    std::map<int, AtomId> ident_class;
    for (AtomId a = 0; a < (AtomId)m.atoms.size(); ++a) {
        const InfoAtom& at = m.atoms[a];
        switch (at.kind) {
            case Kind::Entity:
                if (at.subject != a) fail("entity atom '" + at.name + "' is not its own subject");
                break;
            case Kind::Identifier:
            case Kind::Data:
                if (at.subject < 0 || at.subject >= (AtomId)m.atoms.size() ||
                    m.atoms[at.subject].kind != Kind::Entity)
                    fail("personal atom '" + at.name + "' lacks an entity subject");
                break;
            case Kind::NonPersonal:
                if (at.subject != -1) fail("non-personal atom '" + at.name + "' has a subject");
                break;
        }
        if (at.kind != Kind::Entity) {
            if (at.content_class < 0 || at.content_class >= (int)m.class_names.size())
                fail("atom '" + at.name + "' has no contents class");
            else if (at.kind == Kind::Identifier) {
                auto [pos, fresh] = ident_class.emplace(at.content_class, a);
                if (!fresh)
                    fail("identifier contents not unique: '" + m.atoms[pos->second].name +
                         "' and '" + at.name + "'");
            }
        }
    }

    // Actors are entities.
    for (AtomId a : m.actors)
        if (m.atoms[a].kind != Kind::Entity) fail("actor '" + m.atoms[a].name + "' is not an entity");

    // Context item checks: kind partition under sigma, ds variable, profile dot.
    for (ItemId i = 0; i < (ItemId)m.items.size(); ++i) {
        const ContextItem& c = m.items[i];
        if (c.atom < 0 || c.atom >= (AtomId)m.atoms.size()) {
            fail("context item " + m.item_str(i) + " maps outside the atom set");
            continue;
        }
        if (c.kind != m.atoms[c.atom].kind)
            fail("sigma breaks the kind partition at " + m.item_str(i));
        if (c.kind == Kind::Entity && c.var != kEntityVar)
            fail("entity context item " + m.item_str(i) + " is not named '" + kEntityVar + "'");
        bool dot = c.ctx.profile == kNoProfile;
        if (dot != (c.kind == Kind::NonPersonal))
            fail("profile '.' does not match non-personal kind at " + m.item_str(i));
        if (c.ctx.domain.empty()) fail("empty domain at " + m.item_str(i));
    }

    // Items sharing a context share a data subject.
    std::map<ContextRef, AtomId> ctx_subject;
    for (ItemId i = 0; i < (ItemId)m.items.size(); ++i) {
        const ContextItem& c = m.items[i];
        if (c.kind == Kind::NonPersonal) continue;
        AtomId subj = m.atoms[c.atom].subject;
        auto [pos, fresh] = ctx_subject.emplace(c.ctx, subj);
        if (!fresh && pos->second != subj)
            fail("context " + c.ctx.str() + " mixes data subjects");
    }

    // Property conditions 1-4 of the model definition.
    for (const Property& p : m.props) {
        std::set<int> image_classes;
        for (const auto& [src, img] : p.atom_map) {
            const InfoAtom& s = m.atoms[src];
            const InfoAtom& d = m.atoms[img];
            if (s.kind == Kind::Entity || s.kind == Kind::NonPersonal)
                fail("property " + p.id + " defined on non-attribute atom '" + s.name + "'");
            if (d.kind != Kind::Data)
                fail("property " + p.id + " image '" + d.name + "' is not a data atom");
            if (s.subject != d.subject)
                fail("property " + p.id + " image '" + d.name + "' changes the data subject");
            image_classes.insert(d.content_class);
        }
        if (image_classes.size() > 1)
            fail("property " + p.id + " images do not share one contents class");
        for (const auto& [src, img] : p.item_map) {
            const ContextItem& s = m.items[src];
            const ContextItem& d = m.items[img];
            if (s.ctx != d.ctx)
                fail("property " + p.id + " image " + m.item_str(img) +
                     " leaves the context of " + m.item_str(src));
            auto am = p.atom_map.find(s.atom);
            if (am == p.atom_map.end() || am->second != d.atom)
                fail("property " + p.id + " does not commute with sigma at " + m.item_str(src));
        }
    }

    return bad;
}

}  // namespace privlens
