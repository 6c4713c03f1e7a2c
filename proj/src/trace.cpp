#include "trace.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>

namespace privlens {

std::string ValidityReport::dump(const Model& mo, const TermArena& a) const {
    std::string s;
    for (const StepValidity& sv : steps) {
        if (sv.valid) continue;
        for (const PartyCheck& c : sv.checks) {
            if (c.ok) continue;
            s += "step " + std::to_string(sv.step) + ": " + mo.atoms[c.actor].name +
                 " cannot determine " + term_str(mo, a, c.required) + "\n";
        }
    }
    if (s.empty()) s = "trace valid\n";
    return s;
}

SystemState initial_state(const Model& mo) {
    SystemState s;
    for (AtomId a : mo.actors) s.per_actor.emplace(a, KnowledgeBase::of(mo.atoms[a].name, {}));
    return s;
}

static AtomId address_subject(const Model& mo, const TermArena& a, TermId addr) {
    const TermNode& n = a.node(addr);
    if (n.ctor != Ctor::Leaf || mo.items[n.leaf].kind != Kind::Identifier)
        throw std::invalid_argument("transmission address is not an identifier item");
    return mo.atom_of(n.leaf).subject;
}

SystemState evolve_step(Analyzer& az, const SystemState& s, const Transmission& t) {
    const Model& mo = az.model();
    AtomId sa = address_subject(mo, az.arena(), t.sender);
    AtomId sb = address_subject(mo, az.arena(), t.receiver);
    if (!mo.is_actor(sa) || !mo.is_actor(sb))
        throw std::invalid_argument("address not owned by an actor");
    SystemState out;
    out.version = s.version + 1;
    for (const auto& [actor, kb] : s.per_actor) {
        if (actor == sa || actor == sb)
            out.per_actor.emplace(actor, kb.with({t.sender, t.receiver, t.payload}));
        else
            out.per_actor.emplace(actor, kb);
    }
    return out;
}

std::set<ItemId> determined_items(const Model& mo, const TermArena& a, const SystemState& s) {
    std::set<ItemId> det;
    for (const auto& [actor, kb] : s.per_actor)
        for (TermId t : kb.elems) {
            const TermNode& n = a.node(t);
            if (n.ctor == Ctor::Leaf && mo.items[n.leaf].kind == Kind::Entity) continue;
            std::vector<ItemId> its;
            collect_items(a, t, its);
            det.insert(its.begin(), its.end());
        }
    // Properties of occurring items are determined with them.
    std::vector<ItemId> work(det.begin(), det.end());
    while (!work.empty()) {
        ItemId q = work.back();
        work.pop_back();
        for (auto [prop, img] : mo.prop_images(q))
            if (det.insert(img).second) work.push_back(img);
    }
    return det;
}

namespace {

struct LeafGroup {
    ItemId leaf;
    std::vector<Path> positions;
    std::vector<ItemId> cands;  // condition 1 + condition 3 filtered
};

// Fresh personal contexts of the message: pairs of distinct leaves there
// must be chosen associable (condition 4).
struct FreshPair {
    int g1, g2;
};

}  // namespace

std::optional<TermId> determinable(Analyzer& az, const SystemState& s, AtomId actor, TermId m,
                                   DeterminableOpts opts) {
    const Model& mo = az.model();
    TermArena& a = az.arena();
    auto kbit = s.per_actor.find(actor);
    if (kbit == s.per_actor.end()) throw std::invalid_argument("unknown actor");
    KbAnalysis& an = az.analysis(kbit->second);
    Partition assoc = associability(mo, an);
    std::set<ItemId> det = determined_items(mo, a, s);

    auto positions = leaf_positions(a, m);
    std::vector<LeafGroup> groups;
    std::map<ItemId, int> group_of;
    for (auto& [path, lt] : positions) {
        ItemId q = a.node(lt).leaf;
        auto [pos, fresh] = group_of.emplace(q, (int)groups.size());
        if (fresh) groups.push_back(LeafGroup{q, {}, {}});
        groups[pos->second].positions.push_back(path);
    }

    // Candidate substitutions per distinct leaf.
    for (LeafGroup& g : groups) {
        const ContextItem& item = mo.items[g.leaf];
        if (det.count(g.leaf)) {
            g.cands = {g.leaf};  // condition 1
            continue;
        }
        std::vector<ItemId> reps = mo.reps_of_atom(item.atom);
        if (item.kind != Kind::NonPersonal) {
            // Condition 3: when the context is already in use, the chosen item
            // must be associable to a determined item there.
            std::vector<ItemId> anchors;
            for (ItemId e : det) {
                const ContextItem& ei = mo.items[e];
                if (ei.kind != Kind::Identifier && ei.kind != Kind::Data) continue;
                if (ei.ctx.profile != item.ctx.profile) continue;
                if (!opts.cond3_any_domain && ei.ctx.domain != item.ctx.domain) continue;
                anchors.push_back(e);
            }
            if (!anchors.empty()) {
                std::vector<ItemId> keep;
                for (ItemId q2 : reps)
                    for (ItemId e : anchors)
                        if (assoc.same(q2, e)) { keep.push_back(q2); break; }
                reps = std::move(keep);
            }
        }
        g.cands = std::move(reps);
        if (g.cands.empty()) return std::nullopt;
    }

    // Condition 4 applies between distinct leaves of a personal context
    // nobody has used yet.
    std::vector<FreshPair> pairs;
    for (int i = 0; i < (int)groups.size(); ++i) {
        const ContextItem& ii = mo.items[groups[i].leaf];
        if (ii.kind == Kind::NonPersonal) continue;
        bool in_use = false;
        for (ItemId e : det) {
            const ContextItem& ei = mo.items[e];
            if ((ei.kind == Kind::Identifier || ei.kind == Kind::Data) && ei.ctx == ii.ctx) {
                in_use = true;
                break;
            }
        }
        if (in_use) continue;
        for (int j = i + 1; j < (int)groups.size(); ++j)
            if (mo.items[groups[j].leaf].ctx == ii.ctx) pairs.push_back(FreshPair{i, j});
    }

    // Enumerate per-group evidence-component targets, then look for a
    // derivable message matching them, then fix concrete picks.
    std::vector<std::vector<int>> comp_options(groups.size());
    for (size_t i = 0; i < groups.size(); ++i) {
        std::vector<int> cs;
        for (ItemId q : groups[i].cands) cs.push_back(an.component_of(q));
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        comp_options[i] = std::move(cs);
    }

    std::vector<int> chosen(groups.size(), -1);
    std::optional<TermId> found;

    auto assemble = [&](const std::vector<ItemId>& picks) {
        std::map<ItemId, TermId> subst;
        for (size_t i = 0; i < groups.size(); ++i) subst[groups[i].leaf] = a.ctx_leaf(picks[i]);
        std::function<TermId(TermId)> rebuild = [&](TermId t) -> TermId {
            const TermNode n = a.node(t);
            if (n.ctor == Ctor::Leaf) return subst.at(n.leaf);
            if (n.ctor == Ctor::Empty) return t;
            std::vector<TermId> kids;
            for (TermId k : n.kids) kids.push_back(rebuild(k));
            return a.make(n.ctor, std::move(kids));
        };
        return rebuild(m);
    };

    std::function<bool(size_t, std::vector<ItemId>&)> pick_rec =
        [&](size_t gi, std::vector<ItemId>& picks) -> bool {
        if (gi == groups.size()) {
            for (const FreshPair& p : pairs)
                if (!assoc.same(picks[p.g1], picks[p.g2])) return false;
            TermId n = assemble(picks);
            if (!an.derivable(n)) return false;
            found = n;
            return true;
        }
        for (ItemId q : groups[gi].cands) {
            if (an.component_of(q) != chosen[gi]) continue;
            picks.push_back(q);
            if (pick_rec(gi + 1, picks)) return true;
            picks.pop_back();
        }
        return false;
    };

    std::function<bool(size_t)> comp_rec = [&](size_t gi) -> bool {
        if (gi == groups.size()) {
            std::map<Path, int> targets;
            for (size_t i = 0; i < groups.size(); ++i)
                for (const Path& p : groups[i].positions) targets[p] = chosen[i];
            if (an.find_derivable_in_components(m, targets) == kNoTerm) return false;
            std::vector<ItemId> picks;
            return pick_rec(0, picks);
        }
        for (int c : comp_options[gi]) {
            chosen[gi] = c;
            if (comp_rec(gi + 1)) return true;
        }
        return false;
    };

    comp_rec(0);
    return found;
}

StepValidity transmission_valid(Analyzer& az, const SystemState& s, const Transmission& t,
                                int step_index, DeterminableOpts opts) {
    const Model& mo = az.model();
    TermArena& a = az.arena();
    AtomId pa = address_subject(mo, a, t.sender);
    AtomId pb = address_subject(mo, a, t.receiver);

    StepValidity sv;
    sv.step = step_index;

    auto check = [&](AtomId actor, std::vector<TermId> parts) {
        if (parts.empty()) return;
        PartyCheck c;
        c.actor = actor;
        c.required = parts.size() == 1 ? parts[0] : a.make(Ctor::Cat, std::move(parts));
        auto w = determinable(az, s, actor, c.required, opts);
        c.ok = w.has_value();
        if (w) c.witness = *w;
        sv.checks.push_back(c);
        if (!c.ok) sv.valid = false;
    };

    const TermNode& pn = a.node(t.payload);
    switch (t.type) {
        case TxType::Send:
            check(pa, {t.sender, t.receiver, t.payload});
            break;
        case TxType::ZkSession: {
            if (pn.ctor != Ctor::Zk) throw std::invalid_argument("zk session payload is not a zk term");
            const TermNode& r = a.node(pn.kids[3]);
            if (r.ctor != Ctor::Cat || r.kids.size() != 2)
                throw std::invalid_argument("zk randomness must pair prover and verifier parts");
            check(pa, {t.sender, t.receiver, pn.kids[0], r.kids[0]});
            check(pb, {r.kids[1]});
            break;
        }
        case TxType::IcredSession: {
            if (pn.ctor != Ctor::Icred)
                throw std::invalid_argument("icred session payload is not an icred term");
            const TermNode& r = a.node(pn.kids[3]);
            if (r.ctor != Ctor::Cat || r.kids.size() != 7)
                throw std::invalid_argument("icred randomness must have seven parts");
            TermId pk = a.make(Ctor::Pk, {pn.kids[1]});
            check(pa, {t.sender, t.receiver, pk, pn.kids[0], r.kids[0], r.kids[1], r.kids[2],
                       r.kids[6]});
            check(pb, {pk, pn.kids[1], pn.kids[2], r.kids[3], r.kids[4], r.kids[5]});
            break;
        }
    }
    return sv;
}

std::pair<SystemState, ValidityReport> evolve(Analyzer& az, SystemState s, const Trace& tr,
                                              bool check_validity, DeterminableOpts opts) {
    ValidityReport rep;
    for (size_t i = 0; i < tr.steps.size(); ++i) {
        if (check_validity) {
            StepValidity sv = transmission_valid(az, s, tr.steps[i], (int)i, opts);
            if (!sv.valid) rep.valid = false;
            rep.steps.push_back(std::move(sv));
        }
        s = evolve_step(az, s, tr.steps[i]);
    }
    return {std::move(s), std::move(rep)};
}

}  // namespace privlens
