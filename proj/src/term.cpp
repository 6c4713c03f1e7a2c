#include "term.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace privlens {

const char* ctor_name(Ctor c) {
    switch (c) {
        case Ctor::Leaf: return "leaf";
        case Ctor::Empty: return "empty";
        case Ctor::Pk: return "pk";
        case Ctor::Cat: return "cat";
        case Ctor::Hash: return "hash";
        case Ctor::Senc: return "senc";
        case Ctor::Aenc: return "aenc";
        case Ctor::Sign: return "sign";
        case Ctor::Laenc: return "laenc";
        case Ctor::Aka: return "aka";
        case Ctor::Cred: return "cred";
        case Ctor::Zk: return "zk";
        case Ctor::Icred: return "icred";
    }
    return "?";
}

int ctor_arity(Ctor c) {
    switch (c) {
        case Ctor::Leaf:
        case Ctor::Empty: return 0;
        case Ctor::Pk:
        case Ctor::Hash: return 1;
        case Ctor::Cat: return -1;
        case Ctor::Senc:
        case Ctor::Aenc:
        case Ctor::Sign: return 2;
        case Ctor::Laenc: return 3;
        case Ctor::Aka:
        case Ctor::Cred:
        case Ctor::Zk:
        case Ctor::Icred: return 4;
    }
    return 0;
}

size_t TermArena::KeyHash::operator()(const Key& k) const {
    size_t h = std::hash<int>()((int)k.ctor * 64 + (int)k.space);
    h = h * 1315423911u ^ std::hash<int32_t>()(k.leaf);
    for (TermId t : k.kids) h = h * 2654435761u ^ std::hash<TermId>()(t);
    return h;
}

TermId TermArena::intern(Key k) {
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    TermId id = (TermId)nodes_.size();
    nodes_.push_back(TermNode{k.ctor, k.space, k.leaf, k.kids});
    index_.emplace(std::move(k), id);
    return id;
}

TermId TermArena::ctx_leaf(ItemId item) { return intern({Ctor::Leaf, LeafSpace::CtxItem, item, {}}); }
TermId TermArena::atom_leaf(AtomId atom) { return intern({Ctor::Leaf, LeafSpace::Atom, atom, {}}); }
TermId TermArena::class_leaf(int cls) { return intern({Ctor::Leaf, LeafSpace::Class, cls, {}}); }
TermId TermArena::empty(LeafSpace space) { return intern({Ctor::Empty, space, -1, {}}); }

TermId TermArena::make(Ctor c, std::vector<TermId> kids, const Model* m) {
    if (c == Ctor::Leaf) throw std::invalid_argument("make() does not build leaves");
    int ar = ctor_arity(c);
    if (ar >= 0 && (int)kids.size() != ar)
        throw std::invalid_argument(std::string(ctor_name(c)) + ": wrong arity");
    if (c == Ctor::Cat && kids.size() < 2)
        throw std::invalid_argument("cat: needs at least two parts");
    if (m) {
        for (TermId k : kids) {
            const TermNode& n = nodes_[k];
            if (n.ctor == Ctor::Leaf && n.space == LeafSpace::CtxItem &&
                m->items[n.leaf].kind == Kind::Entity)
                throw std::invalid_argument("entity item inside a message: " + m->item_str(n.leaf));
        }
    }
    return intern({c, LeafSpace::CtxItem, -1, std::move(kids)});
}

std::optional<TermId> subterm_at(const TermArena& a, TermId m, const Path& z) {
    TermId cur = m;
    for (int ix : z) {
        const TermNode& n = a.node(cur);
        if (ix < 0 || ix >= (int)n.kids.size()) return std::nullopt;
        cur = n.kids[ix];
    }
    return cur;
}

static void walk(const TermArena& a, TermId m, Path& p,
                 std::vector<std::pair<Path, TermId>>& out, bool leaves_only) {
    const TermNode& n = a.node(m);
    if (!leaves_only || n.ctor == Ctor::Leaf) out.emplace_back(p, m);
    for (int i = 0; i < (int)n.kids.size(); ++i) {
        p.push_back(i);
        walk(a, n.kids[i], p, out, leaves_only);
        p.pop_back();
    }
}

std::vector<std::pair<Path, TermId>> enumerate_subterms(const TermArena& a, TermId m) {
    std::vector<std::pair<Path, TermId>> out;
    Path p;
    walk(a, m, p, out, false);
    return out;
}

std::vector<std::pair<Path, TermId>> leaf_positions(const TermArena& a, TermId m) {
    std::vector<std::pair<Path, TermId>> out;
    Path p;
    walk(a, m, p, out, true);
    return out;
}

bool occurs_in(const TermArena& a, TermId needle, TermId hay) {
    if (needle == hay) return true;
    for (TermId k : a.node(hay).kids)
        if (occurs_in(a, needle, k)) return true;
    return false;
}

void collect_items(const TermArena& a, TermId m, std::vector<ItemId>& out) {
    const TermNode& n = a.node(m);
    if (n.ctor == Ctor::Leaf) {
        if (n.space == LeafSpace::CtxItem) out.push_back(n.leaf);
        return;
    }
    for (TermId k : n.kids) collect_items(a, k, out);
}

TermId replace_at(TermArena& a, TermId m, const Path& z, TermId repl) {
    if (z.empty()) return repl;
    const TermNode n = a.node(m);  // copy: make() may reallocate
    std::vector<TermId> kids = n.kids;
    Path rest(z.begin() + 1, z.end());
    kids[z[0]] = replace_at(a, kids[z[0]], rest, repl);
    return a.make(n.ctor, std::move(kids));
}

int term_depth(const TermArena& a, TermId m) {
    const TermNode& n = a.node(m);
    int d = 0;
    for (TermId k : n.kids) d = std::max(d, term_depth(a, k));
    return d + 1;
}

TermId sigma_lift(const Model& mo, TermArena& a, TermId m) {
    const TermNode n = a.node(m);
    if (n.ctor == Ctor::Leaf) {
        if (n.space != LeafSpace::CtxItem)
            throw std::invalid_argument("sigma_lift: leaf not in the context layer");
        if (n.leaf < 0 || n.leaf >= (ItemId)mo.items.size())
            throw std::out_of_range("sigma_lift: unknown item");
        return a.atom_leaf(mo.items[n.leaf].atom);
    }
    if (n.ctor == Ctor::Empty) return a.empty(LeafSpace::Atom);
    std::vector<TermId> kids;
    kids.reserve(n.kids.size());
    for (TermId k : n.kids) kids.push_back(sigma_lift(mo, a, k));
    return a.make(n.ctor, std::move(kids));
}

TermId content_class(const Model& mo, TermArena& a, TermId m) {
    const TermNode n = a.node(m);
    if (n.ctor == Ctor::Leaf) {
        AtomId at;
        if (n.space == LeafSpace::CtxItem) at = mo.items[n.leaf].atom;
        else if (n.space == LeafSpace::Atom) at = n.leaf;
        else return m;
        if (mo.atoms[at].kind == Kind::Entity)
            throw std::invalid_argument("content_class: entity has no contents");
        return a.class_leaf(mo.atoms[at].content_class);
    }
    if (n.ctor == Ctor::Empty) return a.empty(LeafSpace::Class);
    std::vector<TermId> kids;
    kids.reserve(n.kids.size());
    for (TermId k : n.kids) kids.push_back(content_class(mo, a, k));
    return a.make(n.ctor, std::move(kids));
}

bool equivalent(const Model& mo, TermArena& a, TermId m, TermId n) {
    return sigma_lift(mo, a, m) == sigma_lift(mo, a, n);
}

bool content_equivalent(const Model& mo, TermArena& a, TermId m, TermId n) {
    return content_class(mo, a, m) == content_class(mo, a, n);
}

std::string term_str(const Model& mo, const TermArena& a, TermId m) {
    const TermNode& n = a.node(m);
    switch (n.ctor) {
        case Ctor::Leaf:
            if (n.space == LeafSpace::CtxItem) return mo.item_str(n.leaf);
            if (n.space == LeafSpace::Atom) return mo.atoms[n.leaf].name;
            return "#" + mo.class_names[n.leaf];
        case Ctor::Empty: return "empty";
        default: break;
    }
    std::string s = ctor_name(n.ctor);
    s += '(';
    for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += ", ";
        s += term_str(mo, a, n.kids[i]);
    }
    s += ')';
    return s;
}

bool term_less(const Model& mo, const TermArena& a, TermId x, TermId y) {
    if (x == y) return false;
    return term_str(mo, a, x) < term_str(mo, a, y);
}

}  // namespace privlens
