#include "view.hpp"

#include <algorithm>
#include <stdexcept>

namespace privlens {

bool Partition::same(ItemId a, ItemId b) const {
    auto x = rep.find(a), y = rep.find(b);
    if (x == rep.end() || y == rep.end()) return a == b;
    return x->second == y->second;
}

std::vector<std::vector<ItemId>> Partition::classes() const {
    std::map<int, std::vector<ItemId>> by_rep;
    for (const auto& [it, r] : rep) by_rep[r].push_back(it);
    std::vector<std::vector<ItemId>> out;
    for (auto& [r, cls] : by_rep) {
        std::sort(cls.begin(), cls.end());
        out.push_back(std::move(cls));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

std::vector<ItemId> Partition::class_of(ItemId a) const {
    std::vector<ItemId> out;
    auto x = rep.find(a);
    if (x == rep.end()) return {a};
    for (const auto& [it, r] : rep)
        if (r == x->second) out.push_back(it);
    return out;
}

bool Partition::refines(const Partition& other) const {
    for (const auto& cls : classes())
        for (ItemId it : cls)
            if (!other.same(cls.front(), it)) return false;
    return true;
}

namespace {
struct Uf {
    std::vector<int> p;
    explicit Uf(size_t n) : p(n) { for (size_t i = 0; i < n; ++i) p[i] = (int)i; }
    int find(int x) { while (p[x] != x) x = p[x] = p[p[x]]; return x; }
    void join(int a, int b) {
        a = find(a); b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};
}  // namespace

Partition associability(const Model& mo, KbAnalysis& an) {
    Uf uf(mo.items.size());

    // Rule 2: one context, one subject.
    std::map<ContextRef, ItemId> first_in_ctx;
    for (ItemId i = 0; i < (ItemId)mo.items.size(); ++i) {
        if (mo.items[i].kind == Kind::NonPersonal) continue;
        auto [pos, fresh] = first_in_ctx.emplace(mo.items[i].ctx, i);
        if (!fresh) uf.join(pos->second, i);
    }

    // Rule 1: known context entities of one entity.
    std::map<AtomId, ItemId> first_entity;
    for (ItemId e : an.kb_entities()) {
        auto [pos, fresh] = first_entity.emplace(mo.items[e].atom, e);
        if (!fresh) uf.join(pos->second, e);
    }

    // Rule 3: identifiers joined by evidence of content equivalence.
    std::map<int, ItemId> first_in_comp;
    for (ItemId i = 0; i < (ItemId)mo.items.size(); ++i) {
        if (mo.items[i].kind != Kind::Identifier) continue;
        int c = an.component_of(i);
        auto [pos, fresh] = first_in_comp.emplace(c, i);
        if (!fresh) uf.join(pos->second, i);
    }

    Partition out;
    for (ItemId i = 0; i < (ItemId)mo.items.size(); ++i)
        if (mo.items[i].kind != Kind::NonPersonal) out.rep[i] = uf.find(i);
    return out;
}

bool View::detects(ItemId it) const {
    return std::binary_search(detectable.begin(), detectable.end(), it);
}

View view_of(const Model& mo, KbAnalysis& an) {
    View v;
    v.assoc = associability(mo, an);
    for (ItemId e : an.kb_entities()) v.detectable.push_back(e);
    for (ItemId i = 0; i < (ItemId)mo.items.size(); ++i) {
        Kind k = mo.items[i].kind;
        if (k != Kind::Identifier && k != Kind::Data) continue;
        if (an.derivable(an.arena().ctx_leaf(i))) v.detectable.push_back(i);
    }
    std::sort(v.detectable.begin(), v.detectable.end());
    v.detectable.erase(std::unique(v.detectable.begin(), v.detectable.end()),
                       v.detectable.end());
    return v;
}

KnowledgeBase coalition_kb(const std::map<AtomId, KnowledgeBase>& per_actor,
                           const std::vector<AtomId>& actors, const Model& mo) {
    std::vector<AtomId> sorted = actors;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::string owner;
    std::vector<TermId> elems;
    for (AtomId a : sorted) {
        auto it = per_actor.find(a);
        if (it == per_actor.end()) throw std::invalid_argument("unknown actor in coalition");
        if (!owner.empty()) owner += ",";
        owner += mo.atoms[a].name;
        elems.insert(elems.end(), it->second.elems.begin(), it->second.elems.end());
    }
    return KnowledgeBase::of(std::move(owner), std::move(elems));
}

bool ctx_associable(const Model& mo, const View& v, const ContextRef& c1, const ContextRef& c2) {
    auto i1 = mo.items_in_ctx(c1);
    auto i2 = mo.items_in_ctx(c2);
    for (ItemId a : i1) {
        if (mo.items[a].kind == Kind::NonPersonal) continue;
        for (ItemId b : i2) {
            if (mo.items[b].kind == Kind::NonPersonal) continue;
            if (v.assoc.same(a, b)) return true;
        }
    }
    return false;
}

}  // namespace privlens
