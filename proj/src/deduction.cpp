#include "deduction.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace privlens {

KnowledgeBase KnowledgeBase::of(std::string owner, std::vector<TermId> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return KnowledgeBase{std::move(owner), std::move(elems)};
}

KnowledgeBase KnowledgeBase::with(const std::vector<TermId>& more) const {
    std::vector<TermId> all = elems;
    all.insert(all.end(), more.begin(), more.end());
    return of(owner, std::move(all));
}

bool KnowledgeBase::contains(TermId t) const {
    return std::binary_search(elems.begin(), elems.end(), t);
}

void Derivation::collect_rules(std::set<std::string>& out) const {
    out.insert(rule);
    for (const Derivation& p : premises) p.collect_rules(out);
}

std::string Derivation::dump(const Model& mo, const TermArena& a, int indent) const {
    std::string s(indent * 2, ' ');
    s += rule + ": " + term_str(mo, a, concl) + "\n";
    for (const Derivation& p : premises) s += p.dump(mo, a, indent + 1);
    return s;
}

KbAnalysis::KbAnalysis(const Model& mo, TermArena& arena, KnowledgeBase kb)
    : mo_(mo), a_(arena), kb_(std::move(kb)) {
    for (TermId t : kb_.elems) {
        const TermNode& n = a_.node(t);
        if (n.ctor == Ctor::Leaf && mo_.items[n.leaf].kind == Kind::Entity) continue;
        std::vector<ItemId> its;
        collect_items(a_, t, its);
        occurring_.insert(its.begin(), its.end());
    }
    build_contents_closure();
    build_analysis_closure();
}

std::vector<ItemId> KbAnalysis::kb_entities() const {
    std::vector<ItemId> out;
    for (TermId t : kb_.elems) {
        const TermNode& n = a_.node(t);
        if (n.ctor == Ctor::Leaf && mo_.items[n.leaf].kind == Kind::Entity)
            out.push_back(n.leaf);
    }
    return out;
}

const std::set<ItemId>& KbAnalysis::occurring_items() { return occurring_; }

// ---------------------------------------------------------------- contents

// Whether a contents node has the pk-keyed shape openable with the bare key.
bool KbAnalysis::is_open_shape(TermId t, int* label_kid) const {
    const TermNode& n = a_.node(t);
    (void)label_kid;
    return !n.kids.empty() && a_.node(n.kids[0]).ctor == Ctor::Pk;
}

void KbAnalysis::build_contents_closure() {
    cont_known_.insert(a_.empty(LeafSpace::Class));
    for (TermId t : kb_.elems) {
        const TermNode& n = a_.node(t);
        if (n.ctor == Ctor::Leaf && mo_.items[n.leaf].kind == Kind::Entity) continue;
        cont_known_.insert(content_class(mo_, a_, t));
    }

    // psi at the contents layer: class -> image classes, taken from the
    // context-layer definedness of each property.
    std::map<int, std::set<int>> psi_classes;
    for (const Property& p : mo_.props)
        for (const auto& [src, img] : p.item_map)
            psi_classes[mo_.atom_of(src).content_class].insert(mo_.atom_of(img).content_class);

    bool changed = true;
    while (changed) {
        changed = false;
        cder_memo_.clear();
        std::vector<TermId> snap(cont_known_.begin(), cont_known_.end());
        auto put = [&](TermId c) {
            if (cont_known_.insert(c).second) changed = true;
        };
        for (TermId t : snap) {
            const TermNode& n = a_.node(t);
            switch (n.ctor) {
                case Ctor::Leaf:
                    if (n.space == LeafSpace::Class)
                        for (int img : psi_classes[n.leaf]) put(a_.class_leaf(img));
                    break;
                case Ctor::Cat:
                    for (TermId k : n.kids) put(k);
                    break;
                case Ctor::Senc:
                    if (cder(n.kids[0])) put(n.kids[1]);
                    break;
                case Ctor::Aenc:
                    if (is_open_shape(t) && cder(a_.node(n.kids[0]).kids[0])) put(n.kids[1]);
                    break;
                case Ctor::Laenc:
                    put(n.kids[2]);
                    if (is_open_shape(t) && cder(a_.node(n.kids[0]).kids[0])) put(n.kids[1]);
                    break;
                case Ctor::Zk: {
                    put(n.kids[2]);
                    put(n.kids[1]);
                    const TermNode& r = a_.node(n.kids[3]);
                    if (r.ctor == Ctor::Cat && r.kids.size() == 2 && cder(r.kids[0]))
                        put(n.kids[0]);
                    break;
                }
                case Ctor::Icred: {
                    TermId user = n.kids[0], key = n.kids[1], attrs = n.kids[2];
                    const TermNode& r = a_.node(n.kids[3]);
                    if (r.ctor != Ctor::Cat || r.kids.size() != 7) break;
                    put(a_.make(Ctor::Pk, {key}));
                    put(attrs);
                    put(a_.make(Ctor::Hash, {a_.make(Ctor::Cat, {user, r.kids[0]})}));
                    if (cder(r.kids[1]))
                        put(a_.make(Ctor::Cred,
                                    {user, key, attrs, a_.make(Ctor::Cat, {r.kids[1], r.kids[4]})}));
                    if (cder(r.kids[2])) { put(user); put(r.kids[0]); put(r.kids[1]); }
                    if (cder(r.kids[5])) put(key);
                    break;
                }
                default:
                    break;
            }
        }
    }
    cder_memo_.clear();
}

bool KbAnalysis::cder(TermId c) {
    if (cont_known_.count(c)) return true;
    auto memo = cder_memo_.find(c);
    if (memo != cder_memo_.end()) return memo->second;
    const TermNode& n = a_.node(c);
    bool ok = false;
    switch (n.ctor) {
        case Ctor::Leaf: ok = false; break;
        case Ctor::Empty: ok = true; break;
        case Ctor::Aka: {
            bool fwd = cder(n.kids[0]) && cder(a_.make(Ctor::Pk, {n.kids[2]}));
            bool bwd = !fwd && cder(a_.make(Ctor::Pk, {n.kids[0]})) && cder(n.kids[2]);
            ok = (fwd || bwd) && cder(n.kids[1]) && cder(n.kids[3]);
            break;
        }
        default:
            ok = true;
            for (TermId k : n.kids)
                if (!cder(k)) { ok = false; break; }
            break;
    }
    cder_memo_[c] = ok;
    return ok;
}

bool KbAnalysis::contents_derivable(TermId contents_term) { return cder(contents_term); }

TermId KbAnalysis::cont_witness(TermId c) {
    TermId w = kNoTerm;
    auto byc = by_contents_.find(c);
    if (byc != by_contents_.end()) {
        // A term whose derivation is being built right now cannot witness
        // its own prerequisite.
        for (TermId t : byc->second)
            if (!tree_stack_.count(t)) { w = t; break; }
    }
    if (w == kNoTerm) {
        const TermNode& n = a_.node(c);
        switch (n.ctor) {
            case Ctor::Leaf: {
                auto ls = leaves_by_class_.find(n.leaf);
                if (ls != leaves_by_class_.end())
                    for (ItemId q : ls->second)
                        if (!tree_stack_.count(a_.ctx_leaf(q))) {
                            w = a_.ctx_leaf(q);
                            break;
                        }
                break;
            }
            case Ctor::Empty: w = a_.empty(LeafSpace::CtxItem); break;
            case Ctor::Aka: {
                bool fwd = cder(n.kids[0]) && cder(a_.make(Ctor::Pk, {n.kids[2]}));
                TermId k1, k2;
                if (fwd) {
                    k1 = cont_witness(n.kids[0]);
                    TermId p2 = cont_witness(a_.make(Ctor::Pk, {n.kids[2]}));
                    k2 = p2 == kNoTerm ? kNoTerm : a_.node(p2).kids[0];
                } else {
                    TermId p1 = cont_witness(a_.make(Ctor::Pk, {n.kids[0]}));
                    k1 = p1 == kNoTerm ? kNoTerm : a_.node(p1).kids[0];
                    k2 = cont_witness(n.kids[2]);
                }
                TermId n1 = cont_witness(n.kids[1]), n2 = cont_witness(n.kids[3]);
                if (k1 != kNoTerm && k2 != kNoTerm && n1 != kNoTerm && n2 != kNoTerm)
                    w = a_.make(Ctor::Aka, {k1, n1, k2, n2});
                break;
            }
            default: {
                std::vector<TermId> kids;
                bool all = true;
                for (TermId k : n.kids) {
                    TermId kw = cont_witness(k);
                    if (kw == kNoTerm) { all = false; break; }
                    kids.push_back(kw);
                }
                if (all) w = a_.make(n.ctor, std::move(kids));
                break;
            }
        }
    }
    return w;
}

// ---------------------------------------------------------------- analysis

void KbAnalysis::analysis_add(TermId t, Prov p) {
    if (analyzed_.count(t)) return;
    analyzed_.emplace(t, p);
    analysis_order_.push_back(t);
    by_contents_[content_class(mo_, a_, t)].push_back(t);
    const TermNode& n = a_.node(t);
    if (n.ctor == Ctor::Leaf)
        leaves_by_class_[mo_.atom_of(n.leaf).content_class].push_back(n.leaf);
}

void KbAnalysis::build_analysis_closure() {
    analysis_add(a_.empty(LeafSpace::CtxItem), Prov{"empty"});
    for (TermId t : kb_.elems) {
        const TermNode& n = a_.node(t);
        if (n.ctor == Ctor::Leaf && mo_.items[n.leaf].kind == Kind::Entity) continue;
        analysis_add(t, Prov{"0"});
    }

    size_t next = 0;
    while (next < analysis_order_.size()) {
        TermId t = analysis_order_[next++];
        const TermNode& n = a_.node(t);
        auto ccls = [&](TermId x) { return content_class(mo_, a_, x); };
        switch (n.ctor) {
            case Ctor::Leaf: {
                for (auto [prop, img] : mo_.prop_images(n.leaf))
                    analysis_add(a_.ctx_leaf(img), Prov{"Epsi", t});
                break;
            }
            case Ctor::Cat:
                for (size_t i = 0; i < n.kids.size(); ++i)
                    analysis_add(n.kids[i], Prov{i == 0 ? "EC" : "EC'", t});
                break;
            case Ctor::Senc: {
                TermId key = n.kids[0], body = n.kids[1];
                if (cder(ccls(key))) {
                    analysis_add(key, Prov{"TE", t, kNoTerm, ccls(key)});
                    analysis_add(body, Prov{"EE", t, key});
                }
                break;
            }
            case Ctor::Aenc: {
                const TermNode& kn = a_.node(n.kids[0]);
                if (kn.ctor == Ctor::Pk) {
                    TermId sk = kn.kids[0];
                    if (cder(ccls(sk))) {
                        analysis_add(sk, Prov{"TA", t, kNoTerm, ccls(sk)});
                        analysis_add(n.kids[1], Prov{"EA", t, sk});
                    }
                }
                break;
            }
            case Ctor::Sign: {
                TermId key = n.kids[0], body = n.kids[1];
                TermId pk = a_.make(Ctor::Pk, {key});
                TermId concl = a_.make(Ctor::Cat, {pk, body});
                if (cder(ccls(pk)) && cder(ccls(body)))
                    analysis_add(concl, Prov{"TS", t, kNoTerm, ccls(concl)});
                break;
            }
            case Ctor::Laenc: {
                analysis_add(n.kids[2], Prov{"EL", t});
                const TermNode& kn = a_.node(n.kids[0]);
                if (kn.ctor == Ctor::Pk) {
                    TermId sk = kn.kids[0];
                    if (cder(ccls(sk))) {
                        analysis_add(sk, Prov{"TL", t, kNoTerm, ccls(sk)});
                        analysis_add(n.kids[1], Prov{"EL'", t, sk});
                    }
                }
                break;
            }
            case Ctor::Zk: {
                analysis_add(n.kids[2], Prov{"EZ1", t});
                analysis_add(n.kids[1], Prov{"EZ3", t});
                const TermNode& r = a_.node(n.kids[3]);
                if (r.ctor == Ctor::Cat && r.kids.size() == 2) {
                    TermId np = r.kids[0];
                    if (cder(ccls(np))) {
                        analysis_add(np, Prov{"TZ1", t, kNoTerm, ccls(np)});
                        analysis_add(n.kids[0], Prov{"EZ2", t, np, kNoTerm, true});
                    }
                }
                break;
            }
            case Ctor::Cred: {
                TermId pk = a_.make(Ctor::Pk, {n.kids[1]});
                TermId concl = a_.make(Ctor::Cat, {pk, n.kids[0], n.kids[2]});
                if (cder(ccls(pk)) && cder(ccls(n.kids[0])) && cder(ccls(n.kids[2])))
                    analysis_add(concl, Prov{"TR", t, kNoTerm, ccls(concl)});
                break;
            }
            case Ctor::Icred: {
                TermId user = n.kids[0], key = n.kids[1], attrs = n.kids[2];
                const TermNode& r = a_.node(n.kids[3]);
                if (r.ctor != Ctor::Cat || r.kids.size() != 7) break;
                TermId n1 = r.kids[0], n2 = r.kids[1], n3 = r.kids[2];
                TermId n5 = r.kids[4], n6 = r.kids[5];
                TermId pk = a_.make(Ctor::Pk, {key});
                TermId commit = a_.make(Ctor::Hash, {a_.make(Ctor::Cat, {user, n1})});
                analysis_add(a_.make(Ctor::Cat, {pk, attrs, commit}), Prov{"EI4", t});
                if (cder(ccls(n2))) {
                    analysis_add(n2, Prov{"TI3", t, kNoTerm, ccls(n2)});
                    TermId cred = a_.make(Ctor::Cred, {user, key, attrs, a_.make(Ctor::Cat, {n2, n5})});
                    analysis_add(cred, Prov{"EI1", t, n2, kNoTerm, true});
                }
                if (cder(ccls(n3))) {
                    analysis_add(n3, Prov{"TI4", t, kNoTerm, ccls(n3)});
                    analysis_add(a_.make(Ctor::Cat, {user, n1, n2}), Prov{"EI2", t, n3, kNoTerm, true});
                }
                if (cder(ccls(n6))) {
                    analysis_add(n6, Prov{"TI5", t, kNoTerm, ccls(n6)});
                    analysis_add(key, Prov{"EI3", t, n6, kNoTerm, true});
                }
                if (cder(ccls(user)) && cder(ccls(n2))) {
                    TermId concl = a_.make(Ctor::Cat, {user, n2});
                    analysis_add(concl, Prov{"TI1", t, kNoTerm, ccls(concl)});
                }
                TermId cred = a_.make(Ctor::Cred, {user, key, attrs, a_.make(Ctor::Cat, {n2, n5})});
                if (cder(ccls(cred))) analysis_add(cred, Prov{"TI2", t, kNoTerm, ccls(cred)});
                break;
            }
            default:
                break;
        }
    }
}

bool KbAnalysis::derivable_no_ca(TermId m) {
    if (analyzed_.count(m)) return true;
    const TermNode& n = a_.node(m);
    switch (n.ctor) {
        case Ctor::Leaf: return false;
        case Ctor::Empty: return true;
        case Ctor::Aka: {
            bool fwd = derivable_no_ca(n.kids[0]) && derivable_no_ca(a_.make(Ctor::Pk, {n.kids[2]}));
            bool bwd = !fwd && derivable_no_ca(a_.make(Ctor::Pk, {n.kids[0]})) && derivable_no_ca(n.kids[2]);
            return (fwd || bwd) && derivable_no_ca(n.kids[1]) && derivable_no_ca(n.kids[3]);
        }
        default:
            for (TermId k : n.kids)
                if (!derivable_no_ca(k)) return false;
            return true;
    }
}

Derivation KbAnalysis::tree_for_analyzed(TermId t) {
    const Prov& p = analyzed_.at(t);
    std::string rule = p.rule;
    Derivation d{rule, t, {}};
    if (rule == "0" || rule == "empty") return d;
    struct StackGuard {
        std::set<TermId>& s;
        TermId t;
        StackGuard(std::set<TermId>& s, TermId t) : s(s), t(t) { s.insert(t); }
        ~StackGuard() { s.erase(t); }
    } guard(tree_stack_, t);
    if (p.premise_is_cat) {
        // Premise is read as the concatenation of src and extra.
        TermId cat = a_.make(Ctor::Cat, {p.src, p.extra});
        Derivation pr{"CC", cat, {tree_for_analyzed(p.src), tree_for_analyzed(p.extra)}};
        d.premises.push_back(std::move(pr));
        return d;
    }
    if (p.src != kNoTerm) d.premises.push_back(tree_for_analyzed(p.src));
    if (p.extra != kNoTerm) d.premises.push_back(tree_for_analyzed(p.extra));
    if (p.wit != kNoTerm) {
        TermId w = cont_witness(p.wit);
        assert(w != kNoTerm);
        auto wd = construct_tree(w);
        assert(wd);
        d.premises.push_back(std::move(*wd));
    }
    return d;
}

std::optional<Derivation> KbAnalysis::construct_tree(TermId m) {
    if (analyzed_.count(m)) return tree_for_analyzed(m);
    const TermNode& n = a_.node(m);
    auto kid_trees = [&](const std::vector<TermId>& ks) -> std::optional<std::vector<Derivation>> {
        std::vector<Derivation> out;
        for (TermId k : ks) {
            auto d = construct_tree(k);
            if (!d) return std::nullopt;
            out.push_back(std::move(*d));
        }
        return out;
    };
    switch (n.ctor) {
        case Ctor::Leaf: return std::nullopt;
        case Ctor::Empty: return Derivation{"empty", m, {}};
        case Ctor::Pk: {
            auto ks = kid_trees(n.kids);
            if (!ks) return std::nullopt;
            return Derivation{"CP", m, std::move(*ks)};
        }
        case Ctor::Cat: {
            auto ks = kid_trees(n.kids);
            if (!ks) return std::nullopt;
            return Derivation{"CC", m, std::move(*ks)};
        }
        case Ctor::Hash: {
            auto ks = kid_trees(n.kids);
            if (!ks) return std::nullopt;
            return Derivation{"CH", m, std::move(*ks)};
        }
        case Ctor::Senc:
        case Ctor::Aenc:
        case Ctor::Sign:
        case Ctor::Laenc: {
            auto ks = kid_trees(n.kids);
            if (!ks) return std::nullopt;
            const char* r = n.ctor == Ctor::Senc ? "CE"
                          : n.ctor == Ctor::Aenc ? "CA"
                          : n.ctor == Ctor::Sign ? "CS" : "CL";
            return Derivation{r, m, std::move(*ks)};
        }
        case Ctor::Aka: {
            bool fwd = derivable_no_ca(n.kids[0]) && derivable_no_ca(a_.make(Ctor::Pk, {n.kids[2]}));
            TermId pk_side = a_.make(Ctor::Pk, {fwd ? n.kids[2] : n.kids[0]});
            std::vector<TermId> parts = fwd
                ? std::vector<TermId>{n.kids[0], n.kids[1], pk_side, n.kids[3]}
                : std::vector<TermId>{pk_side, n.kids[1], n.kids[2], n.kids[3]};
            auto ks = kid_trees(parts);
            if (!ks) return std::nullopt;
            TermId cat = a_.make(Ctor::Cat, parts);
            Derivation pr{"CC", cat, std::move(*ks)};
            return Derivation{fwd ? "CG" : "CG'", m, {std::move(pr)}};
        }
        case Ctor::Cred:
        case Ctor::Zk:
        case Ctor::Icred: {
            // Construction reads its premises as one concatenation.
            std::vector<TermId> parts;
            if (n.ctor == Ctor::Zk) parts = n.kids;
            else parts = {n.kids[1], n.kids[0], n.kids[2], n.kids[3]};  // {k, m1, m2, n}
            auto ks = kid_trees(parts);
            if (!ks) return std::nullopt;
            TermId cat = a_.make(Ctor::Cat, parts);
            Derivation pr{"CC", cat, std::move(*ks)};
            const char* r = n.ctor == Ctor::Cred ? "CR" : n.ctor == Ctor::Zk ? "CZ" : "CI";
            return Derivation{r, m, {std::move(pr)}};
        }
    }
    return std::nullopt;
}

std::optional<Derivation> KbAnalysis::derive_no_ca(TermId m) {
    if (!derivable_no_ca(m)) return std::nullopt;
    return construct_tree(m);
}

// ---------------------------------------------------------------- evidence

int KbAnalysis::uf_find(int x) {
    while (uf_[x] != x) x = uf_[x] = uf_[uf_[x]];
    return x;
}

void KbAnalysis::uf_union(int x, int y) {
    x = uf_find(x); y = uf_find(y);
    if (x != y) uf_[std::max(x, y)] = std::min(x, y);
}

void KbAnalysis::add_edge(ItemId x, ItemId y, TermId m1, TermId m2) {
    for (const Edge& e : edges_[x])
        if (e.to == y) return;
    edges_[x].push_back(Edge{y, m1, m2});
    edges_[y].push_back(Edge{x, m2, m1});
    uf_union(x, y);
}

bool KbAnalysis::minimal_wrt(TermId nt, ItemId q) {
    TermId ql = a_.ctx_leaf(q);
    const TermNode& n = a_.node(nt);
    auto contains_q = [&](TermId t) { return occurs_in(a_, ql, t); };
    auto copen = [&](TermId key) { return cder(content_class(mo_, a_, key)); };
    switch (n.ctor) {
        case Ctor::Cat:
            for (TermId k : n.kids)
                if (contains_q(k)) return false;
            return true;
        case Ctor::Senc:
            return !copen(n.kids[0]) || (!contains_q(n.kids[0]) && !contains_q(n.kids[1]));
        case Ctor::Aenc: {
            const TermNode& kn = a_.node(n.kids[0]);
            if (kn.ctor != Ctor::Pk || !copen(kn.kids[0])) return true;
            return !contains_q(kn.kids[0]) && !contains_q(n.kids[1]);
        }
        case Ctor::Sign: {
            TermId pk = a_.make(Ctor::Pk, {n.kids[0]});
            if (!cder(content_class(mo_, a_, pk)) || !copen(n.kids[1])) return true;
            return !contains_q(pk) && !contains_q(n.kids[1]);
        }
        case Ctor::Laenc: {
            if (contains_q(n.kids[2])) return false;
            const TermNode& kn = a_.node(n.kids[0]);
            if (kn.ctor != Ctor::Pk || !copen(kn.kids[0])) return true;
            return !contains_q(kn.kids[0]) && !contains_q(n.kids[1]);
        }
        case Ctor::Zk: {
            if (contains_q(n.kids[2]) || contains_q(n.kids[1])) return false;
            const TermNode& r = a_.node(n.kids[3]);
            if (r.ctor == Ctor::Cat && r.kids.size() == 2 && copen(r.kids[0]))
                return !contains_q(r.kids[0]) && !contains_q(n.kids[0]);
            return true;
        }
        case Ctor::Cred: {
            TermId pk = a_.make(Ctor::Pk, {n.kids[1]});
            bool can = cder(content_class(mo_, a_, pk)) &&
                       cder(content_class(mo_, a_, n.kids[0])) &&
                       cder(content_class(mo_, a_, n.kids[2]));
            if (!can) return true;
            return !contains_q(pk) && !contains_q(n.kids[0]) && !contains_q(n.kids[2]);
        }
        case Ctor::Icred: {
            const TermNode& r = a_.node(n.kids[3]);
            if (r.ctor != Ctor::Cat || r.kids.size() != 7) return true;
            TermId commit = a_.make(Ctor::Hash, {a_.make(Ctor::Cat, {n.kids[0], r.kids[0]})});
            if (contains_q(a_.make(Ctor::Pk, {n.kids[1]})) || contains_q(n.kids[2]) ||
                contains_q(commit))
                return false;
            if (copen(r.kids[1]) && (contains_q(r.kids[1]) || contains_q(n.kids[0]) ||
                                     contains_q(r.kids[4])))
                return false;
            if (copen(r.kids[2]) && (contains_q(n.kids[0]) || contains_q(r.kids[0]) ||
                                     contains_q(r.kids[1]) || contains_q(r.kids[2])))
                return false;
            if (copen(r.kids[5]) && (contains_q(n.kids[1]) || contains_q(r.kids[5])))
                return false;
            return true;
        }
        default:
            return true;
    }
}

bool KbAnalysis::leaf_ok(ItemId pat, const Path& at, const LeafSpec& spec, ItemId got) {
    if (spec.fixed) {
        auto f = spec.fixed->find(at);
        if (f != spec.fixed->end()) return got == f->second;
    }
    if (spec.comps) {
        auto c = spec.comps->find(at);
        if (c != spec.comps->end()) return uf_find(got) == c->second;
    }
    if (spec.component_mode) return uf_find(got) == uf_find(pat);
    return true;  // evidence search: any item of the (matching) contents class
}

TermId KbAnalysis::find_variant(TermId pattern, const std::map<Path, ItemId>& fixed,
                                bool component_mode) {
    LeafSpec spec;
    spec.fixed = &fixed;
    spec.component_mode = component_mode;
    return find_variant_rec(pattern, {}, spec);
}

TermId KbAnalysis::find_derivable_in_components(TermId pattern,
                                                const std::map<Path, int>& comps) {
    build_evidence_graph();
    LeafSpec spec;
    spec.comps = &comps;
    return find_variant_rec(pattern, {}, spec);
}

TermId KbAnalysis::find_variant_rec(TermId pattern, const Path& at, const LeafSpec& spec) {
    TermId c = content_class(mo_, a_, pattern);
    auto byc = by_contents_.find(c);
    if (byc != by_contents_.end()) {
        for (TermId t : byc->second) {
            // Same contents implies the same constructor skeleton; compare leaves.
            auto pl = leaf_positions(a_, pattern);
            auto tl = leaf_positions(a_, t);
            assert(pl.size() == tl.size());
            bool ok = true;
            for (size_t i = 0; i < pl.size() && ok; ++i) {
                Path full = at;
                full.insert(full.end(), pl[i].first.begin(), pl[i].first.end());
                ok = leaf_ok(a_.node(pl[i].second).leaf, full, spec,
                             a_.node(tl[i].second).leaf);
            }
            if (ok) return t;
        }
    }
    const TermNode& n = a_.node(pattern);
    switch (n.ctor) {
        case Ctor::Leaf: return kNoTerm;  // a usable leaf would be in the closure
        case Ctor::Empty: return pattern;
        case Ctor::Aka: {
            // One private key side must be derivable itself, the other only
            // through its public key.
            auto sub = [&](int i) {
                Path p = at; p.push_back(i);
                return std::pair<Path, TermId>{p, n.kids[i]};
            };
            auto direct = [&](int i) {
                auto [p, t] = sub(i);
                return find_variant_rec(t, p, spec);
            };
            auto via_pk = [&](int i) -> TermId {
                TermId d = direct(i);
                if (d != kNoTerm) return d;
                // Look for an analyzed public key whose inner key matches.
                TermId kc = a_.make(Ctor::Pk, {content_class(mo_, a_, n.kids[i])});
                auto it = by_contents_.find(kc);
                if (it == by_contents_.end()) return kNoTerm;
                for (TermId t : it->second) {
                    TermId inner = a_.node(t).kids[0];
                    auto pl = leaf_positions(a_, n.kids[i]);
                    auto tl = leaf_positions(a_, inner);
                    if (pl.size() != tl.size()) continue;
                    bool ok = true;
                    for (size_t j = 0; j < pl.size() && ok; ++j) {
                        Path full = at;
                        full.push_back(i);
                        full.insert(full.end(), pl[j].first.begin(), pl[j].first.end());
                        ok = leaf_ok(a_.node(pl[j].second).leaf, full, spec,
                                     a_.node(tl[j].second).leaf);
                    }
                    if (ok) return inner;
                }
                return kNoTerm;
            };
            TermId n1 = direct(1), n2d = direct(3);
            if (n1 == kNoTerm || n2d == kNoTerm) return kNoTerm;
            if (TermId k1 = direct(0); k1 != kNoTerm)
                if (TermId k2 = via_pk(2); k2 != kNoTerm)
                    return a_.make(Ctor::Aka, {k1, n1, k2, n2d});
            if (TermId k2 = direct(2); k2 != kNoTerm)
                if (TermId k1 = via_pk(0); k1 != kNoTerm)
                    return a_.make(Ctor::Aka, {k1, n1, k2, n2d});
            return kNoTerm;
        }
        default: {
            std::vector<TermId> kids;
            for (size_t i = 0; i < n.kids.size(); ++i) {
                Path p = at;
                p.push_back((int)i);
                TermId k = find_variant_rec(n.kids[i], p, spec);
                if (k == kNoTerm) return kNoTerm;
                kids.push_back(k);
            }
            return a_.make(n.ctor, std::move(kids));
        }
    }
}

void KbAnalysis::build_evidence_graph() {
    if (graph_built_) return;
    graph_built_ = true;
    uf_.resize(mo_.items.size());
    for (size_t i = 0; i < uf_.size(); ++i) uf_[i] = (int)i;

    // Universe: items occurring in the knowledge base, closed under psi.
    std::set<ItemId> uni(occurring_.begin(), occurring_.end());
    std::deque<ItemId> work(uni.begin(), uni.end());
    while (!work.empty()) {
        ItemId q = work.front();
        work.pop_front();
        for (auto [prop, img] : mo_.prop_images(q))
            if (uni.insert(img).second) work.push_back(img);
    }
    universe_.assign(uni.begin(), uni.end());

    // Classmates by contents class (entities carry no contents).
    std::map<int, std::vector<ItemId>> by_class;
    for (ItemId i = 0; i < (ItemId)mo_.items.size(); ++i)
        if (mo_.items[i].kind != Kind::Entity)
            by_class[mo_.atom_of(i).content_class].push_back(i);

    // Analyzed terms containing each universe item, minimal candidates first.
    std::map<ItemId, std::vector<TermId>> containing;
    for (TermId t : analysis_order_) {
        std::vector<ItemId> its;
        collect_items(a_, t, its);
        std::sort(its.begin(), its.end());
        its.erase(std::unique(its.begin(), its.end()), its.end());
        for (ItemId q : its)
            if (uni.count(q)) containing[q].push_back(t);
    }
    for (auto& [q, list] : containing)
        std::stable_sort(list.begin(), list.end(), [&](TermId x, TermId y) {
            return minimal_wrt(x, q) > minimal_wrt(y, q);
        });

    for (ItemId q : universe_) {
        if (mo_.items[q].kind == Kind::Entity) continue;
        for (ItemId q2 : by_class[mo_.atom_of(q).content_class]) {
            if (q2 == q) continue;
            bool have = false;
            for (const Edge& e : edges_[q])
                if (e.to == q2) { have = true; break; }
            if (have) continue;
            for (TermId nt : containing[q]) {
                bool found = false;
                for (auto& [path, lt] : leaf_positions(a_, nt)) {
                    if (a_.node(lt).leaf != q) continue;
                    TermId n2 = find_variant(nt, {{path, q2}}, false);
                    if (n2 != kNoTerm) {
                        add_edge(q, q2, nt, n2);
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
        }
    }

    // psi lift: evidence for the sources lifts to their property images.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::tuple<ItemId, ItemId, TermId, TermId>> lifts;
        for (const auto& [q, es] : edges_)
            for (const Edge& e : es)
                for (const auto& p : mo_.props) {
                    auto i1 = p.item_map.find(q);
                    auto i2 = p.item_map.find(e.to);
                    if (i1 == p.item_map.end() || i2 == p.item_map.end()) continue;
                    if (i1->second == i2->second) continue;
                    bool have = false;
                    for (const Edge& e2 : edges_[i1->second])
                        if (e2.to == i2->second) { have = true; break; }
                    if (!have) lifts.emplace_back(i1->second, i2->second, e.m1, e.m2);
                }
        for (auto& [x, y, m1, m2] : lifts) {
            bool have = false;
            for (const Edge& e : edges_[x])
                if (e.to == y) { have = true; break; }
            if (!have) { add_edge(x, y, m1, m2); changed = true; }
        }
    }
}

int KbAnalysis::component_of(ItemId it) {
    build_evidence_graph();
    return uf_find(it);
}

std::optional<std::pair<TermId, TermId>> KbAnalysis::evidence_for(ItemId it1, ItemId it2) {
    build_evidence_graph();
    if (it1 == it2) {
        TermId lq = a_.ctx_leaf(it1);
        if (analyzed_.count(lq)) return std::make_pair(lq, lq);
        for (TermId t : analysis_order_)
            if (occurs_in(a_, lq, t)) return std::make_pair(t, t);
        return std::nullopt;
    }
    for (const Edge& e : edges_[it1])
        if (e.to == it2) return std::make_pair(e.m1, e.m2);
    return std::nullopt;
}

bool KbAnalysis::derivable(TermId m) {
    if (derivable_no_ca(m)) return true;
    auto memo = variant_memo_.find(m);
    if (memo != variant_memo_.end()) return memo->second != kNoTerm;
    build_evidence_graph();
    TermId w = find_variant(m, {}, true);
    variant_memo_[m] = w;
    return w != kNoTerm;
}

std::optional<Derivation> KbAnalysis::derive(TermId m) {
    if (auto d = derive_no_ca(m)) return d;
    if (!derivable(m)) return std::nullopt;
    TermId w = variant_memo_.at(m);
    Derivation tree = *construct_tree(w);
    TermId cur = w;

    auto mpos = leaf_positions(a_, m);
    auto wpos = leaf_positions(a_, w);
    for (size_t i = 0; i < mpos.size(); ++i) {
        ItemId want = a_.node(mpos[i].second).leaf;
        ItemId have = a_.node(wpos[i].second).leaf;
        if (want == have) continue;
        // Shortest evidence chain from have to want.
        std::map<ItemId, std::pair<ItemId, const Edge*>> back;
        std::deque<ItemId> bfs{have};
        back[have] = {have, nullptr};
        while (!bfs.empty() && !back.count(want)) {
            ItemId q = bfs.front(); bfs.pop_front();
            for (const Edge& e : edges_[q])
                if (!back.count(e.to)) {
                    back[e.to] = {q, &e};
                    bfs.push_back(e.to);
                }
        }
        assert(back.count(want));
        std::vector<const Edge*> chain;
        for (ItemId q = want; q != have; q = back[q].first) chain.push_back(back[q].second);
        std::reverse(chain.begin(), chain.end());
        for (const Edge* e : chain) {
            TermId next = replace_at(a_, cur, mpos[i].first, a_.ctx_leaf(e->to));
            Derivation stepped{"C", next, {}};
            stepped.premises.push_back(std::move(tree));
            stepped.premises.push_back(*construct_tree(e->m1));
            stepped.premises.push_back(*construct_tree(e->m2));
            tree = std::move(stepped);
            cur = next;
        }
    }
    assert(cur == m);
    return tree;
}

KbAnalysis& Analyzer::analysis(const KnowledgeBase& kb) {
    auto key = std::make_pair(kb.owner, kb.elems);
    auto it = cache_.find(key);
    if (it == cache_.end())
        it = cache_.emplace(std::move(key), std::make_unique<KbAnalysis>(mo_, a_, kb)).first;
    return *it->second;
}

}  // namespace privlens
