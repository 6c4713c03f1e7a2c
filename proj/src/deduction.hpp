#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "term.hpp"

// Detectability engine. Derivability without content analysis is decided by
// an analysis closure (axiom, elimination and testing rules, with their
// additional prerequisites checked at the contents layer) plus a top-down
// construction check. Full derivability adds the content-analysis rule,
// decided through an evidence graph over context items: two items are
// connected when a pair of derivable content-equivalent messages exhibits
// them at a shared parse-tree path, or when such a pair lifts through an
// attribute property.

namespace privlens {

struct KnowledgeBase {
    std::string owner;
    std::vector<TermId> elems;  // messages and bare entity items, sorted by id

    static KnowledgeBase of(std::string owner, std::vector<TermId> elems);
    KnowledgeBase with(const std::vector<TermId>& more) const;
    bool contains(TermId t) const;
};

struct Derivation {
    std::string rule;
    TermId concl = kNoTerm;
    std::vector<Derivation> premises;

    void collect_rules(std::set<std::string>& out) const;
    std::string dump(const Model& mo, const TermArena& a, int indent = 0) const;
};

class KbAnalysis {
  public:
    KbAnalysis(const Model& mo, TermArena& arena, KnowledgeBase kb);

    const KnowledgeBase& kb() const { return kb_; }
    const Model& model() const { return mo_; }
    TermArena& arena() { return a_; }

    // Deductive system without the content-analysis rule.
    bool derivable_no_ca(TermId m);
    std::optional<Derivation> derive_no_ca(TermId m);

    // Full detectability.
    bool derivable(TermId m);
    std::optional<Derivation> derive(TermId m);

    // Contents-layer deductive system over contents labels.
    bool contents_derivable(TermId contents_term);

    // Direct evidence (single pair) that it1 and it2 are content equivalent.
    std::optional<std::pair<TermId, TermId>> evidence_for(ItemId it1, ItemId it2);

    // Evidence-graph component of a context item (entities: own singleton).
    int component_of(ItemId it);

    std::vector<ItemId> kb_entities() const;
    // Context items occurring syntactically in KB messages.
    const std::set<ItemId>& occurring_items();

    // Derivable term content-equivalent to pattern whose leaf at each listed
    // path lies in the given evidence component. Paths must cover all leaves.
    TermId find_derivable_in_components(TermId pattern, const std::map<Path, int>& comps);

  private:
    struct Prov {
        const char* rule;
        TermId src = kNoTerm;    // analyzed premise
        TermId extra = kNoTerm;  // second premise already analyzed
        TermId wit = kNoTerm;    // content-equivalent witness premise
        bool premise_is_cat = false;  // rule reads its premises as one cat
    };
    struct Edge {
        ItemId to;
        TermId m1, m2;  // derivable evidence pair (m1 exhibits `from`, m2 `to`)
    };

    void build_contents_closure();
    void build_analysis_closure();
    void build_evidence_graph();
    void analysis_add(TermId t, Prov p);
    bool cder(TermId c);  // contents derivable (closure + construction)
    TermId cont_witness(TermId c);
    void add_edge(ItemId a, ItemId b, TermId m1, TermId m2);
    bool is_open_shape(TermId t, int* label_kid = nullptr) const;
    bool minimal_wrt(TermId n, ItemId q);
    // Finds a derivable term content-equivalent to `pattern`, leaf at each
    // `fixed` path as required; other leaves are free within their contents
    // class (evidence search), restricted to the pattern leaf's component
    // (component_mode), or to explicit component targets.
    struct LeafSpec {
        const std::map<Path, ItemId>* fixed = nullptr;
        const std::map<Path, int>* comps = nullptr;
        bool component_mode = false;
    };
    TermId find_variant(TermId pattern, const std::map<Path, ItemId>& fixed,
                        bool component_mode);
    TermId find_variant_rec(TermId pattern, const Path& at, const LeafSpec& spec);
    bool leaf_ok(ItemId pat, const Path& at, const LeafSpec& spec, ItemId got);
    Derivation tree_for_analyzed(TermId t);
    std::optional<Derivation> construct_tree(TermId m);
    int uf_find(int x);
    void uf_union(int a, int b);

    const Model& mo_;
    TermArena& a_;
    KnowledgeBase kb_;

    std::set<TermId> cont_known_;
    std::map<TermId, int> cder_memo_;
    std::set<TermId> tree_stack_;  // guards witness choice against cycles

    std::map<TermId, Prov> analyzed_;      // the analysis closure A
    std::vector<TermId> analysis_order_;
    std::map<TermId, std::vector<TermId>> by_contents_;   // contents -> A terms
    std::map<int, std::vector<ItemId>> leaves_by_class_;  // class -> derivable leaves
    std::set<ItemId> occurring_;
    std::vector<ItemId> universe_;  // occurring items + psi closure
    bool graph_built_ = false;
    std::vector<int> uf_;  // over model item ids
    std::map<ItemId, std::vector<Edge>> edges_;
    std::map<TermId, TermId> variant_memo_;  // full-mode witness per term
};

// Shared cache of analyses, keyed by knowledge-base contents.
class Analyzer {
  public:
    Analyzer(const Model& mo, TermArena& arena) : mo_(mo), a_(arena) {}
    KbAnalysis& analysis(const KnowledgeBase& kb);
    const Model& model() const { return mo_; }
    TermArena& arena() { return a_; }

  private:
    const Model& mo_;
    TermArena& a_;
    std::map<std::pair<std::string, std::vector<TermId>>, std::unique_ptr<KbAnalysis>> cache_;
};

}  // namespace privlens
