#pragma once

#include <map>
#include <set>
#include <vector>

#include "deduction.hpp"

// Views: what an actor (or coalition) can detect, and which context personal
// items it can tell concern the same data subject.

namespace privlens {

// An equivalence relation over all context personal items of the model.
struct Partition {
    std::map<ItemId, int> rep;  // item -> class representative

    bool same(ItemId a, ItemId b) const;
    // Classes as sorted item lists, ordered by smallest member.
    std::vector<std::vector<ItemId>> classes() const;
    std::vector<ItemId> class_of(ItemId a) const;
    // True when every class of this partition is contained in one of other's.
    bool refines(const Partition& other) const;
};

struct View {
    std::vector<ItemId> detectable;  // identifiers, data items, known entities
    Partition assoc;

    bool detects(ItemId it) const;
};

// Smallest equivalence relation closed under: known context entities with one
// sigma image; items sharing a context; identifiers with derivable evidence
// of content equivalence.
Partition associability(const Model& mo, KbAnalysis& an);

View view_of(const Model& mo, KbAnalysis& an);

// True iff some item of c1 and some item of c2 share an association class
// (equivalently all of them do).
bool ctx_associable(const Model& mo, const View& v, const ContextRef& c1, const ContextRef& c2);

// Union of the members' knowledge bases.
KnowledgeBase coalition_kb(const std::map<AtomId, KnowledgeBase>& per_actor,
                           const std::vector<AtomId>& actors, const Model& mo);

}  // namespace privlens
