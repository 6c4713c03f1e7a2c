#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "model.hpp"

// Hash-consed terms over the closed message grammar. One arena holds terms
// of all three layers; the leaf space tells them apart (context items,
// information atoms, contents classes). Interning makes equality an id
// comparison and keeps iteration reproducible.

namespace privlens {

using TermId = int32_t;
inline constexpr TermId kNoTerm = -1;

enum class Ctor : uint8_t {
    Leaf, Empty, Pk, Cat, Hash, Senc, Aenc, Sign, Laenc, Aka, Cred, Zk, Icred
};

enum class LeafSpace : uint8_t { CtxItem, Atom, Class };

const char* ctor_name(Ctor c);
// Fixed arity, or -1 for cat (any arity >= 2).
int ctor_arity(Ctor c);

struct TermNode {
    Ctor ctor;
    LeafSpace space = LeafSpace::CtxItem;  // meaningful for Leaf and Empty
    int32_t leaf = -1;                     // ItemId / AtomId / class id
    std::vector<TermId> kids;
};

using Path = std::vector<int>;

class TermArena {
  public:
    TermId ctx_leaf(ItemId item);
    TermId atom_leaf(AtomId atom);
    TermId class_leaf(int cls);
    TermId empty(LeafSpace space = LeafSpace::CtxItem);
    // Throws std::invalid_argument on arity violations or an entity leaf
    // inside a composite.
    TermId make(Ctor c, std::vector<TermId> kids, const Model* m = nullptr);

    const TermNode& node(TermId t) const { return nodes_[t]; }
    bool is_leaf(TermId t) const { return nodes_[t].ctor == Ctor::Leaf; }
    size_t size() const { return nodes_.size(); }

  private:
    struct Key {
        Ctor ctor; LeafSpace space; int32_t leaf; std::vector<TermId> kids;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash { size_t operator()(const Key& k) const; };
    TermId intern(Key k);

    std::vector<TermNode> nodes_;
    std::unordered_map<Key, TermId, KeyHash> index_;
};

std::optional<TermId> subterm_at(const TermArena& a, TermId m, const Path& z);
// Preorder, deterministic; includes (epsilon, m) itself.
std::vector<std::pair<Path, TermId>> enumerate_subterms(const TermArena& a, TermId m);
// Leaf positions only (Empty nodes are not leaves in this sense).
std::vector<std::pair<Path, TermId>> leaf_positions(const TermArena& a, TermId m);
bool occurs_in(const TermArena& a, TermId needle, TermId hay);
// All context items (I/D/G) occurring in m.
void collect_items(const TermArena& a, TermId m, std::vector<ItemId>& out);
// m with the leaf at path z replaced.
TermId replace_at(TermArena& a, TermId m, const Path& z, TermId repl);
int term_depth(const TermArena& a, TermId m);

// sigma lifted to terms: replaces context-item leaves by their atoms.
TermId sigma_lift(const Model& mo, TermArena& a, TermId m);
// tau of sigma, structurally: the canonical contents label of m.
TermId content_class(const Model& mo, TermArena& a, TermId m);
bool equivalent(const Model& mo, TermArena& a, TermId m, TermId n);
bool content_equivalent(const Model& mo, TermArena& a, TermId m, TermId n);

std::string term_str(const Model& mo, const TermArena& a, TermId m);
// Deterministic total order used everywhere results are listed.
bool term_less(const Model& mo, const TermArena& a, TermId x, TermId y);

}  // namespace privlens
