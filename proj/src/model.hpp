#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

// The three-layer information model: information atoms with subjects and
// contents classes, context items (variable in a domain/profile context),
// the sigma map between them, and attribute property functions.

namespace privlens {

enum class Kind { Entity, Identifier, Data, NonPersonal };

const char* kind_name(Kind k);

// Profile used by non-personal context items.
inline constexpr const char* kNoProfile = ".";
// Variable used by every entity context item.
inline constexpr const char* kEntityVar = "ds";

struct ContextRef {
    std::string domain;
    std::string profile;

    bool operator==(const ContextRef&) const = default;
    auto operator<=>(const ContextRef&) const = default;
    bool personal() const { return profile != kNoProfile; }
    std::string str() const { return domain + "." + profile; }
};

using AtomId = int;
using ItemId = int;

struct InfoAtom {
    std::string name;
    Kind kind = Kind::Data;
    AtomId subject = -1;      // owning entity atom; self for entities, -1 for non-personal
    int content_class = -1;   // index into Model::class_names; -1 for entities
};

struct ContextItem {
    std::string var;
    ContextRef ctx;
    AtomId atom = -1;
    Kind kind = Kind::Data;
};

// One attribute property psi_i. The information-layer map sends atoms to
// atoms; the context-layer map is induced (same context, sigma-compatible)
// but stored explicitly so validate_model can check the Def. 1 conditions.
struct Property {
    std::string id;
    std::map<AtomId, AtomId> atom_map;
    std::map<ItemId, ItemId> item_map;
};

struct Model {
    std::vector<InfoAtom> atoms;
    std::vector<ContextItem> items;
    std::vector<Property> props;
    std::vector<std::string> class_names;
    std::vector<AtomId> actors;
    std::vector<std::string> domains;

    std::map<std::string, AtomId> atom_by_name;
    std::map<std::tuple<std::string, std::string, std::string>, ItemId> item_by_key;

    AtomId atom_id(const std::string& name) const;
    ItemId find_item(const std::string& var, const ContextRef& ctx) const;
    const InfoAtom& atom_of(ItemId it) const { return atoms[items[it].atom]; }
    bool is_actor(AtomId a) const;
    std::optional<AtomId> actor_by_name(const std::string& name) const;

    // Personal context items (entities, identifiers, data): the carrier of
    // associability partitions.
    std::vector<ItemId> personal_items() const;
    std::vector<ItemId> items_in_ctx(const ContextRef& ctx) const;
    std::vector<ItemId> reps_of_atom(AtomId a) const;

    // psi image of a context item under property p, if defined.
    std::optional<ItemId> prop_image(int prop, ItemId it) const;
    // All (prop, image) pairs defined on `it`.
    std::vector<std::pair<int, ItemId>> prop_images(ItemId it) const;
    // Preimage: (prop, source) pairs with prop_image(prop, source) == it.
    std::vector<std::pair<int, ItemId>> prop_preimages(ItemId it) const;

    std::string item_str(ItemId it) const;
};

// Empty result means every model invariant holds. Violations are plain
// strings describing the failed condition.
std::vector<std::string> validate_model(const Model& m);

}  // namespace privlens
