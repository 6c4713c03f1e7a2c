#pragma once

#include <optional>
#include <set>

#include "deduction.hpp"
#include "view.hpp"

// States, the three transmission types, trace evolution, and trace validity
// through determined items and determinability.

namespace privlens {

enum class TxType { Send, ZkSession, IcredSession };

struct Transmission {
    TxType type = TxType::Send;
    TermId sender = kNoTerm;    // identifier item used as address
    TermId receiver = kNoTerm;  // identifier item used as address
    TermId payload = kNoTerm;   // zk/icred sessions carry the transcript term
};

struct Trace {
    std::vector<Transmission> steps;
};

struct SystemState {
    std::map<AtomId, KnowledgeBase> per_actor;
    int version = 0;
};

struct PartyCheck {
    AtomId actor = -1;
    TermId required = kNoTerm;  // concatenation of what the party contributes
    bool ok = false;
    TermId witness = kNoTerm;
};

struct StepValidity {
    int step = -1;
    bool valid = true;
    std::vector<PartyCheck> checks;
};

struct ValidityReport {
    bool valid = true;
    std::vector<StepValidity> steps;

    std::string dump(const Model& mo, const TermArena& a) const;
};

struct DeterminableOpts {
    // Condition 3 compares against determined items of the leaf's own
    // context by default; with this flag the profile may come from any domain.
    bool cond3_any_domain = false;
};

SystemState initial_state(const Model& mo);

// Both address subjects gain the addresses and the payload.
SystemState evolve_step(Analyzer& az, const SystemState& s, const Transmission& t);

std::pair<SystemState, ValidityReport> evolve(Analyzer& az, SystemState s, const Trace& tr,
                                              bool check_validity,
                                              DeterminableOpts opts = {});

// Context items occurring in some knowledge base, closed under psi images.
std::set<ItemId> determined_items(const Model& mo, const TermArena& a, const SystemState& s);

// Witness n equivalent to m, derivable by the actor, with determined
// positions fixed, consistent substitution, and the association conditions.
std::optional<TermId> determinable(Analyzer& az, const SystemState& s, AtomId actor, TermId m,
                                   DeterminableOpts opts = {});

StepValidity transmission_valid(Analyzer& az, const SystemState& s, const Transmission& t,
                                int step_index, DeterminableOpts opts = {});

}  // namespace privlens
