#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trace.hpp"
#include "view.hpp"

// Requirement language over views: detectability, context associability and
// domain-existential atoms with negation, conjunction and disjunction.

namespace privlens {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class K { Detect, DetectAny, Assoc, ExistsDomain, Not, And, Or };

    struct CtxPat {
        std::string domain;  // a declared domain or a bound variable
        std::string profile;
    };

    K k = K::And;
    std::vector<AtomId> coalition;  // Detect, DetectAny, Assoc
    ItemId item = -1;               // Detect
    AtomId info_atom = -1;          // DetectAny
    CtxPat c1, c2;                  // Assoc
    std::string var;                // ExistsDomain
    std::vector<FormulaPtr> kids;

    static FormulaPtr detect(std::vector<AtomId> who, ItemId it);
    static FormulaPtr detect_any(std::vector<AtomId> who, AtomId atom);
    static FormulaPtr assoc(std::vector<AtomId> who, CtxPat a, CtxPat b);
    static FormulaPtr exists_domain(std::string var, FormulaPtr f);
    static FormulaPtr lnot(FormulaPtr f);
    static FormulaPtr land(std::vector<FormulaPtr> fs);
    static FormulaPtr lor(std::vector<FormulaPtr> fs);
};

std::string formula_str(const Model& mo, const Formula& f);

struct Requirement {
    std::string name;
    FormulaPtr formula;
};

struct RequirementSuite {
    std::vector<Requirement> reqs;

    const Requirement* find(const std::string& name) const;
};

struct Verdict {
    std::string name;
    bool holds = false;
    std::string witness;  // satisfying domain / linking items / counterexample
};

// Evaluates formulas against one post-trace state, caching coalition views.
class Checker {
  public:
    Checker(Analyzer& az, const SystemState& state) : az_(az), state_(state) {}

    Verdict eval(const std::string& name, const Formula& f);
    std::vector<Verdict> check_suite(const RequirementSuite& suite);
    const View& coalition_view(const std::vector<AtomId>& actors);

  private:
    struct Res {
        bool holds;
        std::string witness;
    };
    Res eval_rec(const Formula& f, std::map<std::string, std::string>& env);

    Analyzer& az_;
    const SystemState& state_;
    std::map<std::vector<AtomId>, View> views_;
};

}  // namespace privlens
