#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "formula.hpp"
#include "trace.hpp"

// The scenario file format: model, initial knowledge, trace and requirement
// sections in one or more `.pls` files.

namespace privlens {

inline constexpr const char* kFormatHeader = "privlens-scenario v1";

struct SourcePos {
    std::string file;
    int line = 0;
    int col = 0;

    std::string str() const;
};

struct ParseError : std::runtime_error {
    SourcePos pos;
    ParseError(SourcePos p, const std::string& msg);
};

struct ResolutionError : ParseError {
    using ParseError::ParseError;
};

struct ModelInvalidError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ModelInvalidError(std::vector<std::string> v);
};

struct ScenarioBundle {
    std::string name;
    std::string description;
    Model model;
    std::unique_ptr<TermArena> arena;
    SystemState initial;
    Trace trace;
    RequirementSuite suite;
};

// Parses the given (filename, contents) pairs; sections may be split across
// files in any order.
ScenarioBundle parse_scenario(const std::vector<std::pair<std::string, std::string>>& files);

// Reads model.pls, initial.pls, trace.pls, requirements.pls from a directory
// (all but model.pls optional).
ScenarioBundle load_scenario_dir(const std::string& dir);

// Canonical single-document rendering; parse_scenario(pretty_print(b))
// rebuilds an identical bundle.
std::string pretty_print(const ScenarioBundle& b);

// Parses a term against an existing bundle (CLI queries).
TermId parse_term_in(ScenarioBundle& b, const std::string& text);

}  // namespace privlens
