#pragma once

#include <string>
#include <vector>

#include "formula.hpp"

namespace privlens {

enum class ReportFormat { Table, Tsv, Records };

struct ScenarioVerdicts {
    std::string scenario;
    std::vector<Verdict> verdicts;
};

// table: fixed-width scenarios x requirements matrix. tsv: one verdict per
// line (scenario, requirement, pass|fail). records: tsv plus the witness.
std::string render_report(const std::vector<ScenarioVerdicts>& rows, ReportFormat fmt);

bool all_pass(const std::vector<ScenarioVerdicts>& rows);

}  // namespace privlens
