#include "report.hpp"

#include <algorithm>
#include <sstream>

namespace privlens {

bool all_pass(const std::vector<ScenarioVerdicts>& rows) {
    for (const auto& r : rows)
        for (const Verdict& v : r.verdicts)
            if (!v.holds) return false;
    return true;
}

static std::vector<std::string> column_order(const std::vector<ScenarioVerdicts>& rows) {
    std::vector<std::string> cols;
    for (const auto& r : rows)
        for (const Verdict& v : r.verdicts)
            if (std::find(cols.begin(), cols.end(), v.name) == cols.end())
                cols.push_back(v.name);
    return cols;
}

std::string render_report(const std::vector<ScenarioVerdicts>& rows, ReportFormat fmt) {
    std::ostringstream o;
    if (fmt == ReportFormat::Tsv || fmt == ReportFormat::Records) {
        for (const auto& r : rows)
            for (const Verdict& v : r.verdicts) {
                o << r.scenario << "\t" << v.name << "\t" << (v.holds ? "pass" : "fail");
                if (fmt == ReportFormat::Records) o << "\t" << v.witness;
                o << "\n";
            }
        return o.str();
    }

    std::vector<std::string> cols = column_order(rows);
    size_t name_w = std::string("scenario").size();
    for (const auto& r : rows) name_w = std::max(name_w, r.scenario.size());

    o << std::string(name_w, ' ');
    for (const std::string& c : cols) o << "  " << c;
    o << "\n";
    for (const auto& r : rows) {
        o << r.scenario << std::string(name_w - r.scenario.size(), ' ');
        for (const std::string& c : cols) {
            const Verdict* found = nullptr;
            for (const Verdict& v : r.verdicts)
                if (v.name == c) { found = &v; break; }
            std::string cell = !found ? "·" : found->holds ? "✓" : "✗";
            // The glyphs are one display column wide; pad to the header width.
            o << "  " << cell << std::string(c.size() - 1, ' ');
        }
        o << "\n";
    }
    return o.str();
}

}  // namespace privlens
