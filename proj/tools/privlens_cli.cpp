// Command-line front end: load -> validate -> evolve -> view -> check -> render.
//
// Exit codes: 0 all requirements pass, 1 some requirement fails (or a query
// target is not derivable/determinable), 2 on any error.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "report.hpp"
#include "scenario.hpp"

using namespace privlens;

namespace {

struct Common {
    std::string format = "table";
    bool no_validate = false;
    bool witnesses = false;
    bool cond3_any_domain = false;
    int verbose = 0;
};

ReportFormat parse_format(const std::string& f) {
    if (f == "table") return ReportFormat::Table;
    if (f == "tsv") return ReportFormat::Tsv;
    if (f == "records") return ReportFormat::Records;
    throw CLI::ValidationError("--format must be table, tsv or records");
}

struct Loaded {
    ScenarioBundle bundle;
    SystemState final_state;
};

Loaded run_scenario(const std::string& dir, const Common& opt) {
    Loaded l{load_scenario_dir(dir), {}};
    Analyzer az(l.bundle.model, *l.bundle.arena);
    DeterminableOpts dopts;
    dopts.cond3_any_domain = opt.cond3_any_domain;
    auto [state, report] = evolve(az, l.bundle.initial, l.bundle.trace, !opt.no_validate, dopts);
    if (!opt.no_validate && !report.valid)
        throw std::runtime_error("trace invalid:\n" + report.dump(l.bundle.model, *l.bundle.arena));
    if (opt.verbose > 0 && !opt.no_validate)
        std::cerr << "trace valid: " << l.bundle.trace.steps.size() << " steps\n";
    l.final_state = std::move(state);
    return l;
}

std::vector<Verdict> check_bundle(ScenarioBundle& b, const SystemState& state) {
    Analyzer az(b.model, *b.arena);
    Checker ck(az, state);
    return ck.check_suite(b.suite);
}

std::vector<AtomId> parse_coalition_arg(const Model& mo, const std::string& arg) {
    std::vector<AtomId> out;
    std::stringstream ss(arg);
    std::string name;
    while (std::getline(ss, name, ',')) {
        auto a = mo.actor_by_name(name);
        if (!a) throw std::runtime_error("unknown actor '" + name + "'");
        out.push_back(*a);
    }
    if (out.empty()) throw std::runtime_error("empty actor list");
    return out;
}

int cmd_analyze(const std::string& dir, const Common& opt) {
    Loaded l = run_scenario(dir, opt);
    std::vector<Verdict> vs = check_bundle(l.bundle, l.final_state);
    std::string name = l.bundle.name.empty() ? dir : l.bundle.name;
    std::vector<ScenarioVerdicts> rows{{name, vs}};
    ReportFormat fmt = parse_format(opt.format);
    if (opt.witnesses && fmt == ReportFormat::Table) fmt = ReportFormat::Records;
    std::cout << render_report(rows, fmt);
    return all_pass(rows) ? 0 : 1;
}

int cmd_compare(const std::vector<std::string>& dirs, const Common& opt) {
    std::vector<ScenarioVerdicts> rows;
    std::map<std::string, std::string> seen;  // requirement -> canonical formula
    for (const std::string& dir : dirs) {
        Loaded l = run_scenario(dir, opt);
        for (const Requirement& r : l.bundle.suite.reqs) {
            std::string canon = formula_str(l.bundle.model, *r.formula);
            auto [it, fresh] = seen.emplace(r.name, canon);
            if (!fresh && it->second != canon)
                throw std::runtime_error("suite mismatch: requirement '" + r.name +
                                         "' differs between scenarios");
        }
        std::string name = l.bundle.name.empty() ? dir : l.bundle.name;
        rows.push_back({name, check_bundle(l.bundle, l.final_state)});
    }
    std::cout << render_report(rows, parse_format(opt.format));
    return all_pass(rows) ? 0 : 1;
}

int cmd_query(const std::string& dir, const std::string& what,
              const std::vector<std::string>& args, int at_step, const Common& opt) {
    Loaded l = run_scenario(dir, opt);
    ScenarioBundle& b = l.bundle;
    Analyzer az(b.model, *b.arena);
    DeterminableOpts dopts;
    dopts.cond3_any_domain = opt.cond3_any_domain;

    if (what == "derive") {
        if (args.size() != 2) throw std::runtime_error("usage: query <dir> derive <actor> <term>");
        auto who = parse_coalition_arg(b.model, args[0]);
        TermId t = parse_term_in(b, args[1]);
        KnowledgeBase kb = coalition_kb(l.final_state.per_actor, who, b.model);
        auto d = az.analysis(kb).derive(t);
        if (!d) {
            std::cout << "not derivable\n";
            return 1;
        }
        std::cout << d->dump(b.model, *b.arena);
        return 0;
    }
    if (what == "view" || what == "assoc") {
        if (args.size() != 1)
            throw std::runtime_error("usage: query <dir> " + what + " <actor[,actor...]>");
        auto who = parse_coalition_arg(b.model, args[0]);
        KnowledgeBase kb = coalition_kb(l.final_state.per_actor, who, b.model);
        View v = view_of(b.model, az.analysis(kb));
        if (what == "view") {
            std::cout << "detectable:\n";
            std::vector<std::string> names;
            for (ItemId it : v.detectable) names.push_back(b.model.item_str(it));
            std::sort(names.begin(), names.end());
            for (const auto& n : names) std::cout << "  " << n << "\n";
        }
        std::cout << "associability classes:\n";
        std::vector<std::string> lines;
        for (const auto& cls : v.assoc.classes()) {
            std::vector<std::string> names;
            for (ItemId it : cls) names.push_back(b.model.item_str(it));
            std::sort(names.begin(), names.end());
            std::string line = "  {";
            for (size_t i = 0; i < names.size(); ++i) line += (i ? ", " : "") + names[i];
            lines.push_back(line + "}");
        }
        std::sort(lines.begin(), lines.end());
        for (const auto& ln : lines) std::cout << ln << "\n";
        return 0;
    }
    if (what == "determinable") {
        if (args.size() != 2)
            throw std::runtime_error("usage: query <dir> determinable <actor> <term>");
        auto who = parse_coalition_arg(b.model, args[0]);
        if (who.size() != 1) throw std::runtime_error("determinable takes a single actor");
        TermId t = parse_term_in(b, args[1]);
        SystemState s = b.initial;
        if (at_step > (int)b.trace.steps.size())
            throw std::runtime_error("--at-step beyond the trace");
        for (int i = 0; i < at_step; ++i) s = evolve_step(az, s, b.trace.steps[i]);
        auto w = determinable(az, s, who[0], t, dopts);
        if (!w) {
            std::cout << "not determinable\n";
            return 1;
        }
        std::cout << "witness: " << term_str(b.model, *b.arena, *w) << "\n";
        return 0;
    }
    throw std::runtime_error("unknown query '" + what + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"privacy analysis of communication protocols by data minimisation"};
    app.require_subcommand(1);
    Common opt;

    std::string analyze_dir;
    auto* analyze = app.add_subcommand("analyze", "check one scenario against its requirements");
    analyze->add_option("scenario", analyze_dir, "scenario directory")->required();

    std::vector<std::string> compare_dirs;
    auto* compare = app.add_subcommand("compare", "matrix over several scenarios");
    compare->add_option("scenarios", compare_dirs, "scenario directories")->required();

    std::string query_dir, query_what;
    std::vector<std::string> query_args;
    int at_step = 0;
    auto* query = app.add_subcommand("query", "inspect derivations, views, determinability");
    query->add_option("scenario", query_dir)->required();
    query->add_option("what", query_what, "derive|view|assoc|determinable")->required();
    query->add_option("args", query_args);
    query->add_option("--at-step", at_step, "state before this step (determinable)");

    for (auto* sc : {analyze, compare, query}) {
        sc->add_option("--format", opt.format, "table|tsv|records");
        sc->add_flag("--no-validate", opt.no_validate, "skip trace validity checking");
        sc->add_flag("--witnesses", opt.witnesses, "include witnesses in the report");
        sc->add_flag("--cond3-any-domain", opt.cond3_any_domain,
                     "determinability condition 3 anchors may come from any domain");
        sc->add_flag("-v,--verbose", opt.verbose);
    }

    CLI11_PARSE(app, argc, argv);
    try {
        if (*analyze) return cmd_analyze(analyze_dir, opt);
        if (*compare) return cmd_compare(compare_dirs, opt);
        if (*query) return cmd_query(query_dir, query_what, query_args, at_step, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
