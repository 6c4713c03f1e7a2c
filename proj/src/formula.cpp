#include "formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace privlens {

static FormulaPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr Formula::detect(std::vector<AtomId> who, ItemId it) {
    Formula f;
    f.k = K::Detect;
    f.coalition = std::move(who);
    f.item = it;
    return mk(std::move(f));
}
FormulaPtr Formula::detect_any(std::vector<AtomId> who, AtomId atom) {
    Formula f;
    f.k = K::DetectAny;
    f.coalition = std::move(who);
    f.info_atom = atom;
    return mk(std::move(f));
}
FormulaPtr Formula::assoc(std::vector<AtomId> who, CtxPat a, CtxPat b) {
    Formula f;
    f.k = K::Assoc;
    f.coalition = std::move(who);
    f.c1 = std::move(a);
    f.c2 = std::move(b);
    return mk(std::move(f));
}
FormulaPtr Formula::exists_domain(std::string var, FormulaPtr inner) {
    Formula f;
    f.k = K::ExistsDomain;
    f.var = std::move(var);
    f.kids = {std::move(inner)};
    return mk(std::move(f));
}
FormulaPtr Formula::lnot(FormulaPtr inner) {
    Formula f;
    f.k = K::Not;
    f.kids = {std::move(inner)};
    return mk(std::move(f));
}
FormulaPtr Formula::land(std::vector<FormulaPtr> fs) {
    Formula f;
    f.k = K::And;
    f.kids = std::move(fs);
    return mk(std::move(f));
}
FormulaPtr Formula::lor(std::vector<FormulaPtr> fs) {
    Formula f;
    f.k = K::Or;
    f.kids = std::move(fs);
    return mk(std::move(f));
}

static std::string coalition_str(const Model& mo, const std::vector<AtomId>& who) {
    std::string s = "{";
    for (size_t i = 0; i < who.size(); ++i) {
        if (i) s += ",";
        s += mo.atoms[who[i]].name;
    }
    return s + "}";
}

std::string formula_str(const Model& mo, const Formula& f) {
    switch (f.k) {
        case Formula::K::Detect:
            return "detect " + coalition_str(mo, f.coalition) + " " + mo.item_str(f.item);
        case Formula::K::DetectAny:
            return "detectany " + coalition_str(mo, f.coalition) + " " + mo.atoms[f.info_atom].name;
        case Formula::K::Assoc:
            return "assoc " + coalition_str(mo, f.coalition) + " " + f.c1.domain + "." +
                   f.c1.profile + " " + f.c2.domain + "." + f.c2.profile;
        case Formula::K::ExistsDomain:
            return "(exists " + f.var + ": " + formula_str(mo, *f.kids[0]) + ")";
        case Formula::K::Not:
            return "!" + formula_str(mo, *f.kids[0]);
        case Formula::K::And:
        case Formula::K::Or: {
            std::string op = f.k == Formula::K::And ? " & " : " | ";
            std::string s = "(";
            for (size_t i = 0; i < f.kids.size(); ++i) {
                if (i) s += op;
                s += formula_str(mo, *f.kids[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

const Requirement* RequirementSuite::find(const std::string& name) const {
    for (const Requirement& r : reqs)
        if (r.name == name) return &r;
    return nullptr;
}

const View& Checker::coalition_view(const std::vector<AtomId>& actors) {
    std::vector<AtomId> key = actors;
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    auto it = views_.find(key);
    if (it == views_.end()) {
        KnowledgeBase kb = coalition_kb(state_.per_actor, key, az_.model());
        it = views_.emplace(key, view_of(az_.model(), az_.analysis(kb))).first;
    }
    return it->second;
}

Checker::Res Checker::eval_rec(const Formula& f, std::map<std::string, std::string>& env) {
    const Model& mo = az_.model();
    switch (f.k) {
        case Formula::K::Detect: {
            const View& v = coalition_view(f.coalition);
            bool got = v.detects(f.item);
            return {got, mo.item_str(f.item) + (got ? " detectable" : " not detectable")};
        }
        case Formula::K::DetectAny: {
            const View& v = coalition_view(f.coalition);
            for (ItemId r : mo.reps_of_atom(f.info_atom)) {
                Kind k = mo.items[r].kind;
                if (k != Kind::Identifier && k != Kind::Data) continue;
                if (v.detects(r)) return {true, mo.item_str(r) + " detectable"};
            }
            return {false, "no context representation of " + mo.atoms[f.info_atom].name +
                               " detectable"};
        }
        case Formula::K::Assoc: {
            auto resolve = [&](const Formula::CtxPat& p) {
                auto e = env.find(p.domain);
                return ContextRef{e == env.end() ? p.domain : e->second, p.profile};
            };
            ContextRef c1 = resolve(f.c1), c2 = resolve(f.c2);
            const View& v = coalition_view(f.coalition);
            for (ItemId a : mo.items_in_ctx(c1)) {
                if (mo.items[a].kind == Kind::NonPersonal) continue;
                for (ItemId b : mo.items_in_ctx(c2)) {
                    if (mo.items[b].kind == Kind::NonPersonal) continue;
                    if (v.assoc.same(a, b))
                        return {true, mo.item_str(a) + " ~ " + mo.item_str(b)};
                }
            }
            return {false, c1.str() + " !~ " + c2.str()};
        }
        case Formula::K::ExistsDomain: {
            for (const std::string& d : mo.domains) {
                env[f.var] = d;
                Res r = eval_rec(*f.kids[0], env);
                if (r.holds) {
                    env.erase(f.var);
                    return {true, f.var + "=" + d + ": " + r.witness};
                }
            }
            env.erase(f.var);
            return {false, "no domain satisfies " + f.var};
        }
        case Formula::K::Not: {
            Res r = eval_rec(*f.kids[0], env);
            return {!r.holds, r.witness};
        }
        case Formula::K::And: {
            for (const FormulaPtr& k : f.kids) {
                Res r = eval_rec(*k, env);
                if (!r.holds) return {false, r.witness};
            }
            return {true, ""};
        }
        case Formula::K::Or: {
            for (const FormulaPtr& k : f.kids) {
                Res r = eval_rec(*k, env);
                if (r.holds) return {true, r.witness};
            }
            return {false, ""};
        }
    }
    throw std::logic_error("unreachable");
}

Verdict Checker::eval(const std::string& name, const Formula& f) {
    std::map<std::string, std::string> env;
    Res r = eval_rec(f, env);
    return Verdict{name, r.holds, r.witness};
}

std::vector<Verdict> Checker::check_suite(const RequirementSuite& suite) {
    std::vector<Verdict> out;
    out.reserve(suite.reqs.size());
    for (const Requirement& r : suite.reqs) out.push_back(eval(r.name, *r.formula));
    return out;
}

}  // namespace privlens
