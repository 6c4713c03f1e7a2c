#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace privlens {

std::string SourcePos::str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

ParseError::ParseError(SourcePos p, const std::string& msg)
    : std::runtime_error(p.str() + ": " + msg), pos(std::move(p)) {}

ModelInvalidError::ModelInvalidError(std::vector<std::string> v)
    : std::runtime_error("model invalid: " + (v.empty() ? std::string("?") : v.front()) +
                         (v.size() > 1 ? " (+" + std::to_string(v.size() - 1) + " more)" : "")),
      violations(std::move(v)) {}

namespace {

bool name_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '\'' || c == '>';
}

enum class Tok { Name, At, Dot, LParen, RParen, Comma, Colon, LBrace, RBrace,
                 Amp, Pipe, Bang, Eq, Arrow, DArrow, End };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

struct Line {
    SourcePos pos;
    std::string text;
};

std::vector<Token> tokenize(const Line& ln) {
    std::vector<Token> out;
    const std::string& s = ln.text;
    size_t i = 0;
    auto pos_at = [&](size_t k) { return SourcePos{ln.pos.file, ln.pos.line, (int)k + 1}; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace((unsigned char)c)) { ++i; continue; }
        SourcePos p = pos_at(i);
        if (name_char(c)) {
            size_t j = i;
            while (j < s.size() && name_char(s[j])) ++j;
            out.push_back({Tok::Name, s.substr(i, j - i), p});
            i = j;
            continue;
        }
        switch (c) {
            case '@': out.push_back({Tok::At, "@", p}); ++i; break;
            case '.': out.push_back({Tok::Dot, ".", p}); ++i; break;
            case '(': out.push_back({Tok::LParen, "(", p}); ++i; break;
            case ')': out.push_back({Tok::RParen, ")", p}); ++i; break;
            case ',': out.push_back({Tok::Comma, ",", p}); ++i; break;
            case ':': out.push_back({Tok::Colon, ":", p}); ++i; break;
            case '{': out.push_back({Tok::LBrace, "{", p}); ++i; break;
            case '}': out.push_back({Tok::RBrace, "}", p}); ++i; break;
            case '&': out.push_back({Tok::Amp, "&", p}); ++i; break;
            case '|': out.push_back({Tok::Pipe, "|", p}); ++i; break;
            case '!': out.push_back({Tok::Bang, "!", p}); ++i; break;
            case '=': out.push_back({Tok::Eq, "=", p}); ++i; break;
            case '-':
                if (i + 1 < s.size() && s[i + 1] == '>') {
                    out.push_back({Tok::Arrow, "->", p});
                    i += 2;
                    break;
                }
                throw ParseError(p, "stray '-'");
            case '<':
                if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
                    out.push_back({Tok::DArrow, "<->", p});
                    i += 3;
                    break;
                }
                throw ParseError(p, "stray '<'");
            default:
                throw ParseError(p, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", pos_at(s.size())});
    return out;
}

struct Cursor {
    std::vector<Token> toks;
    size_t i = 0;

    const Token& peek() const { return toks[i]; }
    const Token& next() { return toks[std::min(i++, toks.size() - 1)]; }
    bool at(Tok k) const { return toks[i].kind == k; }
    Token expect(Tok k, const char* what) {
        if (!at(k)) throw ParseError(toks[i].pos, std::string("expected ") + what);
        return toks[i++];
    }
    bool eat(Tok k) {
        if (!at(k)) return false;
        ++i;
        return true;
    }
    void done() {
        if (!at(Tok::End)) throw ParseError(toks[i].pos, "trailing input");
    }
};

const std::set<std::string> kCtorNames = {"pk", "cat", "hash", "senc", "aenc", "sign",
                                          "laenc", "aka", "cred", "zk", "icred", "MS",
                                          "empty"};

struct Builder {
    ScenarioBundle b;
    std::map<std::string, std::vector<std::string>> class_groups;  // label -> atoms
    std::map<std::string, SourcePos> decl_pos;
    std::vector<std::pair<std::string, AtomId>> pending_actors;

    Builder() { b.arena = std::make_unique<TermArena>(); }

    void dup_check(const std::string& key, const SourcePos& pos, const char* what) {
        auto [it, fresh] = decl_pos.emplace(key, pos);
        if (!fresh)
            throw ParseError(pos, std::string("duplicate ") + what + " (first at " +
                                      it->second.str() + ")");
    }

    AtomId add_atom(const std::string& name, Kind k, AtomId subject, const SourcePos& pos) {
        dup_check("atom:" + name, pos, "declaration");
        AtomId id = (AtomId)b.model.atoms.size();
        b.model.atoms.push_back(InfoAtom{name, k, k == Kind::Entity ? id : subject, -1});
        b.model.atom_by_name.emplace(name, id);
        return id;
    }

    AtomId need_atom(const std::string& name, const SourcePos& pos) {
        auto it = b.model.atom_by_name.find(name);
        if (it == b.model.atom_by_name.end())
            throw ResolutionError(pos, "unknown atom '" + name + "'");
        return it->second;
    }

    ItemId add_item(const std::string& var, const ContextRef& ctx, AtomId atom,
                    const SourcePos& pos) {
        dup_check("item:" + var + "@" + ctx.domain + "." + ctx.profile, pos, "context item");
        ItemId id = (ItemId)b.model.items.size();
        b.model.items.push_back(ContextItem{var, ctx, atom, b.model.atoms[atom].kind});
        b.model.item_by_key.emplace(std::make_tuple(var, ctx.domain, ctx.profile), id);
        return id;
    }
};

// Leaf: var@domain.profile, var@.profile (block domain), profile '.' for
// non-personal items.
ItemId parse_leaf_ref(Builder& bl, Cursor& c, const std::string& block_domain) {
    Token var = c.expect(Tok::Name, "item variable");
    c.expect(Tok::At, "'@'");
    std::string domain;
    if (c.at(Tok::Name)) domain = c.next().text;
    c.expect(Tok::Dot, "'.' between domain and profile");
    std::string profile;
    if (c.at(Tok::Name)) profile = c.next().text;
    else if (c.eat(Tok::Dot)) profile = kNoProfile;
    else throw ParseError(c.peek().pos, "expected profile");
    if (domain.empty()) {
        if (block_domain.empty())
            throw ParseError(var.pos, "leaf without domain outside an 'in' block");
        domain = block_domain;
    }
    ItemId it = bl.b.model.find_item(var.text, ContextRef{domain, profile});
    if (it < 0)
        throw ResolutionError(var.pos, "unknown context item " + var.text + "@" + domain + "." +
                                           profile);
    return it;
}

TermId parse_term(Builder& bl, Cursor& c, const std::string& block_domain,
                  bool allow_entity = false) {
    TermArena& a = *bl.b.arena;
    const Token& t = c.peek();
    if (t.kind != Tok::Name) throw ParseError(t.pos, "expected a term");
    if (kCtorNames.count(t.text)) {
        Token head = c.next();
        if (head.text == "empty") return a.empty();
        c.expect(Tok::LParen, "'('");
        std::vector<TermId> kids;
        if (!c.at(Tok::RParen)) {
            kids.push_back(parse_term(bl, c, block_domain));
            while (c.eat(Tok::Comma)) kids.push_back(parse_term(bl, c, block_domain));
        }
        c.expect(Tok::RParen, "')'");
        try {
            if (head.text == "MS") {
                // MS(k, b...) = cat(b, sign(k, b))
                if (kids.size() < 2) throw std::invalid_argument("MS: needs key and body");
                TermId key = kids[0];
                TermId body = kids.size() == 2
                                  ? kids[1]
                                  : a.make(Ctor::Cat, {kids.begin() + 1, kids.end()}, &bl.b.model);
                return a.make(Ctor::Cat, {body, a.make(Ctor::Sign, {key, body}, &bl.b.model)},
                              &bl.b.model);
            }
            Ctor ct = head.text == "pk" ? Ctor::Pk
                      : head.text == "cat" ? Ctor::Cat
                      : head.text == "hash" ? Ctor::Hash
                      : head.text == "senc" ? Ctor::Senc
                      : head.text == "aenc" ? Ctor::Aenc
                      : head.text == "sign" ? Ctor::Sign
                      : head.text == "laenc" ? Ctor::Laenc
                      : head.text == "aka" ? Ctor::Aka
                      : head.text == "cred" ? Ctor::Cred
                      : head.text == "zk" ? Ctor::Zk
                                          : Ctor::Icred;
            return a.make(ct, std::move(kids), &bl.b.model);
        } catch (const std::invalid_argument& e) {
            throw ParseError(head.pos, e.what());
        }
    }
    Token at = t;
    ItemId it = parse_leaf_ref(bl, c, block_domain);
    if (!allow_entity && bl.b.model.items[it].kind == Kind::Entity)
        throw ResolutionError(at.pos, "entity item cannot occur inside a message");
    return a.ctx_leaf(it);
}

std::vector<AtomId> parse_coalition(Builder& bl, Cursor& c) {
    c.expect(Tok::LBrace, "'{'");
    std::vector<AtomId> out;
    while (true) {
        Token n = c.expect(Tok::Name, "actor name");
        auto a = bl.b.model.actor_by_name(n.text);
        if (!a) throw ResolutionError(n.pos, "unknown actor '" + n.text + "'");
        out.push_back(*a);
        if (!c.eat(Tok::Comma)) break;
    }
    c.expect(Tok::RBrace, "'}'");
    if (out.empty()) throw ParseError(c.peek().pos, "empty coalition");
    return out;
}

Formula::CtxPat parse_ctx_pat(Builder& bl, Cursor& c, const std::set<std::string>& bound) {
    Token d = c.expect(Tok::Name, "domain");
    c.expect(Tok::Dot, "'.'");
    Token p = c.expect(Tok::Name, "profile");
    const auto& doms = bl.b.model.domains;
    if (!bound.count(d.text) && std::find(doms.begin(), doms.end(), d.text) == doms.end())
        throw ResolutionError(d.pos, "unknown domain '" + d.text + "'");
    return Formula::CtxPat{d.text, p.text};
}

FormulaPtr parse_formula(Builder& bl, Cursor& c, std::set<std::string>& bound);

FormulaPtr parse_formula_unary(Builder& bl, Cursor& c, std::set<std::string>& bound) {
    if (c.eat(Tok::Bang)) return Formula::lnot(parse_formula_unary(bl, c, bound));
    if (c.eat(Tok::LParen)) {
        FormulaPtr f = parse_formula(bl, c, bound);
        c.expect(Tok::RParen, "')'");
        return f;
    }
    Token head = c.expect(Tok::Name, "requirement atom");
    if (head.text == "detect") {
        auto who = parse_coalition(bl, c);
        ItemId it = parse_leaf_ref(bl, c, "");
        return Formula::detect(std::move(who), it);
    }
    if (head.text == "detectany") {
        auto who = parse_coalition(bl, c);
        Token n = c.expect(Tok::Name, "atom name");
        return Formula::detect_any(std::move(who), bl.need_atom(n.text, n.pos));
    }
    if (head.text == "assoc") {
        auto who = parse_coalition(bl, c);
        auto c1 = parse_ctx_pat(bl, c, bound);
        auto c2 = parse_ctx_pat(bl, c, bound);
        return Formula::assoc(std::move(who), std::move(c1), std::move(c2));
    }
    throw ParseError(head.pos, "unknown requirement atom '" + head.text + "'");
}

FormulaPtr parse_formula_and(Builder& bl, Cursor& c, std::set<std::string>& bound) {
    std::vector<FormulaPtr> fs{parse_formula_unary(bl, c, bound)};
    while (c.eat(Tok::Amp)) fs.push_back(parse_formula_unary(bl, c, bound));
    return fs.size() == 1 ? fs[0] : Formula::land(std::move(fs));
}

FormulaPtr parse_formula(Builder& bl, Cursor& c, std::set<std::string>& bound) {
    if (c.at(Tok::Name) && c.peek().text == "exists") {
        c.next();
        Token var = c.expect(Tok::Name, "domain variable");
        if (bound.count(var.text))
            throw ParseError(var.pos, "domain variable '" + var.text + "' bound twice");
        c.expect(Tok::Colon, "':'");
        bound.insert(var.text);
        FormulaPtr body = parse_formula(bl, c, bound);
        bound.erase(var.text);
        return Formula::exists_domain(var.text, std::move(body));
    }
    std::vector<FormulaPtr> fs{parse_formula_and(bl, c, bound)};
    while (c.eat(Tok::Pipe)) fs.push_back(parse_formula_and(bl, c, bound));
    return fs.size() == 1 ? fs[0] : Formula::lor(std::move(fs));
}

struct Sections {
    std::map<std::string, std::vector<Line>> by_name;  // "initial X" keeps the arg
    std::vector<std::pair<std::string, std::vector<Line>>> initial_blocks;
    std::string name, description;
};

bool balanced(const std::string& s) {
    int d = 0;
    for (char c : s) {
        if (c == '(') ++d;
        if (c == ')') --d;
    }
    return d <= 0;
}

Sections split_sections(const std::vector<std::pair<std::string, std::string>>& files) {
    Sections out;
    for (const auto& [fname, text] : files) {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        bool saw_header = false;
        std::string section;
        std::vector<Line>* sink = nullptr;
        while (std::getline(in, raw)) {
            ++lineno;
            int start_line = lineno;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            // Logical lines continue while parentheses stay open.
            while (!balanced(raw)) {
                std::string more;
                if (!std::getline(in, more)) break;
                ++lineno;
                auto h2 = more.find('#');
                if (h2 != std::string::npos) more = more.substr(0, h2);
                raw += " " + more;
            }
            std::string line = raw;
            auto l = line.find_first_not_of(" \t\r");
            if (l == std::string::npos) continue;
            auto r = line.find_last_not_of(" \t\r");
            line = line.substr(l, r - l + 1);
            SourcePos pos{fname, start_line, (int)l + 1};
            if (!saw_header) {
                if (line != kFormatHeader)
                    throw ParseError(pos, std::string("expected header '") + kFormatHeader + "'");
                saw_header = true;
                continue;
            }
            if (line.rfind("name:", 0) == 0) {
                out.name = line.substr(5);
                auto f = out.name.find_first_not_of(' ');
                out.name = f == std::string::npos ? "" : out.name.substr(f);
                continue;
            }
            if (line.rfind("description:", 0) == 0) {
                out.description = line.substr(12);
                auto f = out.description.find_first_not_of(' ');
                out.description = f == std::string::npos ? "" : out.description.substr(f);
                continue;
            }
            if (line.front() == '[') {
                auto close = line.find(']');
                if (close == std::string::npos)
                    throw ParseError(pos, "unterminated section header");
                std::string rest = line.substr(close + 1);
                auto rl = rest.find_first_not_of(" \t");
                rest = rl == std::string::npos ? "" : rest.substr(rl);
                section = line.substr(1, close - 1);
                if (section.rfind("initial", 0) == 0) {
                    std::istringstream hs(section);
                    std::string kw, actor;
                    hs >> kw >> actor;
                    if (actor.empty()) throw ParseError(pos, "expected '[initial <actor>]'");
                    out.initial_blocks.emplace_back(actor, std::vector<Line>{});
                    sink = &out.initial_blocks.back().second;
                } else {
                    static const std::set<std::string> known = {
                        "entities", "actors", "domains", "info", "props",
                        "contents", "ctx", "trace", "requirements"};
                    if (!known.count(section))
                        throw ParseError(pos, "unknown section '" + section + "'");
                    sink = &out.by_name[section];
                }
                if (!rest.empty())
                    sink->push_back(Line{SourcePos{fname, start_line, (int)close + 2}, rest});
                continue;
            }
            if (!sink) throw ParseError(pos, "content before any section");
            sink->push_back(Line{pos, line});
        }
    }
    return out;
}

void check_randomness_reuse(Builder& bl, std::vector<std::string>& violations) {
    TermArena& a = *bl.b.arena;
    const Model& mo = bl.b.model;
    std::map<AtomId, TermId> owner;  // randomness atom -> sigma image of its session
    auto scan = [&](TermId t, auto&& self) -> void {
        const TermNode& n = a.node(t);
        if (n.ctor == Ctor::Zk || n.ctor == Ctor::Icred) {
            TermId lifted = sigma_lift(mo, *bl.b.arena, t);
            std::vector<ItemId> rand_items;
            collect_items(a, n.kids[3], rand_items);
            for (ItemId it : rand_items) {
                AtomId at = mo.items[it].atom;
                auto [pos, fresh] = owner.emplace(at, lifted);
                if (!fresh && pos->second != lifted)
                    violations.push_back("randomness reuse: atom '" + mo.atoms[at].name +
                                         "' appears in two different sessions");
            }
        }
        for (TermId k : n.kids) self(k, self);
    };
    for (const auto& [actor, kb] : bl.b.initial.per_actor)
        for (TermId t : kb.elems) scan(t, scan);
    for (const Transmission& t : bl.b.trace.steps) scan(t.payload, scan);
}

}  // namespace

ScenarioBundle parse_scenario(const std::vector<std::pair<std::string, std::string>>& files) {
    Sections sec = split_sections(files);
    Builder bl;
    bl.b.name = sec.name;
    bl.b.description = sec.description;
    Model& mo = bl.b.model;

    for (const Line& ln : sec.by_name["entities"]) {
        Cursor c{tokenize(ln)};
        while (c.at(Tok::Name)) {
            Token n = c.next();
            bl.add_atom(n.text, Kind::Entity, -1, n.pos);
        }
        c.done();
    }
    for (const Line& ln : sec.by_name["domains"]) {
        Cursor c{tokenize(ln)};
        while (c.at(Tok::Name)) {
            Token n = c.next();
            bl.dup_check("domain:" + n.text, n.pos, "domain");
            mo.domains.push_back(n.text);
        }
        c.done();
    }
    for (const Line& ln : sec.by_name["info"]) {
        Cursor c{tokenize(ln)};
        Token name = c.expect(Tok::Name, "atom name");
        Token kind = c.expect(Tok::Name, "atom kind");
        if (kind.text == "nonpersonal") {
            bl.add_atom(name.text, Kind::NonPersonal, -1, name.pos);
        } else if (kind.text == "identifier" || kind.text == "data") {
            Token subj = c.expect(Tok::Name, "subject entity");
            AtomId s = bl.need_atom(subj.text, subj.pos);
            bl.add_atom(name.text, kind.text == "identifier" ? Kind::Identifier : Kind::Data, s,
                        name.pos);
        } else {
            throw ParseError(kind.pos, "unknown atom kind '" + kind.text + "'");
        }
        c.done();
    }
    for (const Line& ln : sec.by_name["actors"]) {
        Cursor c{tokenize(ln)};
        while (c.at(Tok::Name)) {
            Token n = c.next();
            bl.dup_check("actor:" + n.text, n.pos, "actor");
            mo.actors.push_back(bl.need_atom(n.text, n.pos));
        }
        c.done();
    }

    // Contents classes: declared groups first, fresh singletons for the rest.
    for (const Line& ln : sec.by_name["contents"]) {
        Cursor c{tokenize(ln)};
        Token kw = c.expect(Tok::Name, "'class'");
        if (kw.text != "class") throw ParseError(kw.pos, "expected 'class'");
        Token label = c.expect(Tok::Name, "class label");
        bl.dup_check("class:" + label.text, label.pos, "contents class");
        int cls = (int)mo.class_names.size();
        mo.class_names.push_back(label.text);
        while (c.at(Tok::Name)) {
            Token n = c.next();
            AtomId at = bl.need_atom(n.text, n.pos);
            if (mo.atoms[at].kind == Kind::Entity)
                throw ResolutionError(n.pos, "entities have no contents");
            if (mo.atoms[at].content_class >= 0)
                throw ParseError(n.pos, "atom '" + n.text + "' already has a contents class");
            mo.atoms[at].content_class = cls;
        }
        c.done();
    }
    for (InfoAtom& at : mo.atoms) {
        if (at.kind == Kind::Entity || at.content_class >= 0) continue;
        at.content_class = (int)mo.class_names.size();
        mo.class_names.push_back("c_" + at.name);
    }

    for (const Line& ln : sec.by_name["ctx"]) {
        Cursor c{tokenize(ln)};
        Token var = c.expect(Tok::Name, "item variable");
        c.expect(Tok::At, "'@'");
        Token dom = c.expect(Tok::Name, "domain");
        c.expect(Tok::Dot, "'.'");
        std::string profile;
        if (c.at(Tok::Name)) profile = c.next().text;
        else if (c.eat(Tok::Dot)) profile = kNoProfile;
        else throw ParseError(c.peek().pos, "expected profile");
        c.expect(Tok::Eq, "'='");
        Token atom = c.expect(Tok::Name, "atom name");
        c.done();
        const auto& doms = mo.domains;
        if (std::find(doms.begin(), doms.end(), dom.text) == doms.end())
            throw ResolutionError(dom.pos, "unknown domain '" + dom.text + "'");
        bl.add_item(var.text, ContextRef{dom.text, profile}, bl.need_atom(atom.text, atom.pos),
                    var.pos);
    }

    // Properties: info-layer map plus the induced context-layer map.
    std::map<std::string, int> prop_ix;
    for (const Line& ln : sec.by_name["props"]) {
        Cursor c{tokenize(ln)};
        Token pname = c.expect(Tok::Name, "property name");
        Token src = c.expect(Tok::Name, "source atom");
        c.expect(Tok::Arrow, "'->'");
        Token img = c.expect(Tok::Name, "image atom");
        c.done();
        auto [pit, fresh] = prop_ix.emplace(pname.text, (int)mo.props.size());
        if (fresh) mo.props.push_back(Property{pname.text, {}, {}});
        Property& p = mo.props[pit->second];
        AtomId sa = bl.need_atom(src.text, src.pos);
        AtomId ia = bl.need_atom(img.text, img.pos);
        if (p.atom_map.count(sa)) throw ParseError(src.pos, "property already defined on atom");
        p.atom_map.emplace(sa, ia);
    }
    for (Property& p : mo.props)
        for (ItemId i = 0; i < (ItemId)mo.items.size(); ++i) {
            auto am = p.atom_map.find(mo.items[i].atom);
            if (am == p.atom_map.end()) continue;
            for (ItemId j : mo.items_in_ctx(mo.items[i].ctx))
                if (mo.items[j].atom == am->second) {
                    p.item_map.emplace(i, j);
                    break;
                }
        }

    auto violations = validate_model(mo);
    if (!violations.empty()) throw ModelInvalidError(std::move(violations));

    bl.b.initial = initial_state(mo);
    for (auto& [actor_name, lines] : sec.initial_blocks) {
        auto actor = mo.actor_by_name(actor_name);
        if (!actor)
            throw ResolutionError(lines.empty() ? SourcePos{"", 0, 0} : lines.front().pos,
                                  "unknown actor '" + actor_name + "'");
        std::vector<TermId> terms;
        for (const Line& ln : lines) {
            Cursor c{tokenize(ln)};
            terms.push_back(parse_term(bl, c, "", /*allow_entity=*/true));
            c.done();
        }
        KnowledgeBase& kb = bl.b.initial.per_actor.at(*actor);
        kb = kb.with(terms);
    }

    std::string block_domain;
    for (const Line& ln : sec.by_name["trace"]) {
        Cursor c{tokenize(ln)};
        if (c.at(Tok::RBrace)) {
            c.next();
            c.done();
            if (block_domain.empty()) throw ParseError(ln.pos, "'}' outside an 'in' block");
            block_domain.clear();
            continue;
        }
        Token head = c.expect(Tok::Name, "transmission");
        if (head.text == "in") {
            Token dom = c.expect(Tok::Name, "domain");
            c.expect(Tok::LBrace, "'{'");
            c.done();
            if (!block_domain.empty()) throw ParseError(head.pos, "nested 'in' blocks");
            const auto& doms = mo.domains;
            if (std::find(doms.begin(), doms.end(), dom.text) == doms.end())
                throw ResolutionError(dom.pos, "unknown domain '" + dom.text + "'");
            block_domain = dom.text;
            continue;
        }
        Transmission tx;
        if (head.text == "send") tx.type = TxType::Send;
        else if (head.text == "zk") tx.type = TxType::ZkSession;
        else if (head.text == "icred") tx.type = TxType::IcredSession;
        else throw ParseError(head.pos, "unknown transmission '" + head.text + "'");
        ItemId sa = parse_leaf_ref(bl, c, block_domain);
        if (tx.type == TxType::Send) c.expect(Tok::Arrow, "'->'");
        else c.expect(Tok::DArrow, "'<->'");
        ItemId sb = parse_leaf_ref(bl, c, block_domain);
        c.expect(Tok::Colon, "':'");
        TermId payload = parse_term(bl, c, block_domain);
        c.done();
        for (ItemId addr : {sa, sb})
            if (mo.items[addr].kind != Kind::Identifier)
                throw ResolutionError(ln.pos, "address " + mo.item_str(addr) +
                                                  " is not an identifier");
        tx.sender = bl.b.arena->ctx_leaf(sa);
        tx.receiver = bl.b.arena->ctx_leaf(sb);
        tx.payload = payload;
        const TermNode& pn = bl.b.arena->node(payload);
        if (tx.type == TxType::ZkSession && pn.ctor != Ctor::Zk)
            throw ParseError(ln.pos, "zk transmission payload must be a zk term");
        if (tx.type == TxType::IcredSession && pn.ctor != Ctor::Icred)
            throw ParseError(ln.pos, "icred transmission payload must be an icred term");
        bl.b.trace.steps.push_back(tx);
    }
    if (!block_domain.empty())
        throw ParseError(SourcePos{"", 0, 0}, "unterminated 'in' block in [trace]");

    for (const Line& ln : sec.by_name["requirements"]) {
        Cursor c{tokenize(ln)};
        Token name = c.expect(Tok::Name, "requirement name");
        bl.dup_check("req:" + name.text, name.pos, "requirement");
        c.expect(Tok::Colon, "':'");
        std::set<std::string> bound;
        FormulaPtr f = parse_formula(bl, c, bound);
        c.done();
        bl.b.suite.reqs.push_back(Requirement{name.text, std::move(f)});
    }

    std::vector<std::string> lint;
    check_randomness_reuse(bl, lint);
    if (!lint.empty()) throw ModelInvalidError(std::move(lint));

    return std::move(bl.b);
}

ScenarioBundle load_scenario_dir(const std::string& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const char* base : {"model.pls", "initial.pls", "trace.pls", "requirements.pls"}) {
        std::string path = dir + "/" + base;
        std::ifstream in(path);
        if (!in) {
            if (std::string(base) == "model.pls")
                throw std::runtime_error("cannot open " + path);
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        files.emplace_back(path, ss.str());
    }
    return parse_scenario(files);
}

std::string pretty_print(const ScenarioBundle& b) {
    const Model& mo = b.model;
    const TermArena& a = *b.arena;
    std::ostringstream o;
    o << kFormatHeader << "\n";
    if (!b.name.empty()) o << "name: " << b.name << "\n";
    if (!b.description.empty()) o << "description: " << b.description << "\n";

    o << "\n[entities]";
    for (const InfoAtom& at : mo.atoms)
        if (at.kind == Kind::Entity) o << " " << at.name;
    o << "\n[actors]";
    for (AtomId x : mo.actors) o << " " << mo.atoms[x].name;
    o << "\n[domains]";
    for (const std::string& d : mo.domains) o << " " << d;
    o << "\n\n[info]\n";
    for (const InfoAtom& at : mo.atoms) {
        if (at.kind == Kind::Entity) continue;
        o << at.name << " " << kind_name(at.kind);
        if (at.kind != Kind::NonPersonal) o << " " << mo.atoms[at.subject].name;
        o << "\n";
    }
    o << "\n[props]\n";
    for (const Property& p : mo.props)
        for (const auto& [src, img] : p.atom_map)
            o << p.id << " " << mo.atoms[src].name << " -> " << mo.atoms[img].name << "\n";
    o << "\n[contents]\n";
    {
        std::map<int, std::vector<std::string>> groups;
        for (const InfoAtom& at : mo.atoms)
            if (at.kind != Kind::Entity) groups[at.content_class].push_back(at.name);
        for (const auto& [cls, names] : groups) {
            if (names.size() < 2) continue;
            o << "class " << mo.class_names[cls];
            for (const std::string& n : names) o << " " << n;
            o << "\n";
        }
    }
    o << "\n[ctx]\n";
    for (const ContextItem& it : mo.items)
        o << it.var << "@" << it.ctx.domain << "." << it.ctx.profile << " = "
          << mo.atoms[it.atom].name << "\n";
    for (const auto& [actor, kb] : b.initial.per_actor) {
        o << "\n[initial " << mo.atoms[actor].name << "]\n";
        for (TermId t : kb.elems) o << term_str(mo, a, t) << "\n";
    }
    o << "\n[trace]\n";
    for (const Transmission& t : b.trace.steps) {
        const char* kw = t.type == TxType::Send ? "send" : t.type == TxType::ZkSession ? "zk" : "icred";
        const char* arrow = t.type == TxType::Send ? "->" : "<->";
        o << kw << " " << term_str(mo, a, t.sender) << " " << arrow << " "
          << term_str(mo, a, t.receiver) << " : " << term_str(mo, a, t.payload) << "\n";
    }
    o << "\n[requirements]\n";
    for (const Requirement& r : b.suite.reqs)
        o << r.name << " : " << formula_str(mo, *r.formula) << "\n";
    return o.str();
}

TermId parse_term_in(ScenarioBundle& b, const std::string& text) {
    Builder bl;
    // Borrow the bundle's model and arena without copying.
    ScenarioBundle tmp;
    tmp.model = std::move(b.model);
    tmp.arena = std::move(b.arena);
    bl.b = std::move(tmp);
    TermId out = kNoTerm;
    try {
        Line ln{SourcePos{"<arg>", 1, 1}, text};
        Cursor c{tokenize(ln)};
        out = parse_term(bl, c, "", /*allow_entity=*/true);
        c.done();
    } catch (...) {
        b.model = std::move(bl.b.model);
        b.arena = std::move(bl.b.arena);
        throw;
    }
    b.model = std::move(bl.b.model);
    b.arena = std::move(bl.b.arena);
    return out;
}

}  // namespace privlens
