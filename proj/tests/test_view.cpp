#include <doctest.h>

#include "helpers.hpp"
#include "view.hpp"

using namespace privlens;
using namespace privlens::test;

namespace {

std::vector<std::string> names(const Model& m, const std::vector<ItemId>& items) {
    std::vector<std::string> out;
    for (ItemId i : items) out.push_back(m.item_str(i));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("the client's associability classes after the exchange (Example 6)") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto [st, rep] = evolve(az, b.initial, b.trace, false);
    KbAnalysis& an = az.analysis(st.per_actor.at(*b.model.actor_by_name("cli")));
    Partition p = associability(b.model, an);
    auto item = [&](const char* v, const char* d, const char* pr) {
        return b.model.find_item(v, ContextRef{d, pr});
    };

    CHECK(names(b.model, p.class_of(item("teln", "ab", "12"))) ==
          std::vector<std::string>{"ds@ab.12", "teln@ab.12"});
    CHECK(names(b.model, p.class_of(item("id", "pi", "su"))) ==
          std::vector<std::string>{"age@pi.su", "ds@ab.4", "id@ab.4", "id@pi.su"});
    CHECK(names(b.model, p.class_of(item("ip", "pi", "cl"))) ==
          std::vector<std::string>{"ip@dot.me", "ip@pi.cl"});
    CHECK(names(b.model, p.class_of(item("ip", "pi", "srv"))) ==
          std::vector<std::string>{"ip@dot.srv", "ip@pi.srv", "sk@dot.srv", "sk@pi.srv"});
}

TEST_CASE("association of undetectable items across domains (Example 7)") {
    ModelBuilder b;
    b.entity("e1");
    b.atom("shakey", Kind::NonPersonal, -1, "g_key");
    b.atom("id1", Kind::Identifier, b.m.atom_id("e1"));
    b.atom("d", Kind::Data, b.m.atom_id("e1"));
    b.atom("d'", Kind::Data, b.m.atom_id("e1"));
    b.item("shakey", "eta", ".", "shakey");
    b.item("shakey", "chi", ".", "shakey");
    b.item("id", "eta", "1", "id1");
    b.item("id", "chi", "1", "id1");
    b.item("d", "eta", "1", "d");
    b.item("d'", "chi", "1", "d'");
    TermArena& a = b.a;
    TermId m1 = a.make(Ctor::Cat, {a.make(Ctor::Aenc, {b.leaf("shakey", "eta", "."),
                                                       b.leaf("id", "eta", "1")}),
                                   b.leaf("d", "eta", "1")});
    TermId m2 = a.make(Ctor::Cat, {a.make(Ctor::Aenc, {b.leaf("shakey", "chi", "."),
                                                       b.leaf("id", "chi", "1")}),
                                   b.leaf("d'", "chi", "1")});
    Analyzer az(b.m, a);
    KbAnalysis& an = az.analysis(KnowledgeBase::of("a", {m1, m2}));

    // neither identifier nor key is detectable
    CHECK_FALSE(an.derivable(b.leaf("id", "eta", "1")));
    CHECK_FALSE(an.derivable(b.leaf("shakey", "eta", ".")));

    Partition p = associability(b.m, an);
    CHECK(p.same(b.model_item("d", "eta", "1"), b.model_item("d'", "chi", "1")));
    CHECK(p.same(b.model_item("id", "eta", "1"), b.model_item("id", "chi", "1")));
}

TEST_CASE("views list detectable items and known entities only") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto [st, rep] = evolve(az, b.initial, b.trace, false);
    View v = view_of(b.model, az.analysis(st.per_actor.at(*b.model.actor_by_name("cli"))));
    auto item = [&](const char* vn, const char* d, const char* pr) {
        return b.model.find_item(vn, ContextRef{d, pr});
    };
    CHECK(v.detects(item("id", "pi", "su")));
    CHECK(v.detects(item("age", "pi", "su")));
    CHECK(v.detects(item("ds", "ab", "4")));
    // the server-side database stays invisible
    CHECK_FALSE(v.detects(item("col1", "db", "1")));
    CHECK_FALSE(v.detects(item("key", "db", "1")));
    CHECK_FALSE(v.detects(item("ds", "db", "1")));
    // the private key is associable but not detectable
    CHECK_FALSE(v.detects(item("sk", "pi", "srv")));
    CHECK(v.assoc.same(item("sk", "pi", "srv"), item("ip", "dot", "srv")));

    SUBCASE("empty knowledge base sees nothing") {
        View e = view_of(b.model, az.analysis(KnowledgeBase::of("nobody", {})));
        CHECK(e.detectable.empty());
    }
}

TEST_CASE("coalition view joins and contains the members (Example 2 / Fig. 3)") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto [st, rep] = evolve(az, b.initial, b.trace, false);
    AtomId cli = *b.model.actor_by_name("cli");
    AtomId srv = *b.model.actor_by_name("srv");
    KnowledgeBase both = coalition_kb(st.per_actor, {cli, srv}, b.model);
    View vc = view_of(b.model, az.analysis(st.per_actor.at(cli)));
    View vs = view_of(b.model, az.analysis(st.per_actor.at(srv)));
    View vb = view_of(b.model, az.analysis(both));
    auto item = [&](const char* vn, const char* d, const char* pr) {
        return b.model.find_item(vn, ContextRef{d, pr});
    };

    // all of Alice's items are mutually associable for the coalition
    CHECK(vb.assoc.same(item("id", "ab", "4"), item("key", "db", "1")));
    CHECK(vb.assoc.same(item("col1", "db", "1"), item("age", "pi", "su")));
    // Bob's two halves stay apart
    CHECK_FALSE(vb.assoc.same(item("teln", "ab", "12"), item("col1", "db", "2")));
    CHECK(ctx_associable(b.model, vb, ContextRef{"ab", "4"}, ContextRef{"db", "1"}));
    CHECK_FALSE(ctx_associable(b.model, vb, ContextRef{"ab", "12"}, ContextRef{"db", "2"}));
    // reflexive context association
    CHECK(ctx_associable(b.model, vb, ContextRef{"ab", "12"}, ContextRef{"ab", "12"}));

    // member views are contained in the coalition view
    for (ItemId it : vc.detectable) CHECK(vb.detects(it));
    for (ItemId it : vs.detectable) CHECK(vb.detects(it));
    CHECK(vc.assoc.refines(vb.assoc));
    CHECK(vs.assoc.refines(vb.assoc));

    // singleton coalition equals the member
    KnowledgeBase solo = coalition_kb(st.per_actor, {cli}, b.model);
    CHECK(solo.elems == st.per_actor.at(cli).elems);
}

TEST_CASE("partition is an equivalence relation on all personal items") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto [st, rep] = evolve(az, b.initial, b.trace, false);
    Partition p =
        associability(b.model, az.analysis(st.per_actor.at(*b.model.actor_by_name("cli"))));
    size_t covered = 0;
    for (const auto& cls : p.classes()) covered += cls.size();
    CHECK(covered == b.model.personal_items().size());
    for (ItemId i : b.model.personal_items()) {
        CHECK(p.same(i, i));
        for (ItemId j : b.model.personal_items()) {
            CHECK(p.same(i, j) == p.same(j, i));
        }
    }
}
