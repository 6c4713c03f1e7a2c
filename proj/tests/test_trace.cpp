#include <doctest.h>

#include "helpers.hpp"

using namespace privlens;
using namespace privlens::test;

TEST_CASE("evolution grows exactly the participants' knowledge (Example 9)") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto [st, rep] = evolve(az, b.initial, b.trace, false);
    AtomId cli = *b.model.actor_by_name("cli");
    AtomId srv = *b.model.actor_by_name("srv");
    auto leaf = [&](const char* v, const char* d, const char* p) {
        return b.arena->ctx_leaf(b.model.find_item(v, ContextRef{d, p}));
    };

    const KnowledgeBase& kc = st.per_actor.at(cli);
    const KnowledgeBase& ks = st.per_actor.at(srv);
    // both gained the addresses and both ciphertexts
    for (const KnowledgeBase* kb : {&kc, &ks}) {
        CHECK(kb->contains(leaf("ip", "pi", "cl")));
        CHECK(kb->contains(leaf("ip", "pi", "srv")));
        CHECK(kb->contains(b.trace.steps[0].payload));
        CHECK(kb->contains(b.trace.steps[1].payload));
    }
    // and the state equals initial knowledge plus exactly those four
    KnowledgeBase expect_cli = b.initial.per_actor.at(cli).with(
        {leaf("ip", "pi", "cl"), leaf("ip", "pi", "srv"), b.trace.steps[0].payload,
         b.trace.steps[1].payload});
    CHECK(kc.elems == expect_cli.elems);

    SUBCASE("uninvolved actors keep their knowledge") {
        Transmission t = b.trace.steps[0];
        SystemState s1 = evolve_step(az, b.initial, t);
        // nobody else exists in this scenario; monotonicity on participants
        CHECK(s1.per_actor.at(cli).elems.size() >
              b.initial.per_actor.at(cli).elems.size());
    }
    SUBCASE("empty trace leaves the state unchanged") {
        auto [s2, r2] = evolve(az, b.initial, Trace{}, true);
        CHECK(s2.per_actor.at(cli).elems == b.initial.per_actor.at(cli).elems);
        CHECK(r2.valid);
    }
}

TEST_CASE("determined items track occurrence and properties") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    auto item = [&](const char* v, const char* d, const char* p) {
        return b.model.find_item(v, ContextRef{d, p});
    };
    auto det0 = determined_items(b.model, *b.arena, b.initial);
    CHECK_FALSE(det0.count(item("id", "pi", "su")));
    CHECK_FALSE(det0.count(item("shkey", "pi", ".")));
    CHECK(det0.count(item("skey", "dot", ".")));

    SystemState s1 = evolve_step(az, b.initial, b.trace.steps[0]);
    auto det1 = determined_items(b.model, *b.arena, s1);
    CHECK(det1.count(item("id", "pi", "su")));
    CHECK(det1.count(item("shkey", "pi", ".")));
    CHECK(det1.count(item("ip", "pi", "cl")));
}

TEST_CASE("psi images of occurring items are determined") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("identity-mixer"));
    auto item = [&](const char* v, const char* d, const char* p) {
        return b.model.find_item(v, ContextRef{d, p});
    };
    auto det0 = determined_items(b.model, *b.arena, b.initial);
    CHECK(det0.count(item("d2", "kappa", "al")));
    CHECK(det0.count(item("d2>60", "kappa", "al")));
}

TEST_CASE("determinability witnesses of the worked example") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    AtomId cli = *b.model.actor_by_name("cli");
    AtomId srv = *b.model.actor_by_name("srv");
    auto leaf = [&](const char* v, const char* d, const char* p) {
        return b.arena->ctx_leaf(b.model.find_item(v, ContextRef{d, p}));
    };
    TermArena& a = *b.arena;

    SUBCASE("the client instantiates the first message from its own items") {
        TermId m = a.make(Ctor::Senc, {leaf("shkey", "pi", "."), leaf("id", "pi", "su")});
        auto w = determinable(az, b.initial, cli, m);
        REQUIRE(w.has_value());
        TermId expect = a.make(Ctor::Senc, {leaf("skey", "dot", "."), leaf("id", "ab", "4")});
        CHECK(*w == expect);
    }
    SUBCASE("the server's reply keeps determined items and maps the age onto its column") {
        SystemState s1 = evolve_step(az, b.initial, b.trace.steps[0]);
        TermId m = b.trace.steps[1].payload;
        auto w = determinable(az, s1, srv, m);
        REQUIRE(w.has_value());
        // the key is determined by the first message, so it stays
        CHECK(*subterm_at(a, *w, {0}) == leaf("shkey", "pi", "."));
        // condition 3 anchors the substituted age at the database column
        CHECK(*subterm_at(a, *w, {1, 0}) == leaf("col1", "db", "1"));
        // consistent substitution inside the signature
        CHECK(*subterm_at(a, *w, {1, 2, 1, 0}) == leaf("col1", "db", "1"));
    }
    SUBCASE("fully determined terms are determinable iff derivable") {
        TermId own = leaf("id", "ab", "4");
        auto w = determinable(az, b.initial, cli, own);
        REQUIRE(w.has_value());
        CHECK(*w == own);
        // the database column is determined but never reaches the client
        auto none = determinable(az, b.initial, cli, leaf("col1", "db", "1"));
        CHECK_FALSE(none.has_value());
    }
}

TEST_CASE("transmission validity per party") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("client-server"));
    Analyzer az(b.model, *b.arena);
    StepValidity sv = transmission_valid(az, b.initial, b.trace.steps[0], 0);
    CHECK(sv.valid);
    REQUIRE(sv.checks.size() == 1);  // plain sends burden only the sender
    CHECK(sv.checks[0].actor == *b.model.actor_by_name("cli"));
}

TEST_CASE("zk sessions split the burden between prover and verifier") {
    ScenarioBundle b = load_scenario_dir(corpus_dir("smart-certificates"));
    Analyzer az(b.model, *b.arena);
    auto [s1, r1] = evolve(az, b.initial, Trace{{b.trace.steps[0]}}, false);
    const Transmission& zk = b.trace.steps[1];
    REQUIRE(zk.type == TxType::ZkSession);
    StepValidity sv = transmission_valid(az, s1, zk, 1);
    CHECK(sv.valid);
    REQUIRE(sv.checks.size() == 2);
    CHECK(sv.checks[0].actor == *b.model.actor_by_name("al"));
    CHECK(sv.checks[1].actor == *b.model.actor_by_name("ii"));

    SUBCASE("a verifier without its challenge randomness fails") {
        SystemState broken = s1;
        AtomId ii = *b.model.actor_by_name("ii");
        TermId nzb = b.arena->ctx_leaf(b.model.find_item("nzb", ContextRef{"pi", "."}));
        KnowledgeBase kb = broken.per_actor.at(ii);
        std::vector<TermId> elems;
        for (TermId t : kb.elems)
            if (t != nzb) elems.push_back(t);
        broken.per_actor.at(ii) = KnowledgeBase::of(kb.owner, elems);
        StepValidity bad = transmission_valid(az, broken, zk, 1);
        CHECK_FALSE(bad.valid);
        CHECK_FALSE(bad.checks[1].ok);
    }
}

TEST_CASE("all corpus traces are valid at every step") {
    for (const char* name : {"client-server", "smart-certificates", "linking-service",
                             "identity-mixer", "smartcard"}) {
        CAPTURE(name);
        ScenarioBundle b = load_scenario_dir(corpus_dir(name));
        Analyzer az(b.model, *b.arena);
        auto [st, rep] = evolve(az, b.initial, b.trace, true);
        CHECK(rep.valid);
        for (const StepValidity& sv : rep.steps) CHECK(sv.valid);
    }
}

TEST_CASE("evolution is monotone along every corpus trace") {
    for (const char* name : {"smart-certificates", "identity-mixer"}) {
        ScenarioBundle b = load_scenario_dir(corpus_dir(name));
        Analyzer az(b.model, *b.arena);
        SystemState s = b.initial;
        for (const Transmission& t : b.trace.steps) {
            SystemState next = evolve_step(az, s, t);
            for (const auto& [actor, kb] : s.per_actor) {
                const KnowledgeBase& nk = next.per_actor.at(actor);
                for (TermId e : kb.elems) CHECK(nk.contains(e));
            }
            s = std::move(next);
        }
    }
}
