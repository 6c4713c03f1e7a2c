#include <doctest.h>

#include <functional>

#include "helpers.hpp"
#include "oracle.hpp"
#include "view.hpp"

using namespace privlens;
using namespace privlens::test;

// The saturation oracle applies every inference rule to exhaustion over a
// bounded universe; the engine must agree with it on every sampled query.

TEST_CASE("engine agrees with the saturation oracle on random knowledge bases") {
    std::mt19937_64 rng(20240817);
    int disagreements = 0;
    const int runs = 120;
    for (int i = 0; i < runs; ++i) {
        GeneratedCase g = generate_case(rng);
        Analyzer az(g.model, *g.arena);
        KbAnalysis& an = az.analysis(KnowledgeBase::of("a", g.kb));
        SaturationOracle oracle(g.model, *g.arena, g.kb, g.queries);
        for (TermId q : g.queries) {
            bool engine = an.derivable(q);
            bool brute = oracle.derivable(q);
            if (engine != brute) {
                ++disagreements;
                CAPTURE(i);
                CAPTURE(term_str(g.model, *g.arena, q));
                CHECK(engine == brute);
            }
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("contents oracle matches derivability lifted through contents") {
    std::mt19937_64 rng(987654);
    for (int i = 0; i < 60; ++i) {
        GeneratedCase g = generate_case(rng, 8, 3, 6);
        Analyzer az(g.model, *g.arena);
        KbAnalysis& an = az.analysis(KnowledgeBase::of("a", g.kb));
        for (TermId q : g.queries) {
            // derivability always implies contents derivability
            if (an.derivable_no_ca(q))
                CHECK(an.contents_derivable(content_class(g.model, *g.arena, q)));
        }
    }
}

TEST_CASE("algebraic laws on generated instances") {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 40; ++i) {
        GeneratedCase g = generate_case(rng, 10, 3, 7);
        Analyzer az(g.model, *g.arena);

        // split the kb into a smaller and the full base
        std::vector<TermId> small(g.kb.begin(), g.kb.begin() + g.kb.size() / 2);
        KbAnalysis& an_small = az.analysis(KnowledgeBase::of("s", small));
        KbAnalysis& an_full = az.analysis(KnowledgeBase::of("f", g.kb));

        for (TermId q : g.queries) {
            if (an_small.derivable(q)) CHECK(an_full.derivable(q));
        }

        Partition ps = associability(g.model, an_small);
        Partition pf = associability(g.model, an_full);
        CHECK(ps.refines(pf));

        View vs = view_of(g.model, an_small);
        View vf = view_of(g.model, an_full);
        for (ItemId it : vs.detectable) CHECK(vf.detects(it));

        // equivalence implies content equivalence on random term pairs
        for (size_t x = 0; x + 1 < g.queries.size(); x += 2) {
            TermId t1 = g.queries[x], t2 = g.queries[x + 1];
            if (equivalent(g.model, *g.arena, t1, t2))
                CHECK(content_equivalent(g.model, *g.arena, t1, t2));
        }
    }
}

TEST_CASE("partition computed by union-find equals naive transitive closure") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 20; ++i) {
        GeneratedCase g = generate_case(rng, 8, 2, 6);
        if (g.model.items.size() > 40) continue;
        Analyzer az(g.model, *g.arena);
        KbAnalysis& an = az.analysis(KnowledgeBase::of("a", g.kb));
        Partition p = associability(g.model, an);

        // naive closure: evidence chains over all context items first, then
        // the three association rules, then plain transitive closure
        std::map<ItemId, std::set<ItemId>> ev;
        for (ItemId a = 0; a < (ItemId)g.model.items.size(); ++a)
            for (ItemId b = 0; b < (ItemId)g.model.items.size(); ++b) {
                if (a >= b) continue;
                if (g.model.items[a].kind == Kind::Entity ||
                    g.model.items[b].kind == Kind::Entity)
                    continue;
                if (an.evidence_for(a, b)) {
                    ev[a].insert(b);
                    ev[b].insert(a);
                }
            }
        std::function<void(ItemId, std::set<ItemId>&)> evdfs = [&](ItemId x,
                                                                   std::set<ItemId>& seen) {
            if (!seen.insert(x).second) return;
            for (ItemId y : ev[x]) evdfs(y, seen);
        };

        auto items = g.model.personal_items();
        std::map<ItemId, std::set<ItemId>> adj;
        auto link = [&](ItemId a, ItemId b) {
            adj[a].insert(b);
            adj[b].insert(a);
        };
        for (ItemId a : items)
            for (ItemId b : items) {
                if (a >= b) continue;
                const ContextItem& ia = g.model.items[a];
                const ContextItem& ib = g.model.items[b];
                if (ia.ctx == ib.ctx) link(a, b);
                if (ia.kind == Kind::Identifier && ib.kind == Kind::Identifier) {
                    std::set<ItemId> chain;
                    evdfs(a, chain);
                    if (chain.count(b)) link(a, b);
                }
            }
        std::vector<ItemId> ents = an.kb_entities();
        for (ItemId a : ents)
            for (ItemId b : ents)
                if (a != b && g.model.items[a].atom == g.model.items[b].atom) link(a, b);

        std::function<void(ItemId, std::set<ItemId>&)> dfs = [&](ItemId x, std::set<ItemId>& seen) {
            if (!seen.insert(x).second) return;
            for (ItemId y : adj[x]) dfs(y, seen);
        };
        for (ItemId a : items) {
            std::set<ItemId> comp;
            dfs(a, comp);
            for (ItemId b : items) CHECK(p.same(a, b) == (comp.count(b) != 0));
        }
    }
}
