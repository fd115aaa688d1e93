#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "corpus_gen.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/topics/engine.hpp"
#include "oracle.hpp"

using namespace newsnet;
using namespace newsnet::topics;
using testing_support::close;
using testing_support::Oracle;
using testing_support::OracleCtx;

namespace {

struct Fixture {
    std::vector<ingest::AnnotatedDocument> docs;
    std::shared_ptr<const store::NetworkStore> store;
    std::unique_ptr<Oracle> oracle;
};

Fixture make(std::uint32_t seed, std::size_t n = 60) {
    testing_support::GenParams p;
    p.docs = n;
    p.seed = seed;
    p.entities = 10;
    p.terms = 40;
    p.days = 8;
    Fixture f;
    f.docs = testing_support::generate_corpus(p);
    f.store = std::make_shared<const store::NetworkStore>(testing_support::build_store(f.docs));
    f.oracle = std::make_unique<Oracle>(f.docs);
    return f;
}

QueryContext ctx_of(const store::NetworkStore& s, int from = 0, int to = -1, std::vector<std::string> outlets = {}) {
    const auto span = *s.span();
    QueryContext c;
    c.range = DateRange::of(span.start + from, to < 0 ? span.end : span.start + to);
    c.outlets = std::move(outlets);
    return c;
}

OracleCtx to_oracle(const QueryContext& c) { return {c.range, {c.outlets.begin(), c.outlets.end()}}; }

}  // namespace

TEST(Score, PerfectEdgeScoresOne) {
    // The pair always cooccurs, on every day of the range, at distance 0, and is the largest edge.
    const auto c = score_components(4, 4, 4, 4, 4, 4, 4.0);
    EXPECT_DOUBLE_EQ(c.c_doc, 1.0);
    EXPECT_DOUBLE_EQ(c.c_time, 1.0);
    EXPECT_DOUBLE_EQ(c.c_dist, 1.0);
    EXPECT_DOUBLE_EQ(omega(c), 1.0);
}

TEST(Score, DistanceDecayExample) {
    // Single document, single day, one sentence apart: c_dist = 1 / e^-1 = e.
    const auto c = score_components(1, 1, 1, 1, 1, 1, std::exp(-1.0));
    EXPECT_NEAR(c.c_dist, std::exp(1.0), 1e-12);
    EXPECT_NEAR(omega(c), 3.0 / (2.0 + std::exp(1.0)), 1e-12);
    EXPECT_NEAR(omega(c), 0.63582, 1e-5);
}

TEST(Score, AbsentEdgeIsAnError) {
    EXPECT_THROW(score_components(1, 1, 0, 1, 0, 1, 0.0), AbsentEdgeError);
    EXPECT_THROW(score_components(1, 1, 1, 1, 1, 1, 0.0), AbsentEdgeError);
}

TEST(TopicEngine, DmaxIsTheLargestEdgeOfAnyKind) {
    auto f = make(1);
    TopicEngine engine(f.store);
    for (int from = 0; from < 8; from += 3) {
        for (const std::vector<std::string>& outlets : {std::vector<std::string>{}, {"outlet1"}}) {
            const auto c = ctx_of(*f.store, from, std::min(from + 2, 7), outlets);
            EXPECT_EQ(engine.compute_dmax(c), f.oracle->dmax(to_oracle(c)));
            EXPECT_EQ(engine.compute_dmax(c), f.oracle->dmax(to_oracle(c)));  // cached
        }
    }
    auto empty = ctx_of(*f.store);
    empty.range = DateRange::of(f.store->span()->end + 10, f.store->span()->end + 20);
    EXPECT_THROW(engine.compute_dmax(empty), NoDataError);
}

TEST(TopicEngine, EdgeScoresMatchOracleAndAreSymmetric) {
    for (std::uint32_t seed = 2; seed < 6; ++seed) {
        auto f = make(seed);
        TopicEngine engine(f.store);
        const auto c = ctx_of(*f.store, 1, 6);
        for (const auto& [v, w] : f.oracle->pairs()) {
            const auto want = f.oracle->omega(v, w, to_oracle(c));
            const auto fwd = f.store->edge_view(v, w, c.range, f.store->all_outlets(), false);
            ASSERT_EQ(want.has_value(), fwd.has_value());
            if (!fwd) continue;
            const auto s = engine.edge_score(*fwd, c);
            EXPECT_TRUE(close(s.omega, *want)) << s.omega << " vs " << *want;
            EXPECT_GT(s.omega, 0.0);
            EXPECT_LE(s.omega, 1.0);
            EXPECT_GE(s.parts.c_doc, 1.0);
            EXPECT_GE(s.parts.c_time, 1.0);
            EXPECT_GE(s.parts.c_dist, 1.0);
            const auto rev = f.store->edge_view(w, v, c.range, f.store->all_outlets(), false);
            EXPECT_EQ(engine.edge_score(*rev, c).omega, s.omega);
        }
    }
}

TEST(TopicEngine, GlobalRankingIsTopKOfBruteForce) {
    auto f = make(7);
    TopicEngine engine(f.store);
    for (int k : {1, 3, 10, 1000}) {
        auto c = ctx_of(*f.store, 0, 5, {"outlet0", "outlet2"});
        c.num_edges = k;
        const auto got = engine.global_edge_ranking(c);
        const auto want = f.oracle->ranking(to_oracle(c));
        const auto err = testing_support::check_topk(
            got, want, static_cast<std::size_t>(k), [](const ScoredEdge& e) { return std::make_pair(e.a, e.b); },
            [](const testing_support::Ranked& r) { return std::make_pair(r.a, r.b); },
            [](const ScoredEdge& e) { return e.omega; }, [](const testing_support::Ranked& r) { return r.omega; });
        EXPECT_EQ(err, "") << "k=" << k;
        EXPECT_TRUE(std::is_sorted(got.begin(), got.end(), ranks_before));
        for (const auto& e : got) EXPECT_TRUE(e.a.is_entity() && e.b.is_entity());
    }
    auto c = ctx_of(*f.store);
    c.num_edges = 0;
    EXPECT_THROW(engine.global_edge_ranking(c), InvalidArgument);
}

TEST(TopicEngine, ExpandTermsClosesTriangles) {
    auto f = make(8);
    TopicEngine engine(f.store);
    auto c = ctx_of(*f.store);
    c.num_edges = 5;
    for (const auto& seed : engine.global_edge_ranking(c)) {
        const auto all = f.oracle->terms(seed.a, seed.b, to_oracle(c));
        for (int m : {1, 3, 10}) {
            c.num_terms = m;
            const auto got = engine.expand_terms(seed, c);
            const auto err = testing_support::check_topk(
                got, all, static_cast<std::size_t>(m), [](const TermScore& t) { return t.term; },
                [](const testing_support::RankedTerm& t) { return t.term; }, [](const TermScore& t) { return t.score; },
                [](const testing_support::RankedTerm& t) { return t.score; });
            EXPECT_EQ(err, "") << to_string(seed.a) << "-" << to_string(seed.b) << " m=" << m;
            for (const auto& t : got) {
                EXPECT_TRUE(f.oracle->edge(seed.a, t.term, to_oracle(c)));
                EXPECT_TRUE(f.oracle->edge(seed.b, t.term, to_oracle(c)));
                EXPECT_TRUE(close(t.score, 2.0 / (1.0 / t.omega_a + 1.0 / t.omega_b)));
            }
        }
    }
}

TEST(TopicEngine, TargetedEdgeValidatesEndpoints) {
    auto f = make(9);
    TopicEngine engine(f.store);
    const auto c = ctx_of(*f.store);
    EXPECT_THROW(engine.targeted_edge(NodeRef::entity("E1"), NodeRef::entity("E1"), c), InvalidArgument);
    EXPECT_THROW(engine.targeted_edge(NodeRef::entity("E1"), NodeRef::term("x"), c), InvalidArgument);
    EXPECT_FALSE(engine.targeted_edge(NodeRef::entity("E1"), NodeRef::entity("nobody"), c));
    const auto [v, w] = *std::find_if(f.oracle->pairs().begin(), f.oracle->pairs().end(), [&](const auto& p) {
        return p.second.is_entity() && f.oracle->edge(p.first, p.second, to_oracle(c));
    });
    const auto e = engine.targeted_edge(w, v, c);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->a, v);
    EXPECT_TRUE(close(e->omega, *f.oracle->omega(v, w, to_oracle(c))));
}

TEST(TopicEngine, AdjacentEntitiesMatchBruteForce) {
    auto f = make(10);
    TopicEngine engine(f.store);
    const auto c = ctx_of(*f.store, 2, 7);
    for (int e = 0; e < 10; ++e) {
        const auto entity = NodeRef::entity("E" + std::to_string(e));
        const auto want = f.oracle->adjacent(entity, to_oracle(c));
        for (std::size_t k : {1u, 3u, 10u}) {
            const auto got = engine.adjacent_entities(entity, c, k);
            EXPECT_EQ(testing_support::check_topk(
                          got, want, k, [](const ScoredEdge& s) { return std::make_pair(s.a, s.b); },
                          [](const testing_support::Ranked& r) { return std::make_pair(r.a, r.b); },
                          [](const ScoredEdge& s) { return s.omega; },
                          [](const testing_support::Ranked& r) { return r.omega; }),
                      "");
        }
    }
}

TEST(TopicEngine, RecommendationsMatchBruteForce) {
    auto f = make(11);
    TopicEngine engine(f.store);
    const auto c = ctx_of(*f.store);
    std::mt19937 rng(11);
    const auto nodes = f.oracle->nodes();
    const std::vector<NodeRef> pool(nodes.begin(), nodes.end());
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<NodeRef> sel;
        const std::size_t n = 2 + rng() % 3;
        while (sel.size() < n) {
            const auto& cand = pool[rng() % std::min<std::size_t>(pool.size(), 30)];
            if (std::find(sel.begin(), sel.end(), cand) == sel.end()) sel.push_back(cand);
        }
        const auto want = f.oracle->recommend(sel, to_oracle(c));
        for (std::size_t limit : {1u, 3u, 10u}) {
            const auto got = engine.recommend_articles(sel, c, limit);
            ASSERT_EQ(got.size(), std::min(limit, want.size()));
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, want[i].doc_id);
                EXPECT_EQ(got[i].coverage, want[i].coverage);
                EXPECT_TRUE(close(got[i].proximity, want[i].proximity));
            }
        }
    }
    const std::vector<NodeRef> one = {NodeRef::entity("E1"), NodeRef::entity("E1")};
    EXPECT_THROW(engine.recommend_articles(one, c, 5), InvalidArgument);
}

TEST(MergeTopics, ComponentsMatchUnionFind) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScoredEdge> seeds;
        std::set<std::pair<int, int>> used;
        const int n = 1 + static_cast<int>(rng() % 8);
        while (static_cast<int>(seeds.size()) < n) {
            int a = static_cast<int>(rng() % 10), b = static_cast<int>(rng() % 10);
            if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) continue;
            ScoredEdge e;
            e.a = NodeRef::entity("N" + std::to_string(std::min(a, b)));
            e.b = NodeRef::entity("N" + std::to_string(std::max(a, b)));
            e.omega = 1.0 / (1 + seeds.size());
            seeds.push_back(e);
        }
        std::vector<std::vector<TermScore>> terms(seeds.size());
        for (std::size_t i = 0; i < seeds.size(); ++i) terms[i].push_back({NodeRef::term("t" + std::to_string(i))});

        // Reference: quadratic label propagation.
        std::map<NodeRef, int> label;
        for (const auto& s : seeds) {
            label.emplace(s.a, static_cast<int>(label.size()));
            label.emplace(s.b, static_cast<int>(label.size()));
        }
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& s : seeds) {
                const int m = std::min(label[s.a], label[s.b]);
                if (label[s.a] != m || label[s.b] != m) changed = true;
                label[s.a] = label[s.b] = m;
            }
        }
        std::set<int> groups;
        for (const auto& [_, l] : label) groups.insert(l);

        const auto topics = merge_topics(seeds, terms);
        ASSERT_EQ(topics.size(), groups.size());
        std::size_t total = 0;
        double prev_best = 2.0;
        for (const auto& t : topics) {
            ASSERT_FALSE(t.seed_edges.empty());
            EXPECT_LT(t.seed_edges.front().omega, prev_best);
            prev_best = t.seed_edges.front().omega;
            EXPECT_TRUE(std::is_sorted(t.entities.begin(), t.entities.end()));
            const int l = label[t.seed_edges.front().a];
            for (std::size_t i = 0; i < t.seed_edges.size(); ++i) {
                EXPECT_EQ(label[t.seed_edges[i].a], l);
                EXPECT_EQ(t.terms[i].size(), 1u);
                if (i) {
                    EXPECT_GT(t.seed_edges[i - 1].omega, t.seed_edges[i].omega);
                }
            }
            std::set<NodeRef> ents;
            for (const auto& [node, nl] : label)
                if (nl == l) ents.insert(node);
            EXPECT_EQ(std::vector<NodeRef>(ents.begin(), ents.end()), t.entities);
            total += t.seed_edges.size();
        }
        EXPECT_EQ(total, seeds.size());
    }
}

TEST(TopicEngine, GlobalTopicsUseRankedSeeds) {
    auto f = make(13);
    TopicEngine engine(f.store);
    auto c = ctx_of(*f.store);
    c.num_edges = 6;
    c.num_terms = 2;
    const auto ranked = engine.global_edge_ranking(c);
    std::size_t seeds = 0;
    for (const auto& t : engine.global_topics(c)) {
        for (std::size_t i = 0; i < t.seed_edges.size(); ++i) {
            EXPECT_LE(t.terms[i].size(), 2u);
            EXPECT_EQ(t.terms[i].size(), engine.expand_terms(t.seed_edges[i], c).size());
        }
        seeds += t.seed_edges.size();
    }
    EXPECT_EQ(seeds, ranked.size());
}

TEST(TopicEngine, CacheIsTransparentAndSkipsReads) {
    auto f = make(14);
    TopicEngine cached(f.store), uncached(f.store, EngineOptions{false});
    auto c = ctx_of(*f.store, 1, 6);
    c.num_edges = 4;
    c.num_terms = 5;
    for (const auto& seed : cached.global_edge_ranking(c)) {
        store::ReadCounter cold, warm, plain;
        const auto a = cached.expand_terms(seed, c, &cold);
        const auto b = cached.expand_terms(seed, c, &warm);
        const auto d = uncached.expand_terms(seed, c, &plain);
        ASSERT_EQ(a.size(), d.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].term, d[i].term);
            EXPECT_EQ(a[i].score, d[i].score);
            EXPECT_EQ(b[i].score, d[i].score);
        }
        EXPECT_GT(cold.cells, 0u);
        EXPECT_EQ(warm.cells, 0u);
        EXPECT_EQ(plain.cells, cold.cells);
    }
    EXPECT_GT(cached.cache_stats().hits, 0u);
    cached.invalidate_cache();
    EXPECT_EQ(cached.cache_stats().entries, 0u);
}
