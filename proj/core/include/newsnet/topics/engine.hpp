#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsnet/store/network_store.hpp"
#include "newsnet/topics/cache.hpp"
#include "newsnet/types.hpp"

namespace newsnet::topics {

/// Parameters shared by all exploration queries.
struct QueryContext {
    DateRange range;
    std::vector<std::string> outlets;  // empty selects every outlet
    std::int32_t num_edges = 3;
    std::int32_t num_terms = 3;
};

/// The three ratios combined by the harmonic mean; each is >= 1 for a
/// well-formed edge.
struct ScoreComponents {
    double c_doc = 0.0;   // |D_v u D_w| / |D_e|
    double c_time = 0.0;  // range length / |T_e|
    double c_dist = 0.0;  // D_max / Delta_e
};

/// |D_v u D_w| is taken as d_v + d_w - d_e.
ScoreComponents score_components(std::int64_t d_v, std::int64_t d_w, std::int64_t d_e, std::int32_t range_days,
                                 std::int32_t t_e_days, std::int64_t d_max, double delta_e);

/// 3 / (c_doc + c_time + c_dist)
double omega(const ScoreComponents& c);

struct ScoredEdge {
    store::EdgeView view;
    NodeRef a;
    NodeRef b;
    double omega = 0.0;
    ScoreComponents parts;
};

struct TermScore {
    NodeRef term;
    double score = 0.0;  // harmonic mean of omega_a and omega_b
    double omega_a = 0.0;
    double omega_b = 0.0;
};

/// Seed edges forming one connected component, with per-seed terms.
struct TopicGraph {
    std::vector<NodeRef> entities;                // sorted
    std::vector<ScoredEdge> seed_edges;           // in rank order
    std::vector<std::vector<TermScore>> terms;    // parallel to seed_edges
};

struct Recommendation {
    std::string doc_id;
    std::string outlet;
    Day day;
    std::int32_t coverage = 0;  // selected nodes present in the document
    double proximity = 0.0;     // sum of exp(-delta) over selected pairs
};

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t entries = 0;
    std::uint64_t term_cells_read = 0;  // cells read while scoring terms, since last invalidate

    double hit_rate() const { return hits + misses == 0 ? 0.0 : static_cast<double>(hits) / (hits + misses); }
};

struct EngineOptions {
    bool cache_enabled = true;
};

/// Scoring and exploration over one immutable store snapshot. All member
/// functions are safe to call from concurrent query workers.
class TopicEngine {
public:
    explicit TopicEngine(std::shared_ptr<const store::NetworkStore> store, EngineOptions options = {});

    const store::NetworkStore& store() const { return *store_; }
    const std::shared_ptr<const store::NetworkStore>& store_ptr() const { return store_; }
    bool cache_enabled() const { return options_.cache_enabled; }

    /// Largest d_e over all edges (either kind) in the context. Throws NoDataError.
    std::int64_t compute_dmax(const QueryContext& ctx) const;

    /// Throws AbsentEdgeError if the view has no documents or no distance mass.
    ScoredEdge edge_score(const store::EdgeView& view, const QueryContext& ctx) const;

    /// Top num_edges entity-entity edges by (omega desc, d_e desc, pair asc).
    std::vector<ScoredEdge> global_edge_ranking(const QueryContext& ctx) const;

    /// Throws InvalidArgument if v == w or either is not an entity.
    std::optional<ScoredEdge> targeted_edge(const NodeRef& v, const NodeRef& w, const QueryContext& ctx) const;

    /// Terms linked to both endpoints of the seed, top num_terms by
    /// (score desc, term asc). `counter` receives the cells read for scoring
    /// (zero when served from the cache).
    std::vector<TermScore> expand_terms(const ScoredEdge& seed, const QueryContext& ctx,
                                        store::ReadCounter* counter = nullptr) const;

    /// Entity neighbours of `entity` ranked by the omega of the connecting edge.
    std::vector<ScoredEdge> adjacent_entities(const NodeRef& entity, const QueryContext& ctx, std::size_t limit) const;

    /// Throws InvalidArgument("nodes") when fewer than two distinct nodes are given.
    std::vector<Recommendation> recommend_articles(std::span<const NodeRef> nodes, const QueryContext& ctx,
                                                   std::size_t limit) const;

    /// Global ranking, term expansion and merging in one call.
    std::vector<TopicGraph> global_topics(const QueryContext& ctx) const;
    std::optional<TopicGraph> targeted_topic(const NodeRef& v, const NodeRef& w, const QueryContext& ctx) const;

    void invalidate_cache();
    CacheStats cache_stats() const;

private:
    struct Resolved {
        DateRange range;
        store::OutletFilter outlets;
        std::string signature;
    };

    struct ContextKey {
        std::int32_t start;
        std::int32_t end;
        std::string outlets;
        bool operator==(const ContextKey&) const = default;
    };
    struct ContextKeyHash {
        std::size_t operator()(const ContextKey& k) const noexcept;
    };

    struct TermKey {
        store::NodeId a;
        store::NodeId b;
        ContextKey ctx;
        bool operator==(const TermKey&) const = default;
    };
    struct TermKeyHash {
        std::size_t operator()(const TermKey& k) const noexcept;
    };

    Resolved resolve(const QueryContext& ctx) const;
    std::int64_t dmax(const Resolved& r) const;
    std::int64_t scan_dmax(const Resolved& r) const;
    ScoredEdge score(const store::EdgeView& view, const Resolved& r, std::int64_t d_max, std::int64_t d_a,
                     std::int64_t d_b) const;
    std::vector<TermScore> all_terms(store::NodeId a, store::NodeId b, const Resolved& r,
                                     store::ReadCounter& counter) const;

    std::shared_ptr<const store::NetworkStore> store_;
    EngineOptions options_;
    mutable ConcurrentCache<ContextKey, std::int64_t, ContextKeyHash> dmax_cache_;
    mutable ConcurrentCache<TermKey, std::vector<TermScore>, TermKeyHash> term_cache_;
    mutable std::atomic<std::uint64_t> term_cells_read_{0};
};

/// Connected components of the graph whose edges are the seeds. Term lists
/// (parallel to `seeds`) are attached unchanged. Components are ordered by
/// their best-ranked seed.
std::vector<TopicGraph> merge_topics(std::vector<ScoredEdge> seeds, std::vector<std::vector<TermScore>> terms);

/// Canonical ranking order for scored edges.
bool ranks_before(const ScoredEdge& l, const ScoredEdge& r);

}  // namespace newsnet::topics
