#include "newsnet/topics/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "newsnet/errors.hpp"

namespace newsnet::topics {

using store::EdgeView;
using store::NodeId;

ScoreComponents score_components(std::int64_t d_v, std::int64_t d_w, std::int64_t d_e, std::int32_t range_days,
                                 std::int32_t t_e_days, std::int64_t d_max, double delta_e) {
    if (d_e <= 0 || t_e_days <= 0 || !(delta_e > 0.0)) throw AbsentEdgeError("edge has no occurrences in context");
    ScoreComponents c;
    c.c_doc = static_cast<double>(d_v + d_w - d_e) / static_cast<double>(d_e);
    c.c_time = static_cast<double>(range_days) / static_cast<double>(t_e_days);
    c.c_dist = static_cast<double>(d_max) / delta_e;
    return c;
}

double omega(const ScoreComponents& c) { return 3.0 / (c.c_doc + c.c_time + c.c_dist); }

bool ranks_before(const ScoredEdge& l, const ScoredEdge& r) {
    if (l.omega != r.omega) return l.omega > r.omega;
    if (l.view.d_e != r.view.d_e) return l.view.d_e > r.view.d_e;
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
}

namespace {

bool term_before(const TermScore& l, const TermScore& r) {
    if (l.score != r.score) return l.score > r.score;
    return l.term < r.term;
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

}  // namespace

std::size_t TopicEngine::ContextKeyHash::operator()(const ContextKey& k) const noexcept {
    std::size_t h = std::hash<std::string>{}(k.outlets);
    h = mix(h, static_cast<std::size_t>(static_cast<std::uint32_t>(k.start)));
    return mix(h, static_cast<std::size_t>(static_cast<std::uint32_t>(k.end)));
}

std::size_t TopicEngine::TermKeyHash::operator()(const TermKey& k) const noexcept {
    std::size_t h = ContextKeyHash{}(k.ctx);
    h = mix(h, k.a);
    return mix(h, k.b);
}

TopicEngine::TopicEngine(std::shared_ptr<const store::NetworkStore> store, EngineOptions options)
    : store_(std::move(store)), options_(options) {
    if (!store_) throw InvalidArgument("store", "null store");
}

TopicEngine::Resolved TopicEngine::resolve(const QueryContext& ctx) const {
    if (ctx.range.end < ctx.range.start) throw InvalidArgument("range", "end precedes start");
    Resolved r{ctx.range, ctx.outlets.empty() ? store_->all_outlets() : store_->outlet_filter(ctx.outlets), {}};
    for (auto id : r.outlets.ids()) {
        r.signature += std::to_string(id);
        r.signature += ',';
    }
    return r;
}

std::int64_t TopicEngine::scan_dmax(const Resolved& r) const {
    bool exact = false;
    const std::int64_t bound = store_->dmax_upper_bound(r.range, r.outlets, exact);
    if (exact) return bound;
    std::int64_t best = 0;
    store_->for_each_edge(r.range, r.outlets, KindFilter::all,
                          [&](const EdgeView& v) { best = std::max(best, v.d_e); });
    return best;
}

std::int64_t TopicEngine::dmax(const Resolved& r) const {
    std::int64_t value = 0;
    if (options_.cache_enabled) {
        value = *dmax_cache_.get_or_compute(ContextKey{r.range.start.serial(), r.range.end.serial(), r.signature},
                                            [&] { return scan_dmax(r); });
    } else {
        value = scan_dmax(r);
    }
    if (value <= 0) throw NoDataError("no edges in the selected date range and outlets");
    return value;
}

std::int64_t TopicEngine::compute_dmax(const QueryContext& ctx) const { return dmax(resolve(ctx)); }

ScoredEdge TopicEngine::score(const EdgeView& view, const Resolved& r, std::int64_t d_max, std::int64_t d_a,
                              std::int64_t d_b) const {
    ScoredEdge s;
    s.parts = score_components(d_a, d_b, view.d_e, r.range.length_days(), view.t_e_days, d_max, view.delta_e);
    s.omega = omega(s.parts);
    s.view = view;
    s.a = store_->node(view.a).ref;
    s.b = store_->node(view.b).ref;
    return s;
}

ScoredEdge TopicEngine::edge_score(const EdgeView& view, const QueryContext& ctx) const {
    if (view.d_e <= 0 || !(view.delta_e > 0.0)) throw AbsentEdgeError("edge has no occurrences in context");
    const Resolved r = resolve(ctx);
    const auto d_a = store_->node_view(view.a, r.range, r.outlets).doc_count;
    const auto d_b = store_->node_view(view.b, r.range, r.outlets).doc_count;
    return score(view, r, dmax(r), d_a, d_b);
}

std::vector<ScoredEdge> TopicEngine::global_edge_ranking(const QueryContext& ctx) const {
    if (ctx.num_edges < 1) throw InvalidArgument("num_edges", "must be >= 1");
    const Resolved r = resolve(ctx);
    std::vector<EdgeView> candidates;
    store_->for_each_edge(r.range, r.outlets, KindFilter::entity_entity,
                          [&](const EdgeView& v) { candidates.push_back(v); });
    if (candidates.empty()) return {};
    const std::int64_t d_max = dmax(r);

    std::unordered_map<NodeId, std::int64_t> node_docs;
    auto docs_of = [&](NodeId n) {
        auto [it, fresh] = node_docs.try_emplace(n, 0);
        if (fresh) it->second = store_->node_view(n, r.range, r.outlets).doc_count;
        return it->second;
    };

    std::vector<ScoredEdge> scored;
    scored.reserve(candidates.size());
    for (const auto& v : candidates) scored.push_back(score(v, r, d_max, docs_of(v.a), docs_of(v.b)));
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(ctx.num_edges), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), ranks_before);
    scored.resize(k);
    return scored;
}

std::optional<ScoredEdge> TopicEngine::targeted_edge(const NodeRef& v, const NodeRef& w,
                                                     const QueryContext& ctx) const {
    if (!v.is_entity() || !w.is_entity()) throw InvalidArgument("entity_b", "targeted edges join two entities");
    if (v == w) throw InvalidArgument("entity_b", "entities must differ");
    const Resolved r = resolve(ctx);
    auto a = store_->find(v);
    auto b = store_->find(w);
    if (!a || !b) return std::nullopt;
    auto view = store_->edge_view(*a, *b, r.range, r.outlets, false);
    if (!view) return std::nullopt;
    const auto d_a = store_->node_view(view->a, r.range, r.outlets).doc_count;
    const auto d_b = store_->node_view(view->b, r.range, r.outlets).doc_count;
    return score(*view, r, dmax(r), d_a, d_b);
}

std::vector<TermScore> TopicEngine::all_terms(NodeId a, NodeId b, const Resolved& r,
                                              store::ReadCounter& counter) const {
    std::unordered_map<NodeId, EdgeView> from_a;
    store_->for_each_incident(
        a, r.range, r.outlets, KindFilter::entity_term,
        [&](const EdgeView& v) { from_a.emplace(v.a == a ? v.b : v.a, v); }, &counter);
    std::vector<std::pair<EdgeView, EdgeView>> triangles;
    store_->for_each_incident(
        b, r.range, r.outlets, KindFilter::entity_term,
        [&](const EdgeView& v) {
            const NodeId term = v.a == b ? v.b : v.a;
            if (auto it = from_a.find(term); it != from_a.end()) triangles.emplace_back(it->second, v);
        },
        &counter);
    if (triangles.empty()) return {};

    const std::int64_t d_max = dmax(r);
    const auto d_a = store_->node_view(a, r.range, r.outlets, &counter).doc_count;
    const auto d_b = store_->node_view(b, r.range, r.outlets, &counter).doc_count;

    std::vector<TermScore> out;
    out.reserve(triangles.size());
    for (const auto& [ea, eb] : triangles) {
        const NodeId term = ea.a == a ? ea.b : ea.a;
        const auto d_t = store_->node_view(term, r.range, r.outlets, &counter).doc_count;
        TermScore ts;
        ts.term = store_->node(term).ref;
        ts.omega_a = omega(score_components(d_a, d_t, ea.d_e, r.range.length_days(), ea.t_e_days, d_max, ea.delta_e));
        ts.omega_b = omega(score_components(d_b, d_t, eb.d_e, r.range.length_days(), eb.t_e_days, d_max, eb.delta_e));
        ts.score = 2.0 / (1.0 / ts.omega_a + 1.0 / ts.omega_b);
        out.push_back(std::move(ts));
    }
    std::sort(out.begin(), out.end(), term_before);
    return out;
}

std::vector<TermScore> TopicEngine::expand_terms(const ScoredEdge& seed, const QueryContext& ctx,
                                                 store::ReadCounter* counter) const {
    if (ctx.num_terms < 0) throw InvalidArgument("num_terms", "must be >= 0");
    const Resolved r = resolve(ctx);
    auto a = store_->find(seed.a);
    auto b = store_->find(seed.b);
    if (!a || !b) return {};

    store::ReadCounter local;
    std::shared_ptr<const std::vector<TermScore>> all;
    if (options_.cache_enabled) {
        TermKey key{*a, *b, ContextKey{r.range.start.serial(), r.range.end.serial(), r.signature}};
        all = term_cache_.get_or_compute(key, [&] { return all_terms(*a, *b, r, local); });
    } else {
        all = std::make_shared<const std::vector<TermScore>>(all_terms(*a, *b, r, local));
    }
    term_cells_read_.fetch_add(local.cells, std::memory_order_relaxed);
    if (counter) counter->cells += local.cells;

    const auto m = std::min<std::size_t>(static_cast<std::size_t>(ctx.num_terms), all->size());
    return {all->begin(), all->begin() + static_cast<std::ptrdiff_t>(m)};
}

std::vector<ScoredEdge> TopicEngine::adjacent_entities(const NodeRef& entity, const QueryContext& ctx,
                                                       std::size_t limit) const {
    if (!entity.is_entity()) throw InvalidArgument("entity", "adjacency expansion needs an entity");
    const Resolved r = resolve(ctx);
    auto id = store_->find(entity);
    if (!id || limit == 0) return {};
    std::vector<EdgeView> incident;
    store_->for_each_incident(*id, r.range, r.outlets, KindFilter::entity_entity,
                              [&](const EdgeView& v) { incident.push_back(v); });
    if (incident.empty()) return {};
    const std::int64_t d_max = dmax(r);
    const auto d_self = store_->node_view(*id, r.range, r.outlets).doc_count;

    std::vector<ScoredEdge> scored;
    scored.reserve(incident.size());
    for (const auto& v : incident) {
        const NodeId other = v.a == *id ? v.b : v.a;
        const auto d_other = store_->node_view(other, r.range, r.outlets).doc_count;
        scored.push_back(v.a == *id ? score(v, r, d_max, d_self, d_other) : score(v, r, d_max, d_other, d_self));
    }
    const auto k = std::min(limit, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), ranks_before);
    scored.resize(k);
    return scored;
}

std::vector<Recommendation> TopicEngine::recommend_articles(std::span<const NodeRef> nodes, const QueryContext& ctx,
                                                            std::size_t limit) const {
    std::vector<NodeRef> selected(nodes.begin(), nodes.end());
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
    if (selected.size() < 2) throw InvalidArgument("nodes", "select at least two distinct nodes");
    const Resolved r = resolve(ctx);

    std::vector<NodeId> ids;
    for (const auto& n : selected) {
        if (auto id = store_->find(n)) ids.push_back(*id);
    }

    std::unordered_map<store::DocIndex, std::int32_t> coverage;
    for (NodeId n : ids) {
        for (auto d : store_->node_documents(n, r.range, r.outlets)) ++coverage[d];
    }
    std::unordered_map<store::DocIndex, std::vector<std::uint32_t>> deltas;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            auto view = store_->edge_view(ids[i], ids[j], r.range, r.outlets, true);
            if (!view) continue;
            for (const auto& h : view->docs) deltas[h.doc].push_back(h.delta);
        }
    }

    std::vector<Recommendation> out;
    for (const auto& [doc, count] : coverage) {
        if (count < 2) continue;
        const auto& info = store_->document(doc);
        Recommendation rec{info.id, store_->outlets()[info.outlet], info.day, count, 0.0};
        if (auto it = deltas.find(doc); it != deltas.end()) {
            auto ds = it->second;
            std::sort(ds.begin(), ds.end());
            for (auto d : ds) rec.proximity += std::exp(-static_cast<double>(d));
        }
        out.push_back(std::move(rec));
    }
    auto before = [](const Recommendation& l, const Recommendation& r) {
        if (l.coverage != r.coverage) return l.coverage > r.coverage;
        if (l.proximity != r.proximity) return l.proximity > r.proximity;
        return l.doc_id < r.doc_id;
    };
    const auto k = std::min(limit, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), before);
    out.resize(k);
    return out;
}

std::vector<TopicGraph> TopicEngine::global_topics(const QueryContext& ctx) const {
    auto seeds = global_edge_ranking(ctx);
    std::vector<std::vector<TermScore>> terms;
    terms.reserve(seeds.size());
    for (const auto& s : seeds) terms.push_back(expand_terms(s, ctx));
    return merge_topics(std::move(seeds), std::move(terms));
}

std::optional<TopicGraph> TopicEngine::targeted_topic(const NodeRef& v, const NodeRef& w,
                                                      const QueryContext& ctx) const {
    auto seed = targeted_edge(v, w, ctx);
    if (!seed) return std::nullopt;
    auto terms = expand_terms(*seed, ctx);
    std::vector<ScoredEdge> seeds{std::move(*seed)};
    std::vector<std::vector<TermScore>> lists{std::move(terms)};
    return std::move(merge_topics(std::move(seeds), std::move(lists)).front());
}

void TopicEngine::invalidate_cache() {
    term_cache_.clear();
    dmax_cache_.clear();
    term_cells_read_ = 0;
}

CacheStats TopicEngine::cache_stats() const {
    CacheStats s;
    s.hits = term_cache_.hits();
    s.misses = term_cache_.misses();
    s.entries = term_cache_.size();
    s.term_cells_read = term_cells_read_.load(std::memory_order_relaxed);
    return s;
}

std::vector<TopicGraph> merge_topics(std::vector<ScoredEdge> seeds, std::vector<std::vector<TermScore>> terms) {
    if (terms.size() != seeds.size()) terms.resize(seeds.size());

    std::map<NodeRef, std::size_t> index;
    for (const auto& s : seeds) {
        index.try_emplace(s.a, index.size());
        index.try_emplace(s.b, index.size());
    }
    std::vector<std::size_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& s : seeds) {
        const auto ra = root(index[s.a]);
        const auto rb = root(index[s.b]);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }

    std::vector<TopicGraph> out;
    std::map<std::size_t, std::size_t> component;  // root -> position in out
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto rt = root(index[seeds[i].a]);
        auto [it, fresh] = component.try_emplace(rt, out.size());
        if (fresh) out.emplace_back();
        TopicGraph& g = out[it->second];
        g.entities.push_back(seeds[i].a);
        g.entities.push_back(seeds[i].b);
        g.seed_edges.push_back(std::move(seeds[i]));
        g.terms.push_back(std::move(terms[i]));
    }
    for (auto& g : out) {
        std::sort(g.entities.begin(), g.entities.end());
        g.entities.erase(std::unique(g.entities.begin(), g.entities.end()), g.entities.end());
    }
    return out;
}

}  // namespace newsnet::topics
