#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsnet/ingest/document.hpp"
#include "newsnet/ingest/extract.hpp"
#include "newsnet/types.hpp"

namespace newsnet::store {

using NodeId = std::uint32_t;
using DocIndex = std::uint32_t;
using OutletId = std::uint32_t;

/// A document contributing to an edge cell, with its minimum sentence distance.
struct DocHit {
    DocIndex doc = 0;
    std::uint32_t delta = 0;
};

/// All occurrences of one node pair on one day in one outlet.
struct EdgeCell {
    Day day;
    OutletId outlet = 0;
    double delta_sum = 0.0;  // sum of exp(-delta) over docs
    std::vector<DocHit> docs;

    std::size_t doc_count() const { return docs.size(); }
};

/// Occurrences of one node on one day in one outlet.
struct NodeCell {
    Day day;
    OutletId outlet = 0;
    std::uint64_t occurrences = 0;
    std::vector<DocIndex> docs;

    std::size_t doc_count() const { return docs.size(); }
};

struct DocumentInfo {
    std::string id;
    Day day;
    OutletId outlet = 0;
};

struct NodeInfo {
    NodeRef ref;
    std::optional<ingest::EntityInfo> entity;  // set for entity nodes
    std::uint64_t total_occurrences = 0;
};

/// Selection of outlets for a query, resolved against one store.
class OutletFilter {
public:
    OutletFilter() = default;
    explicit OutletFilter(std::vector<OutletId> ids, std::size_t outlet_count);

    bool contains(OutletId id) const { return id < mask_.size() && mask_[id] != 0; }
    bool empty() const { return ids_.empty(); }
    const std::vector<OutletId>& ids() const { return ids_; }

private:
    std::vector<OutletId> ids_;  // sorted, unique
    std::vector<std::uint8_t> mask_;
};

/// Aggregate of an edge over a (range, outlets) context.
struct EdgeView {
    NodeId a = 0;  // a's NodeRef sorts before b's
    NodeId b = 0;
    EdgeKind kind = EdgeKind::entity_entity;
    DateRange range;
    std::int64_t d_e = 0;       // documents
    std::int32_t t_e_days = 0;  // distinct days
    double delta_e = 0.0;       // sum of exp(-delta)
    std::vector<DocHit> docs;   // filled only on request
};

struct NodeView {
    std::int64_t doc_count = 0;
    std::int64_t occurrence_count = 0;

    bool operator==(const NodeView&) const = default;
};

/// Counts cells touched by reads. Caller-owned; not shared between threads.
struct ReadCounter {
    std::uint64_t cells = 0;
};

/// Flattened cell, keyed by node refs and outlet names, used for comparison
/// between stores and for serialization.
struct CellRecord {
    EdgeKind kind;
    NodeRef a;
    NodeRef b;
    Day day;
    std::string outlet;
    std::int64_t doc_count;
    double delta_sum;
    std::vector<std::pair<std::string, std::uint32_t>> docs;  // sorted by doc id

    bool operator==(const CellRecord&) const = default;
};

struct NodeCellRecord {
    NodeRef node;
    Day day;
    std::string outlet;
    std::int64_t doc_count;
    std::uint64_t occurrences;
    std::vector<std::string> docs;  // sorted

    bool operator==(const NodeCellRecord&) const = default;
};

struct StoreCounts {
    std::size_t documents = 0;
    std::size_t actors = 0;
    std::size_t locations = 0;
    std::size_t organizations = 0;
    std::size_t terms = 0;
    std::size_t entity_entity_cells = 0;
    std::size_t entity_term_cells = 0;
    std::size_t entity_entity_pairs = 0;
    std::size_t entity_term_pairs = 0;

    std::size_t edge_cells() const { return entity_entity_cells + entity_term_cells; }
};

/// Partially aggregated implicit network: at most one edge cell per node pair,
/// day and outlet, plus per-(node, day, outlet) node statistics.
///
/// Const member functions may be called concurrently. Mutation needs exclusive
/// access; publish updates to readers through SharedStore.
class NetworkStore {
public:
    NetworkStore() = default;

    /// Adds one document's cooccurrences and node statistics.
    /// Throws DuplicateDocument if the doc id is already present, InvalidArgument
    /// if an occurrence belongs to another document.
    void insert_document(std::span<const ingest::EdgeOccurrence> occurrences, const ingest::AnnotatedDocument& doc);

    /// Cell-wise sum of two stores built from disjoint documents. Throws MergeConflict.
    static NetworkStore merge(const NetworkStore& a, const NetworkStore& b);

    // -- nodes, outlets, documents --

    std::optional<NodeId> find(const NodeRef& ref) const;
    const NodeInfo& node(NodeId id) const { return nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }

    const std::vector<std::string>& outlets() const { return outlets_; }
    std::optional<OutletId> find_outlet(std::string_view name) const;
    OutletFilter all_outlets() const;
    /// Unknown names are ignored.
    OutletFilter outlet_filter(std::span<const std::string> names) const;

    const DocumentInfo& document(DocIndex i) const { return docs_[i]; }
    std::size_t document_count() const { return docs_.size(); }
    std::optional<DocIndex> find_document(std::string_view id) const;

    /// Earliest and latest publication day, if any document was inserted.
    std::optional<DateRange> span() const;

    StoreCounts counts() const;

    // -- queries --

    std::optional<EdgeView> edge_view(NodeId x, NodeId y, DateRange range, const OutletFilter& outlets,
                                      bool with_docs = true, ReadCounter* counter = nullptr) const;
    std::optional<EdgeView> edge_view(const NodeRef& x, const NodeRef& y, DateRange range,
                                      const OutletFilter& outlets, bool with_docs = true) const;

    /// Visits every pair with at least one matching cell. Views carry no docs.
    void for_each_edge(DateRange range, const OutletFilter& outlets, KindFilter kinds,
                       const std::function<void(const EdgeView&)>& visit) const;
    std::vector<EdgeView> edges_in(DateRange range, const OutletFilter& outlets, KindFilter kinds) const;

    /// Visits the edges incident to `node` that have a matching cell. Views carry no docs.
    void for_each_incident(NodeId node, DateRange range, const OutletFilter& outlets, KindFilter kinds,
                           const std::function<void(const EdgeView&)>& visit, ReadCounter* counter = nullptr) const;

    /// Ids of the neighbours of `node` over edges of the given kind, regardless of context.
    std::vector<NodeId> neighbours(NodeId node, KindFilter kinds) const;

    NodeView node_view(NodeId node, DateRange range, const OutletFilter& outlets,
                       ReadCounter* counter = nullptr) const;
    NodeView node_view(const NodeRef& node, DateRange range, const OutletFilter& outlets) const;

    /// Documents containing `node` within the context, sorted.
    std::vector<DocIndex> node_documents(NodeId node, DateRange range, const OutletFilter& outlets) const;

    /// Largest single-cell document count for (day, outlet); 0 if none.
    std::uint32_t max_cell_docs(Day day, OutletId outlet) const;

    /// Upper bound on d_e of any edge in the context from the per-day maxima.
    /// `exact` is set when the bound is attained (at most one populated slot).
    std::int64_t dmax_upper_bound(DateRange range, const OutletFilter& outlets, bool& exact) const;

    // -- canonical content --

    std::vector<CellRecord> cells() const;
    std::vector<NodeCellRecord> node_cells() const;

    /// Sum of exp(-delta) computed from per-delta counts in ascending delta
    /// order, so the result depends only on the multiset of deltas.
    static double delta_sum_of(std::span<const DocHit> docs);

private:
    friend void save_snapshot(const NetworkStore& store, std::ostream& out);
    friend NetworkStore load_snapshot(std::istream& in);

    struct Pair {
        NodeId a;
        NodeId b;
        EdgeKind kind;
        std::vector<EdgeCell> cells;  // sorted by (day, outlet)
    };

    static std::uint64_t pair_key(NodeId a, NodeId b) { return (std::uint64_t{a} << 32) | b; }

    NodeId intern_node(const NodeRef& ref);
    OutletId intern_outlet(const std::string& name);
    DocIndex add_document(const std::string& id, Day day, OutletId outlet);
    Pair& pair_for(NodeId x, NodeId y);
    EdgeCell& edge_cell(Pair& p, Day day, OutletId outlet);
    NodeCell& node_cell(NodeId node, Day day, OutletId outlet);
    void note_cell_size(Day day, OutletId outlet, std::size_t docs);

    bool aggregate(const Pair& p, DateRange range, const OutletFilter& outlets, EdgeView& view, bool with_docs,
                   ReadCounter* counter) const;

    std::vector<NodeInfo> nodes_;
    std::unordered_map<NodeRef, NodeId, NodeRefHash> node_index_;
    std::vector<std::vector<NodeCell>> node_cells_;  // per node, sorted by (day, outlet)
    std::vector<std::vector<std::uint32_t>> incident_;  // per node, pair indices

    std::vector<Pair> pairs_;
    std::unordered_map<std::uint64_t, std::uint32_t> pair_index_;

    std::vector<std::string> outlets_;
    std::unordered_map<std::string, OutletId> outlet_index_;

    std::vector<DocumentInfo> docs_;
    std::unordered_map<std::string, DocIndex> doc_index_;

    std::unordered_map<std::uint64_t, std::uint32_t> max_cell_docs_;  // (day, outlet) -> max docs
};

/// Single-writer / many-reader publication point. Readers hold the snapshot
/// they obtained for as long as they need it; publish never mutates it.
class SharedStore {
public:
    SharedStore() : current_(std::make_shared<const NetworkStore>()) {}
    explicit SharedStore(NetworkStore store) : current_(std::make_shared<const NetworkStore>(std::move(store))) {}

    std::shared_ptr<const NetworkStore> snapshot() const {
        std::lock_guard lock(mu_);
        return current_;
    }

    void publish(NetworkStore store) {
        auto next = std::make_shared<const NetworkStore>(std::move(store));
        std::lock_guard lock(mu_);
        current_ = std::move(next);
    }

private:
    mutable std::mutex mu_;
    std::shared_ptr<const NetworkStore> current_;
};

}  // namespace newsnet::store
