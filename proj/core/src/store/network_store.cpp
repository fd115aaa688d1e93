#include "newsnet/store/network_store.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "newsnet/errors.hpp"

namespace newsnet::store {

namespace {

std::uint64_t slot_key(Day day, OutletId outlet) {
    return (std::uint64_t{static_cast<std::uint32_t>(day.serial())} << 32) | outlet;
}

template <class Cell>
auto first_cell_on_or_after(const std::vector<Cell>& cells, Day day) {
    return std::lower_bound(cells.begin(), cells.end(), day, [](const Cell& c, Day d) { return c.day < d; });
}

template <class Cell>
auto locate(std::vector<Cell>& cells, Day day, OutletId outlet) {
    return std::lower_bound(cells.begin(), cells.end(), std::pair{day, outlet}, [](const Cell& c, const auto& key) {
        return std::pair{c.day, c.outlet} < key;
    });
}

}  // namespace

OutletFilter::OutletFilter(std::vector<OutletId> ids, std::size_t outlet_count) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    mask_.assign(outlet_count, 0);
    for (OutletId id : ids_) {
        if (id >= mask_.size()) mask_.resize(id + 1, 0);
        mask_[id] = 1;
    }
}

double NetworkStore::delta_sum_of(std::span<const DocHit> docs) {
    std::array<std::uint64_t, 16> small{};
    std::map<std::uint32_t, std::uint64_t> large;
    for (const auto& h : docs) {
        if (h.delta < small.size()) {
            ++small[h.delta];
        } else {
            ++large[h.delta];
        }
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < small.size(); ++d) {
        if (small[d] != 0) sum += static_cast<double>(small[d]) * std::exp(-static_cast<double>(d));
    }
    for (const auto& [d, n] : large) sum += static_cast<double>(n) * std::exp(-static_cast<double>(d));
    return sum;
}

NodeId NetworkStore::intern_node(const NodeRef& ref) {
    if (auto it = node_index_.find(ref); it != node_index_.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(NodeInfo{ref, std::nullopt, 0});
    node_cells_.emplace_back();
    incident_.emplace_back();
    node_index_.emplace(ref, id);
    return id;
}

OutletId NetworkStore::intern_outlet(const std::string& name) {
    if (auto it = outlet_index_.find(name); it != outlet_index_.end()) return it->second;
    const auto id = static_cast<OutletId>(outlets_.size());
    outlets_.push_back(name);
    outlet_index_.emplace(name, id);
    return id;
}

DocIndex NetworkStore::add_document(const std::string& id, Day day, OutletId outlet) {
    const auto idx = static_cast<DocIndex>(docs_.size());
    if (!doc_index_.emplace(id, idx).second) throw DuplicateDocument(id);
    docs_.push_back(DocumentInfo{id, day, outlet});
    return idx;
}

NetworkStore::Pair& NetworkStore::pair_for(NodeId x, NodeId y) {
    if (nodes_[y].ref < nodes_[x].ref) std::swap(x, y);
    const auto key = pair_key(x, y);
    if (auto it = pair_index_.find(key); it != pair_index_.end()) return pairs_[it->second];
    const auto idx = static_cast<std::uint32_t>(pairs_.size());
    const EdgeKind kind = nodes_[y].ref.is_term() ? EdgeKind::entity_term : EdgeKind::entity_entity;
    pairs_.push_back(Pair{x, y, kind, {}});
    pair_index_.emplace(key, idx);
    incident_[x].push_back(idx);
    incident_[y].push_back(idx);
    return pairs_.back();
}

EdgeCell& NetworkStore::edge_cell(Pair& p, Day day, OutletId outlet) {
    auto it = locate(p.cells, day, outlet);
    if (it == p.cells.end() || it->day != day || it->outlet != outlet) {
        it = p.cells.insert(it, EdgeCell{day, outlet, 0.0, {}});
    }
    return *it;
}

NodeCell& NetworkStore::node_cell(NodeId node, Day day, OutletId outlet) {
    auto& cells = node_cells_[node];
    auto it = locate(cells, day, outlet);
    if (it == cells.end() || it->day != day || it->outlet != outlet) {
        it = cells.insert(it, NodeCell{day, outlet, 0, {}});
    }
    return *it;
}

void NetworkStore::note_cell_size(Day day, OutletId outlet, std::size_t docs) {
    auto& slot = max_cell_docs_[slot_key(day, outlet)];
    slot = std::max<std::uint32_t>(slot, static_cast<std::uint32_t>(docs));
}

void NetworkStore::insert_document(std::span<const ingest::EdgeOccurrence> occurrences,
                                   const ingest::AnnotatedDocument& doc) {
    if (doc_index_.contains(doc.doc_id)) throw DuplicateDocument(doc.doc_id);
    for (const auto& occ : occurrences) {
        if (occ.doc_id != doc.doc_id) {
            throw InvalidArgument("occurrences", "occurrence of '" + occ.doc_id + "' inserted with '" + doc.doc_id + "'");
        }
        if (occ.v == occ.w) throw InvalidArgument("occurrences", "self-pair " + to_string(occ.v));
        if (occ.v.is_term() && occ.w.is_term()) throw InvalidArgument("occurrences", "term-term pair");
    }

    const OutletId outlet = intern_outlet(doc.outlet);
    const DocIndex di = add_document(doc.doc_id, doc.date, outlet);

    for (const auto& n : ingest::node_occurrences(doc)) {
        const NodeId id = intern_node(n.node);
        auto& info = nodes_[id];
        if (n.entity && !info.entity) info.entity = n.entity;
        info.total_occurrences += n.count;
        auto& cell = node_cell(id, doc.date, outlet);
        cell.occurrences += n.count;
        cell.docs.push_back(di);
    }

    for (const auto& occ : occurrences) {
        Pair& p = pair_for(intern_node(occ.v), intern_node(occ.w));
        EdgeCell& cell = edge_cell(p, doc.date, outlet);
        cell.docs.push_back(DocHit{di, occ.delta});
        cell.delta_sum = delta_sum_of(cell.docs);
        note_cell_size(doc.date, outlet, cell.docs.size());
    }
}

NetworkStore NetworkStore::merge(const NetworkStore& a, const NetworkStore& b) {
    for (const auto& d : b.docs_) {
        if (a.doc_index_.contains(d.id)) throw MergeConflict(d.id);
    }
    NetworkStore out = a;

    std::vector<OutletId> outlet_map(b.outlets_.size());
    for (std::size_t i = 0; i < b.outlets_.size(); ++i) outlet_map[i] = out.intern_outlet(b.outlets_[i]);
    std::vector<DocIndex> doc_map(b.docs_.size());
    for (std::size_t i = 0; i < b.docs_.size(); ++i) {
        doc_map[i] = out.add_document(b.docs_[i].id, b.docs_[i].day, outlet_map[b.docs_[i].outlet]);
    }
    std::vector<NodeId> node_map(b.nodes_.size());
    for (std::size_t i = 0; i < b.nodes_.size(); ++i) {
        const NodeId id = out.intern_node(b.nodes_[i].ref);
        node_map[i] = id;
        auto& info = out.nodes_[id];
        if (!info.entity) info.entity = b.nodes_[i].entity;
        info.total_occurrences += b.nodes_[i].total_occurrences;
        for (const auto& c : b.node_cells_[i]) {
            auto& cell = out.node_cell(id, c.day, outlet_map[c.outlet]);
            cell.occurrences += c.occurrences;
            for (DocIndex d : c.docs) cell.docs.push_back(doc_map[d]);
        }
    }
    for (const auto& p : b.pairs_) {
        Pair& target = out.pair_for(node_map[p.a], node_map[p.b]);
        for (const auto& c : p.cells) {
            EdgeCell& cell = out.edge_cell(target, c.day, outlet_map[c.outlet]);
            for (const auto& h : c.docs) cell.docs.push_back(DocHit{doc_map[h.doc], h.delta});
            cell.delta_sum = delta_sum_of(cell.docs);
            out.note_cell_size(c.day, outlet_map[c.outlet], cell.docs.size());
        }
    }
    return out;
}

std::optional<NodeId> NetworkStore::find(const NodeRef& ref) const {
    if (auto it = node_index_.find(ref); it != node_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<OutletId> NetworkStore::find_outlet(std::string_view name) const {
    if (auto it = outlet_index_.find(std::string(name)); it != outlet_index_.end()) return it->second;
    return std::nullopt;
}

OutletFilter NetworkStore::all_outlets() const {
    std::vector<OutletId> ids(outlets_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<OutletId>(i);
    return OutletFilter(std::move(ids), outlets_.size());
}

OutletFilter NetworkStore::outlet_filter(std::span<const std::string> names) const {
    std::vector<OutletId> ids;
    for (const auto& n : names) {
        if (auto id = find_outlet(n)) ids.push_back(*id);
    }
    return OutletFilter(std::move(ids), outlets_.size());
}

std::optional<DocIndex> NetworkStore::find_document(std::string_view id) const {
    if (auto it = doc_index_.find(std::string(id)); it != doc_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<DateRange> NetworkStore::span() const {
    if (docs_.empty()) return std::nullopt;
    auto [lo, hi] = std::minmax_element(docs_.begin(), docs_.end(),
                                        [](const DocumentInfo& l, const DocumentInfo& r) { return l.day < r.day; });
    return DateRange{lo->day, hi->day};
}

StoreCounts NetworkStore::counts() const {
    StoreCounts c;
    c.documents = docs_.size();
    for (const auto& n : nodes_) {
        if (n.ref.is_term()) {
            ++c.terms;
        } else if (n.entity) {
            switch (n.entity->etype) {
                case EntityType::actor: ++c.actors; break;
                case EntityType::location: ++c.locations; break;
                case EntityType::organization: ++c.organizations; break;
            }
        }
    }
    for (const auto& p : pairs_) {
        if (p.kind == EdgeKind::entity_entity) {
            ++c.entity_entity_pairs;
            c.entity_entity_cells += p.cells.size();
        } else {
            ++c.entity_term_pairs;
            c.entity_term_cells += p.cells.size();
        }
    }
    return c;
}

bool NetworkStore::aggregate(const Pair& p, DateRange range, const OutletFilter& outlets, EdgeView& view,
                             bool with_docs, ReadCounter* counter) const {
    view.a = p.a;
    view.b = p.b;
    view.kind = p.kind;
    view.range = range;
    view.d_e = 0;
    view.t_e_days = 0;
    view.delta_e = 0.0;
    view.docs.clear();

    std::uint64_t touched = 0;
    bool have_day = false;
    Day last_day;
    for (auto it = first_cell_on_or_after(p.cells, range.start); it != p.cells.end() && it->day <= range.end; ++it) {
        ++touched;
        if (!outlets.contains(it->outlet)) continue;
        view.d_e += static_cast<std::int64_t>(it->docs.size());
        view.delta_e += it->delta_sum;
        if (!have_day || it->day != last_day) {
            ++view.t_e_days;
            last_day = it->day;
            have_day = true;
        }
        if (with_docs) view.docs.insert(view.docs.end(), it->docs.begin(), it->docs.end());
    }
    if (counter) counter->cells += touched;
    if (with_docs) {
        std::sort(view.docs.begin(), view.docs.end(), [](const DocHit& l, const DocHit& r) { return l.doc < r.doc; });
    }
    return view.d_e > 0;
}

std::optional<EdgeView> NetworkStore::edge_view(NodeId x, NodeId y, DateRange range, const OutletFilter& outlets,
                                                 bool with_docs, ReadCounter* counter) const {
    if (x >= nodes_.size() || y >= nodes_.size() || x == y) return std::nullopt;
    if (nodes_[y].ref < nodes_[x].ref) std::swap(x, y);
    auto it = pair_index_.find(pair_key(x, y));
    if (it == pair_index_.end()) return std::nullopt;
    EdgeView view;
    if (!aggregate(pairs_[it->second], range, outlets, view, with_docs, counter)) return std::nullopt;
    return view;
}

std::optional<EdgeView> NetworkStore::edge_view(const NodeRef& x, const NodeRef& y, DateRange range,
                                                 const OutletFilter& outlets, bool with_docs) const {
    auto a = find(x);
    auto b = find(y);
    if (!a || !b) return std::nullopt;
    return edge_view(*a, *b, range, outlets, with_docs);
}

void NetworkStore::for_each_edge(DateRange range, const OutletFilter& outlets, KindFilter kinds,
                                 const std::function<void(const EdgeView&)>& visit) const {
    EdgeView view;
    for (const auto& p : pairs_) {
        if (!matches(kinds, p.kind)) continue;
        if (aggregate(p, range, outlets, view, false, nullptr)) visit(view);
    }
}

std::vector<EdgeView> NetworkStore::edges_in(DateRange range, const OutletFilter& outlets, KindFilter kinds) const {
    std::vector<EdgeView> out;
    for_each_edge(range, outlets, kinds, [&](const EdgeView& v) { out.push_back(v); });
    return out;
}

void NetworkStore::for_each_incident(NodeId node, DateRange range, const OutletFilter& outlets, KindFilter kinds,
                                     const std::function<void(const EdgeView&)>& visit, ReadCounter* counter) const {
    if (node >= incident_.size()) return;
    EdgeView view;
    for (std::uint32_t pi : incident_[node]) {
        const Pair& p = pairs_[pi];
        if (!matches(kinds, p.kind)) continue;
        if (aggregate(p, range, outlets, view, false, counter)) visit(view);
    }
}

std::vector<NodeId> NetworkStore::neighbours(NodeId node, KindFilter kinds) const {
    std::vector<NodeId> out;
    if (node >= incident_.size()) return out;
    for (std::uint32_t pi : incident_[node]) {
        const Pair& p = pairs_[pi];
        if (matches(kinds, p.kind)) out.push_back(p.a == node ? p.b : p.a);
    }
    return out;
}

NodeView NetworkStore::node_view(NodeId node, DateRange range, const OutletFilter& outlets,
                                 ReadCounter* counter) const {
    NodeView v;
    if (node >= node_cells_.size()) return v;
    const auto& cells = node_cells_[node];
    std::uint64_t touched = 0;
    for (auto it = first_cell_on_or_after(cells, range.start); it != cells.end() && it->day <= range.end; ++it) {
        ++touched;
        if (!outlets.contains(it->outlet)) continue;
        v.doc_count += static_cast<std::int64_t>(it->docs.size());
        v.occurrence_count += static_cast<std::int64_t>(it->occurrences);
    }
    if (counter) counter->cells += touched;
    return v;
}

NodeView NetworkStore::node_view(const NodeRef& node, DateRange range, const OutletFilter& outlets) const {
    auto id = find(node);
    if (!id) return {};
    return node_view(*id, range, outlets);
}

std::vector<DocIndex> NetworkStore::node_documents(NodeId node, DateRange range, const OutletFilter& outlets) const {
    std::vector<DocIndex> out;
    if (node >= node_cells_.size()) return out;
    const auto& cells = node_cells_[node];
    for (auto it = first_cell_on_or_after(cells, range.start); it != cells.end() && it->day <= range.end; ++it) {
        if (outlets.contains(it->outlet)) out.insert(out.end(), it->docs.begin(), it->docs.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint32_t NetworkStore::max_cell_docs(Day day, OutletId outlet) const {
    auto it = max_cell_docs_.find(slot_key(day, outlet));
    return it == max_cell_docs_.end() ? 0 : it->second;
}

std::int64_t NetworkStore::dmax_upper_bound(DateRange range, const OutletFilter& outlets, bool& exact) const {
    std::int64_t bound = 0;
    int populated = 0;
    for (Day d = range.start; d <= range.end; d = d + 1) {
        for (OutletId o : outlets.ids()) {
            if (const auto m = max_cell_docs(d, o); m > 0) {
                bound += m;
                ++populated;
            }
        }
    }
    exact = populated <= 1;
    return bound;
}

std::vector<CellRecord> NetworkStore::cells() const {
    std::vector<CellRecord> out;
    for (const auto& p : pairs_) {
        for (const auto& c : p.cells) {
            CellRecord r{p.kind, nodes_[p.a].ref, nodes_[p.b].ref, c.day, outlets_[c.outlet],
                         static_cast<std::int64_t>(c.docs.size()), c.delta_sum, {}};
            r.docs.reserve(c.docs.size());
            for (const auto& h : c.docs) r.docs.emplace_back(docs_[h.doc].id, h.delta);
            std::sort(r.docs.begin(), r.docs.end());
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const CellRecord& l, const CellRecord& r) {
        return std::tie(l.a, l.b, l.day, l.outlet) < std::tie(r.a, r.b, r.day, r.outlet);
    });
    return out;
}

std::vector<NodeCellRecord> NetworkStore::node_cells() const {
    std::vector<NodeCellRecord> out;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        for (const auto& c : node_cells_[n]) {
            NodeCellRecord r{nodes_[n].ref, c.day, outlets_[c.outlet], static_cast<std::int64_t>(c.docs.size()),
                             c.occurrences, {}};
            for (DocIndex d : c.docs) r.docs.push_back(docs_[d].id);
            std::sort(r.docs.begin(), r.docs.end());
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const NodeCellRecord& l, const NodeCellRecord& r) {
        return std::tie(l.node, l.day, l.outlet) < std::tie(r.node, r.day, r.outlet);
    });
    return out;
}

}  // namespace newsnet::store
