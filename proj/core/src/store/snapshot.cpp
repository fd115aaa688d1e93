#include "newsnet/store/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsnet/errors.hpp"

namespace newsnet::store {

using json = nlohmann::json;

namespace {

constexpr const char* kFormat = "newsnet-snapshot";

[[noreturn]] void corrupt(std::size_t line, const std::string& what) {
    throw SnapshotError(SnapshotError::Kind::corrupt, "corrupt snapshot, line " + std::to_string(line) + ": " + what);
}

std::string edge_kind_name(EdgeKind k) { return std::string(to_string(k)); }

EdgeKind parse_edge_kind(const std::string& s, std::size_t line) {
    if (s == "entity-entity") return EdgeKind::entity_entity;
    if (s == "entity-term") return EdgeKind::entity_term;
    corrupt(line, "unknown pair kind '" + s + "'");
}

}  // namespace

void save_snapshot(const NetworkStore& store, std::ostream& out) {
    out << json{{"format", kFormat}, {"version", kSnapshotVersion}}.dump() << '\n';

    std::vector<std::size_t> doc_order(store.docs_.size());
    for (std::size_t i = 0; i < doc_order.size(); ++i) doc_order[i] = i;
    std::sort(doc_order.begin(), doc_order.end(),
              [&](std::size_t l, std::size_t r) { return store.docs_[l].id < store.docs_[r].id; });
    for (std::size_t i : doc_order) {
        const auto& d = store.docs_[i];
        out << json::array({"D", d.id, d.day.iso(), store.outlets_[d.outlet]}).dump() << '\n';
    }

    std::vector<std::size_t> node_order(store.nodes_.size());
    for (std::size_t i = 0; i < node_order.size(); ++i) node_order[i] = i;
    std::sort(node_order.begin(), node_order.end(),
              [&](std::size_t l, std::size_t r) { return store.nodes_[l].ref < store.nodes_[r].ref; });
    for (std::size_t i : node_order) {
        const auto& n = store.nodes_[i];
        json rec = json::array({"N", std::string(to_string(n.ref.kind)), n.ref.id});
        if (n.entity) {
            rec.push_back(std::string(to_string(n.entity->etype)));
            rec.push_back(n.entity->label);
            rec.push_back(n.entity->description ? json(*n.entity->description) : json(nullptr));
        }
        out << rec.dump() << '\n';
    }

    const auto node_cells = store.node_cells();
    for (const auto& c : node_cells) {
        out << json::array({"S", std::string(to_string(c.node.kind)), c.node.id, c.day.iso(), c.outlet, c.doc_count,
                            c.occurrences, c.docs})
                   .dump()
            << '\n';
    }

    const auto cells = store.cells();
    for (const auto& c : cells) {
        json docs = json::array();
        for (const auto& [id, delta] : c.docs) docs.push_back(json::array({id, delta}));
        out << json::array({"E", edge_kind_name(c.kind), c.a.id, c.b.id, c.day.iso(), c.outlet, c.doc_count,
                            c.delta_sum, std::move(docs)})
                   .dump()
            << '\n';
    }

    out << json::array({"END", store.docs_.size(), store.nodes_.size(), node_cells.size(), cells.size()}).dump()
        << '\n';
}

void save_snapshot(const NetworkStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError(SnapshotError::Kind::io, "cannot write " + path.string());
    save_snapshot(store, out);
    out.flush();
    if (!out) throw SnapshotError(SnapshotError::Kind::io, "write failed for " + path.string());
}

std::string snapshot_string(const NetworkStore& store) {
    std::ostringstream out;
    save_snapshot(store, out);
    return out.str();
}

NetworkStore load_snapshot(std::istream& in) {
    NetworkStore s;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw SnapshotError(SnapshotError::Kind::corrupt, "empty snapshot");
    ++lineno;
    {
        json header = json::parse(line, nullptr, false);
        if (header.is_discarded() || !header.is_object() || header.value("format", "") != kFormat) {
            throw SnapshotError(SnapshotError::Kind::version, "not a snapshot file");
        }
        const auto version = header.value("version", -1);
        if (version != kSnapshotVersion) {
            throw SnapshotError(SnapshotError::Kind::version, "unsupported snapshot version " + std::to_string(version));
        }
    }

    std::size_t node_cell_count = 0;
    std::size_t edge_cell_count = 0;
    bool finished = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (finished) corrupt(lineno, "content after END record");
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_array() || rec.empty() || !rec[0].is_string()) {
            corrupt(lineno, "malformed record");
        }
        try {
            const std::string tag = rec[0].get<std::string>();
            if (tag == "D") {
                if (rec.size() != 4) corrupt(lineno, "document record arity");
                const OutletId outlet = s.intern_outlet(rec[3].get<std::string>());
                try {
                    s.add_document(rec[1].get<std::string>(), Day::parse(rec[2].get<std::string>()), outlet);
                } catch (const DuplicateDocument& e) {
                    corrupt(lineno, e.what());
                }
            } else if (tag == "N") {
                const NodeKind kind = parse_node_kind(rec.at(1).get<std::string>());
                NodeRef ref{kind, rec.at(2).get<std::string>()};
                if (s.node_index_.contains(ref)) corrupt(lineno, "duplicate node");
                const NodeId id = s.intern_node(ref);
                if (kind == NodeKind::entity) {
                    if (rec.size() != 6) corrupt(lineno, "entity record arity");
                    ingest::EntityInfo info{parse_entity_type(rec[3].get<std::string>()), rec[4].get<std::string>(),
                                            std::nullopt};
                    if (!rec[5].is_null()) info.description = rec[5].get<std::string>();
                    s.nodes_[id].entity = std::move(info);
                } else if (rec.size() != 3) {
                    corrupt(lineno, "term record arity");
                }
            } else if (tag == "S") {
                if (rec.size() != 8) corrupt(lineno, "node cell arity");
                auto node = s.find(NodeRef{parse_node_kind(rec[1].get<std::string>()), rec[2].get<std::string>()});
                auto outlet = s.find_outlet(rec[4].get<std::string>());
                if (!node || !outlet) corrupt(lineno, "node cell references unknown node or outlet");
                const Day day = Day::parse(rec[3].get<std::string>());
                NodeCell& cell = s.node_cell(*node, day, *outlet);
                if (!cell.docs.empty()) corrupt(lineno, "duplicate node cell");
                cell.occurrences = rec[6].get<std::uint64_t>();
                for (const auto& d : rec[7]) {
                    auto di = s.find_document(d.get<std::string>());
                    if (!di) corrupt(lineno, "unknown document");
                    cell.docs.push_back(*di);
                }
                if (cell.docs.empty() || static_cast<std::int64_t>(cell.docs.size()) != rec[5].get<std::int64_t>()) {
                    corrupt(lineno, "doc_count mismatch");
                }
                s.nodes_[*node].total_occurrences += cell.occurrences;
                ++node_cell_count;
            } else if (tag == "E") {
                if (rec.size() != 9) corrupt(lineno, "edge cell arity");
                const EdgeKind kind = parse_edge_kind(rec[1].get<std::string>(), lineno);
                auto a = s.find(NodeRef::entity(rec[2].get<std::string>()));
                auto b = s.find(NodeRef{kind == EdgeKind::entity_term ? NodeKind::term : NodeKind::entity,
                                        rec[3].get<std::string>()});
                auto outlet = s.find_outlet(rec[5].get<std::string>());
                if (!a || !b || !outlet || *a == *b) corrupt(lineno, "edge cell references unknown node or outlet");
                const Day day = Day::parse(rec[4].get<std::string>());
                auto& pair = s.pair_for(*a, *b);
                EdgeCell& cell = s.edge_cell(pair, day, *outlet);
                if (!cell.docs.empty()) corrupt(lineno, "duplicate edge cell");
                for (const auto& h : rec[8]) {
                    auto di = s.find_document(h.at(0).get<std::string>());
                    if (!di) corrupt(lineno, "unknown document");
                    cell.docs.push_back(DocHit{*di, h.at(1).get<std::uint32_t>()});
                }
                cell.delta_sum = NetworkStore::delta_sum_of(cell.docs);
                if (cell.docs.empty() || static_cast<std::int64_t>(cell.docs.size()) != rec[6].get<std::int64_t>()) {
                    corrupt(lineno, "doc_count mismatch");
                }
                if (cell.delta_sum != rec[7].get<double>()) corrupt(lineno, "delta_sum mismatch");
                s.note_cell_size(day, *outlet, cell.docs.size());
                ++edge_cell_count;
            } else if (tag == "END") {
                if (rec.size() != 5 || rec[1].get<std::size_t>() != s.docs_.size() ||
                    rec[2].get<std::size_t>() != s.nodes_.size() || rec[3].get<std::size_t>() != node_cell_count ||
                    rec[4].get<std::size_t>() != edge_cell_count) {
                    corrupt(lineno, "record counts do not match END trailer");
                }
                finished = true;
            } else {
                corrupt(lineno, "unknown record tag '" + tag + "'");
            }
        } catch (const json::exception& e) {
            corrupt(lineno, e.what());
        } catch (const ParseError& e) {
            corrupt(lineno, e.what());
        } catch (const ClassificationError& e) {
            corrupt(lineno, e.what());
        }
    }
    if (!finished) throw SnapshotError(SnapshotError::Kind::corrupt, "truncated snapshot: missing END record");
    return s;
}

NetworkStore load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError(SnapshotError::Kind::io, "cannot read " + path.string());
    return load_snapshot(in);
}

}  // namespace newsnet::store
