#include "oracle.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "newsnet/ingest/porter.hpp"

namespace testing_support {

using newsnet::ingest::AnnotatedDocument;

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t code_points(const std::string& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool has_alnum(const std::string& s) {
    for (unsigned char c : s)
        if (std::isalnum(c) || c >= 0x80) return true;
    return false;
}

}  // namespace

std::vector<std::vector<NodeRef>> Oracle::terms_of(const AnnotatedDocument& doc) {
    std::vector<std::vector<NodeRef>> out(doc.sentences.size());
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        std::set<std::string> label_words;
        for (const auto& m : doc.mentions) {
            if (m.sentence_index != s) continue;
            std::istringstream words(m.label);
            for (std::string w; words >> w;) label_words.insert(lower(w));
        }
        for (const auto& tok : doc.sentences[s].tokens) {
            const std::string t = lower(tok);
            if (!has_alnum(t) || label_words.count(t) || code_points(t) < 4) continue;
            out[s].push_back(NodeRef::term(newsnet::ingest::porter_stem(t)));
        }
    }
    return out;
}

Oracle::Oracle(const std::vector<AnnotatedDocument>& docs, std::uint32_t window) {
    for (const auto& d : docs) {
        const std::size_t idx = docs_.size();
        RawDoc raw{d.doc_id, d.outlet, d.date, {}};
        for (const auto& m : d.mentions) ++raw.occurrences[NodeRef::entity(m.entity_id)];
        const auto terms = terms_of(d);
        for (const auto& s : terms)
            for (const auto& t : s) ++raw.occurrences[t];
        docs_.push_back(std::move(raw));

        // Entity pairs: closest pair of mention sentences, all pairs examined.
        std::map<std::pair<NodeRef, NodeRef>, std::uint32_t> best;
        for (const auto& m1 : d.mentions) {
            for (const auto& m2 : d.mentions) {
                if (m1.entity_id >= m2.entity_id) continue;
                const auto dist = static_cast<std::uint32_t>(
                    std::abs(static_cast<long>(m1.sentence_index) - static_cast<long>(m2.sentence_index)));
                auto key = std::make_pair(NodeRef::entity(m1.entity_id), NodeRef::entity(m2.entity_id));
                auto [it, fresh] = best.emplace(key, dist);
                if (!fresh) it->second = std::min(it->second, dist);
            }
        }
        for (const auto& [key, dist] : best)
            if (dist <= window) edges_.push_back({key.first, key.second, idx, dist});

        std::set<std::pair<NodeRef, NodeRef>> et;
        for (const auto& m : d.mentions)
            for (const auto& t : terms[m.sentence_index]) et.emplace(NodeRef::entity(m.entity_id), t);
        for (const auto& [e, t] : et) edges_.push_back({e, t, idx, 0});
    }
}

std::set<std::pair<NodeRef, NodeRef>> Oracle::pairs() const {
    std::set<std::pair<NodeRef, NodeRef>> out;
    for (const auto& e : edges_) out.emplace(e.v, e.w);
    return out;
}

std::set<NodeRef> Oracle::nodes() const {
    std::set<NodeRef> out;
    for (const auto& d : docs_)
        for (const auto& [n, _] : d.occurrences) out.insert(n);
    return out;
}

std::set<std::string> Oracle::outlets() const {
    std::set<std::string> out;
    for (const auto& d : docs_) out.insert(d.outlet);
    return out;
}

bool Oracle::in(std::size_t doc, const OracleCtx& ctx) const {
    const auto& d = docs_[doc];
    return ctx.range.contains(d.day) && (ctx.outlets.empty() || ctx.outlets.count(d.outlet));
}

std::map<std::pair<NodeRef, NodeRef>, OracleEdge> Oracle::all_edges(const OracleCtx& ctx) const {
    std::map<std::pair<NodeRef, NodeRef>, OracleEdge> out;
    std::map<std::pair<NodeRef, NodeRef>, std::set<std::int32_t>> days;
    for (const auto& e : edges_) {
        if (!in(e.doc, ctx)) continue;
        auto& agg = out[{e.v, e.w}];
        ++agg.d_e;
        days[{e.v, e.w}].insert(docs_[e.doc].day.serial());
        agg.delta_e += std::exp(-static_cast<double>(e.delta));
        agg.docs.emplace_back(docs_[e.doc].id, e.delta);
    }
    for (auto& [key, agg] : out) {
        agg.t_e = static_cast<std::int32_t>(days[key].size());
        std::sort(agg.docs.begin(), agg.docs.end());
    }
    return out;
}

std::map<NodeRef, OracleNode> Oracle::all_nodes(const OracleCtx& ctx) const {
    std::map<NodeRef, OracleNode> out;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (!in(i, ctx)) continue;
        for (const auto& [n, count] : docs_[i].occurrences) {
            auto& agg = out[n];
            ++agg.doc_count;
            agg.occurrence_count += static_cast<std::int64_t>(count);
        }
    }
    return out;
}

Oracle::Aggregate Oracle::aggregate(const OracleCtx& ctx) const {
    Aggregate a;
    a.edges = all_edges(ctx);
    a.nodes = all_nodes(ctx);
    for (const auto& [_, e] : a.edges) a.dmax = std::max(a.dmax, e.d_e);
    a.range_days = ctx.range.length_days();
    return a;
}

std::optional<double> Oracle::Aggregate::omega(const NodeRef& x, const NodeRef& y) const {
    auto it = edges.find({std::min(x, y), std::max(x, y)});
    if (it == edges.end()) return std::nullopt;
    const auto& e = it->second;
    const double d_v = static_cast<double>(nodes.at(x).doc_count);
    const double d_w = static_cast<double>(nodes.at(y).doc_count);
    const double d_e = static_cast<double>(e.d_e);
    const double c_doc = (d_v + d_w - d_e) / d_e;
    const double c_time = static_cast<double>(range_days) / e.t_e;
    const double c_dist = static_cast<double>(dmax) / e.delta_e;
    return 3.0 / (c_doc + c_time + c_dist);
}

std::optional<OracleEdge> Oracle::edge(const NodeRef& x, const NodeRef& y, const OracleCtx& ctx) const {
    const auto all = all_edges(ctx);
    auto it = all.find({std::min(x, y), std::max(x, y)});
    if (it == all.end()) return std::nullopt;
    return it->second;
}

OracleNode Oracle::node(const NodeRef& v, const OracleCtx& ctx) const {
    const auto all = all_nodes(ctx);
    auto it = all.find(v);
    return it == all.end() ? OracleNode{} : it->second;
}

std::int64_t Oracle::dmax(const OracleCtx& ctx) const { return aggregate(ctx).dmax; }

std::optional<double> Oracle::omega(const NodeRef& x, const NodeRef& y, const OracleCtx& ctx) const {
    return aggregate(ctx).omega(x, y);
}

namespace {

bool ranked_before(const Ranked& l, const Ranked& r) {
    if (l.omega != r.omega) return l.omega > r.omega;
    if (l.d_e != r.d_e) return l.d_e > r.d_e;
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
}

}  // namespace

std::vector<Ranked> Oracle::ranking(const OracleCtx& ctx) const {
    const auto agg = aggregate(ctx);
    std::vector<Ranked> out;
    for (const auto& [key, e] : agg.edges) {
        if (!key.second.is_entity()) continue;
        out.push_back({key.first, key.second, *agg.omega(key.first, key.second), e.d_e});
    }
    std::sort(out.begin(), out.end(), ranked_before);
    return out;
}

std::vector<RankedTerm> Oracle::terms(const NodeRef& v, const NodeRef& w, const OracleCtx& ctx) const {
    const auto agg = aggregate(ctx);
    std::vector<RankedTerm> out;
    for (const auto& [n, _] : agg.nodes) {
        if (!n.is_term()) continue;
        const auto a = agg.omega(v, n);
        const auto b = agg.omega(w, n);
        if (!a || !b) continue;
        out.push_back({n, 2.0 * (*a) * (*b) / (*a + *b)});
    }
    std::sort(out.begin(), out.end(), [](const RankedTerm& l, const RankedTerm& r) {
        if (l.score != r.score) return l.score > r.score;
        return l.term < r.term;
    });
    return out;
}

std::vector<Ranked> Oracle::adjacent(const NodeRef& v, const OracleCtx& ctx) const {
    const auto agg = aggregate(ctx);
    std::vector<Ranked> out;
    for (const auto& [n, _] : agg.nodes) {
        if (!n.is_entity() || n == v) continue;
        auto it = agg.edges.find({std::min(v, n), std::max(v, n)});
        if (it == agg.edges.end()) continue;
        out.push_back({std::min(v, n), std::max(v, n), *agg.omega(v, n), it->second.d_e});
    }
    std::sort(out.begin(), out.end(), ranked_before);
    return out;
}

std::vector<RankedDoc> Oracle::recommend(const std::vector<NodeRef>& nodes, const OracleCtx& ctx) const {
    const std::set<NodeRef> selected(nodes.begin(), nodes.end());
    std::vector<RankedDoc> out;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (!in(i, ctx)) continue;
        RankedDoc r{docs_[i].id, 0, 0.0};
        for (const auto& n : selected) r.coverage += docs_[i].occurrences.count(n) ? 1 : 0;
        if (r.coverage < 2) continue;
        for (const auto& e : edges_)
            if (e.doc == i && selected.count(e.v) && selected.count(e.w))
                r.proximity += std::exp(-static_cast<double>(e.delta));
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const RankedDoc& l, const RankedDoc& r) {
        if (l.coverage != r.coverage) return l.coverage > r.coverage;
        if (!close(l.proximity, r.proximity)) return l.proximity > r.proximity;
        return l.doc_id < r.doc_id;
    });
    return out;
}

}  // namespace testing_support
