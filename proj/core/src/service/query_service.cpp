#include "newsnet/service/query_service.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "newsnet/errors.hpp"

namespace newsnet::service {

using json = nlohmann::json;
using topics::QueryContext;
using topics::ScoredEdge;
using topics::TermScore;

namespace {

struct HttpError {
    int status;
    std::string field;
    std::string message;
};

[[noreturn]] void bad_request(std::string field, std::string message) {
    throw HttpError{400, std::move(field), std::move(message)};
}

json error_body(int status, const std::string& field, const std::string& message) {
    json e = {{"status", status}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    return json{{"api_version", kApiVersion}, {"error", std::move(e)}};
}

std::int32_t int_param(const json& body, const char* field, std::int32_t fallback, std::int32_t lo, std::int32_t hi) {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_number_integer()) bad_request(field, "expected integer");
    const auto v = it->get<std::int64_t>();
    if (v < lo || v > hi) bad_request(field, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<std::int32_t>(v);
}

std::string key(const NodeRef& n) { return to_string(n); }

json node_json(const store::NetworkStore& s, const NodeRef& n) {
    json j = {{"key", key(n)}, {"id", n.id}, {"kind", std::string(to_string(n.kind))}};
    if (auto id = s.find(n); id && s.node(*id).entity) {
        const auto& e = *s.node(*id).entity;
        j["type"] = std::string(to_string(e.etype));
        j["label"] = e.label;
        if (e.description) j["description"] = *e.description;
    } else if (n.is_term()) {
        j["type"] = "term";
        j["label"] = n.id;
    }
    return j;
}

json edge_json(const ScoredEdge& e) {
    return {{"source", key(e.a)},
            {"target", key(e.b)},
            {"kind", std::string(to_string(e.view.kind))},
            {"omega", e.omega},
            {"doc_count", e.view.d_e},
            {"days", e.view.t_e_days},
            {"delta_sum", e.view.delta_e}};
}

json term_json(const TermScore& t) {
    return {{"term", key(t.term)}, {"id", t.term.id}, {"score", t.score}, {"omega_source", t.omega_a},
            {"omega_target", t.omega_b}};
}

// Accumulates the node and edge lists of a graph response.
class GraphJson {
public:
    explicit GraphJson(const store::NetworkStore& s) : store_(s) {}

    void add_node(const NodeRef& n) { nodes_.try_emplace(n, node_json(store_, n)); }

    json add_edge(const ScoredEdge& e) {
        add_node(e.a);
        add_node(e.b);
        json j = edge_json(e);
        edges_.try_emplace({key(e.a), key(e.b)}, j);
        return j;
    }

    json add_terms(const ScoredEdge& seed, const std::vector<TermScore>& terms) {
        json list = json::array();
        for (const auto& t : terms) {
            add_node(t.term);
            edges_.try_emplace({key(seed.a), key(t.term)},
                               json{{"source", key(seed.a)}, {"target", key(t.term)}, {"kind", "entity-term"},
                                    {"omega", t.omega_a}});
            edges_.try_emplace({key(seed.b), key(t.term)},
                               json{{"source", key(seed.b)}, {"target", key(t.term)}, {"kind", "entity-term"},
                                    {"omega", t.omega_b}});
            list.push_back(term_json(t));
        }
        return list;
    }

    void write(json& out) const {
        json nodes = json::array();
        for (const auto& [_, n] : nodes_) nodes.push_back(n);
        json edges = json::array();
        for (const auto& [_, e] : edges_) edges.push_back(e);
        out["nodes"] = std::move(nodes);
        out["edges"] = std::move(edges);
    }

private:
    const store::NetworkStore& store_;
    std::map<NodeRef, json> nodes_;
    std::map<std::pair<std::string, std::string>, json> edges_;
};

json query_echo(const store::NetworkStore& s, const QueryContext& ctx) {
    std::vector<std::string> outlets = ctx.outlets;
    if (outlets.empty()) outlets = s.outlets();
    std::sort(outlets.begin(), outlets.end());
    return {{"range", {{"start", ctx.range.start.iso()}, {"end", ctx.range.end.iso()}}},
            {"outlets", outlets},
            {"num_edges", ctx.num_edges},
            {"num_terms", ctx.num_terms}};
}

NodeRef parse_node_key(const std::string& text) {
    if (text.rfind("entity:", 0) == 0) return NodeRef::entity(text.substr(7));
    if (text.rfind("term:", 0) == 0) return NodeRef::term(text.substr(5));
    return NodeRef::entity(text);
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const store::NetworkStore> store, ServiceOptions options)
    : engine_(std::move(store), topics::EngineOptions{options.cache}),
      suggestions_(SuggestionIndex::from_store(engine_.store())),
      options_(std::move(options)),
      admission_(options_.query_limit) {}

bool QueryService::is_query_endpoint(std::string_view endpoint) {
    return endpoint != "/api/meta" && endpoint != "/api/health";
}

Response QueryService::handle_text(std::string_view endpoint, std::string_view body) const {
    json parsed = json::object();
    if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
        parsed = json::parse(body, nullptr, false);
        if (parsed.is_discarded()) return Response{400, error_body(400, "body", "invalid JSON"), 0};
    }
    return handle(endpoint, parsed);
}

Response QueryService::handle(std::string_view endpoint, const json& body) const {
    if (!body.is_object()) return Response{400, error_body(400, "body", "expected JSON object"), 0};
    try {
        return dispatch(endpoint, body);
    } catch (const HttpError& e) {
        return Response{e.status, error_body(e.status, e.field, e.message), 0};
    } catch (const InvalidArgument& e) {
        return Response{400, error_body(400, e.field(), e.what()), 0};
    } catch (const ParseError& e) {
        return Response{400, error_body(400, e.field(), e.what()), 0};
    } catch (const UnknownNode& e) {
        return Response{404, error_body(404, "", e.what()), 0};
    } catch (const std::exception& e) {
        return Response{500, error_body(500, "", e.what()), 0};
    }
}

Response QueryService::serve(std::string_view endpoint, const json& body, std::string_view fingerprint) {
    if (!is_query_endpoint(endpoint)) return handle(endpoint, body);
    auto permit = admission_.admit(fingerprint);
    if (!permit) {
        json b = error_body(429, "", "too many active queries for this client");
        b["error"]["retry_after_ms"] = 1000;
        return Response{429, std::move(b), 1};
    }
    if (options_.query_hook) options_.query_hook(endpoint);
    return handle(endpoint, body);
}

Response QueryService::dispatch(std::string_view endpoint, const json& body) const {
    if (endpoint == "/api/meta" || endpoint == "/api/health") return {200, meta(), 0};
    if (endpoint == "/api/suggest") return {200, suggest(body), 0};
    if (endpoint == "/api/topics/global") return {200, global(body), 0};
    if (endpoint == "/api/topics/targeted") return {200, targeted(body), 0};
    if (endpoint == "/api/expand/terms") return {200, terms(body), 0};
    if (endpoint == "/api/expand/adjacent") return {200, adjacent(body), 0};
    if (endpoint == "/api/recommend") return {200, recommend(body), 0};
    throw HttpError{404, "", "unknown endpoint " + std::string(endpoint)};
}

json QueryService::meta() const {
    const auto& s = store();
    const auto c = s.counts();
    json span = nullptr;
    if (auto sp = s.span()) span = {{"start", sp->start.iso()}, {"end", sp->end.iso()}};
    std::vector<std::string> outlets = s.outlets();
    std::sort(outlets.begin(), outlets.end());
    return {{"api_version", kApiVersion},
            {"span", span},
            {"outlets", outlets},
            {"documents", c.documents},
            {"nodes",
             {{"actor", c.actors}, {"location", c.locations}, {"organization", c.organizations}, {"term", c.terms}}},
            {"edges",
             {{"entity_entity_cells", c.entity_entity_cells},
              {"entity_term_cells", c.entity_term_cells},
              {"entity_entity_pairs", c.entity_entity_pairs},
              {"entity_term_pairs", c.entity_term_pairs}}}};
}

json QueryService::suggest(const json& body) const {
    std::string q;
    if (auto it = body.find("q"); it != body.end() && !it->is_null()) {
        if (!it->is_string()) bad_request("q", "expected string");
        q = it->get<std::string>();
    }
    const auto limit = int_param(body, "limit", 10, 1, 100);
    json list = json::array();
    for (const auto& s : suggestions_.suggest(q, static_cast<std::size_t>(limit))) {
        json j = {{"entity_id", s.entity_id},
                  {"key", key(NodeRef::entity(s.entity_id))},
                  {"label", s.label},
                  {"type", std::string(to_string(s.etype))},
                  {"match_score", s.match_score},
                  {"occurrence_count", s.occurrence_count}};
        if (s.description) j["description"] = *s.description;
        list.push_back(std::move(j));
    }
    return {{"api_version", kApiVersion}, {"query", q}, {"suggestions", std::move(list)}};
}

QueryContext QueryService::context(const json& body) const {
    QueryContext ctx;
    auto r = body.find("range");
    if (r == body.end() || !r->is_object()) bad_request("range", "missing range {start, end}");
    auto start = r->find("start");
    auto end = r->find("end");
    if (start == r->end() || end == r->end() || !start->is_string() || !end->is_string()) {
        bad_request("range", "range needs string start and end");
    }
    try {
        ctx.range.start = Day::parse(start->get<std::string>(), "range");
        ctx.range.end = Day::parse(end->get<std::string>(), "range");
    } catch (const ParseError& e) {
        bad_request("range", e.what());
    }
    if (ctx.range.end < ctx.range.start) bad_request("range", "end precedes start");
    const auto span = store().span();
    if (!span) bad_request("range", "the store holds no documents");
    if (ctx.range.start < span->start || ctx.range.end > span->end) {
        bad_request("range", "range must lie within " + span->start.iso() + " .. " + span->end.iso());
    }

    if (auto o = body.find("outlets"); o != body.end() && !o->is_null()) {
        if (!o->is_array()) bad_request("outlets", "expected array of outlet names");
        for (const auto& name : *o) {
            if (!name.is_string()) bad_request("outlets", "expected array of outlet names");
            if (!store().find_outlet(name.get<std::string>())) {
                bad_request("outlets", "unknown outlet '" + name.get<std::string>() + "'");
            }
            ctx.outlets.push_back(name.get<std::string>());
        }
        std::sort(ctx.outlets.begin(), ctx.outlets.end());
        ctx.outlets.erase(std::unique(ctx.outlets.begin(), ctx.outlets.end()), ctx.outlets.end());
    }
    ctx.num_edges = int_param(body, "num_edges", 3, 1, 1000);
    ctx.num_terms = int_param(body, "num_terms", 3, 0, 100);
    return ctx;
}

NodeRef QueryService::entity_param(const json& body, const char* field) const {
    auto it = body.find(field);
    if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
        bad_request(field, "expected entity id");
    }
    NodeRef ref = parse_node_key(it->get<std::string>());
    if (!ref.is_entity()) bad_request(field, "expected an entity, got a term");
    if (!store().find(ref)) throw HttpError{404, field, "unknown entity '" + ref.id + "'"};
    return ref;
}

json QueryService::global(const json& body) const {
    const auto ctx = context(body);
    GraphJson graph(store());
    json topics = json::array();
    for (const auto& t : engine_.global_topics(ctx)) {
        json seeds = json::array();
        for (std::size_t i = 0; i < t.seed_edges.size(); ++i) {
            json e = graph.add_edge(t.seed_edges[i]);
            e["terms"] = graph.add_terms(t.seed_edges[i], t.terms[i]);
            seeds.push_back(std::move(e));
        }
        json entities = json::array();
        for (const auto& n : t.entities) entities.push_back(key(n));
        topics.push_back({{"entities", std::move(entities)}, {"seeds", std::move(seeds)}});
    }
    json out = {{"api_version", kApiVersion}, {"mode", "global"}, {"query", query_echo(store(), ctx)},
                {"topics", std::move(topics)}};
    graph.write(out);
    return out;
}

json QueryService::targeted(const json& body) const {
    const auto ctx = context(body);
    const NodeRef a = entity_param(body, "entity_a");
    const NodeRef b = entity_param(body, "entity_b");
    if (a == b) bad_request("entity_b", "entity_a and entity_b must differ");
    GraphJson graph(store());
    graph.add_node(a);
    graph.add_node(b);
    json topics = json::array();
    if (auto t = engine_.targeted_topic(a, b, ctx)) {
        json e = graph.add_edge(t->seed_edges.front());
        e["terms"] = graph.add_terms(t->seed_edges.front(), t->terms.front());
        json entities = json::array();
        for (const auto& n : t->entities) entities.push_back(key(n));
        topics.push_back({{"entities", std::move(entities)}, {"seeds", json::array({std::move(e)})}});
    }
    json q = query_echo(store(), ctx);
    q["entity_a"] = key(a);
    q["entity_b"] = key(b);
    json out = {{"api_version", kApiVersion}, {"mode", "targeted"}, {"query", std::move(q)},
                {"topics", std::move(topics)}};
    graph.write(out);
    return out;
}

json QueryService::terms(const json& body) const {
    const auto ctx = context(body);
    const NodeRef a = entity_param(body, "entity_a");
    const NodeRef b = entity_param(body, "entity_b");
    if (a == b) bad_request("entity_b", "entity_a and entity_b must differ");
    GraphJson graph(store());
    json seed = nullptr;
    json list = json::array();
    if (auto e = engine_.targeted_edge(a, b, ctx)) {
        seed = graph.add_edge(*e);
        list = graph.add_terms(*e, engine_.expand_terms(*e, ctx));
    }
    json q = query_echo(store(), ctx);
    q["entity_a"] = key(a);
    q["entity_b"] = key(b);
    json out = {{"api_version", kApiVersion}, {"mode", "terms"}, {"query", std::move(q)}, {"seed", std::move(seed)},
                {"terms", std::move(list)}};
    graph.write(out);
    return out;
}

json QueryService::adjacent(const json& body) const {
    const auto ctx = context(body);
    const NodeRef e = entity_param(body, "entity");
    GraphJson graph(store());
    graph.add_node(e);
    json neighbours = json::array();
    for (const auto& edge : engine_.adjacent_entities(e, ctx, static_cast<std::size_t>(ctx.num_edges))) {
        const NodeRef& other = edge.a == e ? edge.b : edge.a;
        neighbours.push_back({{"entity", key(other)}, {"edge", graph.add_edge(edge)}});
    }
    json q = query_echo(store(), ctx);
    q["entity"] = key(e);
    json out = {{"api_version", kApiVersion}, {"mode", "adjacent"}, {"query", std::move(q)},
                {"neighbours", std::move(neighbours)}};
    graph.write(out);
    return out;
}

json QueryService::recommend(const json& body) const {
    const auto ctx = context(body);
    auto it = body.find("nodes");
    if (it == body.end() || !it->is_array()) bad_request("nodes", "expected array of node keys");
    std::set<NodeRef> selected;
    for (const auto& n : *it) {
        NodeRef ref;
        if (n.is_string()) {
            ref = parse_node_key(n.get<std::string>());
        } else if (n.is_object() && n.contains("id") && n["id"].is_string()) {
            ref.id = n["id"].get<std::string>();
            ref.kind = parse_node_kind(n.value("kind", "entity"));
        } else {
            bad_request("nodes", "expected node key string or {kind, id}");
        }
        if (!store().find(ref)) throw HttpError{404, "nodes", "unknown node '" + key(ref) + "'"};
        selected.insert(std::move(ref));
    }
    if (selected.size() < 2) bad_request("nodes", "select at least two distinct nodes");
    const auto limit = int_param(body, "limit", 10, 1, 1000);
    std::vector<NodeRef> nodes(selected.begin(), selected.end());

    json recs = json::array();
    for (const auto& r : engine_.recommend_articles(nodes, ctx, static_cast<std::size_t>(limit))) {
        recs.push_back({{"doc_id", r.doc_id},
                        {"outlet", r.outlet},
                        {"date", r.day.iso()},
                        {"coverage", r.coverage},
                        {"proximity", r.proximity}});
    }
    json keys = json::array();
    for (const auto& n : nodes) keys.push_back(key(n));
    json q = query_echo(store(), ctx);
    q["nodes"] = std::move(keys);
    q["limit"] = limit;
    return {{"api_version", kApiVersion}, {"mode", "recommend"}, {"query", std::move(q)},
            {"recommendations", std::move(recs)}};
}

}  // namespace newsnet::service
