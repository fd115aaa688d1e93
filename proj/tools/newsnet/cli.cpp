#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "newsnet/errors.hpp"
#include "newsnet/ingest/extract.hpp"
#include "newsnet/service/http_server.hpp"
#include "newsnet/service/query_service.hpp"
#include "newsnet/store/snapshot.hpp"

namespace newsnet::cli {

using json = nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

void print(std::ostream& out, const json& j, bool pretty) { out << (pretty ? j.dump(2) : j.dump()) << '\n'; }

int exit_for_status(int status) {
    switch (status) {
        case 200: return Exit::ok;
        case 400: return Exit::bad_request;
        case 404: return Exit::not_found;
        default: return Exit::failure;
    }
}

struct BuildFlags {
    std::string corpus;
    std::string store;
    ingest::FilterLimits limits;
    std::uint32_t window = ingest::kDefaultEntityWindow;
};

int cmd_build(const BuildFlags& f, std::ostream& out, std::ostream& err, bool pretty) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(f.corpus);
    if (!in) {
        err << "error: cannot read corpus " << f.corpus << '\n';
        return Exit::failure;
    }
    store::NetworkStore net;
    std::size_t read = 0, admitted = 0;
    std::map<std::string, std::size_t> rejected = {{"too_short", 0}, {"too_long", 0}, {"too_many_entities", 0}};
    try {
        ingest::read_corpus(in, [&](ingest::AnnotatedDocument&& doc) {
            ++read;
            if (auto reason = ingest::admit_document(doc, f.limits)) {
                ++rejected[std::string(ingest::to_string(*reason))];
                return;
            }
            const auto occ = ingest::extract_cooccurrences(doc, f.window);
            net.insert_document(occ, doc);
            ++admitted;
        });
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return Exit::failure;
    }
    try {
        store::save_snapshot(net, std::filesystem::path(f.store));
    } catch (const SnapshotError& e) {
        err << "error: " << e.what() << '\n';
        return Exit::failure;
    }
    const auto c = net.counts();
    std::size_t rejected_total = 0;
    for (const auto& [_, n] : rejected) rejected_total += n;
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    print(out,
          json{{"documents_read", read},
               {"documents_admitted", admitted},
               {"documents_rejected", rejected_total},
               {"rejected_by_reason", rejected},
               {"nodes",
                {{"actor", c.actors}, {"location", c.locations}, {"organization", c.organizations}, {"term", c.terms}}},
               {"aggregated_edge_cells",
                {{"entity_entity", c.entity_entity_cells}, {"entity_term", c.entity_term_cells},
                 {"total", c.edge_cells()}}},
               {"store", f.store},
               {"elapsed_ms", ms}},
          pretty);
    return Exit::ok;
}

std::shared_ptr<const store::NetworkStore> load(const std::string& path, std::ostream& err) {
    try {
        return std::make_shared<const store::NetworkStore>(store::load_snapshot(std::filesystem::path(path)));
    } catch (const SnapshotError& e) {
        err << "error: " << e.what() << '\n';
        return nullptr;
    }
}

struct QueryFlags {
    std::string store;
    std::string from, to;
    std::vector<std::string> outlets;
    int num_edges = 3;
    int num_terms = 3;
    std::string entity_a, entity_b, entity;
    std::vector<std::string> nodes;
    int limit = 10;
    std::string q;
    bool cache = true;
};

json range_body(const QueryFlags& f, const store::NetworkStore& s) {
    json body = json::object();
    const auto span = s.span();
    std::string from = f.from, to = f.to;
    if (span && from.empty()) from = span->start.iso();
    if (span && to.empty()) to = span->end.iso();
    body["range"] = {{"start", from}, {"end", to}};
    if (!f.outlets.empty()) body["outlets"] = f.outlets;
    body["num_edges"] = f.num_edges;
    body["num_terms"] = f.num_terms;
    return body;
}

int cmd_query(const std::string& mode, const QueryFlags& f, std::ostream& out, std::ostream& err, bool pretty) {
    auto net = load(f.store, err);
    if (!net) return Exit::failure;
    service::QueryService svc(net, service::ServiceOptions{2, f.cache, {}});

    std::string endpoint;
    json body;
    if (mode == "meta") {
        endpoint = "/api/meta";
        body = json::object();
    } else if (mode == "suggest") {
        endpoint = "/api/suggest";
        body = {{"q", f.q}, {"limit", f.limit}};
    } else {
        body = range_body(f, *net);
        if (mode == "global") {
            endpoint = "/api/topics/global";
        } else if (mode == "targeted" || mode == "terms") {
            endpoint = mode == "targeted" ? "/api/topics/targeted" : "/api/expand/terms";
            body["entity_a"] = f.entity_a;
            body["entity_b"] = f.entity_b;
        } else if (mode == "adjacent") {
            endpoint = "/api/expand/adjacent";
            body["entity"] = f.entity;
        } else if (mode == "recommend") {
            endpoint = "/api/recommend";
            body["nodes"] = f.nodes;
            body["limit"] = f.limit;
        }
    }
    const auto resp = svc.handle(endpoint, body);
    if (resp.status == 200) {
        print(out, resp.body, pretty);
    } else {
        print(err, resp.body, pretty);
    }
    return exit_for_status(resp.status);
}

struct ServeFlags {
    std::string store;
    std::string host = "127.0.0.1";
    int port = 8080;
    int query_limit = 2;
    bool cache = true;
    std::string ui_dir;
    int slow_query_ms = 0;
};

int cmd_serve(const ServeFlags& f, std::ostream& out, std::ostream& err) {
    auto net = load(f.store, err);
    if (!net) return Exit::failure;
    service::ServiceOptions options{f.query_limit, f.cache, {}};
    if (f.slow_query_ms > 0) {
        const int ms = f.slow_query_ms;
        options.query_hook = [ms](std::string_view) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
    }
    std::unique_ptr<service::QueryService> svc;
    try {
        svc = std::make_unique<service::QueryService>(net, options);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return Exit::usage;
    }
    std::optional<std::filesystem::path> ui;
    if (!f.ui_dir.empty()) ui = f.ui_dir;
    service::HttpServer server(*svc, ui);
    const int port = server.bind(f.host, f.port);
    if (port < 0) {
        err << "error: cannot bind " << f.host << ':' << f.port << " (address in use?)\n";
        return Exit::failure;
    }
    out << json{{"listening", f.host + ":" + std::to_string(port)}}.dump() << std::endl;

    g_interrupted = false;
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    std::thread watcher([&server] {
        while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
    });
    const bool clean = server.listen();
    g_interrupted = true;
    watcher.join();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    err << "shutdown complete\n";
    return clean ? Exit::ok : Exit::failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Build, inspect and query entity cooccurrence network stores", "newsnet"};
    app.require_subcommand(1);
    app.fallthrough();
    bool pretty = false;
    app.add_flag("--pretty", pretty, "Indent JSON output");

    BuildFlags build;
    auto* b = app.add_subcommand("build", "Build a store snapshot from an annotated corpus");
    b->add_option("corpus", build.corpus, "Newline-delimited annotated documents")->required();
    b->add_option("store", build.store, "Snapshot file to write")->required();
    b->add_option("--min-chars", build.limits.min_chars, "Reject documents shorter than this")->capture_default_str();
    b->add_option("--max-chars", build.limits.max_chars, "Reject documents longer than this")->capture_default_str();
    b->add_option("--max-entities", build.limits.max_entities, "Reject documents with more distinct entities")
        ->capture_default_str();
    b->add_option("--window", build.window, "Entity cooccurrence window in sentences")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    QueryFlags q;
    auto* query = app.add_subcommand("query", "Run an exploration query against a store");
    query->require_subcommand(1);
    query->fallthrough();
    query->add_option("store", q.store, "Snapshot file")->required();
    query->add_flag("--cache,!--no-cache", q.cache, "Cache term expansions");
    auto add_context = [&q](CLI::App* sub) {
        sub->add_option("--from", q.from, "First day (YYYY-MM-DD); defaults to corpus start");
        sub->add_option("--to", q.to, "Last day (YYYY-MM-DD); defaults to corpus end");
        sub->add_option("--outlet", q.outlets, "Restrict to outlet (repeatable)");
        sub->add_option("-k,--num-edges", q.num_edges, "Number of seed edges / neighbours")->capture_default_str();
        sub->add_option("-m,--num-terms", q.num_terms, "Number of terms per edge")->capture_default_str();
    };
    auto* global = query->add_subcommand("global", "Global edge ranking with term expansion");
    add_context(global);
    auto* targeted = query->add_subcommand("targeted", "Topic for the edge between two entities");
    add_context(targeted);
    targeted->add_option("--a,--entity-a", q.entity_a, "First entity id")->required();
    targeted->add_option("--b,--entity-b", q.entity_b, "Second entity id")->required();
    auto* terms = query->add_subcommand("terms", "Descriptive terms for one entity edge");
    add_context(terms);
    terms->add_option("--a,--entity-a", q.entity_a, "First entity id")->required();
    terms->add_option("--b,--entity-b", q.entity_b, "Second entity id")->required();
    auto* adjacent = query->add_subcommand("adjacent", "Highest ranked neighbouring entities");
    add_context(adjacent);
    adjacent->add_option("--entity", q.entity, "Entity id")->required();
    auto* recommend = query->add_subcommand("recommend", "Articles relevant to a node selection");
    add_context(recommend);
    recommend->add_option("--node", q.nodes, "Node key, e.g. entity:Q76 or term:vote (repeatable)")->required();
    recommend->add_option("--limit", q.limit, "Number of articles")->capture_default_str();
    auto* suggest = query->add_subcommand("suggest", "Entity suggestions for a label prefix");
    suggest->add_option("q", q.q, "Query string")->required();
    suggest->add_option("--limit", q.limit, "Number of suggestions")->capture_default_str();
    query->add_subcommand("meta", "Corpus span, outlets and counts");

    std::string inspect_store;
    auto* inspect = app.add_subcommand("inspect", "Print store statistics");
    inspect->add_option("store", inspect_store, "Snapshot file")->required();

    ServeFlags serve;
    auto* srv = app.add_subcommand("serve", "Serve the HTTP/JSON API");
    srv->add_option("store", serve.store, "Snapshot file")->required();
    srv->add_option("--host", serve.host, "Bind address")->capture_default_str();
    srv->add_option("--port", serve.port, "Port (0 picks a free port)")->capture_default_str();
    srv->add_option("--query-limit", serve.query_limit, "Active queries allowed per client")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    srv->add_flag("--cache,!--no-cache", serve.cache, "Cache term expansions");
    srv->add_option("--ui-dir", serve.ui_dir, "Directory of static UI assets to serve at /");
    srv->add_option("--slow-query-ms", serve.slow_query_ms)->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Exit::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return Exit::usage;
    }

    if (b->parsed()) return cmd_build(build, out, err, pretty);
    if (srv->parsed()) return cmd_serve(serve, out, err);
    if (inspect->parsed()) {
        QueryFlags f;
        f.store = inspect_store;
        return cmd_query("meta", f, out, err, pretty);
    }
    for (auto* sub : query->get_subcommands()) {
        if (sub->parsed()) return cmd_query(sub->get_name(), q, out, err, pretty);
    }
    err << app.help();
    return Exit::usage;
}

}  // namespace newsnet::cli
