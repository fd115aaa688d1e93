#include "newsnet/service/http_server.hpp"

#include <httplib.h>

namespace newsnet::service {

using json = nlohmann::json;

namespace {

void write(httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (r.status == 429) res.set_header("Retry-After", std::to_string(r.retry_after_seconds));
    res.set_content(r.text(), "application/json");
}

std::string fingerprint_of(const httplib::Request& req) {
    if (req.has_header("X-Client-Fp")) return req.get_header_value("X-Client-Fp");
    return req.remote_addr;
}

}  // namespace

HttpServer::HttpServer(QueryService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server silently share a port that is already in use.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    // Idle keep-alive connections would otherwise hold up shutdown.
    srv.set_keep_alive_timeout(1);

    auto get = [this](const std::string& endpoint) {
        return [this, endpoint](const httplib::Request& req, httplib::Response& res) {
            json body = json::object();
            for (const auto& [k, v] : req.params) {
                if (k == "limit") {
                    try {
                        body[k] = std::stoll(v);
                    } catch (const std::exception&) {
                        body[k] = v;  // rejected by validation
                    }
                } else {
                    body[k] = v;
                }
            }
            write(res, service_.serve(endpoint, body, fingerprint_of(req)));
        };
    };
    auto post = [this](const std::string& endpoint) {
        return [this, endpoint](const httplib::Request& req, httplib::Response& res) {
            json body = req.body.empty() ? json::object() : json::parse(req.body, nullptr, false);
            if (body.is_discarded()) {
                write(res, Response{400, json{{"api_version", kApiVersion},
                                              {"error", {{"status", 400}, {"field", "body"}, {"message", "invalid JSON"}}}},
                                    0});
                return;
            }
            write(res, service_.serve(endpoint, body, fingerprint_of(req)));
        };
    };

    srv.Get("/api/meta", get("/api/meta"));
    srv.Get("/api/health", get("/api/health"));
    srv.Get("/api/suggest", get("/api/suggest"));
    for (const char* ep : {"/api/topics/global", "/api/topics/targeted", "/api/expand/terms", "/api/expand/adjacent",
                           "/api/recommend"}) {
        srv.Post(ep, post(ep));
    }
    if (static_dir) srv.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace newsnet::service
