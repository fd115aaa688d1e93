#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "newsnet/service/query_service.hpp"

namespace httplib {
class Server;
}

namespace newsnet::service {

/// HTTP/JSON transport for QueryService.
///
/// The client fingerprint is read from the `X-Client-Fp` header (falling back
/// to the remote address) and only its salted hash is kept.
class HttpServer {
public:
    explicit HttpServer(QueryService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to host:port (port 0 picks a free port). Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop(). Requests in flight complete first.
    bool listen();
    void stop();
    bool running() const;

private:
    QueryService& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace newsnet::service
