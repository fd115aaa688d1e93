#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "newsnet/service/admission.hpp"
#include "newsnet/service/suggest.hpp"
#include "newsnet/store/network_store.hpp"
#include "newsnet/topics/engine.hpp"

namespace newsnet::service {

inline constexpr int kApiVersion = 1;

struct ServiceOptions {
    int query_limit = 2;
    bool cache = true;
    /// Called while an admitted query holds its permit, before it runs.
    std::function<void(std::string_view endpoint)> query_hook;
};

struct Response {
    int status = 200;
    nlohmann::json body;
    int retry_after_seconds = 0;  // set for 429

    std::string text() const { return body.dump(); }
};

/// Endpoint dispatch shared by the HTTP server and the CLI.
///
/// Endpoints: /api/meta, /api/health, /api/suggest, /api/topics/global,
/// /api/topics/targeted, /api/expand/terms, /api/expand/adjacent,
/// /api/recommend. Bodies and responses are documented in docs/api.md.
class QueryService {
public:
    explicit QueryService(std::shared_ptr<const store::NetworkStore> store, ServiceOptions options = {});

    /// Runs the endpoint without admission control.
    Response handle(std::string_view endpoint, const nlohmann::json& body) const;
    /// Same, parsing `body` first (empty means {}).
    Response handle_text(std::string_view endpoint, std::string_view body) const;

    /// Admission-controlled entry point used by the transport layer.
    /// A throttled request returns 429 without touching the engine.
    Response serve(std::string_view endpoint, const nlohmann::json& body, std::string_view fingerprint);

    static bool is_query_endpoint(std::string_view endpoint);

    const topics::TopicEngine& engine() const { return engine_; }
    topics::TopicEngine& engine() { return engine_; }
    AdmissionControl& admission() { return admission_; }
    const store::NetworkStore& store() const { return engine_.store(); }

private:
    Response dispatch(std::string_view endpoint, const nlohmann::json& body) const;

    nlohmann::json meta() const;
    nlohmann::json suggest(const nlohmann::json& body) const;
    nlohmann::json global(const nlohmann::json& body) const;
    nlohmann::json targeted(const nlohmann::json& body) const;
    nlohmann::json terms(const nlohmann::json& body) const;
    nlohmann::json adjacent(const nlohmann::json& body) const;
    nlohmann::json recommend(const nlohmann::json& body) const;

    topics::QueryContext context(const nlohmann::json& body) const;
    NodeRef entity_param(const nlohmann::json& body, const char* field) const;

    topics::TopicEngine engine_;
    SuggestionIndex suggestions_;
    ServiceOptions options_;
    AdmissionControl admission_;
};

}  // namespace newsnet::service
