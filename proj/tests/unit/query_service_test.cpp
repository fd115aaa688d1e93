#include <gtest/gtest.h>

#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "corpus_gen.hpp"
#include "newsnet/service/query_service.hpp"

using namespace newsnet;
using namespace newsnet::service;
using json = nlohmann::json;

namespace {

std::shared_ptr<const store::NetworkStore> fixture_store() {
    static const auto s =
        std::make_shared<const store::NetworkStore>(testing_support::build_store(testing_support::fixture_corpus()));
    return s;
}

json range() { return {{"start", "2016-06-01"}, {"end", "2016-06-07"}}; }

std::string error_field(const Response& r) { return r.body["error"].value("field", ""); }

}  // namespace

TEST(QueryService, MetaDescribesTheStore) {
    QueryService svc(fixture_store());
    const auto r = svc.handle("/api/meta", json::object());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["api_version"], kApiVersion);
    EXPECT_EQ(r.body["span"]["start"], "2016-06-01");
    EXPECT_EQ(r.body["span"]["end"], "2016-06-07");
    EXPECT_EQ(r.body["outlets"], (json{"guardian", "nyt", "wapo"}));
    EXPECT_EQ(r.body["documents"], 10);
    EXPECT_EQ(r.body["nodes"]["actor"], 4);
}

TEST(QueryService, GlobalTopicsReturnGraphJson) {
    QueryService svc(fixture_store());
    const auto r = svc.handle("/api/topics/global", {{"range", range()}, {"num_edges", 2}, {"num_terms", 2}});
    ASSERT_EQ(r.status, 200) << r.text();
    std::set<std::string> keys;
    for (const auto& n : r.body["nodes"]) {
        keys.insert(n["key"].get<std::string>());
        EXPECT_TRUE(n["kind"] == "entity" || n["kind"] == "term");
        if (n["kind"] == "entity") {
            EXPECT_TRUE(n.contains("label"));
        }
    }
    std::size_t ee = 0;
    for (const auto& e : r.body["edges"]) {
        EXPECT_TRUE(keys.count(e["source"]) && keys.count(e["target"])) << e.dump();
        EXPECT_GT(e["omega"].get<double>(), 0.0);
        EXPECT_LE(e["omega"].get<double>(), 1.0);
        ee += e["kind"] == "entity-entity";
    }
    EXPECT_EQ(ee, 2u);
    EXPECT_FALSE(r.body["topics"].empty());
}

TEST(QueryService, ValidationErrorsNameTheField) {
    QueryService svc(fixture_store());
    auto expect_400 = [&](const std::string& ep, const json& body, const std::string& field) {
        const auto r = svc.handle(ep, body);
        EXPECT_EQ(r.status, 400) << ep << " " << body.dump() << " -> " << r.text();
        EXPECT_EQ(error_field(r), field) << r.text();
    };
    expect_400("/api/topics/global", json::object(), "range");
    expect_400("/api/topics/global", {{"range", {{"start", "2016-06-07"}, {"end", "2016-06-01"}}}}, "range");
    expect_400("/api/topics/global", {{"range", {{"start", "2015-01-01"}, {"end", "2016-06-01"}}}}, "range");
    expect_400("/api/topics/global", {{"range", {{"start", "June"}, {"end", "2016-06-01"}}}}, "range");
    expect_400("/api/topics/global", {{"range", range()}, {"outlets", {"nyt", "bogus"}}}, "outlets");
    expect_400("/api/topics/global", {{"range", range()}, {"num_edges", 0}}, "num_edges");
    expect_400("/api/topics/global", {{"range", range()}, {"num_terms", -1}}, "num_terms");
    expect_400("/api/topics/global", {{"range", range()}, {"num_edges", "3"}}, "num_edges");
    expect_400("/api/topics/targeted", {{"range", range()}, {"entity_a", "Q76"}, {"entity_b", "Q76"}}, "entity_b");
    expect_400("/api/recommend", {{"range", range()}, {"nodes", {"entity:Q76"}}}, "nodes");
    EXPECT_EQ(svc.handle_text("/api/topics/global", "{oops").status, 400);
    EXPECT_EQ(svc.handle("/api/topics/global", json::array()).status, 400);
}

TEST(QueryService, UnknownEntitiesAndEndpointsAre404) {
    QueryService svc(fixture_store());
    const auto r = svc.handle("/api/topics/targeted", {{"range", range()}, {"entity_a", "Q76"}, {"entity_b", "Q0"}});
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(error_field(r), "entity_b");
    EXPECT_EQ(svc.handle("/api/expand/adjacent", {{"range", range()}, {"entity", "Q0"}}).status, 404);
    EXPECT_EQ(svc.handle("/api/nothing", json::object()).status, 404);
}

TEST(QueryService, TargetedWithoutCooccurrenceIsEmpty) {
    QueryService svc(fixture_store());
    // Tokyo and NATO never appear together.
    const auto r =
        svc.handle("/api/topics/targeted", {{"range", range()}, {"entity_a", "Q1490"}, {"entity_b", "Q7184"}});
    ASSERT_EQ(r.status, 200);
    EXPECT_TRUE(r.body["topics"].empty());
    EXPECT_TRUE(r.body["edges"].empty());
}

TEST(QueryService, RecommendAcceptsKeysAndObjects) {
    QueryService svc(fixture_store());
    const auto a = svc.handle("/api/recommend", {{"range", range()}, {"nodes", {"entity:Q76", "Q6294"}}, {"limit", 2}});
    const auto b = svc.handle("/api/recommend", {{"range", range()},
                                                 {"nodes", {{{"kind", "entity"}, {"id", "Q76"}}, "entity:Q6294"}},
                                                 {"limit", 2}});
    ASSERT_EQ(a.status, 200) << a.text();
    EXPECT_EQ(a.body["recommendations"], b.body["recommendations"]);
    ASSERT_EQ(a.body["recommendations"].size(), 2u);
    EXPECT_EQ(a.body["recommendations"][0]["doc_id"], "d01");
    EXPECT_EQ(a.body["recommendations"][0]["coverage"], 2);
}

TEST(QueryService, ThrottledRequestsCarryRetryHint) {
    std::mutex mu;
    std::condition_variable cv;
    int inside = 0;
    bool release = false;
    ServiceOptions opts;
    opts.query_limit = 1;
    opts.query_hook = [&](std::string_view) {
        std::unique_lock lock(mu);
        ++inside;
        cv.notify_all();
        cv.wait(lock, [&] { return release; });
    };
    QueryService svc(fixture_store(), opts);
    const json body = {{"range", range()}};
    Response first;
    std::thread t([&] { first = svc.serve("/api/topics/global", body, "client"); });
    {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return inside == 1; });
    }
    const auto misses_before = svc.engine().cache_stats().misses;
    const auto throttled = svc.serve("/api/topics/global", body, "client");
    EXPECT_EQ(throttled.status, 429);
    EXPECT_EQ(throttled.retry_after_seconds, 1);
    EXPECT_EQ(throttled.body["error"]["retry_after_ms"], 1000);
    EXPECT_EQ(svc.serve("/api/meta", json::object(), "client").status, 200);  // not admission-controlled
    EXPECT_EQ(svc.engine().cache_stats().misses, misses_before);  // no engine work for the throttled call
    {
        std::lock_guard lock(mu);
        release = true;
    }
    cv.notify_all();
    t.join();
    EXPECT_EQ(first.status, 200);
    EXPECT_EQ(svc.admission().total_active(), 0);
    EXPECT_EQ(svc.serve("/api/topics/global", body, "client").status, 200);
}

TEST(QueryService, CacheDoesNotChangeResponses) {
    QueryService on(fixture_store()), off(fixture_store(), ServiceOptions{2, false, {}});
    const json bodies[] = {
        {{"range", range()}, {"num_edges", 4}, {"num_terms", 3}},
        {{"range", range()}, {"entity_a", "Q76"}, {"entity_b", "Q6294"}, {"num_terms", 5}},
        {{"range", {{"start", "2016-06-01"}, {"end", "2016-06-03"}}}, {"outlets", {"nyt"}}},
    };
    for (int round = 0; round < 2; ++round) {
        EXPECT_EQ(on.handle("/api/topics/global", bodies[0]).text(), off.handle("/api/topics/global", bodies[0]).text());
        EXPECT_EQ(on.handle("/api/expand/terms", bodies[1]).text(), off.handle("/api/expand/terms", bodies[1]).text());
        EXPECT_EQ(on.handle("/api/topics/global", bodies[2]).text(), off.handle("/api/topics/global", bodies[2]).text());
    }
}

// Recorded request/response pairs shared with the UI. Set
// NEWSNET_UPDATE_FIXTURES=1 to re-record after an intentional API change.
TEST(QueryService, ReplaysRecordedApiFixtures) {
    const std::filesystem::path dir = testing_support::data_path("fixtures/api");
    const bool update = std::getenv("NEWSNET_UPDATE_FIXTURES") != nullptr;
    QueryService svc(fixture_store());
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        json fx = json::parse(in);
        const auto r = svc.handle(fx["endpoint"].get<std::string>(), fx["request"]);
        if (update) {
            fx["status"] = r.status;
            fx["response"] = r.body;
            std::ofstream(entry.path()) << fx.dump(2) << '\n';
        } else {
            EXPECT_EQ(r.status, fx["status"]) << entry.path();
            EXPECT_EQ(r.body, fx["response"]) << entry.path();
        }
        ++n;
    }
    EXPECT_GE(n, 6u);
}
