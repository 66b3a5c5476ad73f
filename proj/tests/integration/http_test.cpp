/*
 *  Copyright (c) 2026 The Hemobank Authors.
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "hemobank/api/http_server.hpp"
#include "support/api_harness.hpp"

using namespace hemobank;
using hemobank::testing::ApiHarness;
using nlohmann::json;

namespace {

/// Clock that can be told to stall, to keep a request in flight.
class StallingClock final : public Clock {
public:
    domain::Timestamp now() const override {
        if (stall_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds{stall_ms.load()});
        return domain::Timestamp{domain::make_date(2025, 6, 1)};
    }
    mutable std::atomic<int> stall_ms{0};
};

class HttpTest : public ::testing::Test {
protected:
    void SetUp() override {
        tokens = harness.seed_fig6();
        server = std::make_unique<api::HttpServer>(harness.service());
        port = server->bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        worker = std::thread([this] { server->run(); });
        while (!server->running()) std::this_thread::sleep_for(std::chrono::milliseconds{5});
    }
    void TearDown() override {
        server->stop();
        if (worker.joinable()) worker.join();
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }

    ApiHarness harness;
    std::map<std::string, std::string> tokens;
    std::unique_ptr<api::HttpServer> server;
    int port = 0;
    std::thread worker;
};

}  // namespace

TEST_F(HttpTest, ServesOpenApiWithCors) {
    auto c = client();
    const auto r = c.Get("/api/openapi.json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "application/json");
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "http://ui.test");
    EXPECT_TRUE(json::parse(r->body).contains("paths"));

    const auto pre = c.Options("/api/admin/donors");
    ASSERT_TRUE(pre);
    EXPECT_EQ(pre->status, 204);
}

TEST_F(HttpTest, BearerTokensAndQueryDecoding) {
    auto c = client();
    const httplib::Headers auth{{"Authorization", "Bearer " + tokens["admin"]}};
    auto r = c.Get("/api/admin/donors?blood_group=A%2B", auth);
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    auto items = json::parse(r->body)["items"];
    ASSERT_EQ(items.size(), 1U);
    EXPECT_EQ(items[0]["name"], "Donor1");

    r = c.Get("/api/admin/donors?blood_group=A-&q=", auth);
    EXPECT_EQ(json::parse(r->body)["items"][0]["name"], "Donor2");

    r = c.Get("/api/admin/donors");
    EXPECT_EQ(r->status, 401);
    EXPECT_EQ(json::parse(r->body)["error"]["code"], "UNAUTHENTICATED");
}

TEST_F(HttpTest, JsonBodiesAndErrors) {
    auto c = client();
    auto r = c.Post("/api/register", R"({"name":"Ana","email":"ana@x.org","password":"s3cretpw"})", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 201);
    r = c.Post("/api/login", "{not json", "application/json");
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(json::parse(r->body)["error"]["code"], "BAD_REQUEST");
    r = c.Get("/api/missing");
    EXPECT_EQ(r->status, 404);
    r = c.Delete("/api/logout", httplib::Headers{{"Authorization", "Bearer " + tokens["admin"]}});
    EXPECT_EQ(r->status, 405);
    r = c.Post("/api/logout", httplib::Headers{{"Authorization", "Bearer " + tokens["admin"]}}, "", "application/json");
    EXPECT_EQ(r->status, 204);
    EXPECT_TRUE(r->body.empty());
}

TEST_F(HttpTest, ConcurrentClients) {
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 16; ++i) {
        threads.emplace_back([&] {
            auto c = client();
            const auto r = c.Get("/api/me", httplib::Headers{{"Authorization", "Bearer " + tokens["patient"]}});
            if (r && r->status == 200) ++ok;
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok, 16);
}

TEST(HttpServer, StopDrainsInFlightRequests) {
    auto clock = std::make_shared<StallingClock>();
    auto store = std::make_shared<store::MemoryStore>(clock);
    store->migrate();
    api::Service service(store, clock, ApiHarness::fast_auth());
    api::HttpServer server(service);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.run(); });
    while (!server.running()) std::this_thread::sleep_for(std::chrono::milliseconds{5});

    clock->stall_ms = 400;
    std::atomic<int> status{0};
    std::thread slow([&] {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(5, 0);
        const auto r = c.Post("/api/register", R"({"name":"Slow","email":"slow@x.org","password":"s3cretpw"})",
                              "application/json");
        status = r ? r->status : -1;
    });
    std::this_thread::sleep_for(std::chrono::milliseconds{100});
    server.stop();
    worker.join();
    slow.join();
    EXPECT_EQ(status, 201);
}

TEST(HttpServer, OccupiedPortIsReported) {
    ApiHarness h;
    api::HttpServer first(h.service());
    const int port = first.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    api::HttpServer second(h.service());
    EXPECT_EQ(second.bind("127.0.0.1", port), -1);
}
