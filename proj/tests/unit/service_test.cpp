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

#include <thread>

#include "hemobank/domain/matching.hpp"
#include "support/api_harness.hpp"
#include "support/helpers.hpp"

using namespace hemobank;
using hemobank::testing::ApiHarness;
using nlohmann::json;

namespace {

std::vector<std::string> donor_names(const json& items) {
    std::vector<std::string> out;
    for (const auto& i : items) out.push_back(i["name"]);
    return out;
}

// Every non-2xx body is exactly {"error": {code, message, details?}}.
void expect_envelope(const api::Response& r) {
    ASSERT_TRUE(r.body.is_object()) << r.body;
    ASSERT_EQ(r.body.size(), 1U) << r.body;
    const auto& e = r.body.at("error");
    ASSERT_TRUE(e.is_object());
    EXPECT_TRUE(e.at("code").is_string());
    EXPECT_TRUE(e.at("message").is_string());
    for (const auto& [k, v] : e.items()) {
        EXPECT_TRUE(k == "code" || k == "message" || k == "details") << k;
    }
    const std::string code = e["code"];
    EXPECT_FALSE(code.empty());
    EXPECT_EQ(code.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZ_"), std::string::npos) << code;
}

std::string code_of(const api::Response& r) {
    expect_envelope(r);
    return r.body["error"]["code"];
}

json make_request(ApiHarness& h, const std::string& token, const std::string& group, const std::string& city,
                  int qty = 2) {
    return h.call("POST", "/api/requests", {{"blood_group", group}, {"quantity_units", qty}, {"city", city}}, token)
        .body;
}

}  // namespace

// identity --------------------------------------------------------------------

TEST(RegisterEndpoint, Examples) {
    ApiHarness h;
    auto r = h.call("POST", "/api/register", {{"name", "Donor1"}, {"email", "donor1@test.com"}, {"password", "s3cretpw"}});
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body, (json{{"user_id", 1}}));

    r = h.call("POST", "/api/register", {{"email", "x@y.co"}, {"password", "s3cretpw"}});
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "VALIDATION_FAILED");
    EXPECT_EQ(r.body["error"]["details"]["missing_fields"], json::array({"name"}));

    r = h.call("POST", "/api/register", {{"name", "A"}, {"email", "DONOR1@test.com"}, {"password", "s3cretpw"}});
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(code_of(r), "DUPLICATE_EMAIL");

    r = h.call("POST", "/api/register", {{"name", "A"}, {"email", "a@b.co"}, {"password", "short"}});
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "PASSWORD_POLICY");

    r = h.call("POST", "/api/register", {{"name", 5}, {"email", "a@b.co"}, {"password", "s3cretpw"}});
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(code_of(r), "BAD_REQUEST");
}

TEST(LoginEndpoint, Examples) {
    ApiHarness h;
    h.donor("d@x.org", "A+", "Sukot");
    auto r = h.call("POST", "/api/login", {{"email", "d@x.org"}, {"password", "s3cretpw"}});
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["roles"], json::array({"DONOR"}));
    EXPECT_TRUE(r.body["token"].is_string());
    EXPECT_EQ(r.body["expires_at"], "2025-06-02T00:00:00.000Z");

    auto wrong = h.call("POST", "/api/login", {{"email", "d@x.org"}, {"password", "nottheone"}});
    auto unknown = h.call("POST", "/api/login", {{"email", "who@x.org"}, {"password", "s3cretpw"}});
    EXPECT_EQ(wrong.status, 401);
    EXPECT_EQ(code_of(wrong), "INVALID_CREDENTIALS");
    EXPECT_EQ(unknown.status, wrong.status);
    EXPECT_EQ(unknown.body.dump(), wrong.body.dump());

    r = h.raw("POST", "/api/login", "{\"email\": ");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(code_of(r), "BAD_REQUEST");
    r = h.raw("POST", "/api/login", "[1,2]");
    EXPECT_EQ(r.status, 400);
}

TEST(SessionEndpoints, MeAndLogout) {
    ApiHarness h;
    const std::string t = h.patient("p@x.org");
    auto me = h.call("GET", "/api/me", nullptr, t);
    EXPECT_EQ(me.status, 200);
    EXPECT_EQ(me.body["email"], "p@x.org");
    EXPECT_EQ(me.body["roles"], json::array({"PATIENT"}));
    EXPECT_EQ(h.call("POST", "/api/logout", nullptr, t).status, 204);
    auto after = h.call("GET", "/api/me", nullptr, t);
    EXPECT_EQ(after.status, 401);
    EXPECT_EQ(code_of(after), "UNAUTHENTICATED");
}

TEST(SessionEndpoints, ExpiredTokenIs401) {
    ApiHarness h;
    const std::string t = h.user("u@x.org");
    h.clock().advance(std::chrono::hours{25});
    const auto r = h.call("GET", "/api/me", nullptr, t);
    EXPECT_EQ(r.status, 401);
    EXPECT_EQ(code_of(r), "TOKEN_EXPIRED");
}

TEST(Routing, UnknownPathsMethodsAndCors) {
    ApiHarness h;
    auto r = h.call("GET", "/api/nope");
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(code_of(r), "NOT_FOUND");
    r = h.call("DELETE", "/api/login");
    EXPECT_EQ(r.status, 405);
    EXPECT_EQ(code_of(r), "METHOD_NOT_ALLOWED");
    r = h.call("GET", "/api/requests/abc");
    EXPECT_EQ(r.status, 404);
    r = h.call("OPTIONS", "/api/requests");
    EXPECT_EQ(r.status, 204);
    EXPECT_EQ(r.headers["Access-Control-Allow-Origin"], "http://ui.test");
    EXPECT_NE(r.headers["Access-Control-Allow-Headers"].find("Authorization"), std::string::npos);
    r = h.call("GET", "/api/openapi.json");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.headers["Access-Control-Allow-Origin"], "http://ui.test");
}

TEST(OpenApi, DescribesEveryRoute) {
    ApiHarness h;
    const auto doc = h.call("GET", "/api/openapi.json").body;
    EXPECT_EQ(doc["openapi"], "3.0.3");
    for (const auto& route : h.service().routes()) {
        std::string method = route.method;
        for (char& c : method) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        EXPECT_TRUE(doc["paths"][route.pattern].contains(method)) << route.method << " " << route.pattern;
    }
}

// profiles --------------------------------------------------------------------

TEST(DonorProfile, Examples) {
    ApiHarness h;
    const std::string d = h.donor("d@x.org", "A+", "Sukot");
    auto r = h.call("GET", "/api/donor/profile", nullptr, d);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["visible_now"], true);
    EXPECT_EQ(r.body["next_eligible_date"], nullptr);

    r = h.call("PUT", "/api/donor/profile", {{"available", false}}, d);
    EXPECT_EQ(r.status, 200);
    r = h.call("GET", "/api/donor/profile", nullptr, d);
    EXPECT_EQ(r.body["available"], false);
    EXPECT_EQ(r.body["visible_now"], false);

    r = h.call("PUT", "/api/donor/profile", {{"blood_group", "C+"}}, d);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "INVALID_BLOOD_GROUP");

    r = h.call("PUT", "/api/donor/profile", {{"city", "Lahore"}, {"phone", "0300-1234567"}}, d);
    EXPECT_EQ(r.body["city"], "Lahore");
    EXPECT_EQ(r.body["blood_group"], "A+");

    r = h.call("PUT", "/api/donor/profile", {{"phone", "12"}}, d);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["error"]["details"]["malformed_fields"][0]["field"], "phone");

    const std::string p = h.patient("p@x.org");
    r = h.call("GET", "/api/donor/profile", nullptr, p);
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(code_of(r), "ROLE_MISSING");
}

TEST(DonorProfile, DonationDrivesEligibility) {
    ApiHarness h;
    const std::string d = h.donor("d@x.org", "A+", "Sukot");
    EXPECT_EQ(h.call("POST", "/api/donations", {{"donated_on", "2025-06-01"}}, d).status, 201);
    const auto r = h.call("GET", "/api/donor/profile", nullptr, d);
    EXPECT_EQ(r.body["last_donation_date"], "2025-06-01");
    EXPECT_EQ(r.body["next_eligible_date"], "2025-08-30");
    EXPECT_EQ(r.body["visible_now"], false);
}

TEST(RoleEnrollment, Rules) {
    ApiHarness h;
    const std::string t = h.user("u@x.org");
    auto r = h.call("POST", "/api/roles/donor", {{"phone", ""}, {"city", "Sukot"}, {"blood_group", "A+"}}, t);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["error"]["details"]["missing_fields"], json::array({"phone"}));
    r = h.call("POST", "/api/roles/donor", {{"phone", "12345"}, {"city", "Sukot"}, {"blood_group", "O-"}}, t);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body["status"], "ACTIVE");
    r = h.call("POST", "/api/roles/donor", {{"phone", "12345"}, {"city", "Sukot"}, {"blood_group", "O-"}}, t);
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(code_of(r), "ROLE_EXISTS");
    r = h.call("POST", "/api/roles/patient", {{"phone", "12345"}, {"city", "Sukot"}}, t);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(h.call("GET", "/api/patient/profile", nullptr, t).body["city"], "Sukot");
    r = h.call("PUT", "/api/patient/profile", {{"city", "Lahore"}}, t);
    EXPECT_EQ(r.body["city"], "Lahore");
    EXPECT_EQ(h.call("GET", "/api/me", nullptr, t).body["roles"], json::array({"DONOR", "PATIENT"}));
}

// requests and matching -------------------------------------------------------

TEST(RequestEndpoint, Examples) {
    ApiHarness h;
    const std::string p = h.patient("p@x.org");
    auto r = h.call("POST", "/api/requests", {{"blood_group", "A+"}, {"quantity_units", 2}, {"city", "Sukot"}}, p);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body["status"], "OPEN");
    EXPECT_EQ(r.body["quantity_units"], 2);
    EXPECT_TRUE(r.body["request_id"].is_number_integer());

    r = h.call("POST", "/api/requests", {{"blood_group", "A+"}, {"quantity_units", 0}, {"city", "Sukot"}}, p);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "INVALID_QUANTITY");
    r = h.call("POST", "/api/requests", {{"blood_group", "A+"}, {"quantity_units", 1.5}, {"city", "Sukot"}}, p);
    EXPECT_EQ(r.status, 422);
    r = h.call("POST", "/api/requests", {{"blood_group", "Z"}, {"quantity_units", 1}, {"city", "Sukot"}}, p);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "INVALID_BLOOD_GROUP");
    r = h.call("POST", "/api/requests", {{"blood_group", "A+"}, {"quantity_units", 2}, {"city", "Sukot"}});
    EXPECT_EQ(r.status, 401);

    const auto list = h.call("GET", "/api/requests", nullptr, p);
    EXPECT_EQ(list.body["total"], 1);
}

TEST(MatchesEndpoint, SeedExamples) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string path = "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches";
    auto r = h.call("GET", path, nullptr, tokens["patient"]);
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(donor_names(r.body), (std::vector<std::string>{"Donor1", "Donor2"}));
    EXPECT_EQ(r.body[0]["city_match"], true);
    EXPECT_EQ(r.body[0]["exact_group"], true);
    EXPECT_EQ(r.body[1]["city_match"], false);
    EXPECT_EQ(r.body[1]["exact_group"], false);
    EXPECT_EQ(r.body[0]["phone"], "0987654321");

    const auto neg = make_request(h, tokens["patient"], "A-", "Anywhere");
    r = h.call("GET", "/api/requests/" + std::to_string(neg["request_id"].get<int>()) + "/matches", nullptr,
               tokens["patient"]);
    EXPECT_EQ(donor_names(r.body), std::vector<std::string>{"Donor2"});

    // Admins may look at any request.
    r = h.call("GET", path, nullptr, tokens["admin"]);
    EXPECT_EQ(r.status, 200);
}

TEST(MatchesEndpoint, EmptyDonorTableLeavesRequestOpen) {
    ApiHarness h;
    const std::string p = h.patient("p@x.org");
    const auto req = make_request(h, p, "A+", "Sukot");
    const std::string id = std::to_string(req["request_id"].get<int>());
    auto r = h.call("GET", "/api/requests/" + id + "/matches", nullptr, p);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body, json::array());
    EXPECT_EQ(h.call("GET", "/api/requests/" + id, nullptr, p).body["status"], "OPEN");
}

TEST(MatchesEndpoint, OwnershipAndMissing) {
    ApiHarness h;
    const std::string owner = h.patient("p1@x.org");
    const std::string other = h.patient("p2@x.org");
    const auto req = make_request(h, owner, "A+", "Sukot");
    const std::string id = std::to_string(req["request_id"].get<int>());
    auto r = h.call("GET", "/api/requests/" + id + "/matches", nullptr, other);
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(code_of(r), "NOT_OWNER");
    r = h.call("GET", "/api/requests/999/matches", nullptr, owner);
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(code_of(r), "UNKNOWN_REQUEST");
}

TEST(MatchesEndpoint, TransitionsAndNotifiesOnce) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string id = std::to_string(req["request_id"].get<int>());
    for (int i = 0; i < 3; ++i) h.call("GET", "/api/requests/" + id + "/matches", nullptr, tokens["patient"]);
    EXPECT_EQ(h.call("GET", "/api/requests/" + id, nullptr, tokens["patient"]).body["status"], "MATCHED");

    for (const char* who : {"donor1", "donor2"}) {
        const auto n = h.call("GET", "/api/notifications", nullptr, tokens[who]).body;
        ASSERT_EQ(n.size(), 1U) << who;
        EXPECT_EQ(n[0]["kind"], "MATCH_FOUND");
        EXPECT_EQ(n[0]["request_id"], req["request_id"]);
    }
    const auto pn = h.call("GET", "/api/notifications", nullptr, tokens["patient"]).body;
    ASSERT_EQ(pn.size(), 1U);
    EXPECT_EQ(pn[0]["kind"], "REQUEST_STATUS");
}

TEST(MatchesEndpoint, ConcurrentCallsStillNotifyOnce) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string path = "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches";
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] { EXPECT_EQ(h.call("GET", path, nullptr, tokens["patient"]).status, 200); });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(h.call("GET", "/api/notifications", nullptr, tokens["donor1"]).body.size(), 1U);
    EXPECT_EQ(h.call("GET", "/api/notifications", nullptr, tokens["patient"]).body.size(), 1U);
}

TEST(MatchesEndpoint, OrderEqualsDomainRanking) {
    ApiHarness h;
    const std::string p = h.patient("p@x.org");
    const std::vector<std::pair<std::string, std::string>> donors{
        {"O-", "Sukot"}, {"A+", "Lahore"}, {"A-", "sukot "}, {"A+", "Sukot"}, {"B+", "Sukot"}, {"O+", "Multan"}};
    for (std::size_t i = 0; i < donors.size(); ++i) {
        h.donor("d" + std::to_string(i) + "@x.org", donors[i].first, donors[i].second);
    }
    const auto req = make_request(h, p, "A+", "Sukot");
    const auto r = h.call("GET", "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches",
                          nullptr, p);
    std::vector<std::int64_t> got;
    for (const auto& i : r.body) got.push_back(i["donor_id"]);

    const auto expect = domain::match_donors({domain::BloodGroup::APos, "Sukot", h.clock().today()},
                                             h.store().all_donors());
    std::vector<std::int64_t> want;
    for (const auto& d : expect) want.push_back(d.donor_id);
    EXPECT_EQ(got, want);
    EXPECT_EQ(got.size(), 5U);  // B+ is incompatible
}

TEST(CancelEndpoint, CancelsOnceAndBlocksDonations) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string id = std::to_string(req["request_id"].get<int>());
    auto r = h.call("POST", "/api/requests/" + id + "/cancel", nullptr, tokens["patient"]);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["status"], "CANCELLED");
    r = h.call("POST", "/api/requests/" + id + "/cancel", nullptr, tokens["patient"]);
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(code_of(r), "ILLEGAL_REQUEST_STATE");

    r = h.call("POST", "/api/donations", {{"request_id", req["request_id"]}}, tokens["donor1"]);
    EXPECT_EQ(r.status, 409);
    // Matches on a closed request notify nobody.
    h.call("GET", "/api/requests/" + id + "/matches", nullptr, tokens["patient"]);
    EXPECT_TRUE(h.call("GET", "/api/notifications", nullptr, tokens["donor1"]).body.empty());
}

// donations -------------------------------------------------------------------

TEST(DonationEndpoint, Examples) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string matches = "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches";

    auto r = h.call("POST", "/api/donations", {{"donated_on", "2025-06-01"}}, tokens["donor1"]);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body["next_eligible_date"], "2025-08-30");
    EXPECT_EQ(donor_names(h.call("GET", matches, nullptr, tokens["patient"]).body),
              std::vector<std::string>{"Donor2"});

    // Backfilled 91 days ago: already eligible again.
    r = h.call("POST", "/api/donations", {{"donated_on", "2025-03-02"}}, tokens["donor2"]);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(donor_names(h.call("GET", matches, nullptr, tokens["patient"]).body),
              std::vector<std::string>{"Donor2"});

    r = h.call("POST", "/api/donations", {{"donated_on", "2025-06-02"}}, tokens["donor2"]);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "FUTURE_DATE");
    r = h.call("POST", "/api/donations", {{"donated_on", "2025-02-30"}}, tokens["donor2"]);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "INVALID_DATE");
}

TEST(DonationEndpoint, WhoMayRecord) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto d2 = h.store().find_donors({domain::BloodGroup::ANeg, std::nullopt}, {}).items.at(0).donor.donor_id;
    auto r = h.call("POST", "/api/donations", {{"donor_id", d2}}, tokens["donor1"]);
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(code_of(r), "NOT_OWNER");
    r = h.call("POST", "/api/donations", {{"donor_id", d2}}, tokens["patient"]);
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(code_of(r), "ROLE_MISSING");
    r = h.call("POST", "/api/donations", {{"donor_id", d2}, {"donated_on", "2025-05-30"}}, tokens["admin"]);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body["donor_id"], d2);
    r = h.call("POST", "/api/donations", json::object(), tokens["admin"]);
    EXPECT_EQ(r.status, 422);
    r = h.call("POST", "/api/donations", {{"donor_id", 999}}, tokens["admin"]);
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(code_of(r), "UNKNOWN_DONOR");
}

TEST(DonationEndpoint, FulfilsMatchedRequestAndTellsPatient) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    const std::string id = std::to_string(req["request_id"].get<int>());
    h.call("GET", "/api/requests/" + id + "/matches", nullptr, tokens["patient"]);
    const auto r = h.call("POST", "/api/donations", {{"request_id", req["request_id"]}}, tokens["donor1"]);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(h.call("GET", "/api/requests/" + id, nullptr, tokens["patient"]).body["status"], "FULFILLED");
    const auto n = h.call("GET", "/api/notifications", nullptr, tokens["patient"]).body;
    ASSERT_EQ(n.size(), 2U);
    EXPECT_NE(n[0]["payload"].get<std::string>().find("FULFILLED"), std::string::npos);
}

// admin -----------------------------------------------------------------------

TEST(AdminDonors, FilterExamples) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const std::string a = tokens["admin"];
    auto r = h.call("GET", "/api/admin/donors?blood_group=A-", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), std::vector<std::string>{"Donor2"});
    r = h.call("GET", "/api/admin/donors?q=Guprenwala", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), std::vector<std::string>{"Donor2"});
    r = h.call("GET", "/api/admin/donors?q=Sukot", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), std::vector<std::string>{"Donor1"});
    r = h.call("GET", "/api/admin/donors?q=nothing-here", nullptr, a);
    EXPECT_EQ(r.body["items"], json::array());
    EXPECT_EQ(r.body["total"], 0);
    // "+" decoded from a raw query string arrives as a space.
    r = h.call("GET", "/api/admin/donors?blood_group=A ", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), std::vector<std::string>{"Donor1"});
    r = h.call("GET", "/api/admin/donors?blood_group=", nullptr, a);
    EXPECT_EQ(r.body["total"], 2);
    r = h.call("GET", "/api/admin/donors?blood_group=Q", nullptr, a);
    EXPECT_EQ(r.status, 422);
    r = h.call("GET", "/api/admin/donors?limit=0", nullptr, a);
    EXPECT_EQ(r.status, 422);
    r = h.call("GET", "/api/admin/donors?limit=101", nullptr, a);
    EXPECT_EQ(r.status, 422);
    r = h.call("GET", "/api/admin/donors?offset=1&limit=1", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), std::vector<std::string>{"Donor2"});
    EXPECT_EQ(r.body["total"], 2);
}

TEST(AdminDonors, ColumnsForTheDonorTable) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto row = h.call("GET", "/api/admin/donors", nullptr, tokens["admin"]).body["items"][0];
    EXPECT_EQ(row["name"], "Donor1");
    EXPECT_EQ(row["phone"], "0987654321");
    EXPECT_EQ(row["email"], "donor1@test.com");
    EXPECT_EQ(row["city"], "Sukot");
    EXPECT_EQ(row["blood_group"], "A+");
    EXPECT_EQ(row["status"], "ACTIVE");
    EXPECT_TRUE(row.contains("donor_id"));
}

TEST(AdminDonors, HiddenDonorsStayListed) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    h.call("POST", "/api/donations", json::object(), tokens["donor1"]);
    const auto items = h.call("GET", "/api/admin/donors", nullptr, tokens["admin"]).body["items"];
    ASSERT_EQ(items.size(), 2U);
    EXPECT_EQ(items[0]["visible_now"], false);
    EXPECT_EQ(items[1]["visible_now"], true);
}

TEST(AdminDonors, CreateUpdateDelete) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const std::string a = tokens["admin"];
    auto r = h.call("POST", "/api/admin/donors",
                    {{"name", "Donor3"}, {"email", "donor3@test.com"}, {"phone", "0311 5555555"}, {"city", "Sukot"},
                     {"blood_group", "O-"}},
                    a);
    ASSERT_EQ(r.status, 201);
    const std::string temp = r.body["temporary_password"];
    EXPECT_EQ(temp.size(), 16U);
    const auto d3 = r.body["donor"]["donor_id"].get<std::int64_t>();
    EXPECT_FALSE(h.login("donor3@test.com", temp).empty());

    r = h.call("POST", "/api/admin/donors",
               {{"name", "Dup"}, {"email", "DONOR3@test.com"}, {"phone", "12345"}, {"city", "x"}, {"blood_group", "O-"}},
               a);
    EXPECT_EQ(r.status, 409);
    r = h.call("POST", "/api/admin/donors", {{"name", ""}, {"email", "x@x.org"}}, a);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["error"]["details"]["missing_fields"], json::array({"name", "phone", "city", "blood_group"}));

    r = h.call("PUT", "/api/admin/donors/" + std::to_string(d3), {{"status", "INACTIVE"}}, a);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["status"], "INACTIVE");
    EXPECT_EQ(r.body["visible_now"], false);
    r = h.call("PUT", "/api/admin/donors/" + std::to_string(d3), {{"status", "SLEEPING"}}, a);
    EXPECT_EQ(r.status, 422);
    r = h.call("PUT", "/api/admin/donors/999", {{"status", "ACTIVE"}}, a);
    EXPECT_EQ(r.status, 404);

    const auto d2 = h.store().find_donors({domain::BloodGroup::ANeg, std::nullopt}, {}).items.at(0).donor.donor_id;
    EXPECT_EQ(h.call("DELETE", "/api/admin/donors/" + std::to_string(d2), nullptr, a).status, 204);
    r = h.call("GET", "/api/admin/donors", nullptr, a);
    EXPECT_EQ(donor_names(r.body["items"]), (std::vector<std::string>{"Donor1", "Donor3"}));
    EXPECT_EQ(h.call("DELETE", "/api/admin/donors/" + std::to_string(d2), nullptr, a).status, 404);
}

TEST(AdminUsers, ListAndDelete) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    auto r = h.call("GET", "/api/admin/users?limit=2", nullptr, tokens["admin"]);
    EXPECT_EQ(r.body["total"], 4);
    EXPECT_EQ(r.body["items"].size(), 2U);
    EXPECT_EQ(r.body["items"][0]["roles"], json::array({"DONOR"}));
    EXPECT_FALSE(r.body["items"][0].contains("password_hash"));
    EXPECT_EQ(h.call("DELETE", "/api/admin/users/1", nullptr, tokens["admin"]).status, 204);
    EXPECT_EQ(h.call("GET", "/api/donor/profile", nullptr, tokens["donor1"]).status, 401);
    EXPECT_EQ(h.call("GET", "/api/admin/requests", nullptr, tokens["admin"]).status, 200);
}

// messaging -------------------------------------------------------------------

TEST(Messaging, Examples) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto donor_user = h.store().find_user_by_email("donor1@test.com")->user_id;
    const auto patient_user = h.store().find_user_by_email("patient@test.com")->user_id;

    auto r = h.call("POST", "/api/messages", {{"recipient_user_id", donor_user}, {"body", "Can you donate?"}},
                    tokens["patient"]);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.body["read"], false);

    r = h.call("GET", "/api/messages/with/" + std::to_string(patient_user), nullptr, tokens["donor1"]);
    ASSERT_EQ(r.status, 200);
    ASSERT_EQ(r.body["items"].size(), 1U);
    EXPECT_EQ(r.body["items"][0]["body"], "Can you donate?");
    EXPECT_EQ(r.body["items"][0]["read"], true);
    // The sender sees the message as read now as well.
    r = h.call("GET", "/api/messages/with/" + std::to_string(donor_user), nullptr, tokens["patient"]);
    EXPECT_EQ(r.body["items"][0]["read"], true);

    r = h.call("POST", "/api/messages", {{"recipient_user_id", donor_user}, {"body", ""}}, tokens["patient"]);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "EMPTY_BODY");
    r = h.call("POST", "/api/messages", {{"recipient_user_id", patient_user}, {"body", "me"}}, tokens["patient"]);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(code_of(r), "SELF_MESSAGE");
    r = h.call("POST", "/api/messages", {{"recipient_user_id", 999}, {"body", "hi"}}, tokens["patient"]);
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(code_of(r), "UNKNOWN_RECIPIENT");
    r = h.call("GET", "/api/messages/with/999", nullptr, tokens["patient"]);
    EXPECT_EQ(r.status, 404);
}

// notifications ---------------------------------------------------------------

TEST(Notifications, ReadMarking) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const auto req = make_request(h, tokens["patient"], "A+", "Sukot");
    h.call("GET", "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches", nullptr,
           tokens["patient"]);
    const auto list = h.call("GET", "/api/notifications", nullptr, tokens["donor1"]).body;
    ASSERT_EQ(list.size(), 1U);
    EXPECT_EQ(list[0]["kind"], "MATCH_FOUND");
    const std::string path = "/api/notifications/" + std::to_string(list[0]["notification_id"].get<int>()) + "/read";
    auto first = h.call("POST", path, nullptr, tokens["donor1"]);
    EXPECT_EQ(first.status, 200);
    EXPECT_EQ(first.body["read"], true);
    auto second = h.call("POST", path, nullptr, tokens["donor1"]);
    EXPECT_EQ(second.status, 200);
    EXPECT_EQ(second.body, first.body);
    auto foreign = h.call("POST", path, nullptr, tokens["donor2"]);
    EXPECT_EQ(foreign.status, 404);
    EXPECT_EQ(code_of(foreign), "UNKNOWN_NOTIFICATION");
}

TEST(Notifications, NewestFirst) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    for (const char* g : {"A+", "A-"}) {
        const auto req = make_request(h, tokens["patient"], g, "Sukot");
        h.clock().advance(std::chrono::minutes{1});
        h.call("GET", "/api/requests/" + std::to_string(req["request_id"].get<int>()) + "/matches", nullptr,
               tokens["patient"]);
    }
    const auto list = h.call("GET", "/api/notifications", nullptr, tokens["donor2"]).body;
    ASSERT_EQ(list.size(), 2U);
    EXPECT_GT(list[0]["notification_id"], list[1]["notification_id"]);
}

// error surface ---------------------------------------------------------------

TEST(ErrorEnvelope, EveryFailureUsesIt) {
    ApiHarness h;
    auto tokens = h.seed_fig6();
    const std::vector<api::Response> failures{
        h.call("GET", "/api/unknown"),
        h.call("PUT", "/api/login"),
        h.call("GET", "/api/me"),
        h.call("GET", "/api/me", nullptr, "forged"),
        h.call("GET", "/api/admin/donors", nullptr, tokens["patient"]),
        h.raw("POST", "/api/register", "{"),
        h.call("POST", "/api/register", json::object()),
        h.call("GET", "/api/requests/77", nullptr, tokens["admin"]),
        h.call("POST", "/api/requests", {{"blood_group", "A+"}, {"quantity_units", -1}, {"city", "x"}},
               tokens["patient"]),
    };
    for (const auto& r : failures) {
        EXPECT_GE(r.status, 400);
        expect_envelope(r);
    }
}
