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

#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hemobank/auth/auth_service.hpp"
#include "hemobank/clock.hpp"
#include "hemobank/store/store.hpp"

namespace hemobank::api {

/// Transport-neutral HTTP request. Header names are matched
/// case-insensitively; query values are already percent-decoded.
struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;
    std::string body;

    std::string header(std::string_view name) const;
};

struct Response {
    int status = 200;
    nlohmann::json body;  // null means no body
    std::map<std::string, std::string> headers;
};

struct ServiceConfig {
    /// Value for Access-Control-Allow-Origin; empty disables CORS headers.
    std::string ui_origin;
};

/// Who may call a route.
struct Access {
    bool anonymous = false;
    bool admin = false;
    bool donor = false;
    bool patient = false;

    static constexpr Access open() { return {true, false, false, false}; }
    static constexpr Access any_role() { return {false, false, false, false}; }
    bool any_authenticated() const { return !anonymous && !admin && !donor && !patient; }
};

struct RouteInfo {
    std::string method;
    std::string pattern;  // e.g. "/api/requests/{id}/matches"
    Access access;
};

/// The JSON API. Thread-safe: handlers share only the store, whose
/// operations are atomic, and the auth service.
class Service {
public:
    Service(std::shared_ptr<store::Store> store, std::shared_ptr<const Clock> clock,
            auth::AuthConfig auth_config, ServiceConfig config = {});
    ~Service();

    Response handle(const Request& request);

    std::vector<RouteInfo> routes() const;

    store::Store& store() noexcept { return *store_; }
    auth::AuthService& auth() noexcept { return auth_; }
    const Clock& clock() const noexcept { return *clock_; }

    struct Context;
    using Handler = Response (Service::*)(Context&);

private:
    struct Route;

    Response dispatch(const Request& request);
    void add_cors(Response& response) const;

    // endpoints
    Response post_register(Context& ctx);
    Response post_login(Context& ctx);
    Response post_logout(Context& ctx);
    Response get_me(Context& ctx);
    Response get_openapi(Context& ctx);
    Response post_enroll_donor(Context& ctx);
    Response post_enroll_patient(Context& ctx);
    Response get_donor_profile(Context& ctx);
    Response put_donor_profile(Context& ctx);
    Response get_patient_profile(Context& ctx);
    Response put_patient_profile(Context& ctx);
    Response post_request(Context& ctx);
    Response list_requests(Context& ctx);
    Response get_request(Context& ctx);
    Response get_matches(Context& ctx);
    Response cancel_request(Context& ctx);
    Response post_donation(Context& ctx);
    Response admin_list_donors(Context& ctx);
    Response admin_create_donor(Context& ctx);
    Response admin_update_donor(Context& ctx);
    Response admin_delete_donor(Context& ctx);
    Response admin_list_users(Context& ctx);
    Response admin_delete_user(Context& ctx);
    Response admin_list_requests(Context& ctx);
    Response post_message(Context& ctx);
    Response get_conversation(Context& ctx);
    Response list_notifications(Context& ctx);
    Response read_notification(Context& ctx);

    // helpers
    store::BloodRequestRow owned_request(Context& ctx, store::Id request_id);
    void notify_status(const store::BloodRequestRow& request);
    nlohmann::json donor_json(const store::DonorListing& listing) const;

    std::shared_ptr<store::Store> store_;
    std::shared_ptr<const Clock> clock_;
    auth::AuthService auth_;
    ServiceConfig config_;
    std::vector<Route> routes_;
};

/// Machine-readable description served at /api/openapi.json.
nlohmann::json openapi_document(const std::vector<RouteInfo>& routes);

/// {"error": {"code", "message", "details"?}}
nlohmann::json error_envelope(std::string_view code, std::string_view message,
                              const nlohmann::json& details = nullptr);

}  // namespace hemobank::api
