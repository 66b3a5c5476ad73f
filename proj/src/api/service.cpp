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

#include "hemobank/api/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "hemobank/domain/matching.hpp"
#include "hemobank/domain/validation.hpp"
#include "hemobank/error.hpp"

namespace hemobank::api {

using nlohmann::json;
using store::Id;
using store::Role;

struct Service::Context {
    const Request& req;
    std::vector<Id> params;
    auth::AuthzDecision principal;
    json body = json::object();
};

struct Service::Route {
    std::string method;
    std::string pattern;
    std::vector<std::string> segments;
    Access access;
    Handler handler;
};

namespace {

std::string lower(std::string_view s) {
    std::string out{s};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string_view::npos ? path.size() : slash;
        if (end > start) out.emplace_back(path.substr(start, end - start));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
    return v;
}

/// Matches `segments` against a route pattern, collecting "{...}" ids.
bool match_route(const std::vector<std::string>& pattern, const std::vector<std::string>& path,
                 std::vector<Id>& params) {
    if (pattern.size() != path.size()) return false;
    params.clear();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (!pattern[i].empty() && pattern[i].front() == '{') {
            const auto id = parse_int(path[i]);
            if (!id || *id <= 0) return false;
            params.push_back(*id);
        } else if (pattern[i] != path[i]) {
            return false;
        }
    }
    return true;
}

// request body fields ---------------------------------------------------------

[[noreturn]] void bad_type(std::string_view key, std::string_view expected) {
    throw Error(ErrorCode::BadRequest,
                "field '" + std::string{key} + "' must be " + std::string{expected},
                {{"field", key}});
}

std::optional<std::string> opt_string(const json& body, std::string_view key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) bad_type(key, "a string");
    return it->get<std::string>();
}

std::string string_field(const json& body, std::string_view key) {
    return opt_string(body, key).value_or("");
}

std::optional<std::int64_t> opt_int(const json& body, std::string_view key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) bad_type(key, "an integer");
    return it->get<std::int64_t>();
}

std::optional<bool> opt_bool(const json& body, std::string_view key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) bad_type(key, "a boolean");
    return it->get<bool>();
}

json report_json(const domain::ValidationReport& r) {
    json malformed = json::array();
    for (const auto& p : r.malformed_fields) malformed.push_back({{"field", p.field}, {"reason", p.reason}});
    return {{"missing_fields", r.missing_fields}, {"malformed_fields", malformed}};
}

void require_valid(const std::vector<domain::Field>& fields) {
    const auto report = domain::validate_required(fields);
    if (!report.ok()) {
        throw Error(ErrorCode::ValidationFailed, "request data is incomplete or malformed",
                    report_json(report));
    }
}

domain::BloodGroup parse_group(std::string_view text) {
    if (auto g = domain::parse_blood_group(domain::trim(text))) return *g;
    throw Error(ErrorCode::InvalidBloodGroup,
                "blood_group must be one of A+, A-, B+, B-, AB+, AB-, O+, O-",
                {{"field", "blood_group"}, {"value", text}});
}

domain::Date parse_day(std::string_view field, std::string_view text) {
    if (auto d = domain::parse_date(text)) return *d;
    throw Error(ErrorCode::InvalidDate, std::string{field} + " must be a YYYY-MM-DD date",
                {{"field", field}, {"value", text}});
}

domain::DonorStatus parse_status(std::string_view text) {
    if (auto s = domain::parse_donor_status(text)) return *s;
    throw Error(ErrorCode::ValidationFailed, "status must be ACTIVE or INACTIVE",
                {{"missing_fields", json::array()},
                 {"malformed_fields", {{{"field", "status"}, {"reason", "enum"}}}}});
}

// query parameters ------------------------------------------------------------

std::optional<std::string> query_param(const Request& req, const std::string& key) {
    auto it = req.query.find(key);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
}

[[noreturn]] void bad_query(std::string_view key, std::string_view reason) {
    throw Error(ErrorCode::ValidationFailed, "invalid query parameter '" + std::string{key} + "'",
                {{"missing_fields", json::array()},
                 {"malformed_fields", {{{"field", key}, {"reason", reason}}}}});
}

store::Page page_from_query(const Request& req) {
    store::Page page;
    if (auto v = query_param(req, "offset"); v && !v->empty()) {
        const auto n = parse_int(*v);
        if (!n || *n < 0) bad_query("offset", "must be a non-negative integer");
        page.offset = static_cast<std::size_t>(*n);
    }
    if (auto v = query_param(req, "limit"); v && !v->empty()) {
        const auto n = parse_int(*v);
        if (!n || *n < 1 || *n > static_cast<std::int64_t>(store::kMaxPageLimit)) {
            bad_query("limit", "must be an integer in [1, 100]");
        }
        page.limit = static_cast<std::size_t>(*n);
    }
    return page;
}

/// Blood group from a query string. An unencoded '+' arrives as a space after
/// form decoding, so "A " is read back as "A+".
std::optional<domain::BloodGroup> group_param(const Request& req) {
    auto v = query_param(req, "blood_group");
    if (!v || domain::trim(*v).empty()) return std::nullopt;
    if (auto g = domain::parse_blood_group(*v)) return g;
    std::string fixed{*v};
    if (!fixed.empty() && fixed.back() == ' ') fixed.back() = '+';
    if (auto g = domain::parse_blood_group(fixed)) return g;
    throw Error(ErrorCode::InvalidBloodGroup,
                "blood_group must be one of A+, A-, B+, B-, AB+, AB-, O+, O-",
                {{"field", "blood_group"}, {"value", *v}});
}

// row encoders ----------------------------------------------------------------

json roles_json(const store::RoleSet& roles) {
    json out = json::array();
    for (Role r : roles.list()) out.push_back(store::to_string(r));
    return out;
}

json optional_date(const std::optional<domain::Date>& d) {
    return d ? json(domain::format_date(*d)) : json(nullptr);
}

json request_json(const store::BloodRequestRow& r) {
    return {{"request_id", r.request_id},
            {"patient_id", r.patient_id},
            {"blood_group", domain::to_string(r.blood_group)},
            {"quantity_units", r.quantity_units},
            {"city", r.city},
            {"status", store::to_string(r.status)},
            {"created_at", domain::format_timestamp(r.created_at)}};
}

json message_json(const store::MessageRow& m) {
    return {{"message_id", m.message_id},
            {"sender_user_id", m.sender_user_id},
            {"recipient_user_id", m.recipient_user_id},
            {"body", m.body},
            {"sent_at", domain::format_timestamp(m.sent_at)},
            {"read", m.read}};
}

json notification_json(const store::NotificationRow& n) {
    return {{"notification_id", n.notification_id},
            {"user_id", n.user_id},
            {"kind", store::to_string(n.kind)},
            {"payload", n.payload},
            {"request_id", n.request_id ? json(*n.request_id) : json(nullptr)},
            {"created_at", domain::format_timestamp(n.created_at)},
            {"read", n.read}};
}

json patient_json(const store::PatientRow& p, const store::UserRow& u) {
    return {{"patient_id", p.patient_id}, {"user_id", p.user_id}, {"name", u.name},
            {"email", u.email},           {"phone", p.phone},     {"city", p.city}};
}

template <typename T, typename Fn>
json page_json(const store::PageResult<T>& page, const store::Page& req, Fn encode) {
    json items = json::array();
    for (const auto& item : page.items) items.push_back(encode(item));
    return {{"items", items}, {"total", page.total}, {"offset", req.offset}, {"limit", req.limit}};
}

Response created(json body) { return {201, std::move(body), {}}; }
Response ok(json body) { return {200, std::move(body), {}}; }
Response no_content() { return {204, nullptr, {}}; }

std::string bearer_token(const Request& req) {
    const std::string h = req.header("authorization");
    constexpr std::string_view scheme = "bearer ";
    if (h.size() <= scheme.size() || lower(h.substr(0, scheme.size())) != scheme) return {};
    return std::string{domain::trim(std::string_view{h}.substr(scheme.size()))};
}

}  // namespace

std::string Request::header(std::string_view name) const {
    const std::string key = lower(name);
    for (const auto& [k, v] : headers) {
        if (lower(k) == key) return v;
    }
    return {};
}

json error_envelope(std::string_view code, std::string_view message, const json& details) {
    json err = {{"code", code}, {"message", message}};
    if (!details.is_null()) err["details"] = details;
    return {{"error", err}};
}

Service::Service(std::shared_ptr<store::Store> store, std::shared_ptr<const Clock> clock,
                 auth::AuthConfig auth_config, ServiceConfig config)
    : store_(std::move(store)),
      clock_(std::move(clock)),
      auth_(*store_, clock_, auth_config),
      config_(std::move(config)) {
    constexpr Access open = Access::open();
    constexpr Access any = Access::any_role();
    constexpr Access admin{false, true, false, false};
    constexpr Access donor{false, false, true, false};
    constexpr Access patient{false, false, false, true};
    constexpr Access patient_or_admin{false, true, false, true};
    constexpr Access donor_or_admin{false, true, true, false};

    auto add = [&](std::string method, std::string pattern, Access access, Handler h) {
        auto segments = split_path(pattern);
        routes_.push_back({std::move(method), std::move(pattern), std::move(segments), access, h});
    };
    add("POST", "/api/register", open, &Service::post_register);
    add("POST", "/api/login", open, &Service::post_login);
    add("GET", "/api/openapi.json", open, &Service::get_openapi);
    add("POST", "/api/logout", any, &Service::post_logout);
    add("GET", "/api/me", any, &Service::get_me);
    add("POST", "/api/roles/donor", any, &Service::post_enroll_donor);
    add("POST", "/api/roles/patient", any, &Service::post_enroll_patient);
    add("GET", "/api/donor/profile", donor, &Service::get_donor_profile);
    add("PUT", "/api/donor/profile", donor, &Service::put_donor_profile);
    add("GET", "/api/patient/profile", patient, &Service::get_patient_profile);
    add("PUT", "/api/patient/profile", patient, &Service::put_patient_profile);
    add("POST", "/api/requests", patient, &Service::post_request);
    add("GET", "/api/requests", patient_or_admin, &Service::list_requests);
    add("GET", "/api/requests/{id}", patient_or_admin, &Service::get_request);
    add("GET", "/api/requests/{id}/matches", patient_or_admin, &Service::get_matches);
    add("POST", "/api/requests/{id}/cancel", patient_or_admin, &Service::cancel_request);
    add("POST", "/api/donations", donor_or_admin, &Service::post_donation);
    add("GET", "/api/admin/donors", admin, &Service::admin_list_donors);
    add("POST", "/api/admin/donors", admin, &Service::admin_create_donor);
    add("PUT", "/api/admin/donors/{id}", admin, &Service::admin_update_donor);
    add("DELETE", "/api/admin/donors/{id}", admin, &Service::admin_delete_donor);
    add("GET", "/api/admin/users", admin, &Service::admin_list_users);
    add("DELETE", "/api/admin/users/{id}", admin, &Service::admin_delete_user);
    add("GET", "/api/admin/requests", admin, &Service::admin_list_requests);
    add("POST", "/api/messages", any, &Service::post_message);
    add("GET", "/api/messages/with/{id}", any, &Service::get_conversation);
    add("GET", "/api/notifications", any, &Service::list_notifications);
    add("POST", "/api/notifications/{id}/read", any, &Service::read_notification);
}

Service::~Service() = default;

std::vector<RouteInfo> Service::routes() const {
    std::vector<RouteInfo> out;
    for (const Route& r : routes_) out.push_back({r.method, r.pattern, r.access});
    return out;
}

void Service::add_cors(Response& response) const {
    if (config_.ui_origin.empty()) return;
    response.headers["Access-Control-Allow-Origin"] = config_.ui_origin;
    response.headers["Access-Control-Allow-Headers"] = "Authorization, Content-Type";
    response.headers["Access-Control-Allow-Methods"] = "GET, POST, PUT, DELETE, OPTIONS";
    response.headers["Vary"] = "Origin";
}

Response Service::handle(const Request& request) {
    Response response;
    try {
        response = dispatch(request);
    } catch (const Error& e) {
        response.status = http_status(e.code());
        response.body = error_envelope(to_string(e.code()), e.what(), e.details());
    } catch (const json::exception& e) {
        response.status = 400;
        response.body = error_envelope("BAD_REQUEST", std::string{"malformed JSON: "} + e.what());
    } catch (const std::exception& e) {
        response.status = 500;
        response.body = error_envelope("INTERNAL", e.what());
    }
    add_cors(response);
    return response;
}

Response Service::dispatch(const Request& request) {
    if (request.method == "OPTIONS") return no_content();

    const auto path = split_path(request.path);
    std::vector<Id> params;
    const Route* found = nullptr;
    bool path_known = false;
    for (const Route& r : routes_) {
        if (!match_route(r.segments, path, params)) continue;
        path_known = true;
        if (r.method == request.method) {
            found = &r;
            break;
        }
    }
    if (!found) {
        if (path_known) throw Error(ErrorCode::MethodNotAllowed, "method not allowed on this path");
        throw Error(ErrorCode::NotFound, "no such endpoint");
    }
    match_route(found->segments, path, params);

    Context ctx{request, std::move(params), {}, json::object()};
    if (!found->access.anonymous) {
        ctx.principal = auth_.authorize(bearer_token(request), std::nullopt);
        if (!ctx.principal.allowed) {
            if (ctx.principal.reason == auth::AuthzReason::Expired) {
                throw Error(ErrorCode::TokenExpired, "session has expired");
            }
            throw Error(ErrorCode::Unauthenticated, "a valid bearer token is required");
        }
        const Access& a = found->access;
        const auto& roles = ctx.principal.roles;
        if (!a.any_authenticated() &&
            !((a.admin && roles.admin) || (a.donor && roles.donor) || (a.patient && roles.patient))) {
            ctx.principal.allowed = false;
            ctx.principal.reason = auth::AuthzReason::RoleMissing;
            throw Error(ErrorCode::RoleMissing, "your roles do not permit this action");
        }
    }
    if ((request.method == "POST" || request.method == "PUT") &&
        !domain::trim(request.body).empty()) {
        ctx.body = json::parse(request.body);
        if (!ctx.body.is_object()) throw Error(ErrorCode::BadRequest, "body must be a JSON object");
    }
    return (this->*(found->handler))(ctx);
}

// identity --------------------------------------------------------------------

Response Service::post_register(Context& ctx) {
    const Id id = auth_.register_user(string_field(ctx.body, "name"), string_field(ctx.body, "email"),
                                      string_field(ctx.body, "password"));
    return created({{"user_id", id}});
}

Response Service::post_login(Context& ctx) {
    const auto session =
        auth_.login(string_field(ctx.body, "email"), string_field(ctx.body, "password"));
    return ok({{"token", session.token},
               {"user_id", session.user_id},
               {"expires_at", domain::format_timestamp(session.expires_at)},
               {"roles", roles_json(session.roles)}});
}

Response Service::post_logout(Context& ctx) {
    auth_.logout(bearer_token(ctx.req));
    return no_content();
}

Response Service::get_me(Context& ctx) {
    const auto user = store_->find_user(ctx.principal.user_id);
    if (!user) throw Error(ErrorCode::UnknownUser, "no such user");
    return ok({{"user_id", user->user_id},
               {"name", user->name},
               {"email", user->email},
               {"roles", roles_json(ctx.principal.roles)},
               {"created_at", domain::format_timestamp(user->created_at)}});
}

Response Service::get_openapi(Context&) { return ok(openapi_document(routes())); }

// profiles --------------------------------------------------------------------

json Service::donor_json(const store::DonorListing& l) const {
    const auto& d = l.donor;
    const domain::Date today = clock_->today();
    return {{"donor_id", d.donor_id},
            {"user_id", d.user_id},
            {"name", l.name},
            {"email", l.email},
            {"phone", d.phone},
            {"city", d.city},
            {"blood_group", domain::to_string(d.blood_group)},
            {"status", domain::to_string(d.status)},
            {"available", d.available},
            {"last_donation_date", optional_date(d.last_donation_date)},
            {"next_eligible_date",
             d.last_donation_date ? json(domain::format_date(domain::next_eligible_date(*d.last_donation_date)))
                                  : json(nullptr)},
            {"visible_now", domain::is_visible(d, today)}};
}

Response Service::post_enroll_donor(Context& ctx) {
    const Id user_id = ctx.principal.user_id;
    if (ctx.principal.roles.donor) throw Error(ErrorCode::RoleExists, "already registered as a donor");
    const std::string phone = string_field(ctx.body, "phone");
    const std::string city = string_field(ctx.body, "city");
    const std::string group = string_field(ctx.body, "blood_group");
    require_valid({{"phone", phone}, {"city", city}, {"blood_group", group}});
    store::DonorPayload p{std::string{domain::trim(phone)}, std::string{domain::trim(city)},
                          parse_group(group), domain::DonorStatus::Active,
                          opt_bool(ctx.body, "available").value_or(true)};
    const auto row = std::get<store::DonorRow>(store_->upsert_role(user_id, p));
    return created(donor_json(*store_->find_donor_listing(row.donor_id)));
}

Response Service::post_enroll_patient(Context& ctx) {
    const Id user_id = ctx.principal.user_id;
    if (ctx.principal.roles.patient) {
        throw Error(ErrorCode::RoleExists, "already registered as a patient");
    }
    const std::string phone = string_field(ctx.body, "phone");
    const std::string city = string_field(ctx.body, "city");
    require_valid({{"phone", phone}, {"city", city}});
    const auto row = std::get<store::PatientRow>(store_->upsert_role(
        user_id, store::PatientPayload{std::string{domain::trim(phone)}, std::string{domain::trim(city)}}));
    return created(patient_json(row, *store_->find_user(user_id)));
}

Response Service::get_donor_profile(Context& ctx) {
    const auto donor = store_->find_donor_by_user(ctx.principal.user_id);
    if (!donor) throw Error(ErrorCode::UnknownDonor, "no donor profile");
    return ok(donor_json(*store_->find_donor_listing(donor->donor_id)));
}

Response Service::put_donor_profile(Context& ctx) {
    const auto donor = store_->find_donor_by_user(ctx.principal.user_id);
    if (!donor) throw Error(ErrorCode::UnknownDonor, "no donor profile");
    store::DonorPayload p{donor->phone, donor->city, donor->blood_group, donor->status,
                          donor->available};
    const auto phone = opt_string(ctx.body, "phone");
    const auto city = opt_string(ctx.body, "city");
    if (phone) p.phone = domain::trim(*phone);
    if (city) p.city = domain::trim(*city);
    require_valid({{"phone", p.phone}, {"city", p.city}});
    if (auto g = opt_string(ctx.body, "blood_group")) p.blood_group = parse_group(*g);
    if (auto a = opt_bool(ctx.body, "available")) p.available = *a;
    // status is admin-controlled and ignored here.
    store_->upsert_role(ctx.principal.user_id, p);
    return ok(donor_json(*store_->find_donor_listing(donor->donor_id)));
}

Response Service::get_patient_profile(Context& ctx) {
    const auto patient = store_->find_patient_by_user(ctx.principal.user_id);
    if (!patient) throw Error(ErrorCode::UnknownPatient, "no patient profile");
    return ok(patient_json(*patient, *store_->find_user(ctx.principal.user_id)));
}

Response Service::put_patient_profile(Context& ctx) {
    const auto patient = store_->find_patient_by_user(ctx.principal.user_id);
    if (!patient) throw Error(ErrorCode::UnknownPatient, "no patient profile");
    store::PatientPayload p{patient->phone, patient->city};
    if (auto phone = opt_string(ctx.body, "phone")) p.phone = domain::trim(*phone);
    if (auto city = opt_string(ctx.body, "city")) p.city = domain::trim(*city);
    require_valid({{"phone", p.phone}, {"city", p.city}});
    const auto row = std::get<store::PatientRow>(store_->upsert_role(ctx.principal.user_id, p));
    return ok(patient_json(row, *store_->find_user(ctx.principal.user_id)));
}

// blood requests --------------------------------------------------------------

Response Service::post_request(Context& ctx) {
    const auto patient = store_->find_patient_by_user(ctx.principal.user_id);
    if (!patient) throw Error(ErrorCode::UnknownPatient, "no patient profile");
    const std::string group = string_field(ctx.body, "blood_group");
    const std::string city = string_field(ctx.body, "city");
    require_valid({{"blood_group", group}, {"city", city}});
    const auto quantity = ctx.body.contains("quantity_units") && !ctx.body["quantity_units"].is_null()
                              ? ctx.body["quantity_units"]
                              : json(nullptr);
    if (!quantity.is_number_integer() || quantity.get<std::int64_t>() < 1 ||
        quantity.get<std::int64_t>() > 1000) {
        throw Error(ErrorCode::InvalidQuantity, "quantity_units must be a whole number of units >= 1",
                    {{"field", "quantity_units"}});
    }
    const auto row = store_->insert_request({patient->patient_id, parse_group(group),
                                             static_cast<int>(quantity.get<std::int64_t>()),
                                             std::string{domain::trim(city)}});
    return created(request_json(row));
}

Response Service::list_requests(Context& ctx) {
    if (ctx.principal.roles.admin) return admin_list_requests(ctx);
    const auto patient = store_->find_patient_by_user(ctx.principal.user_id);
    json items = json::array();
    if (patient) {
        for (const auto& r : store_->list_requests_by_patient(patient->patient_id)) {
            items.push_back(request_json(r));
        }
    }
    return ok({{"items", items}, {"total", items.size()}});
}

store::BloodRequestRow Service::owned_request(Context& ctx, Id request_id) {
    const auto request = store_->find_request(request_id);
    if (!request) throw Error(ErrorCode::UnknownRequest, "no such request");
    if (ctx.principal.roles.admin) return *request;
    const auto patient = store_->find_patient_by_user(ctx.principal.user_id);
    if (!patient || patient->patient_id != request->patient_id) {
        throw Error(ErrorCode::NotOwner, "this request belongs to another patient");
    }
    return *request;
}

Response Service::get_request(Context& ctx) {
    return ok(request_json(owned_request(ctx, ctx.params.at(0))));
}

void Service::notify_status(const store::BloodRequestRow& request) {
    const auto patient = store_->find_patient(request.patient_id);
    if (!patient) return;
    store_->insert_notification({patient->user_id, store::NotificationKind::RequestStatus,
                                 "Blood request #" + std::to_string(request.request_id) + " is now " +
                                     std::string{store::to_string(request.status)},
                                 request.request_id});
}

Response Service::get_matches(Context& ctx) {
    auto request = owned_request(ctx, ctx.params.at(0));
    const domain::MatchQuery query{request.blood_group, request.city, clock_->today()};
    const auto matched = domain::match_donors(query, store_->all_donors());

    const bool live = request.status == store::RequestStatus::Open ||
                      request.status == store::RequestStatus::Matched;
    if (!matched.empty() && request.status == store::RequestStatus::Open) {
        try {
            request = store_->set_request_status(request.request_id, store::RequestStatus::Matched);
            notify_status(request);
        } catch (const Error& e) {
            // A concurrent call won the transition.
            if (e.code() != ErrorCode::IllegalRequestState) throw;
        }
    }

    json items = json::array();
    for (const auto& d : matched) {
        const auto listing = store_->find_donor_listing(d.donor_id);
        if (!listing) continue;  // deleted since the snapshot
        items.push_back({{"donor_id", d.donor_id},
                         {"user_id", d.user_id},
                         {"name", listing->name},
                         {"phone", d.phone},
                         {"city", d.city},
                         {"blood_group", domain::to_string(d.blood_group)},
                         {"city_match", domain::same_city(d.city, request.city)},
                         {"exact_group", d.blood_group == request.blood_group}});
        if (live) {
            store_->insert_notification(
                {d.user_id, store::NotificationKind::MatchFound,
                 "A patient in " + request.city + " needs " +
                     std::string{domain::to_string(request.blood_group)} +
                     " blood and you are a compatible donor (request #" +
                     std::to_string(request.request_id) + ")",
                 request.request_id});
        }
    }
    return ok(items);
}

Response Service::cancel_request(Context& ctx) {
    const auto request = owned_request(ctx, ctx.params.at(0));
    const auto row = store_->set_request_status(request.request_id, store::RequestStatus::Cancelled);
    notify_status(row);
    return ok(request_json(row));
}

// donations -------------------------------------------------------------------

Response Service::post_donation(Context& ctx) {
    std::optional<Id> donor_id = opt_int(ctx.body, "donor_id");
    if (!ctx.principal.roles.admin) {
        const auto own = store_->find_donor_by_user(ctx.principal.user_id);
        if (!own) throw Error(ErrorCode::UnknownDonor, "no donor profile");
        if (donor_id && *donor_id != own->donor_id) {
            throw Error(ErrorCode::NotOwner, "donors may only record their own donations");
        }
        donor_id = own->donor_id;
    }
    if (!donor_id) {
        throw Error(ErrorCode::ValidationFailed, "donor_id is required",
                    {{"missing_fields", {"donor_id"}}, {"malformed_fields", json::array()}});
    }
    const auto when = opt_string(ctx.body, "donated_on");
    const domain::Date donated_on = when ? parse_day("donated_on", *when) : clock_->today();
    const auto outcome = store_->record_donation(*donor_id, donated_on, opt_int(ctx.body, "request_id"));
    if (outcome.request) notify_status(*outcome.request);

    const auto& d = outcome.donation;
    return created({{"donation_id", d.donation_id},
                    {"donor_id", d.donor_id},
                    {"request_id", d.request_id ? json(*d.request_id) : json(nullptr)},
                    {"donated_on", domain::format_date(d.donated_on)},
                    {"next_eligible_date",
                     domain::format_date(domain::next_eligible_date(*outcome.donor.last_donation_date))}});
}

// admin -----------------------------------------------------------------------

Response Service::admin_list_donors(Context& ctx) {
    store::DonorFilter filter;
    filter.blood_group = group_param(ctx.req);
    if (auto q = query_param(ctx.req, "q"); q && !domain::trim(*q).empty()) {
        filter.search = std::string{domain::trim(*q)};
    }
    const auto page = page_from_query(ctx.req);
    const auto result = store_->find_donors(filter, page);
    return ok(page_json(result, page, [&](const store::DonorListing& l) { return donor_json(l); }));
}

Response Service::admin_create_donor(Context& ctx) {
    const std::string name = string_field(ctx.body, "name");
    const std::string email = string_field(ctx.body, "email");
    const std::string phone = string_field(ctx.body, "phone");
    const std::string city = string_field(ctx.body, "city");
    const std::string group = string_field(ctx.body, "blood_group");
    require_valid(
        {{"name", name}, {"email", email}, {"phone", phone}, {"city", city}, {"blood_group", group}});
    store::DonorPayload p{std::string{domain::trim(phone)}, std::string{domain::trim(city)},
                          parse_group(group), domain::DonorStatus::Active,
                          opt_bool(ctx.body, "available").value_or(true)};
    if (auto s = opt_string(ctx.body, "status")) p.status = parse_status(*s);

    const std::string password = auth::generate_password();
    const auto [user, role] = store_->insert_user_with_role(
        {std::string{domain::trim(name)}, std::string{domain::trim(email)},
         auth_.hash_password(password)},
        p);
    const auto& donor = std::get<store::DonorRow>(role);
    return created({{"user_id", user.user_id},
                    {"donor", donor_json({donor, user.name, user.email})},
                    {"temporary_password", password}});
}

Response Service::admin_update_donor(Context& ctx) {
    const auto listing = store_->find_donor_listing(ctx.params.at(0));
    if (!listing) throw Error(ErrorCode::UnknownDonor, "no such donor");
    const auto& d = listing->donor;
    store::DonorPayload p{d.phone, d.city, d.blood_group, d.status, d.available};
    if (auto phone = opt_string(ctx.body, "phone")) p.phone = domain::trim(*phone);
    if (auto city = opt_string(ctx.body, "city")) p.city = domain::trim(*city);
    require_valid({{"phone", p.phone}, {"city", p.city}});
    if (auto g = opt_string(ctx.body, "blood_group")) p.blood_group = parse_group(*g);
    if (auto s = opt_string(ctx.body, "status")) p.status = parse_status(*s);
    if (auto a = opt_bool(ctx.body, "available")) p.available = *a;
    store_->upsert_role(d.user_id, p);
    return ok(donor_json(*store_->find_donor_listing(d.donor_id)));
}

Response Service::admin_delete_donor(Context& ctx) {
    store_->delete_donor(ctx.params.at(0));
    return no_content();
}

Response Service::admin_list_users(Context& ctx) {
    const auto page = page_from_query(ctx.req);
    const auto result = store_->list_users(page);
    return ok(page_json(result, page, [&](const store::UserRow& u) {
        return json{{"user_id", u.user_id},
                    {"name", u.name},
                    {"email", u.email},
                    {"roles", roles_json(store_->roles_of(u.user_id))},
                    {"created_at", domain::format_timestamp(u.created_at)}};
    }));
}

Response Service::admin_delete_user(Context& ctx) {
    store_->delete_user(ctx.params.at(0));
    return no_content();
}

Response Service::admin_list_requests(Context& ctx) {
    const auto page = page_from_query(ctx.req);
    return ok(page_json(store_->list_requests(page), page, request_json));
}

// messaging -------------------------------------------------------------------

Response Service::post_message(Context& ctx) {
    const auto recipient = opt_int(ctx.body, "recipient_user_id");
    if (!recipient) {
        throw Error(ErrorCode::ValidationFailed, "recipient_user_id is required",
                    {{"missing_fields", {"recipient_user_id"}}, {"malformed_fields", json::array()}});
    }
    const auto row =
        store_->insert_message(ctx.principal.user_id, *recipient, string_field(ctx.body, "body"));
    return created(message_json(row));
}

Response Service::get_conversation(Context& ctx) {
    const Id other = ctx.params.at(0);
    const auto page = page_from_query(ctx.req);
    auto result = store_->list_conversation(ctx.principal.user_id, other, page);
    if (result.total == 0 && !store_->find_user(other)) {
        throw Error(ErrorCode::UnknownUser, "no such user");
    }
    std::vector<Id> incoming;
    for (auto& m : result.items) {
        if (m.recipient_user_id == ctx.principal.user_id && !m.read) {
            incoming.push_back(m.message_id);
            m.read = true;
        }
    }
    if (!incoming.empty()) store_->mark_messages_read(ctx.principal.user_id, incoming);
    return ok(page_json(result, page, message_json));
}

// notifications ---------------------------------------------------------------

Response Service::list_notifications(Context& ctx) {
    json items = json::array();
    for (const auto& n : store_->list_notifications(ctx.principal.user_id)) {
        items.push_back(notification_json(n));
    }
    return ok(items);
}

Response Service::read_notification(Context& ctx) {
    return ok(notification_json(store_->mark_notification_read(ctx.principal.user_id, ctx.params.at(0))));
}

}  // namespace hemobank::api
