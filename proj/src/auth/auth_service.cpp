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

#include "hemobank/auth/auth_service.hpp"

#include <algorithm>

#include "hemobank/domain/validation.hpp"
#include "hemobank/error.hpp"

namespace hemobank::auth {

namespace {

std::size_t code_points(std::string_view s) noexcept {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U;
    }));
}

nlohmann::json report_json(const domain::ValidationReport& r) {
    nlohmann::json malformed = nlohmann::json::array();
    for (const auto& p : r.malformed_fields) malformed.push_back({{"field", p.field}, {"reason", p.reason}});
    return {{"missing_fields", r.missing_fields}, {"malformed_fields", malformed}};
}

class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<1024>& sem_;
};

}  // namespace

std::string_view to_string(AuthzReason r) noexcept {
    switch (r) {
        case AuthzReason::Ok: return "OK";
        case AuthzReason::NoToken: return "NO_TOKEN";
        case AuthzReason::Expired: return "EXPIRED";
        case AuthzReason::RoleMissing: return "ROLE_MISSING";
    }
    return "?";
}

void check_password_policy(std::string_view password) {
    const std::size_t n = code_points(password);
    if (n < kMinPasswordLength || n > kMaxPasswordLength) {
        throw Error(ErrorCode::PasswordPolicy, "password must be 8 to 72 characters",
                    {{"min_length", kMinPasswordLength}, {"max_length", kMaxPasswordLength}});
    }
}

AuthService::AuthService(store::Store& store, std::shared_ptr<const Clock> clock, AuthConfig config)
    : store_(store),
      clock_(std::move(clock)),
      config_(config),
      hasher_(config.hash_cost),
      hash_slots_(std::clamp<std::ptrdiff_t>(config.max_concurrent_hashes, 1, 1024)),
      dummy_hash_(hasher_.hash(generate_password())) {}

std::string AuthService::hash_password(std::string_view password) {
    check_password_policy(password);
    SlotGuard slot(hash_slots_);
    return hasher_.hash(password);
}

Id AuthService::register_user(std::string_view name, std::string_view email,
                              std::string_view password) {
    const auto report = domain::validate_required(
        {{"name", name}, {"email", email}, {"password", password}});
    if (!report.ok()) {
        throw Error(ErrorCode::ValidationFailed, "registration data is incomplete or malformed",
                    report_json(report));
    }
    std::string hash = hash_password(password);
    return store_
        .insert_user({std::string{domain::trim(name)}, std::string{domain::trim(email)},
                      std::move(hash)})
        .user_id;
}

SessionToken AuthService::login(std::string_view email, std::string_view password) {
    const auto user = store_.find_user_by_email(domain::trim(email));
    bool ok = false;
    {
        SlotGuard slot(hash_slots_);
        // Unknown emails still pay for one verification.
        ok = hasher_.verify(user ? user->password_hash : dummy_hash_, password) && user;
    }
    if (!ok) throw Error(ErrorCode::InvalidCredentials, "invalid email or password");

    SessionToken out;
    out.token = generate_token();
    out.user_id = user->user_id;
    out.roles = store_.roles_of(user->user_id);
    const auto now = clock_->now();
    out.expires_at = now + std::chrono::duration_cast<std::chrono::milliseconds>(config_.token_ttl);
    store_.insert_session({token_digest(out.token), out.user_id, now, out.expires_at});
    return out;
}

void AuthService::logout(std::string_view token) {
    if (!token.empty()) store_.delete_session(token_digest(token));
}

AuthzDecision AuthService::authorize(std::string_view token, std::optional<Role> required) {
    AuthzDecision d;
    if (token.empty()) return d;
    const std::string digest = token_digest(token);
    const auto session = store_.find_session(digest);
    if (!session) return d;
    if (clock_->now() >= session->expires_at) {
        d.reason = AuthzReason::Expired;
        return d;
    }
    d.user_id = session->user_id;
    d.roles = store_.roles_of(session->user_id);
    if (required && !d.roles.has(*required)) {
        d.reason = AuthzReason::RoleMissing;
        return d;
    }
    d.allowed = true;
    d.reason = AuthzReason::Ok;
    return d;
}

}  // namespace hemobank::auth
