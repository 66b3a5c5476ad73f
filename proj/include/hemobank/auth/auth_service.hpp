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

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include "hemobank/auth/crypto.hpp"
#include "hemobank/clock.hpp"
#include "hemobank/store/store.hpp"

namespace hemobank::auth {

using store::Id;
using store::Role;
using store::RoleSet;

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::size_t kMaxPasswordLength = 72;

struct AuthConfig {
    std::chrono::hours token_ttl{24};
    HashCost hash_cost = HashCost::interactive();
    /// Upper bound on password hashes computed at once.
    std::ptrdiff_t max_concurrent_hashes = 4;
};

struct SessionToken {
    std::string token;
    Id user_id = 0;
    RoleSet roles;
    domain::Timestamp expires_at{};
};

enum class AuthzReason { Ok, NoToken, Expired, RoleMissing };

std::string_view to_string(AuthzReason r) noexcept;

struct AuthzDecision {
    bool allowed = false;
    AuthzReason reason = AuthzReason::NoToken;
    Id user_id = 0;  // set whenever the token resolved to a live session
    RoleSet roles;
};

/// Registration, login, sessions and role checks on top of a Store.
class AuthService {
public:
    AuthService(store::Store& store, std::shared_ptr<const Clock> clock, AuthConfig config);

    /// Validates name/email/password, hashes the password and inserts the
    /// user with no roles. VALIDATION_FAILED (report in details),
    /// PASSWORD_POLICY, DUPLICATE_EMAIL.
    Id register_user(std::string_view name, std::string_view email, std::string_view password);

    /// INVALID_CREDENTIALS for an unknown email and a wrong password alike,
    /// with the same message and comparable cost.
    SessionToken login(std::string_view email, std::string_view password);

    void logout(std::string_view token);

    /// `required` = nullopt accepts any live session.
    AuthzDecision authorize(std::string_view token, std::optional<Role> required);

    /// Hashes under the concurrency bound. PASSWORD_POLICY on bad length.
    std::string hash_password(std::string_view password);

    const AuthConfig& config() const noexcept { return config_; }

private:
    store::Store& store_;
    std::shared_ptr<const Clock> clock_;
    AuthConfig config_;
    PasswordHasher hasher_;
    std::counting_semaphore<1024> hash_slots_;
    std::string dummy_hash_;
};

/// PASSWORD_POLICY unless 8..72 characters.
void check_password_policy(std::string_view password);

}  // namespace hemobank::auth
