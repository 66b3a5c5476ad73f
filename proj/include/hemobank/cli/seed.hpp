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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hemobank/auth/auth_service.hpp"
#include "hemobank/store/store.hpp"

namespace hemobank::cli {

enum class SeedProfile { None, Fig6 };

std::optional<SeedProfile> parse_seed_profile(std::string_view text) noexcept;

struct SeedAccount {
    store::Role role;
    std::string name;
    std::string email;
    store::Id user_id = 0;
    /// Set only when the account was created by this run.
    std::optional<std::string> password;
};

/// Demo data: the two listed donors plus one patient and one admin.
/// Accounts whose email already exists are left untouched, so re-running
/// inserts nothing. Requires a migrated store.
std::vector<SeedAccount> seed(store::Store& store, auth::AuthService& auth, SeedProfile profile);

}  // namespace hemobank::cli
