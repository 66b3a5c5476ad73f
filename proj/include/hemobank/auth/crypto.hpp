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

#include <cstddef>
#include <string>
#include <string_view>

namespace hemobank::auth {

/// Argon2id work factor.
struct HashCost {
    unsigned long long ops = 2;
    std::size_t mem_bytes = 64U * 1024U * 1024U;

    /// libsodium's "interactive" preset.
    static HashCost interactive() noexcept;
    /// Smallest legal parameters; for tests only.
    static HashCost minimum() noexcept;
    /// PASSWORD_HASH_COST level: Argon2 opslimit with the interactive memory
    /// budget. Levels below the library minimum are raised to it.
    static HashCost from_level(unsigned long long level) noexcept;
};

/// Salted Argon2id password hashing. Output is the self-describing
/// "$argon2id$..." string, so verify() needs no separate salt column.
class PasswordHasher {
public:
    explicit PasswordHasher(HashCost cost);

    std::string hash(std::string_view password) const;
    bool verify(std::string_view stored_hash, std::string_view password) const noexcept;

    HashCost cost() const noexcept { return cost_; }

private:
    HashCost cost_;
};

/// 256 random bits, base64url without padding (43 characters).
std::string generate_token();

/// Hex BLAKE2b-256 of a token; the only form persisted server-side.
std::string token_digest(std::string_view token);

/// Random one-time password, 16 base64url characters.
std::string generate_password();

}  // namespace hemobank::auth
