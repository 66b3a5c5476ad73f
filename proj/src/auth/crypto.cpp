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

#include "hemobank/auth/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>

#include "hemobank/error.hpp"

namespace hemobank::auth {

namespace {

void ensure_sodium() {
    static const bool ready = [] { return sodium_init() >= 0; }();
    if (!ready) throw Error(ErrorCode::Internal, "libsodium failed to initialise");
}

std::string base64url(const unsigned char* data, std::size_t len) {
    const std::size_t cap = sodium_base64_ENCODED_LEN(len, sodium_base64_VARIANT_URLSAFE_NO_PADDING);
    std::string out(cap, '\0');
    sodium_bin2base64(out.data(), cap, data, len, sodium_base64_VARIANT_URLSAFE_NO_PADDING);
    out.resize(std::char_traits<char>::length(out.c_str()));
    return out;
}

}  // namespace

HashCost HashCost::interactive() noexcept {
    return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

HashCost HashCost::minimum() noexcept {
    return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
}

HashCost HashCost::from_level(unsigned long long level) noexcept {
    HashCost c = interactive();
    c.ops = std::max<unsigned long long>(level, crypto_pwhash_OPSLIMIT_MIN);
    return c;
}

PasswordHasher::PasswordHasher(HashCost cost) : cost_(cost) { ensure_sodium(); }

std::string PasswordHasher::hash(std::string_view password) const {
    std::array<char, crypto_pwhash_STRBYTES> out{};
    if (crypto_pwhash_str(out.data(), password.data(), password.size(), cost_.ops,
                          cost_.mem_bytes) != 0) {
        throw Error(ErrorCode::Internal, "password hashing ran out of memory");
    }
    return out.data();
}

bool PasswordHasher::verify(std::string_view stored_hash, std::string_view password) const noexcept {
    // crypto_pwhash_str_verify wants a NUL-terminated hash.
    const std::string h{stored_hash};
    return crypto_pwhash_str_verify(h.c_str(), password.data(), password.size()) == 0;
}

std::string generate_token() {
    ensure_sodium();
    std::array<unsigned char, 32> raw{};
    randombytes_buf(raw.data(), raw.size());
    return base64url(raw.data(), raw.size());
}

std::string token_digest(std::string_view token) {
    ensure_sodium();
    std::array<unsigned char, 32> digest{};
    crypto_generichash(digest.data(), digest.size(),
                       reinterpret_cast<const unsigned char*>(token.data()), token.size(), nullptr, 0);
    std::array<char, 65> hex{};
    sodium_bin2hex(hex.data(), hex.size(), digest.data(), digest.size());
    return hex.data();
}

std::string generate_password() {
    ensure_sodium();
    std::array<unsigned char, 12> raw{};
    randombytes_buf(raw.data(), raw.size());
    return base64url(raw.data(), raw.size());
}

}  // namespace hemobank::auth
