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

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hemobank {

/// Machine-readable failure codes shared by every layer. The HTTP layer maps
/// each code to a status via http_status().
enum class ErrorCode {
    BadRequest,
    Unauthenticated,
    TokenExpired,
    InvalidCredentials,
    RoleMissing,
    NotOwner,
    NotFound,
    MethodNotAllowed,
    UnknownUser,
    UnknownDonor,
    UnknownPatient,
    UnknownRequest,
    UnknownRecipient,
    UnknownNotification,
    DuplicateEmail,
    RoleExists,
    IllegalRequestState,
    ValidationFailed,
    PasswordPolicy,
    FieldTooLong,
    InvalidBloodGroup,
    InvalidDate,
    InvalidQuantity,
    FutureDate,
    EmptyBody,
    SelfMessage,
    StoreUnavailable,
    StoreNotMigrated,
    SchemaVersionUnknown,
    Internal,
};

/// UPPER_SNAKE wire name, e.g. ErrorCode::DuplicateEmail -> "DUPLICATE_EMAIL".
std::string_view to_string(ErrorCode code) noexcept;

int http_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, nlohmann::json details = nullptr)
        : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    nlohmann::json details_;
};

}  // namespace hemobank
