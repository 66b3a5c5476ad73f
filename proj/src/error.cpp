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

#include "hemobank/error.hpp"

namespace hemobank {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::BadRequest: return "BAD_REQUEST";
        case ErrorCode::Unauthenticated: return "UNAUTHENTICATED";
        case ErrorCode::TokenExpired: return "TOKEN_EXPIRED";
        case ErrorCode::InvalidCredentials: return "INVALID_CREDENTIALS";
        case ErrorCode::RoleMissing: return "ROLE_MISSING";
        case ErrorCode::NotOwner: return "NOT_OWNER";
        case ErrorCode::NotFound: return "NOT_FOUND";
        case ErrorCode::MethodNotAllowed: return "METHOD_NOT_ALLOWED";
        case ErrorCode::UnknownUser: return "UNKNOWN_USER";
        case ErrorCode::UnknownDonor: return "UNKNOWN_DONOR";
        case ErrorCode::UnknownPatient: return "UNKNOWN_PATIENT";
        case ErrorCode::UnknownRequest: return "UNKNOWN_REQUEST";
        case ErrorCode::UnknownRecipient: return "UNKNOWN_RECIPIENT";
        case ErrorCode::UnknownNotification: return "UNKNOWN_NOTIFICATION";
        case ErrorCode::DuplicateEmail: return "DUPLICATE_EMAIL";
        case ErrorCode::RoleExists: return "ROLE_EXISTS";
        case ErrorCode::IllegalRequestState: return "ILLEGAL_REQUEST_STATE";
        case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
        case ErrorCode::PasswordPolicy: return "PASSWORD_POLICY";
        case ErrorCode::FieldTooLong: return "FIELD_TOO_LONG";
        case ErrorCode::InvalidBloodGroup: return "INVALID_BLOOD_GROUP";
        case ErrorCode::InvalidDate: return "INVALID_DATE";
        case ErrorCode::InvalidQuantity: return "INVALID_QUANTITY";
        case ErrorCode::FutureDate: return "FUTURE_DATE";
        case ErrorCode::EmptyBody: return "EMPTY_BODY";
        case ErrorCode::SelfMessage: return "SELF_MESSAGE";
        case ErrorCode::StoreUnavailable: return "STORE_UNAVAILABLE";
        case ErrorCode::StoreNotMigrated: return "STORE_NOT_MIGRATED";
        case ErrorCode::SchemaVersionUnknown: return "SCHEMA_VERSION_UNKNOWN";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::BadRequest:
            return 400;
        case ErrorCode::Unauthenticated:
        case ErrorCode::TokenExpired:
        case ErrorCode::InvalidCredentials:
            return 401;
        case ErrorCode::RoleMissing:
        case ErrorCode::NotOwner:
            return 403;
        case ErrorCode::NotFound:
        case ErrorCode::UnknownUser:
        case ErrorCode::UnknownDonor:
        case ErrorCode::UnknownPatient:
        case ErrorCode::UnknownRequest:
        case ErrorCode::UnknownRecipient:
        case ErrorCode::UnknownNotification:
            return 404;
        case ErrorCode::MethodNotAllowed:
            return 405;
        case ErrorCode::DuplicateEmail:
        case ErrorCode::RoleExists:
        case ErrorCode::IllegalRequestState:
            return 409;
        case ErrorCode::ValidationFailed:
        case ErrorCode::PasswordPolicy:
        case ErrorCode::FieldTooLong:
        case ErrorCode::InvalidBloodGroup:
        case ErrorCode::InvalidDate:
        case ErrorCode::InvalidQuantity:
        case ErrorCode::FutureDate:
        case ErrorCode::EmptyBody:
        case ErrorCode::SelfMessage:
            return 422;
        case ErrorCode::StoreUnavailable:
            return 503;
        case ErrorCode::StoreNotMigrated:
        case ErrorCode::SchemaVersionUnknown:
        case ErrorCode::Internal:
            return 500;
    }
    return 500;
}

}  // namespace hemobank
