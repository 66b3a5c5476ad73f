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

#include "common.hpp"

#include <algorithm>
#include <cctype>

#include "hemobank/domain/matching.hpp"
#include "hemobank/error.hpp"

namespace hemobank::store {

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::Admin: return "ADMIN";
        case Role::Donor: return "DONOR";
        case Role::Patient: return "PATIENT";
    }
    return "?";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
    if (text == "ADMIN") return Role::Admin;
    if (text == "DONOR") return Role::Donor;
    if (text == "PATIENT") return Role::Patient;
    return std::nullopt;
}

std::vector<Role> RoleSet::list() const {
    std::vector<Role> out;
    if (admin) out.push_back(Role::Admin);
    if (donor) out.push_back(Role::Donor);
    if (patient) out.push_back(Role::Patient);
    return out;
}

std::string_view to_string(RequestStatus s) noexcept {
    switch (s) {
        case RequestStatus::Open: return "OPEN";
        case RequestStatus::Matched: return "MATCHED";
        case RequestStatus::Fulfilled: return "FULFILLED";
        case RequestStatus::Cancelled: return "CANCELLED";
    }
    return "?";
}

std::optional<RequestStatus> parse_request_status(std::string_view text) noexcept {
    if (text == "OPEN") return RequestStatus::Open;
    if (text == "MATCHED") return RequestStatus::Matched;
    if (text == "FULFILLED") return RequestStatus::Fulfilled;
    if (text == "CANCELLED") return RequestStatus::Cancelled;
    return std::nullopt;
}

std::string_view to_string(NotificationKind k) noexcept {
    switch (k) {
        case NotificationKind::MatchFound: return "MATCH_FOUND";
        case NotificationKind::RequestStatus: return "REQUEST_STATUS";
        case NotificationKind::AdminNotice: return "ADMIN_NOTICE";
    }
    return "?";
}

std::optional<NotificationKind> parse_notification_kind(std::string_view text) noexcept {
    if (text == "MATCH_FOUND") return NotificationKind::MatchFound;
    if (text == "REQUEST_STATUS") return NotificationKind::RequestStatus;
    if (text == "ADMIN_NOTICE") return NotificationKind::AdminNotice;
    return std::nullopt;
}

namespace detail {

std::size_t utf8_length(std::string_view s) noexcept {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U;
    }));
}

std::string ascii_lower(std::string_view s) {
    std::string out{s};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return ascii_lower(haystack).find(ascii_lower(needle)) != std::string::npos;
}

void check_text(std::string_view field, std::string_view value, std::size_t max_chars) {
    if (domain::trim(value).empty()) {
        throw Error(ErrorCode::ValidationFailed, std::string{field} + " must not be empty",
                    {{"missing_fields", {field}}, {"malformed_fields", nlohmann::json::array()}});
    }
    if (utf8_length(value) > max_chars) {
        throw Error(ErrorCode::FieldTooLong,
                    std::string{field} + " exceeds " + std::to_string(max_chars) + " characters",
                    {{"field", field}, {"max_length", max_chars}});
    }
}

void check_new_user(const NewUser& user) {
    check_text("name", user.name, kMaxNameLength);
    check_text("email", user.email, kMaxEmailLength);
    if (user.password_hash.empty()) {
        throw Error(ErrorCode::ValidationFailed, "password hash must not be empty");
    }
}

void check_donor_payload(const DonorPayload& p) {
    check_text("phone", p.phone, 20);
    check_text("city", p.city, kMaxCityLength);
}

void check_patient_payload(const PatientPayload& p) {
    check_text("phone", p.phone, 20);
    check_text("city", p.city, kMaxCityLength);
}

void check_new_request(const NewBloodRequest& r) {
    if (r.quantity_units < 1) {
        throw Error(ErrorCode::InvalidQuantity, "quantity_units must be at least 1");
    }
    check_text("city", r.city, kMaxCityLength);
}

void check_message(Id sender, Id recipient, std::string_view body) {
    if (sender == recipient) {
        throw Error(ErrorCode::SelfMessage, "cannot send a message to yourself");
    }
    if (domain::trim(body).empty()) throw Error(ErrorCode::EmptyBody, "message body is empty");
    if (utf8_length(body) > kMaxMessageLength) {
        throw Error(ErrorCode::FieldTooLong, "message body exceeds 2000 characters",
                    {{"field", "body"}, {"max_length", kMaxMessageLength}});
    }
}

void check_notification(const NewNotification& n) {
    if (utf8_length(n.payload) > kMaxPayloadLength) {
        throw Error(ErrorCode::FieldTooLong, "notification payload exceeds 500 characters",
                    {{"field", "payload"}, {"max_length", kMaxPayloadLength}});
    }
}

std::size_t clamp_limit(std::size_t limit) noexcept {
    return std::clamp<std::size_t>(limit, 1, kMaxPageLimit);
}

}  // namespace detail
}  // namespace hemobank::store
