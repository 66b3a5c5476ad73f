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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hemobank/domain/blood_group.hpp"
#include "hemobank/domain/date.hpp"
#include "hemobank/domain/donor.hpp"

namespace hemobank::store {

using domain::BloodGroup;
using domain::Date;
using domain::Timestamp;

using Id = std::int64_t;

inline constexpr std::size_t kMaxNameLength = 100;
inline constexpr std::size_t kMaxEmailLength = 100;
inline constexpr std::size_t kMaxCityLength = 100;
inline constexpr std::size_t kMaxMessageLength = 2000;
inline constexpr std::size_t kMaxPayloadLength = 500;
inline constexpr std::size_t kMaxPageLimit = 100;

struct UserRow {
    Id user_id = 0;
    std::string name;
    std::string email;
    std::string password_hash;
    Timestamp created_at{};

    friend bool operator==(const UserRow&, const UserRow&) = default;
};

struct NewUser {
    std::string name;
    std::string email;
    std::string password_hash;
};

enum class Role : std::uint8_t { Admin, Donor, Patient };

std::string_view to_string(Role r) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

/// Roles held by one user; at most one row per kind.
struct RoleSet {
    bool admin = false;
    bool donor = false;
    bool patient = false;

    bool has(Role r) const noexcept {
        switch (r) {
            case Role::Admin: return admin;
            case Role::Donor: return donor;
            case Role::Patient: return patient;
        }
        return false;
    }
    std::vector<Role> list() const;

    friend bool operator==(const RoleSet&, const RoleSet&) = default;
};

using DonorRow = domain::DonorRecord;

/// Donor-specific columns written by upsert_role. An update replaces all of
/// them; last_donation_date is owned by record_donation and never touched.
struct DonorPayload {
    std::string phone;
    std::string city;
    BloodGroup blood_group = BloodGroup::ONeg;
    domain::DonorStatus status = domain::DonorStatus::Active;
    bool available = true;
};

struct PatientRow {
    Id patient_id = 0;
    Id user_id = 0;
    std::string phone;
    std::string city;

    friend bool operator==(const PatientRow&, const PatientRow&) = default;
};

struct PatientPayload {
    std::string phone;
    std::string city;
};

struct AdminRow {
    Id admin_id = 0;
    Id user_id = 0;

    friend bool operator==(const AdminRow&, const AdminRow&) = default;
};

struct AdminPayload {};

using RolePayload = std::variant<DonorPayload, PatientPayload, AdminPayload>;
using RoleRow = std::variant<DonorRow, PatientRow, AdminRow>;

/// Donor joined with its owning user, as listed on the admin donor table.
struct DonorListing {
    DonorRow donor;
    std::string name;
    std::string email;
};

struct DonorFilter {
    std::optional<BloodGroup> blood_group;
    std::optional<std::string> search;
};

struct Page {
    std::size_t offset = 0;
    std::size_t limit = 50;
};

template <typename T>
struct PageResult {
    std::vector<T> items;
    std::size_t total = 0;
};

enum class RequestStatus : std::uint8_t { Open, Matched, Fulfilled, Cancelled };

std::string_view to_string(RequestStatus s) noexcept;
std::optional<RequestStatus> parse_request_status(std::string_view text) noexcept;

/// Legal lifecycle moves: OPEN->{MATCHED,CANCELLED}, MATCHED->{FULFILLED,CANCELLED}.
constexpr bool is_legal_transition(RequestStatus from, RequestStatus to) noexcept {
    switch (from) {
        case RequestStatus::Open:
            return to == RequestStatus::Matched || to == RequestStatus::Cancelled;
        case RequestStatus::Matched:
            return to == RequestStatus::Fulfilled || to == RequestStatus::Cancelled;
        case RequestStatus::Fulfilled:
        case RequestStatus::Cancelled:
            return false;
    }
    return false;
}

struct BloodRequestRow {
    Id request_id = 0;
    Id patient_id = 0;
    BloodGroup blood_group = BloodGroup::ONeg;
    int quantity_units = 1;
    std::string city;
    RequestStatus status = RequestStatus::Open;
    Timestamp created_at{};

    friend bool operator==(const BloodRequestRow&, const BloodRequestRow&) = default;
};

struct NewBloodRequest {
    Id patient_id = 0;
    BloodGroup blood_group = BloodGroup::ONeg;
    int quantity_units = 1;
    std::string city;
};

struct DonationRow {
    Id donation_id = 0;
    Id donor_id = 0;
    std::optional<Id> request_id;
    Date donated_on{};

    friend bool operator==(const DonationRow&, const DonationRow&) = default;
};

/// Effects of one record_donation call.
struct DonationOutcome {
    DonationRow donation;
    DonorRow donor;
    std::optional<BloodRequestRow> request;  // set when the request changed state
};

struct MessageRow {
    Id message_id = 0;
    Id sender_user_id = 0;
    Id recipient_user_id = 0;
    std::string body;
    Timestamp sent_at{};
    bool read = false;

    friend bool operator==(const MessageRow&, const MessageRow&) = default;
};

enum class NotificationKind : std::uint8_t { MatchFound, RequestStatus, AdminNotice };

std::string_view to_string(NotificationKind k) noexcept;
std::optional<NotificationKind> parse_notification_kind(std::string_view text) noexcept;

struct NotificationRow {
    Id notification_id = 0;
    Id user_id = 0;
    NotificationKind kind = NotificationKind::AdminNotice;
    std::string payload;
    std::optional<Id> request_id;
    Timestamp created_at{};
    bool read = false;

    friend bool operator==(const NotificationRow&, const NotificationRow&) = default;
};

struct NewNotification {
    Id user_id = 0;
    NotificationKind kind = NotificationKind::AdminNotice;
    std::string payload;
    std::optional<Id> request_id;
};

struct SessionRow {
    std::string token_digest;
    Id user_id = 0;
    Timestamp created_at{};
    Timestamp expires_at{};
};

struct MigrationResult {
    int version = 0;
    bool applied = false;  // false when the store was already current
};

inline constexpr int kSchemaVersion = 1;

}  // namespace hemobank::store
