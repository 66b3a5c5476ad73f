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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hemobank/clock.hpp"
#include "hemobank/store/rows.hpp"

namespace hemobank::store {

/// Called at named points inside multi-write operations. Throwing from it
/// aborts the operation mid-flight; the store must roll back.
using FaultInjector = std::function<void(std::string_view point)>;

inline constexpr std::string_view kFaultDonationInserted = "record_donation:donation_inserted";

/// Repository contract shared by the in-memory and SQLite backends.
///
/// Every operation is atomic and safe to call from many threads. Failures
/// surface as hemobank::Error with the codes noted below; any operation on a
/// store that has not been migrated fails with STORE_NOT_MIGRATED.
class Store {
public:
    explicit Store(std::shared_ptr<const Clock> clock) : clock_(std::move(clock)) {}
    virtual ~Store() = default;

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Creates or verifies the schema. Refuses (SCHEMA_VERSION_UNKNOWN) a store
    /// holding tables it cannot account for.
    virtual MigrationResult migrate() = 0;
    /// 0 when never migrated.
    virtual int schema_version() = 0;
    /// Table names present, sorted.
    virtual std::vector<std::string> tables() = 0;

    // users -------------------------------------------------------------------

    /// DUPLICATE_EMAIL, FIELD_TOO_LONG, VALIDATION_FAILED (empty name/email).
    virtual UserRow insert_user(const NewUser& user) = 0;
    /// insert_user plus upsert_role in one unit; nothing persists on failure.
    virtual std::pair<UserRow, RoleRow> insert_user_with_role(const NewUser& user,
                                                              const RolePayload& role) = 0;
    virtual std::optional<UserRow> find_user(Id user_id) = 0;
    /// Case-insensitive.
    virtual std::optional<UserRow> find_user_by_email(std::string_view email) = 0;
    virtual PageResult<UserRow> list_users(Page page) = 0;
    /// Cascades to role rows, sessions, messages and notifications. Donation
    /// history is kept. UNKNOWN_USER.
    virtual void delete_user(Id user_id) = 0;
    virtual RoleSet roles_of(Id user_id) = 0;

    // roles -------------------------------------------------------------------

    /// Creates the role row or replaces its payload, keeping the role id.
    /// UNKNOWN_USER, FIELD_TOO_LONG.
    virtual RoleRow upsert_role(Id user_id, const RolePayload& payload) = 0;
    virtual std::optional<DonorRow> find_donor(Id donor_id) = 0;
    virtual std::optional<DonorRow> find_donor_by_user(Id user_id) = 0;
    virtual std::optional<DonorListing> find_donor_listing(Id donor_id) = 0;
    virtual std::optional<PatientRow> find_patient(Id patient_id) = 0;
    virtual std::optional<PatientRow> find_patient_by_user(Id user_id) = 0;
    /// Filtered donor table ordered by donor_id; total counts every match.
    virtual PageResult<DonorListing> find_donors(const DonorFilter& filter, Page page) = 0;
    virtual std::vector<DonorRow> all_donors() = 0;
    /// Removes the donor row only. UNKNOWN_DONOR.
    virtual void delete_donor(Id donor_id) = 0;

    // blood requests ----------------------------------------------------------

    /// UNKNOWN_PATIENT, INVALID_QUANTITY, VALIDATION_FAILED (blank city).
    virtual BloodRequestRow insert_request(const NewBloodRequest& request) = 0;
    virtual std::optional<BloodRequestRow> find_request(Id request_id) = 0;
    /// UNKNOWN_REQUEST, ILLEGAL_REQUEST_STATE.
    virtual BloodRequestRow set_request_status(Id request_id, RequestStatus to) = 0;
    virtual std::vector<BloodRequestRow> list_requests_by_patient(Id patient_id) = 0;
    virtual PageResult<BloodRequestRow> list_requests(Page page) = 0;

    // donations ---------------------------------------------------------------

    /// Inserts the donation and advances the donor's last_donation_date in one
    /// unit. A MATCHED request becomes FULFILLED. UNKNOWN_DONOR, FUTURE_DATE,
    /// UNKNOWN_REQUEST, ILLEGAL_REQUEST_STATE.
    virtual DonationOutcome record_donation(Id donor_id, Date donated_on,
                                            std::optional<Id> request_id) = 0;
    virtual std::vector<DonationRow> list_donations_by_donor(Id donor_id) = 0;

    // messages ----------------------------------------------------------------

    /// UNKNOWN_USER (sender), UNKNOWN_RECIPIENT, SELF_MESSAGE, EMPTY_BODY,
    /// FIELD_TOO_LONG.
    virtual MessageRow insert_message(Id sender, Id recipient, std::string_view body) = 0;
    /// Both directions, ordered by sent_at then message_id.
    virtual PageResult<MessageRow> list_conversation(Id user_a, Id user_b, Page page) = 0;
    /// Marks the given messages read when `reader` is their recipient.
    virtual void mark_messages_read(Id reader, const std::vector<Id>& message_ids) = 0;

    // notifications -----------------------------------------------------------

    /// Returns nullopt when a MATCH_FOUND for the same (user, request) already
    /// exists. UNKNOWN_USER, FIELD_TOO_LONG.
    virtual std::optional<NotificationRow> insert_notification(const NewNotification& n) = 0;
    /// Newest first.
    virtual std::vector<NotificationRow> list_notifications(Id user_id) = 0;
    /// Idempotent. UNKNOWN_NOTIFICATION when absent or owned by someone else.
    virtual NotificationRow mark_notification_read(Id user_id, Id notification_id) = 0;

    // sessions ----------------------------------------------------------------

    virtual void insert_session(const SessionRow& session) = 0;
    virtual std::optional<SessionRow> find_session(std::string_view token_digest) = 0;
    virtual void delete_session(std::string_view token_digest) = 0;

    void set_fault_injector(FaultInjector injector) { fault_ = std::move(injector); }

protected:
    const Clock& clock() const { return *clock_; }
    void fault_point(std::string_view point) const {
        if (fault_) fault_(point);
    }

private:
    std::shared_ptr<const Clock> clock_;
    FaultInjector fault_;
};

/// Opens a store from a connection string:
///   memory: | memory://              in-process, volatile
///   sqlite://<path> | sqlite:<path>  SQLite file (":memory:" allowed)
/// STORE_UNAVAILABLE for unknown schemes or unreachable files.
std::unique_ptr<Store> open_store(std::string_view url, std::shared_ptr<const Clock> clock);

}  // namespace hemobank::store
