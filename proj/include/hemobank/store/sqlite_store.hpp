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

#include <mutex>
#include <string>

#include "hemobank/store/store.hpp"

struct sqlite3;

namespace hemobank::store {

/// Durable backend on a single SQLite connection. Calls are serialized on an
/// internal mutex and each runs in its own transaction; constraints (unique
/// email, foreign keys, status CHECKs) are declared in the schema.
class SqliteStore final : public Store {
public:
    /// STORE_UNAVAILABLE when the file cannot be opened or created.
    SqliteStore(const std::string& path, std::shared_ptr<const Clock> clock);
    ~SqliteStore() override;

    MigrationResult migrate() override;
    int schema_version() override;
    std::vector<std::string> tables() override;

    UserRow insert_user(const NewUser& user) override;
    std::pair<UserRow, RoleRow> insert_user_with_role(const NewUser& user,
                                                      const RolePayload& role) override;
    std::optional<UserRow> find_user(Id user_id) override;
    std::optional<UserRow> find_user_by_email(std::string_view email) override;
    PageResult<UserRow> list_users(Page page) override;
    void delete_user(Id user_id) override;
    RoleSet roles_of(Id user_id) override;

    RoleRow upsert_role(Id user_id, const RolePayload& payload) override;
    std::optional<DonorRow> find_donor(Id donor_id) override;
    std::optional<DonorRow> find_donor_by_user(Id user_id) override;
    std::optional<DonorListing> find_donor_listing(Id donor_id) override;
    std::optional<PatientRow> find_patient(Id patient_id) override;
    std::optional<PatientRow> find_patient_by_user(Id user_id) override;
    PageResult<DonorListing> find_donors(const DonorFilter& filter, Page page) override;
    std::vector<DonorRow> all_donors() override;
    void delete_donor(Id donor_id) override;

    BloodRequestRow insert_request(const NewBloodRequest& request) override;
    std::optional<BloodRequestRow> find_request(Id request_id) override;
    BloodRequestRow set_request_status(Id request_id, RequestStatus to) override;
    std::vector<BloodRequestRow> list_requests_by_patient(Id patient_id) override;
    PageResult<BloodRequestRow> list_requests(Page page) override;

    DonationOutcome record_donation(Id donor_id, Date donated_on,
                                    std::optional<Id> request_id) override;
    std::vector<DonationRow> list_donations_by_donor(Id donor_id) override;

    MessageRow insert_message(Id sender, Id recipient, std::string_view body) override;
    PageResult<MessageRow> list_conversation(Id user_a, Id user_b, Page page) override;
    void mark_messages_read(Id reader, const std::vector<Id>& message_ids) override;

    std::optional<NotificationRow> insert_notification(const NewNotification& n) override;
    std::vector<NotificationRow> list_notifications(Id user_id) override;
    NotificationRow mark_notification_read(Id user_id, Id notification_id) override;

    void insert_session(const SessionRow& session) override;
    std::optional<SessionRow> find_session(std::string_view token_digest) override;
    void delete_session(std::string_view token_digest) override;

private:
    int read_version_locked();
    void require_migrated_locked();
    UserRow insert_user_locked(const NewUser& user);
    RoleRow upsert_role_locked(Id user_id, const RolePayload& payload);
    std::optional<DonorRow> find_donor_locked(Id donor_id);
    std::optional<BloodRequestRow> find_request_locked(Id request_id);

    template <typename Fn>
    auto transaction(Fn&& fn);

    std::mutex mu_;
    sqlite3* db_ = nullptr;
    int version_ = -1;  // cached once migrated
};

}  // namespace hemobank::store
