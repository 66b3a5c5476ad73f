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

#include <map>
#include <mutex>

#include "hemobank/store/store.hpp"

namespace hemobank::store {

/// Volatile store holding every table in ordered maps behind one mutex.
/// Multi-write operations snapshot the tables first and restore them if any
/// step throws.
class MemoryStore final : public Store {
public:
    explicit MemoryStore(std::shared_ptr<const Clock> clock) : Store(std::move(clock)) {}

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
    struct Tables {
        std::map<Id, UserRow> users;
        std::map<Id, DonorRow> donors;
        std::map<Id, PatientRow> patients;
        std::map<Id, AdminRow> admins;
        std::map<Id, BloodRequestRow> requests;
        std::map<Id, DonationRow> donations;
        std::map<Id, MessageRow> messages;
        std::map<Id, NotificationRow> notifications;
        std::map<std::string, SessionRow, std::less<>> sessions;

        // Last id handed out per table; ids are never reused.
        Id user_seq = 0;
        Id donor_seq = 0;
        Id patient_seq = 0;
        Id admin_seq = 0;
        Id request_seq = 0;
        Id donation_seq = 0;
        Id message_seq = 0;
        Id notification_seq = 0;
    };

    void require_migrated() const;
    UserRow insert_user_locked(const NewUser& user);
    RoleRow upsert_role_locked(Id user_id, const RolePayload& payload);
    DonorListing listing_locked(const DonorRow& donor) const;

    /// Runs `fn` against the tables; restores the prior contents if it throws.
    template <typename Fn>
    auto atomically(Fn&& fn) {
        Tables snapshot = tables_;
        try {
            return fn();
        } catch (...) {
            tables_ = std::move(snapshot);
            throw;
        }
    }

    std::mutex mu_;
    int version_ = 0;
    Tables tables_;
};

}  // namespace hemobank::store
