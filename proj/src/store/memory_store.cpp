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

#include "hemobank/store/memory_store.hpp"

#include <algorithm>

#include "common.hpp"
#include "hemobank/error.hpp"

namespace hemobank::store {

namespace {

template <typename T>
PageResult<T> slice(std::vector<T> all, Page page) {
    PageResult<T> out;
    out.total = all.size();
    const std::size_t limit = detail::clamp_limit(page.limit);
    if (page.offset < all.size()) {
        const auto first = all.begin() + static_cast<std::ptrdiff_t>(page.offset);
        const auto last = all.begin() +
                          static_cast<std::ptrdiff_t>(std::min(all.size(), page.offset + limit));
        out.items.assign(std::make_move_iterator(first), std::make_move_iterator(last));
    }
    return out;
}

template <typename Map, typename Pred>
auto find_if_value(Map& map, Pred pred) {
    return std::find_if(map.begin(), map.end(), [&](const auto& kv) { return pred(kv.second); });
}

}  // namespace

MigrationResult MemoryStore::migrate() {
    std::lock_guard lock(mu_);
    if (version_ == kSchemaVersion) return {version_, false};
    version_ = kSchemaVersion;
    return {version_, true};
}

int MemoryStore::schema_version() {
    std::lock_guard lock(mu_);
    return version_;
}

std::vector<std::string> MemoryStore::tables() {
    std::lock_guard lock(mu_);
    if (version_ == 0) return {};
    return {"admins",   "blood_requests", "donations", "donors",  "messages",
            "notifications", "patients", "schema_meta", "sessions", "users"};
}

void MemoryStore::require_migrated() const {
    if (version_ != kSchemaVersion) {
        throw Error(ErrorCode::StoreNotMigrated, "store has not been migrated");
    }
}

// users -----------------------------------------------------------------------

UserRow MemoryStore::insert_user_locked(const NewUser& user) {
    detail::check_new_user(user);
    const std::string key = detail::ascii_lower(user.email);
    auto clash = find_if_value(tables_.users,
                               [&](const UserRow& u) { return detail::ascii_lower(u.email) == key; });
    if (clash != tables_.users.end()) {
        throw Error(ErrorCode::DuplicateEmail, "email already registered");
    }
    UserRow row{++tables_.user_seq, user.name, user.email, user.password_hash, clock().now()};
    tables_.users.emplace(row.user_id, row);
    return row;
}

UserRow MemoryStore::insert_user(const NewUser& user) {
    std::lock_guard lock(mu_);
    require_migrated();
    return insert_user_locked(user);
}

std::pair<UserRow, RoleRow> MemoryStore::insert_user_with_role(const NewUser& user,
                                                               const RolePayload& role) {
    std::lock_guard lock(mu_);
    require_migrated();
    return atomically([&] {
        UserRow u = insert_user_locked(user);
        RoleRow r = upsert_role_locked(u.user_id, role);
        return std::pair{std::move(u), std::move(r)};
    });
}

std::optional<UserRow> MemoryStore::find_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.users.find(user_id);
    if (it == tables_.users.end()) return std::nullopt;
    return it->second;
}

std::optional<UserRow> MemoryStore::find_user_by_email(std::string_view email) {
    std::lock_guard lock(mu_);
    require_migrated();
    const std::string key = detail::ascii_lower(email);
    auto it = find_if_value(tables_.users,
                            [&](const UserRow& u) { return detail::ascii_lower(u.email) == key; });
    if (it == tables_.users.end()) return std::nullopt;
    return it->second;
}

PageResult<UserRow> MemoryStore::list_users(Page page) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<UserRow> all;
    for (const auto& [id, u] : tables_.users) all.push_back(u);
    return slice(std::move(all), page);
}

void MemoryStore::delete_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    if (!tables_.users.contains(user_id)) throw Error(ErrorCode::UnknownUser, "no such user");
    auto& t = tables_;
    t.users.erase(user_id);
    std::vector<Id> patient_ids;
    for (const auto& [id, p] : t.patients) {
        if (p.user_id == user_id) patient_ids.push_back(id);
    }
    std::erase_if(t.donors, [&](const auto& kv) { return kv.second.user_id == user_id; });
    std::erase_if(t.patients, [&](const auto& kv) { return kv.second.user_id == user_id; });
    std::erase_if(t.admins, [&](const auto& kv) { return kv.second.user_id == user_id; });
    std::erase_if(t.requests, [&](const auto& kv) {
        return std::find(patient_ids.begin(), patient_ids.end(), kv.second.patient_id) !=
               patient_ids.end();
    });
    std::erase_if(t.messages, [&](const auto& kv) {
        return kv.second.sender_user_id == user_id || kv.second.recipient_user_id == user_id;
    });
    std::erase_if(t.notifications,
                  [&](const auto& kv) { return kv.second.user_id == user_id; });
    std::erase_if(t.sessions, [&](const auto& kv) { return kv.second.user_id == user_id; });
}

RoleSet MemoryStore::roles_of(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto owned = [&](const auto& map) {
        return find_if_value(map, [&](const auto& r) { return r.user_id == user_id; }) != map.end();
    };
    return {owned(tables_.admins), owned(tables_.donors), owned(tables_.patients)};
}

// roles -----------------------------------------------------------------------

RoleRow MemoryStore::upsert_role_locked(Id user_id, const RolePayload& payload) {
    if (!tables_.users.contains(user_id)) throw Error(ErrorCode::UnknownUser, "no such user");
    auto& t = tables_;
    return std::visit(
        [&](const auto& p) -> RoleRow {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DonorPayload>) {
                detail::check_donor_payload(p);
                auto it = find_if_value(t.donors, [&](const DonorRow& d) { return d.user_id == user_id; });
                DonorRow row;
                if (it != t.donors.end()) {
                    row = it->second;
                } else {
                    row.donor_id = ++t.donor_seq;
                    row.user_id = user_id;
                }
                row.phone = p.phone;
                row.city = p.city;
                row.blood_group = p.blood_group;
                row.status = p.status;
                row.available = p.available;
                t.donors[row.donor_id] = row;
                return row;
            } else if constexpr (std::is_same_v<P, PatientPayload>) {
                detail::check_patient_payload(p);
                auto it = find_if_value(t.patients,
                                        [&](const PatientRow& r) { return r.user_id == user_id; });
                PatientRow row;
                if (it != t.patients.end()) {
                    row = it->second;
                } else {
                    row.patient_id = ++t.patient_seq;
                    row.user_id = user_id;
                }
                row.phone = p.phone;
                row.city = p.city;
                t.patients[row.patient_id] = row;
                return row;
            } else {
                auto it = find_if_value(t.admins, [&](const AdminRow& r) { return r.user_id == user_id; });
                if (it != t.admins.end()) return it->second;
                AdminRow row{++t.admin_seq, user_id};
                t.admins[row.admin_id] = row;
                return row;
            }
        },
        payload);
}

RoleRow MemoryStore::upsert_role(Id user_id, const RolePayload& payload) {
    std::lock_guard lock(mu_);
    require_migrated();
    return upsert_role_locked(user_id, payload);
}

std::optional<DonorRow> MemoryStore::find_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.donors.find(donor_id);
    if (it == tables_.donors.end()) return std::nullopt;
    return it->second;
}

std::optional<DonorRow> MemoryStore::find_donor_by_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = find_if_value(tables_.donors, [&](const DonorRow& d) { return d.user_id == user_id; });
    if (it == tables_.donors.end()) return std::nullopt;
    return it->second;
}

DonorListing MemoryStore::listing_locked(const DonorRow& donor) const {
    const UserRow& u = tables_.users.at(donor.user_id);
    return {donor, u.name, u.email};
}

std::optional<DonorListing> MemoryStore::find_donor_listing(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.donors.find(donor_id);
    if (it == tables_.donors.end()) return std::nullopt;
    return listing_locked(it->second);
}

std::optional<PatientRow> MemoryStore::find_patient(Id patient_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.patients.find(patient_id);
    if (it == tables_.patients.end()) return std::nullopt;
    return it->second;
}

std::optional<PatientRow> MemoryStore::find_patient_by_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = find_if_value(tables_.patients, [&](const PatientRow& p) { return p.user_id == user_id; });
    if (it == tables_.patients.end()) return std::nullopt;
    return it->second;
}

PageResult<DonorListing> MemoryStore::find_donors(const DonorFilter& filter, Page page) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<DonorListing> all;
    for (const auto& [id, d] : tables_.donors) {
        if (filter.blood_group && d.blood_group != *filter.blood_group) continue;
        DonorListing l = listing_locked(d);
        if (filter.search) {
            const std::string& q = *filter.search;
            if (!detail::contains_ci(l.name, q) && !detail::contains_ci(d.phone, q) &&
                !detail::contains_ci(l.email, q) && !detail::contains_ci(d.city, q)) {
                continue;
            }
        }
        all.push_back(std::move(l));
    }
    return slice(std::move(all), page);
}

std::vector<DonorRow> MemoryStore::all_donors() {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<DonorRow> out;
    for (const auto& [id, d] : tables_.donors) out.push_back(d);
    return out;
}

void MemoryStore::delete_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    if (tables_.donors.erase(donor_id) == 0) {
        throw Error(ErrorCode::UnknownDonor, "no such donor");
    }
}

// blood requests --------------------------------------------------------------

BloodRequestRow MemoryStore::insert_request(const NewBloodRequest& request) {
    std::lock_guard lock(mu_);
    require_migrated();
    detail::check_new_request(request);
    if (!tables_.patients.contains(request.patient_id)) {
        throw Error(ErrorCode::UnknownPatient, "no such patient");
    }
    BloodRequestRow row{++tables_.request_seq, request.patient_id, request.blood_group,
                        request.quantity_units, request.city,       RequestStatus::Open,
                        clock().now()};
    tables_.requests.emplace(row.request_id, row);
    return row;
}

std::optional<BloodRequestRow> MemoryStore::find_request(Id request_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.requests.find(request_id);
    if (it == tables_.requests.end()) return std::nullopt;
    return it->second;
}

BloodRequestRow MemoryStore::set_request_status(Id request_id, RequestStatus to) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.requests.find(request_id);
    if (it == tables_.requests.end()) throw Error(ErrorCode::UnknownRequest, "no such request");
    if (!is_legal_transition(it->second.status, to)) {
        throw Error(ErrorCode::IllegalRequestState,
                    "cannot move request from " + std::string{to_string(it->second.status)} +
                        " to " + std::string{to_string(to)});
    }
    it->second.status = to;
    return it->second;
}

std::vector<BloodRequestRow> MemoryStore::list_requests_by_patient(Id patient_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<BloodRequestRow> out;
    for (const auto& [id, r] : tables_.requests) {
        if (r.patient_id == patient_id) out.push_back(r);
    }
    return out;
}

PageResult<BloodRequestRow> MemoryStore::list_requests(Page page) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<BloodRequestRow> all;
    for (const auto& [id, r] : tables_.requests) all.push_back(r);
    return slice(std::move(all), page);
}

// donations -------------------------------------------------------------------

DonationOutcome MemoryStore::record_donation(Id donor_id, Date donated_on,
                                             std::optional<Id> request_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto donor = tables_.donors.find(donor_id);
    if (donor == tables_.donors.end()) throw Error(ErrorCode::UnknownDonor, "no such donor");
    if (donated_on > clock().today()) {
        throw Error(ErrorCode::FutureDate, "donation date is in the future");
    }
    BloodRequestRow* request = nullptr;
    if (request_id) {
        auto it = tables_.requests.find(*request_id);
        if (it == tables_.requests.end()) throw Error(ErrorCode::UnknownRequest, "no such request");
        request = &it->second;
        if (request->status != RequestStatus::Open && request->status != RequestStatus::Matched) {
            throw Error(ErrorCode::IllegalRequestState,
                        "request is " + std::string{to_string(request->status)});
        }
    }

    return atomically([&] {
        DonationOutcome out;
        out.donation = {++tables_.donation_seq, donor_id, request_id, donated_on};
        tables_.donations.emplace(out.donation.donation_id, out.donation);

        fault_point(kFaultDonationInserted);

        DonorRow& d = donor->second;
        if (!d.last_donation_date || *d.last_donation_date < donated_on) {
            d.last_donation_date = donated_on;
        }
        out.donor = d;
        if (request && request->status == RequestStatus::Matched) {
            request->status = RequestStatus::Fulfilled;
            out.request = *request;
        }
        return out;
    });
}

std::vector<DonationRow> MemoryStore::list_donations_by_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<DonationRow> out;
    for (const auto& [id, d] : tables_.donations) {
        if (d.donor_id == donor_id) out.push_back(d);
    }
    return out;
}

// messages --------------------------------------------------------------------

MessageRow MemoryStore::insert_message(Id sender, Id recipient, std::string_view body) {
    std::lock_guard lock(mu_);
    require_migrated();
    detail::check_message(sender, recipient, body);
    if (!tables_.users.contains(sender)) throw Error(ErrorCode::UnknownUser, "no such sender");
    if (!tables_.users.contains(recipient)) {
        throw Error(ErrorCode::UnknownRecipient, "no such recipient");
    }
    MessageRow row{++tables_.message_seq, sender, recipient, std::string{body}, clock().now(), false};
    tables_.messages.emplace(row.message_id, row);
    return row;
}

PageResult<MessageRow> MemoryStore::list_conversation(Id user_a, Id user_b, Page page) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<MessageRow> all;
    for (const auto& [id, m] : tables_.messages) {
        if ((m.sender_user_id == user_a && m.recipient_user_id == user_b) ||
            (m.sender_user_id == user_b && m.recipient_user_id == user_a)) {
            all.push_back(m);
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const MessageRow& a, const MessageRow& b) {
        return std::tie(a.sent_at, a.message_id) < std::tie(b.sent_at, b.message_id);
    });
    return slice(std::move(all), page);
}

void MemoryStore::mark_messages_read(Id reader, const std::vector<Id>& message_ids) {
    std::lock_guard lock(mu_);
    require_migrated();
    for (Id id : message_ids) {
        auto it = tables_.messages.find(id);
        if (it != tables_.messages.end() && it->second.recipient_user_id == reader) {
            it->second.read = true;
        }
    }
}

// notifications ---------------------------------------------------------------

std::optional<NotificationRow> MemoryStore::insert_notification(const NewNotification& n) {
    std::lock_guard lock(mu_);
    require_migrated();
    detail::check_notification(n);
    if (!tables_.users.contains(n.user_id)) throw Error(ErrorCode::UnknownUser, "no such user");
    if (n.kind == NotificationKind::MatchFound) {
        auto dup = find_if_value(tables_.notifications, [&](const NotificationRow& r) {
            return r.kind == NotificationKind::MatchFound && r.user_id == n.user_id &&
                   r.request_id == n.request_id;
        });
        if (dup != tables_.notifications.end()) return std::nullopt;
    }
    NotificationRow row{++tables_.notification_seq, n.user_id, n.kind, n.payload,
                        n.request_id,               clock().now(), false};
    tables_.notifications.emplace(row.notification_id, row);
    return row;
}

std::vector<NotificationRow> MemoryStore::list_notifications(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    std::vector<NotificationRow> out;
    for (auto it = tables_.notifications.rbegin(); it != tables_.notifications.rend(); ++it) {
        if (it->second.user_id == user_id) out.push_back(it->second);
    }
    std::stable_sort(out.begin(), out.end(), [](const NotificationRow& a, const NotificationRow& b) {
        return a.created_at > b.created_at;
    });
    return out;
}

NotificationRow MemoryStore::mark_notification_read(Id user_id, Id notification_id) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.notifications.find(notification_id);
    if (it == tables_.notifications.end() || it->second.user_id != user_id) {
        throw Error(ErrorCode::UnknownNotification, "no such notification");
    }
    it->second.read = true;
    return it->second;
}

// sessions --------------------------------------------------------------------

void MemoryStore::insert_session(const SessionRow& session) {
    std::lock_guard lock(mu_);
    require_migrated();
    if (!tables_.users.contains(session.user_id)) throw Error(ErrorCode::UnknownUser, "no such user");
    tables_.sessions[session.token_digest] = session;
}

std::optional<SessionRow> MemoryStore::find_session(std::string_view token_digest) {
    std::lock_guard lock(mu_);
    require_migrated();
    auto it = tables_.sessions.find(token_digest);
    if (it == tables_.sessions.end()) return std::nullopt;
    return it->second;
}

void MemoryStore::delete_session(std::string_view token_digest) {
    std::lock_guard lock(mu_);
    require_migrated();
    if (auto it = tables_.sessions.find(token_digest); it != tables_.sessions.end()) {
        tables_.sessions.erase(it);
    }
}

}  // namespace hemobank::store
