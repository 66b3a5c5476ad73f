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

#include "hemobank/cli/seed.hpp"

#include "hemobank/domain/blood_group.hpp"
#include "hemobank/error.hpp"

namespace hemobank::cli {

namespace {

using domain::BloodGroup;
using domain::DonorStatus;

struct AccountDef {
    std::string name;
    std::string email;
    store::RolePayload payload;
};

std::vector<AccountDef> fig6_accounts() {
    return {
        {"Donor1", "donor1@test.com",
         store::DonorPayload{"0987654321", "Sukot", BloodGroup::APos, DonorStatus::Active, true}},
        {"Donor2", "donor2@test.com",
         store::DonorPayload{"0123456789", "Guprenwala", BloodGroup::ANeg, DonorStatus::Active, true}},
        {"Demo Patient", "patient@test.com", store::PatientPayload{"0300000000", "Sukot"}},
        {"Demo Admin", "admin@test.com", store::AdminPayload{}},
    };
}

store::Role role_of(const store::RolePayload& p) {
    if (std::holds_alternative<store::DonorPayload>(p)) return store::Role::Donor;
    if (std::holds_alternative<store::PatientPayload>(p)) return store::Role::Patient;
    return store::Role::Admin;
}

}  // namespace

std::optional<SeedProfile> parse_seed_profile(std::string_view text) noexcept {
    if (text == "none") return SeedProfile::None;
    if (text == "fig6") return SeedProfile::Fig6;
    return std::nullopt;
}

std::vector<SeedAccount> seed(store::Store& store, auth::AuthService& auth, SeedProfile profile) {
    if (store.schema_version() != store::kSchemaVersion) {
        throw Error(ErrorCode::StoreNotMigrated, "store is not migrated; run `hemobank migrate` first");
    }
    std::vector<SeedAccount> out;
    if (profile == SeedProfile::None) return out;
    for (const AccountDef& s : fig6_accounts()) {
        SeedAccount acct{role_of(s.payload), s.name, s.email, 0, std::nullopt};
        if (auto existing = store.find_user_by_email(s.email)) {
            acct.user_id = existing->user_id;
        } else {
            std::string password = auth::generate_password();
            const auto [user, role] =
                store.insert_user_with_role({s.name, s.email, auth.hash_password(password)}, s.payload);
            acct.user_id = user.user_id;
            acct.password = std::move(password);
        }
        out.push_back(std::move(acct));
    }
    return out;
}

}  // namespace hemobank::cli
