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

#include "hemobank/domain/blood_group.hpp"
#include "hemobank/domain/date.hpp"

namespace hemobank::domain {

/// Admin-controlled account state. Independent of the donor-controlled
/// `available` flag.
enum class DonorStatus : std::uint8_t { Active, Inactive };

constexpr std::string_view to_string(DonorStatus s) noexcept {
    return s == DonorStatus::Active ? "ACTIVE" : "INACTIVE";
}

constexpr std::optional<DonorStatus> parse_donor_status(std::string_view text) noexcept {
    if (text == "ACTIVE") return DonorStatus::Active;
    if (text == "INACTIVE") return DonorStatus::Inactive;
    return std::nullopt;
}

struct DonorRecord {
    std::int64_t donor_id = 0;
    std::int64_t user_id = 0;
    std::string phone;
    std::string city;
    BloodGroup blood_group = BloodGroup::ONeg;
    DonorStatus status = DonorStatus::Active;
    bool available = true;
    std::optional<Date> last_donation_date;

    friend bool operator==(const DonorRecord&, const DonorRecord&) = default;
};

/// Whether the donor may be offered to patients on `now`. A donor who gave
/// blood on day t0 is hidden for the half-open window [t0, t0 + 90 days).
constexpr bool is_visible(const DonorRecord& d, Date now) noexcept {
    if (d.status != DonorStatus::Active || !d.available) return false;
    return !d.last_donation_date || now >= next_eligible_date(*d.last_donation_date);
}

}  // namespace hemobank::domain
