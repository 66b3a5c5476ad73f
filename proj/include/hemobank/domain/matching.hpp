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

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hemobank/domain/blood_group.hpp"
#include "hemobank/domain/date.hpp"
#include "hemobank/domain/donor.hpp"

namespace hemobank::domain {

inline std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

/// Trimmed, ASCII-lowercased form used for city comparison.
inline std::string normalize_city(std::string_view city) {
    std::string out{trim(city)};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool same_city(std::string_view a, std::string_view b) {
    return normalize_city(a) == normalize_city(b);
}

struct MatchQuery {
    BloodGroup blood_group = BloodGroup::ONeg;  // recipient
    std::string city;
    Date now{};
};

/// Visible, compatible donors for `q`, best candidate first.
///
/// Ranking, most significant first:
///   1. same city as the query
///   2. exact group before merely compatible
///   3. never donated, then longest since last donation
///   4. ascending donor_id
/// donor_id is unique, so the order is total and the result deterministic.
inline std::vector<DonorRecord> match_donors(const MatchQuery& q,
                                             const std::vector<DonorRecord>& donors) {
    const std::string city = normalize_city(q.city);

    struct Candidate {
        const DonorRecord* donor;
        bool other_city;
        bool inexact_group;
        bool has_donated;
        Date last;
    };
    std::vector<Candidate> picked;
    for (const DonorRecord& d : donors) {
        if (!is_visible(d, q.now) || !is_compatible(d.blood_group, q.blood_group)) continue;
        picked.push_back({&d, normalize_city(d.city) != city, d.blood_group != q.blood_group,
                          d.last_donation_date.has_value(), d.last_donation_date.value_or(Date{})});
    }

    std::sort(picked.begin(), picked.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.other_city, a.inexact_group, a.has_donated, a.last, a.donor->donor_id) <
               std::tie(b.other_city, b.inexact_group, b.has_donated, b.last, b.donor->donor_id);
    });

    std::vector<DonorRecord> out;
    out.reserve(picked.size());
    for (const Candidate& c : picked) out.push_back(*c.donor);
    return out;
}

}  // namespace hemobank::domain
