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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hemobank/domain/matching.hpp"

namespace hemobank::domain {

struct FieldProblem {
    std::string field;
    std::string reason;

    friend bool operator==(const FieldProblem&, const FieldProblem&) = default;
};

struct ValidationReport {
    std::vector<std::string> missing_fields;
    std::vector<FieldProblem> malformed_fields;

    bool ok() const noexcept { return missing_fields.empty() && malformed_fields.empty(); }
};

struct Field {
    std::string_view name;
    std::string_view value;
};

/// local@domain.tld: one '@', non-empty local part, a dot inside the domain
/// with non-empty labels around it, no whitespace.
inline bool is_email_shaped(std::string_view email) noexcept {
    const auto at = email.find('@');
    if (at == 0 || at == std::string_view::npos) return false;
    if (email.find('@', at + 1) != std::string_view::npos) return false;
    if (std::any_of(email.begin(), email.end(),
                    [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; })) {
        return false;
    }
    const std::string_view domain = email.substr(at + 1);
    const auto dot = domain.rfind('.');
    return dot != std::string_view::npos && dot > 0 && dot + 1 < domain.size() &&
           domain.front() != '.';
}

/// 5 to 20 characters drawn from digits, '+', '-' and space.
inline bool is_phone_shaped(std::string_view phone) noexcept {
    if (phone.size() < 5 || phone.size() > 20) return false;
    return std::all_of(phone.begin(), phone.end(), [](char c) {
        return (c >= '0' && c <= '9') || c == '+' || c == '-' || c == ' ';
    });
}

/// Flags blank fields (after trimming) and malformed "email"/"phone" values.
/// Reports preserve the caller's field order.
inline ValidationReport validate_required(const std::vector<Field>& fields) {
    ValidationReport report;
    for (const Field& f : fields) {
        const std::string_view value = trim(f.value);
        if (value.empty()) {
            report.missing_fields.emplace_back(f.name);
            continue;
        }
        if (f.name == "email" && !is_email_shaped(value)) {
            report.malformed_fields.push_back({std::string{f.name}, "shape"});
        } else if (f.name == "phone" && !is_phone_shaped(value)) {
            report.malformed_fields.push_back({std::string{f.name}, "shape"});
        }
    }
    return report;
}

}  // namespace hemobank::domain
