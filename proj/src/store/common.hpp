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

// Checks and helpers shared by both store backends so they enforce the same
// column constraints.

#include <string>
#include <string_view>

#include "hemobank/store/rows.hpp"

namespace hemobank::store::detail {

/// Code points in a UTF-8 string (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s) noexcept;

std::string ascii_lower(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

/// VALIDATION_FAILED when blank, FIELD_TOO_LONG when over `max_chars`.
void check_text(std::string_view field, std::string_view value, std::size_t max_chars);

void check_new_user(const NewUser& user);
void check_donor_payload(const DonorPayload& p);
void check_patient_payload(const PatientPayload& p);
void check_new_request(const NewBloodRequest& r);
void check_message(Id sender, Id recipient, std::string_view body);
void check_notification(const NewNotification& n);

std::size_t clamp_limit(std::size_t limit) noexcept;

}  // namespace hemobank::store::detail
