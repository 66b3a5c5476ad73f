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

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <vector>

namespace hemobank::domain {

/// The eight ABO x RhD groups. Wire encoding is the exact symbol returned by
/// to_string(), e.g. "AB-".
enum class BloodGroup : std::uint8_t {
    APos,
    ANeg,
    BPos,
    BNeg,
    ABPos,
    ABNeg,
    OPos,
    ONeg,
};

inline constexpr std::array<BloodGroup, 8> kAllBloodGroups = {
    BloodGroup::APos,  BloodGroup::ANeg,  BloodGroup::BPos, BloodGroup::BNeg,
    BloodGroup::ABPos, BloodGroup::ABNeg, BloodGroup::OPos, BloodGroup::ONeg,
};

constexpr std::string_view to_string(BloodGroup g) noexcept {
    switch (g) {
        case BloodGroup::APos: return "A+";
        case BloodGroup::ANeg: return "A-";
        case BloodGroup::BPos: return "B+";
        case BloodGroup::BNeg: return "B-";
        case BloodGroup::ABPos: return "AB+";
        case BloodGroup::ABNeg: return "AB-";
        case BloodGroup::OPos: return "O+";
        case BloodGroup::ONeg: return "O-";
    }
    return "?";
}

/// Exact, case-sensitive match against the eight symbols.
constexpr std::optional<BloodGroup> parse_blood_group(std::string_view text) noexcept {
    for (BloodGroup g : kAllBloodGroups) {
        if (to_string(g) == text) return g;
    }
    return std::nullopt;
}

enum class Antigen : std::uint8_t {
    A = 1U << 0U,
    B = 1U << 1U,
    RhD = 1U << 2U,
};

/// Subset of {A, B, RhD} carried on red cells.
class AntigenSet {
public:
    constexpr AntigenSet() noexcept = default;
    constexpr AntigenSet(std::initializer_list<Antigen> antigens) noexcept {
        for (Antigen a : antigens) bits_ |= static_cast<std::uint8_t>(a);
    }

    constexpr bool contains(Antigen a) const noexcept {
        return (bits_ & static_cast<std::uint8_t>(a)) != 0;
    }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr bool is_subset_of(AntigenSet other) const noexcept {
        return (bits_ & ~other.bits_) == 0;
    }
    constexpr std::uint8_t bits() const noexcept { return bits_; }

    friend constexpr bool operator==(AntigenSet, AntigenSet) noexcept = default;

private:
    std::uint8_t bits_ = 0;
};

constexpr AntigenSet antigens_of(BloodGroup g) noexcept {
    using enum Antigen;
    switch (g) {
        case BloodGroup::APos: return {A, RhD};
        case BloodGroup::ANeg: return {A};
        case BloodGroup::BPos: return {B, RhD};
        case BloodGroup::BNeg: return {B};
        case BloodGroup::ABPos: return {A, B, RhD};
        case BloodGroup::ABNeg: return {A, B};
        case BloodGroup::OPos: return {RhD};
        case BloodGroup::ONeg: return {};
    }
    return {};
}

/// A donor may give to a recipient when it introduces no antigen the
/// recipient lacks.
constexpr bool is_compatible(BloodGroup donor, BloodGroup recipient) noexcept {
    return antigens_of(donor).is_subset_of(antigens_of(recipient));
}

/// Donor groups acceptable for `recipient`, in kAllBloodGroups order.
inline std::vector<BloodGroup> compatible_donor_groups(BloodGroup recipient) {
    std::vector<BloodGroup> out;
    for (BloodGroup d : kAllBloodGroups) {
        if (is_compatible(d, recipient)) out.push_back(d);
    }
    return out;
}

}  // namespace hemobank::domain
