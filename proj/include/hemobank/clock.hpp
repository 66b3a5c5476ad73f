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

#include <atomic>
#include <chrono>

#include "hemobank/domain/date.hpp"

namespace hemobank {

/// Source of "now" for every date comparison in the service.
class Clock {
public:
    virtual ~Clock() = default;
    virtual domain::Timestamp now() const = 0;

    domain::Date today() const { return domain::day_of(now()); }
};

class SystemClock final : public Clock {
public:
    domain::Timestamp now() const override {
        return std::chrono::time_point_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now());
    }
};

/// Settable clock for tests and for pinning a server to a date.
class ManualClock final : public Clock {
public:
    explicit ManualClock(domain::Timestamp start) : now_(start.time_since_epoch().count()) {}
    explicit ManualClock(domain::Date day) : ManualClock(domain::Timestamp{day}) {}

    domain::Timestamp now() const override {
        return domain::Timestamp{std::chrono::milliseconds{now_.load()}};
    }

    void set(domain::Timestamp t) { now_.store(t.time_since_epoch().count()); }
    void set(domain::Date day) { set(domain::Timestamp{day}); }
    void advance(std::chrono::milliseconds d) { now_.fetch_add(d.count()); }

private:
    std::atomic<long long> now_;
};

}  // namespace hemobank
