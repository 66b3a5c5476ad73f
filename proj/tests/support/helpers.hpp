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

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>

#include <unistd.h>

#include "hemobank/clock.hpp"
#include "hemobank/error.hpp"
#include "hemobank/store/memory_store.hpp"
#include "hemobank/store/sqlite_store.hpp"

namespace hemobank {

inline void PrintTo(ErrorCode c, std::ostream* os) { *os << to_string(c); }

}  // namespace hemobank

namespace hemobank::testing {

/// Runs `fn` and returns the code of the hemobank::Error it throws.
template <typename Fn>
ErrorCode error_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a hemobank::Error";
    return ErrorCode::Internal;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("hemobank-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct MemoryBackend {
    static constexpr const char* kName = "memory";
    std::unique_ptr<store::Store> make(std::shared_ptr<const Clock> clock) {
        return std::make_unique<store::MemoryStore>(std::move(clock));
    }
};

struct SqliteBackend {
    static constexpr const char* kName = "sqlite";
    TempDir dir;
    int n = 0;
    std::unique_ptr<store::Store> make(std::shared_ptr<const Clock> clock) {
        return std::make_unique<store::SqliteStore>(dir.file("db" + std::to_string(n++) + ".db").string(),
                                                    std::move(clock));
    }
};

}  // namespace hemobank::testing
