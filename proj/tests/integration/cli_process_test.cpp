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

#include <gtest/gtest.h>

#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "support/helpers.hpp"

extern char** environ;

namespace {

using Clock = std::chrono::steady_clock;

/// A listening socket on a kernel-chosen port.
class Listener {
public:
    Listener() {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
        ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
        ::listen(fd_, 1);
        socklen_t len = sizeof(addr);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }
    ~Listener() { close(); }
    void close() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int port() const { return port_; }

private:
    int fd_ = -1;
    int port_ = 0;
};

class Process {
public:
    Process(std::vector<std::string> args, const std::string& stdout_path) {
        args.insert(args.begin(), HEMOBANK_BIN);
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC,
                                         0644);
        posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, (stdout_path + ".err").c_str(),
                                         O_WRONLY | O_CREAT | O_TRUNC, 0644);
        EXPECT_EQ(posix_spawn(&pid_, HEMOBANK_BIN, &actions, nullptr, argv.data(), environ), 0);
        posix_spawn_file_actions_destroy(&actions);
    }
    ~Process() {
        if (pid_ > 0 && !exited_) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, nullptr, 0);
        }
    }

    /// Exit code, or -1 if still running after `limit`.
    int wait_for(std::chrono::milliseconds limit) {
        const auto deadline = Clock::now() + limit;
        while (Clock::now() < deadline) {
            int status = 0;
            if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                exited_ = true;
                return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds{10});
        }
        return -1;
    }

    void signal(int sig) { ::kill(pid_, sig); }

private:
    pid_t pid_ = -1;
    bool exited_ = false;
};

bool wait_ready(int port) {
    const auto deadline = Clock::now() + std::chrono::seconds{5};
    while (Clock::now() < deadline) {
        httplib::Client c("127.0.0.1", port);
        if (auto r = c.Get("/api/openapi.json"); r && r->status == 200) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds{20});
    }
    return false;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(ServeProcess, ServesDescriptionAndStopsOnSigterm) {
    hemobank::testing::TempDir dir;
    Listener probe;
    const int port = probe.port();
    probe.close();
    const std::string out = dir.file("serve.out").string();
    Process p({"serve", "--database-url", "memory:", "--port", std::to_string(port), "--host", "127.0.0.1"}, out);
    ASSERT_TRUE(wait_ready(port)) << slurp(out + ".err");

    const auto start = Clock::now();
    p.signal(SIGTERM);
    EXPECT_EQ(p.wait_for(std::chrono::seconds{5}), 0) << slurp(out + ".err");
    EXPECT_LT(Clock::now() - start, std::chrono::seconds{5});
    EXPECT_NE(slurp(out).find("shut down"), std::string::npos);
}

TEST(ServeProcess, SigintAlsoStopsCleanly) {
    hemobank::testing::TempDir dir;
    Listener probe;
    const int port = probe.port();
    probe.close();
    const std::string out = dir.file("serve.out").string();
    Process p({"serve", "--database-url", "memory:", "--port", std::to_string(port), "--host", "127.0.0.1"}, out);
    ASSERT_TRUE(wait_ready(port));
    p.signal(SIGINT);
    EXPECT_EQ(p.wait_for(std::chrono::seconds{5}), 0);
}

TEST(ServeProcess, OccupiedPortExitsWithOne) {
    hemobank::testing::TempDir dir;
    Listener busy;
    const std::string out = dir.file("serve.out").string();
    Process p({"serve", "--database-url", "memory:", "--port", std::to_string(busy.port())}, out);
    EXPECT_EQ(p.wait_for(std::chrono::seconds{5}), 1);
    EXPECT_NE(slurp(out + ".err").find("cannot listen"), std::string::npos);
}

TEST(ServeProcess, MigrateSeedThenServeSqlite) {
    hemobank::testing::TempDir dir;
    const std::string url = "sqlite://" + dir.file("ops.db").string();
    const std::string log = dir.file("cmd.out").string();
    {
        Process m({"migrate", "--database-url", url}, log);
        ASSERT_EQ(m.wait_for(std::chrono::seconds{10}), 0);
        EXPECT_EQ(slurp(log), "migrated to version 1\n");
    }
    {
        Process s({"seed", "--database-url", url, "--profile", "fig6"}, log);
        ASSERT_EQ(s.wait_for(std::chrono::seconds{30}), 0);
    }
    const std::string seeded = slurp(log);
    const auto at = seeded.find("admin@test.com password: ");
    ASSERT_NE(at, std::string::npos) << seeded;
    const std::string password = seeded.substr(at + 25, 16);

    Listener probe;
    const int port = probe.port();
    probe.close();
    const std::string out = dir.file("serve.out").string();
    Process p({"serve", "--database-url", url, "--port", std::to_string(port), "--host", "127.0.0.1"}, out);
    ASSERT_TRUE(wait_ready(port)) << slurp(out + ".err");

    httplib::Client c("127.0.0.1", port);
    auto r = c.Post("/api/login", nlohmann::json{{"email", "admin@test.com"}, {"password", password}}.dump(),
                    "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    const std::string token = nlohmann::json::parse(r->body)["token"];
    r = c.Get("/api/admin/donors?blood_group=A-", httplib::Headers{{"Authorization", "Bearer " + token}});
    ASSERT_TRUE(r);
    const auto items = nlohmann::json::parse(r->body)["items"];
    ASSERT_EQ(items.size(), 1U);
    EXPECT_EQ(items[0]["email"], "donor2@test.com");

    p.signal(SIGTERM);
    EXPECT_EQ(p.wait_for(std::chrono::seconds{5}), 0);
}
