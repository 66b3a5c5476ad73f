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

#include "hemobank/cli/commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <ostream>
#include <thread>

#include "hemobank/api/http_server.hpp"
#include "hemobank/api/service.hpp"
#include "hemobank/cli/seed.hpp"
#include "hemobank/domain/validation.hpp"
#include "hemobank/error.hpp"

namespace hemobank::cli {

namespace {

/// Configuration problems the user can fix by changing flags or env.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string database_url;
    std::string profile = "none";
    std::string name;
    std::string email;
    std::string host = "0.0.0.0";
    std::optional<int> port;
    std::string ui_origin;
    bool migrate_first = false;
    std::string seed_profile = "none";
    std::string fixed_date;
};

int parse_positive(const std::string& what, const std::string& text, int lo, int hi) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used == text.size() && v >= lo && v <= hi) return static_cast<int>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(what + " must be an integer in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "], got '" + text + "'");
}

class Runner {
public:
    Runner(const Options& opts, const EnvLookup& env, std::ostream& out, std::ostream& err)
        : opts_(opts), env_(env), out_(out), err_(err) {}

    int migrate() {
        auto store = open();
        const auto result = store->migrate();
        out_ << (result.applied ? "migrated to version " : "already at version ") << result.version
             << '\n';
        return kExitOk;
    }

    int seed_cmd() {
        const auto profile = profile_or_throw(opts_.profile);
        auto store = open();
        auth::AuthService auth(*store, clock_, auth_config());
        report_seed(seed(*store, auth, profile));
        return kExitOk;
    }

    int create_admin() {
        auto store = open();
        const auto report =
            domain::validate_required({{"name", opts_.name}, {"email", opts_.email}});
        if (!report.ok()) {
            std::string msg = "invalid admin data:";
            for (const auto& f : report.missing_fields) msg += " " + f + " is required;";
            for (const auto& f : report.malformed_fields) msg += " " + f.field + " is malformed;";
            throw Error(ErrorCode::ValidationFailed, msg);
        }
        auth::AuthService auth(*store, clock_, auth_config());
        const std::string password = auth::generate_password();
        const auto [user, role] = store->insert_user_with_role(
            {std::string{domain::trim(opts_.name)}, std::string{domain::trim(opts_.email)},
             auth.hash_password(password)},
            store::AdminPayload{});
        out_ << "created admin user_id=" << user.user_id << " email=" << user.email << '\n'
             << "password: " << password << '\n';
        return kExitOk;
    }

    int serve() {
        const int port = opts_.port ? *opts_.port : env_port();
        const auto profile = profile_or_throw(opts_.seed_profile);
        if (!opts_.fixed_date.empty()) {
            const auto day = domain::parse_date(opts_.fixed_date);
            if (!day) throw UsageError("--fixed-date must be YYYY-MM-DD, got '" + opts_.fixed_date + "'");
            clock_ = std::make_shared<ManualClock>(*day);
        }
        std::shared_ptr<store::Store> store = open();
        const std::string url = database_url();
        const bool volatile_store = url.rfind("memory:", 0) == 0;
        if (opts_.migrate_first || volatile_store) store->migrate();
        if (store->schema_version() != store::kSchemaVersion) {
            throw Error(ErrorCode::StoreNotMigrated, "store is not migrated; run `hemobank migrate` first");
        }

        api::ServiceConfig config;
        config.ui_origin = !opts_.ui_origin.empty() ? opts_.ui_origin : env_("UI_ORIGIN").value_or("");
        api::Service service(store, clock_, auth_config(), config);
        if (profile != SeedProfile::None) report_seed(seed(*store, service.auth(), profile));

        // Block the termination signals before any thread starts so only the
        // sigtimedwait loop below sees them.
        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);

        api::HttpServer server(service);
        const int bound = server.bind(opts_.host, port);
        if (bound < 0) {
            err_ << "error: cannot listen on " << opts_.host << ":" << port << " (address in use?)\n";
            return kExitFailure;
        }
        out_ << "listening on " << opts_.host << ":" << bound << std::endl;

        std::atomic<bool> listener_done{false};
        std::thread worker([&] {
            server.run();
            listener_done = true;
        });
        const timespec tick{0, 100'000'000};
        bool stopped_by_signal = false;
        while (!listener_done) {
            const int sig = sigtimedwait(&signals, nullptr, &tick);
            if (sig == SIGINT || sig == SIGTERM) {
                stopped_by_signal = true;
                break;
            }
        }
        server.stop();  // in-flight requests finish before run() returns
        worker.join();
        if (!stopped_by_signal) {
            err_ << "error: listener stopped unexpectedly\n";
            return kExitFailure;
        }
        out_ << "shut down" << std::endl;
        return kExitOk;
    }

private:
    std::string database_url() const {
        if (!opts_.database_url.empty()) return opts_.database_url;
        if (auto v = env_("DATABASE_URL"); v && !v->empty()) return *v;
        throw UsageError("no database configured: pass --database-url or set DATABASE_URL");
    }

    std::unique_ptr<store::Store> open() { return store::open_store(database_url(), clock_); }

    int env_port() const {
        if (auto v = env_("PORT"); v && !v->empty()) return parse_positive("PORT", *v, 1, 65535);
        return 8080;
    }

    auth::AuthConfig auth_config() const {
        auth::AuthConfig c;
        if (auto v = env_("TOKEN_TTL_HOURS"); v && !v->empty()) {
            c.token_ttl = std::chrono::hours{parse_positive("TOKEN_TTL_HOURS", *v, 1, 24 * 365)};
        }
        if (auto v = env_("PASSWORD_HASH_COST"); v && !v->empty()) {
            c.hash_cost = auth::HashCost::from_level(
                static_cast<unsigned long long>(parse_positive("PASSWORD_HASH_COST", *v, 1, 64)));
        }
        return c;
    }

    static SeedProfile profile_or_throw(const std::string& text) {
        if (auto p = parse_seed_profile(text)) return *p;
        throw UsageError("unknown seed profile '" + text + "' (expected none or fig6)");
    }

    void report_seed(const std::vector<SeedAccount>& accounts) {
        std::size_t created = 0;
        for (const auto& a : accounts) {
            if (!a.password) continue;
            ++created;
            out_ << "created " << store::to_string(a.role) << " " << a.email << " password: " << *a.password
                 << '\n';
        }
        out_ << "seeded " << created << " account(s), " << accounts.size() - created
             << " already present\n";
    }

    const Options& opts_;
    const EnvLookup& env_;
    std::ostream& out_;
    std::ostream& err_;
    std::shared_ptr<const Clock> clock_ = std::make_shared<SystemClock>();
};

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string{v};
        return std::nullopt;
    };
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
    Options opts;
    CLI::App app{"Blood donation management: migrations, demo data, admin bootstrap, API server",
                 "hemobank"};
    app.require_subcommand(1);
    app.add_option("--database-url", opts.database_url,
                   "memory:, sqlite://<path> or a .db file (overrides DATABASE_URL)");

    auto* migrate = app.add_subcommand("migrate", "Create or verify the schema");
    auto* seed = app.add_subcommand("seed", "Insert demo accounts (idempotent by email)");
    seed->add_option("--profile", opts.profile, "none | fig6")->capture_default_str();
    auto* admin = app.add_subcommand("create-admin", "Create an admin and print its one-time password");
    admin->add_option("--name", opts.name, "Display name")->required();
    admin->add_option("--email", opts.email, "Login email")->required();
    auto* serve = app.add_subcommand("serve", "Run the HTTP API until SIGINT/SIGTERM");
    serve->add_option("--host", opts.host, "Listen address")->capture_default_str();
    serve->add_option("--port", opts.port, "TCP port (overrides PORT, default 8080)")
        ->check(CLI::Range(1, 65535));
    serve->add_option("--ui-origin", opts.ui_origin, "Allowed CORS origin (overrides UI_ORIGIN)");
    serve->add_option("--fixed-date", opts.fixed_date,
                      "Pin the server clock to this YYYY-MM-DD date (demos and tests)");
    serve->add_flag("--migrate", opts.migrate_first, "Migrate before serving");
    serve->add_option("--seed", opts.seed_profile, "Seed profile to apply before serving: none | fig6")
        ->capture_default_str();

    // CLI11 keeps --database-url on the parent; accept it after the
    // subcommand too.
    for (auto* sub : {migrate, seed, admin, serve}) {
        sub->add_option("--database-url", opts.database_url, "Overrides DATABASE_URL");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Runner runner(opts, env, out, err);
    try {
        if (*migrate) return runner.migrate();
        if (*seed) return runner.seed_cmd();
        if (*admin) return runner.create_admin();
        return runner.serve();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace hemobank::cli
