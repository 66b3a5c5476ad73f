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

#include "hemobank/store/sqlite_store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <array>

#include "common.hpp"
#include "hemobank/error.hpp"
#include "hemobank/store/memory_store.hpp"

namespace hemobank::store {

namespace {

constexpr std::array<std::string_view, 10> kSchema = {
    R"sql(CREATE TABLE schema_meta (version INTEGER NOT NULL))sql",
    R"sql(CREATE TABLE users (
        user_id       INTEGER PRIMARY KEY AUTOINCREMENT,
        name          TEXT NOT NULL CHECK (length(name) BETWEEN 1 AND 100),
        email         TEXT NOT NULL COLLATE NOCASE UNIQUE CHECK (length(email) BETWEEN 1 AND 100),
        password_hash TEXT NOT NULL,
        created_at    INTEGER NOT NULL))sql",
    R"sql(CREATE TABLE donors (
        donor_id           INTEGER PRIMARY KEY AUTOINCREMENT,
        user_id            INTEGER NOT NULL UNIQUE REFERENCES users(user_id) ON DELETE CASCADE,
        phone              TEXT NOT NULL,
        city               TEXT NOT NULL CHECK (length(city) BETWEEN 1 AND 100),
        blood_group        TEXT NOT NULL
                           CHECK (blood_group IN ('A+','A-','B+','B-','AB+','AB-','O+','O-')),
        status             TEXT NOT NULL CHECK (status IN ('ACTIVE','INACTIVE')),
        available          INTEGER NOT NULL DEFAULT 1,
        last_donation_date TEXT))sql",
    R"sql(CREATE TABLE patients (
        patient_id INTEGER PRIMARY KEY AUTOINCREMENT,
        user_id    INTEGER NOT NULL UNIQUE REFERENCES users(user_id) ON DELETE CASCADE,
        phone      TEXT NOT NULL,
        city       TEXT NOT NULL CHECK (length(city) BETWEEN 1 AND 100)))sql",
    R"sql(CREATE TABLE admins (
        admin_id INTEGER PRIMARY KEY AUTOINCREMENT,
        user_id  INTEGER NOT NULL UNIQUE REFERENCES users(user_id) ON DELETE CASCADE))sql",
    R"sql(CREATE TABLE blood_requests (
        request_id     INTEGER PRIMARY KEY AUTOINCREMENT,
        patient_id     INTEGER NOT NULL REFERENCES patients(patient_id) ON DELETE CASCADE,
        blood_group    TEXT NOT NULL
                       CHECK (blood_group IN ('A+','A-','B+','B-','AB+','AB-','O+','O-')),
        quantity_units INTEGER NOT NULL CHECK (quantity_units >= 1),
        city           TEXT NOT NULL CHECK (length(city) BETWEEN 1 AND 100),
        status         TEXT NOT NULL CHECK (status IN ('OPEN','MATCHED','FULFILLED','CANCELLED')),
        created_at     INTEGER NOT NULL))sql",
    // donor_id and request_id deliberately carry no foreign key: donation
    // history outlives the donor row.
    R"sql(CREATE TABLE donations (
        donation_id INTEGER PRIMARY KEY AUTOINCREMENT,
        donor_id    INTEGER NOT NULL,
        request_id  INTEGER,
        donated_on  TEXT NOT NULL))sql",
    R"sql(CREATE TABLE messages (
        message_id        INTEGER PRIMARY KEY AUTOINCREMENT,
        sender_user_id    INTEGER NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
        recipient_user_id INTEGER NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
        body              TEXT NOT NULL CHECK (length(body) BETWEEN 1 AND 2000),
        sent_at           INTEGER NOT NULL,
        read              INTEGER NOT NULL DEFAULT 0,
        CHECK (sender_user_id <> recipient_user_id)))sql",
    R"sql(CREATE TABLE notifications (
        notification_id INTEGER PRIMARY KEY AUTOINCREMENT,
        user_id         INTEGER NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
        kind            TEXT NOT NULL CHECK (kind IN ('MATCH_FOUND','REQUEST_STATUS','ADMIN_NOTICE')),
        payload         TEXT NOT NULL CHECK (length(payload) <= 500),
        request_id      INTEGER,
        created_at      INTEGER NOT NULL,
        read            INTEGER NOT NULL DEFAULT 0))sql",
    R"sql(CREATE TABLE sessions (
        token_digest TEXT PRIMARY KEY,
        user_id      INTEGER NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
        created_at   INTEGER NOT NULL,
        expires_at   INTEGER NOT NULL))sql",
};

constexpr std::array<std::string_view, 4> kIndexes = {
    "CREATE UNIQUE INDEX notifications_match_once ON notifications(user_id, request_id) "
    "WHERE kind = 'MATCH_FOUND'",
    "CREATE INDEX blood_requests_by_patient ON blood_requests(patient_id)",
    "CREATE INDEX donations_by_donor ON donations(donor_id)",
    "CREATE INDEX messages_by_pair ON messages(sender_user_id, recipient_user_id)",
};

[[noreturn]] void raise(sqlite3* db, int rc, std::string_view context) {
    const std::string msg = std::string{context} + ": " + sqlite3_errmsg(db);
    const int primary = rc & 0xFF;
    if (rc == SQLITE_CONSTRAINT_UNIQUE && msg.find("users.email") != std::string::npos) {
        throw Error(ErrorCode::DuplicateEmail, "email already registered");
    }
    if (primary == SQLITE_BUSY || primary == SQLITE_LOCKED || primary == SQLITE_IOERR ||
        primary == SQLITE_CANTOPEN || primary == SQLITE_FULL || primary == SQLITE_READONLY) {
        throw Error(ErrorCode::StoreUnavailable, msg);
    }
    throw Error(ErrorCode::Internal, msg);
}

class Stmt {
public:
    Stmt(sqlite3* db, std::string_view sql) : db_(db) {
        const int rc =
            sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr);
        if (rc != SQLITE_OK) raise(db, rc, "prepare");
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int idx, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, idx, v));
        return *this;
    }
    Stmt& bind(int idx, int v) { return bind(idx, static_cast<std::int64_t>(v)); }
    Stmt& bind(int idx, bool v) { return bind(idx, static_cast<std::int64_t>(v ? 1 : 0)); }
    Stmt& bind(int idx, std::string_view v) {
        check(sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()),
                                SQLITE_TRANSIENT));
        return *this;
    }
    Stmt& bind(int idx, const std::string& v) { return bind(idx, std::string_view{v}); }
    Stmt& bind(int idx, const char* v) { return bind(idx, std::string_view{v}); }
    Stmt& bind(int idx, std::nullopt_t) {
        check(sqlite3_bind_null(stmt_, idx));
        return *this;
    }
    template <typename T>
    Stmt& bind(int idx, const std::optional<T>& v) {
        return v ? bind(idx, *v) : bind(idx, std::nullopt);
    }

    template <typename... Args>
    Stmt& bind_all(const Args&... args) {
        int idx = 0;
        (bind(++idx, args), ...);
        return *this;
    }

    /// true while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        raise(db_, sqlite3_extended_errcode(db_), "step");
    }

    void run() {
        while (step()) {
        }
    }

    void reset() {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

    std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? std::string{reinterpret_cast<const char*>(p),
                               static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))}
                 : std::string{};
    }
    std::optional<std::int64_t> opt_i64(int col) const {
        if (is_null(col)) return std::nullopt;
        return i64(col);
    }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) raise(db_, rc, "bind");
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, std::string_view sql) {
    char* err = nullptr;
    const int rc = sqlite3_exec(db, std::string{sql}.c_str(), nullptr, nullptr, &err);
    if (rc != SQLITE_OK) {
        sqlite3_free(err);
        raise(db, sqlite3_extended_errcode(db), "exec");
    }
}

std::int64_t millis(Timestamp ts) { return ts.time_since_epoch().count(); }
Timestamp from_millis(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

BloodGroup group_column(const Stmt& s, int col) {
    const std::string text = s.text(col);
    if (auto g = domain::parse_blood_group(text)) return *g;
    throw Error(ErrorCode::InvalidBloodGroup, "stored blood group is invalid: " + text);
}

Date date_column(const Stmt& s, int col) {
    const std::string text = s.text(col);
    if (auto d = domain::parse_date(text)) return *d;
    throw Error(ErrorCode::Internal, "stored date is invalid: " + text);
}

constexpr std::string_view kUserColumns = "user_id, name, email, password_hash, created_at";

UserRow read_user(const Stmt& s, int c = 0) {
    return {s.i64(c), s.text(c + 1), s.text(c + 2), s.text(c + 3), from_millis(s.i64(c + 4))};
}

constexpr std::string_view kDonorColumns =
    "d.donor_id, d.user_id, d.phone, d.city, d.blood_group, d.status, d.available, "
    "d.last_donation_date";

constexpr std::string_view kDonorColumnsBare =
    "donor_id, user_id, phone, city, blood_group, status, available, last_donation_date";

DonorRow read_donor(const Stmt& s, int c = 0) {
    DonorRow d;
    d.donor_id = s.i64(c);
    d.user_id = s.i64(c + 1);
    d.phone = s.text(c + 2);
    d.city = s.text(c + 3);
    d.blood_group = group_column(s, c + 4);
    d.status = domain::parse_donor_status(s.text(c + 5)).value_or(domain::DonorStatus::Inactive);
    d.available = s.i64(c + 6) != 0;
    if (!s.is_null(c + 7)) d.last_donation_date = date_column(s, c + 7);
    return d;
}

constexpr std::string_view kRequestColumns =
    "request_id, patient_id, blood_group, quantity_units, city, status, created_at";

BloodRequestRow read_request(const Stmt& s) {
    BloodRequestRow r;
    r.request_id = s.i64(0);
    r.patient_id = s.i64(1);
    r.blood_group = group_column(s, 2);
    r.quantity_units = static_cast<int>(s.i64(3));
    r.city = s.text(4);
    r.status = parse_request_status(s.text(5)).value_or(RequestStatus::Cancelled);
    r.created_at = from_millis(s.i64(6));
    return r;
}

constexpr std::string_view kMessageColumns =
    "message_id, sender_user_id, recipient_user_id, body, sent_at, read";

MessageRow read_message(const Stmt& s) {
    return {s.i64(0), s.i64(1), s.i64(2), s.text(3), from_millis(s.i64(4)), s.i64(5) != 0};
}

constexpr std::string_view kNotificationColumns =
    "notification_id, user_id, kind, payload, request_id, created_at, read";

NotificationRow read_notification(const Stmt& s) {
    NotificationRow n;
    n.notification_id = s.i64(0);
    n.user_id = s.i64(1);
    n.kind = parse_notification_kind(s.text(2)).value_or(NotificationKind::AdminNotice);
    n.payload = s.text(3);
    n.request_id = s.opt_i64(4);
    n.created_at = from_millis(s.i64(5));
    n.read = s.i64(6) != 0;
    return n;
}

std::string sql(std::initializer_list<std::string_view> parts) {
    std::string out;
    for (auto p : parts) out += p;
    return out;
}

}  // namespace

template <typename Fn>
auto SqliteStore::transaction(Fn&& fn) {
    exec(db_, "BEGIN IMMEDIATE");
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            exec(db_, "COMMIT");
        } else {
            auto result = fn();
            exec(db_, "COMMIT");
            return result;
        }
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
}

SqliteStore::SqliteStore(const std::string& path, std::shared_ptr<const Clock> clock)
    : Store(std::move(clock)) {
    const int rc = sqlite3_open_v2(path.c_str(), &db_,
                                   SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_URI,
                                   nullptr);
    if (rc != SQLITE_OK) {
        const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::StoreUnavailable, "cannot open " + path + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    try {
        exec(db_, "PRAGMA foreign_keys = ON");
        // Touch the file so an unreadable or non-database file fails here.
        exec(db_, "SELECT count(*) FROM sqlite_master");
    } catch (const Error& e) {
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::StoreUnavailable, e.what());
    }
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

int SqliteStore::read_version_locked() {
    Stmt probe(db_, "SELECT count(*) FROM sqlite_master WHERE type = 'table' AND name = 'schema_meta'");
    probe.step();
    if (probe.i64(0) == 0) return 0;
    Stmt s(db_, "SELECT version FROM schema_meta");
    if (!s.step()) return 0;
    return static_cast<int>(s.i64(0));
}

void SqliteStore::require_migrated_locked() {
    if (version_ == kSchemaVersion) return;
    version_ = read_version_locked();
    if (version_ != kSchemaVersion) {
        throw Error(ErrorCode::StoreNotMigrated, "store has not been migrated");
    }
}

MigrationResult SqliteStore::migrate() {
    std::lock_guard lock(mu_);
    return transaction([&]() -> MigrationResult {
        const int current = read_version_locked();
        if (current == kSchemaVersion) return {current, false};
        if (current != 0) {
            throw Error(ErrorCode::SchemaVersionUnknown,
                        "store reports unknown schema version " + std::to_string(current));
        }
        Stmt existing(db_,
                      "SELECT count(*) FROM sqlite_master WHERE type = 'table' "
                      "AND name NOT LIKE 'sqlite_%'");
        existing.step();
        if (existing.i64(0) != 0) {
            throw Error(ErrorCode::SchemaVersionUnknown,
                        "store holds tables but no schema version; refusing to migrate");
        }
        for (auto ddl : kSchema) exec(db_, ddl);
        for (auto ddl : kIndexes) exec(db_, ddl);
        Stmt(db_, "INSERT INTO schema_meta (version) VALUES (?)").bind_all(kSchemaVersion).run();
        version_ = kSchemaVersion;
        return {kSchemaVersion, true};
    });
}

int SqliteStore::schema_version() {
    std::lock_guard lock(mu_);
    return read_version_locked();
}

std::vector<std::string> SqliteStore::tables() {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
           "ORDER BY name");
    std::vector<std::string> out;
    while (s.step()) out.push_back(s.text(0));
    return out;
}

// users -----------------------------------------------------------------------

UserRow SqliteStore::insert_user_locked(const NewUser& user) {
    detail::check_new_user(user);
    Stmt s(db_, sql({"INSERT INTO users (name, email, password_hash, created_at) VALUES (?, ?, ?, ?) "
                     "RETURNING ", kUserColumns}));
    s.bind_all(user.name, user.email, user.password_hash, millis(clock().now()));
    s.step();
    UserRow row = read_user(s);
    s.run();
    return row;
}

UserRow SqliteStore::insert_user(const NewUser& user) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] { return insert_user_locked(user); });
}

std::pair<UserRow, RoleRow> SqliteStore::insert_user_with_role(const NewUser& user,
                                                               const RolePayload& role) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        UserRow u = insert_user_locked(user);
        RoleRow r = upsert_role_locked(u.user_id, role);
        return std::pair{std::move(u), std::move(r)};
    });
}

std::optional<UserRow> SqliteStore::find_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kUserColumns, " FROM users WHERE user_id = ?"}));
    s.bind_all(user_id);
    if (!s.step()) return std::nullopt;
    return read_user(s);
}

std::optional<UserRow> SqliteStore::find_user_by_email(std::string_view email) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kUserColumns, " FROM users WHERE email = ? COLLATE NOCASE"}));
    s.bind_all(email);
    if (!s.step()) return std::nullopt;
    return read_user(s);
}

PageResult<UserRow> SqliteStore::list_users(Page page) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        PageResult<UserRow> out;
        Stmt count(db_, "SELECT count(*) FROM users");
        count.step();
        out.total = static_cast<std::size_t>(count.i64(0));
        Stmt s(db_, sql({"SELECT ", kUserColumns, " FROM users ORDER BY user_id LIMIT ? OFFSET ?"}));
        s.bind_all(static_cast<std::int64_t>(detail::clamp_limit(page.limit)),
                   static_cast<std::int64_t>(page.offset));
        while (s.step()) out.items.push_back(read_user(s));
        return out;
    });
}

void SqliteStore::delete_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    transaction([&] {
        Stmt s(db_, "DELETE FROM users WHERE user_id = ?");
        s.bind_all(user_id).run();
        if (sqlite3_changes(db_) == 0) throw Error(ErrorCode::UnknownUser, "no such user");
    });
}

RoleSet SqliteStore::roles_of(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_,
           "SELECT EXISTS (SELECT 1 FROM admins WHERE user_id = ?1), "
           "EXISTS (SELECT 1 FROM donors WHERE user_id = ?1), "
           "EXISTS (SELECT 1 FROM patients WHERE user_id = ?1)");
    s.bind(1, user_id);
    s.step();
    return {s.i64(0) != 0, s.i64(1) != 0, s.i64(2) != 0};
}

// roles -----------------------------------------------------------------------

RoleRow SqliteStore::upsert_role_locked(Id user_id, const RolePayload& payload) {
    {
        Stmt s(db_, "SELECT 1 FROM users WHERE user_id = ?");
        if (!s.bind_all(user_id).step()) throw Error(ErrorCode::UnknownUser, "no such user");
    }
    return std::visit(
        [&](const auto& p) -> RoleRow {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DonorPayload>) {
                detail::check_donor_payload(p);
                Stmt s(db_, sql({"INSERT INTO donors (user_id, phone, city, blood_group, status, "
                                 "available) VALUES (?, ?, ?, ?, ?, ?) "
                                 "ON CONFLICT (user_id) DO UPDATE SET phone = excluded.phone, "
                                 "city = excluded.city, blood_group = excluded.blood_group, "
                                 "status = excluded.status, available = excluded.available "
                                 "RETURNING ", kDonorColumnsBare}));
                s.bind_all(user_id, p.phone, p.city, domain::to_string(p.blood_group),
                           domain::to_string(p.status), p.available);
                s.step();
                DonorRow row = read_donor(s);
                s.run();
                return row;
            } else if constexpr (std::is_same_v<P, PatientPayload>) {
                detail::check_patient_payload(p);
                Stmt s(db_, "INSERT INTO patients (user_id, phone, city) VALUES (?, ?, ?) "
                            "ON CONFLICT (user_id) DO UPDATE SET phone = excluded.phone, "
                            "city = excluded.city RETURNING patient_id, user_id, phone, city");
                s.bind_all(user_id, p.phone, p.city);
                s.step();
                PatientRow row{s.i64(0), s.i64(1), s.text(2), s.text(3)};
                s.run();
                return row;
            } else {
                Stmt(db_, "INSERT INTO admins (user_id) VALUES (?) ON CONFLICT (user_id) DO NOTHING")
                    .bind_all(user_id)
                    .run();
                Stmt s(db_, "SELECT admin_id, user_id FROM admins WHERE user_id = ?");
                s.bind_all(user_id).step();
                return AdminRow{s.i64(0), s.i64(1)};
            }
        },
        payload);
}

RoleRow SqliteStore::upsert_role(Id user_id, const RolePayload& payload) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] { return upsert_role_locked(user_id, payload); });
}

std::optional<DonorRow> SqliteStore::find_donor_locked(Id donor_id) {
    Stmt s(db_, sql({"SELECT ", kDonorColumns, " FROM donors d WHERE d.donor_id = ?"}));
    s.bind_all(donor_id);
    if (!s.step()) return std::nullopt;
    return read_donor(s);
}

std::optional<DonorRow> SqliteStore::find_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return find_donor_locked(donor_id);
}

std::optional<DonorRow> SqliteStore::find_donor_by_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kDonorColumns, " FROM donors d WHERE d.user_id = ?"}));
    s.bind_all(user_id);
    if (!s.step()) return std::nullopt;
    return read_donor(s);
}

std::optional<DonorListing> SqliteStore::find_donor_listing(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kDonorColumns,
                     ", u.name, u.email FROM donors d JOIN users u ON u.user_id = d.user_id "
                     "WHERE d.donor_id = ?"}));
    s.bind_all(donor_id);
    if (!s.step()) return std::nullopt;
    return DonorListing{read_donor(s), s.text(8), s.text(9)};
}

std::optional<PatientRow> SqliteStore::find_patient(Id patient_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, "SELECT patient_id, user_id, phone, city FROM patients WHERE patient_id = ?");
    s.bind_all(patient_id);
    if (!s.step()) return std::nullopt;
    return PatientRow{s.i64(0), s.i64(1), s.text(2), s.text(3)};
}

std::optional<PatientRow> SqliteStore::find_patient_by_user(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, "SELECT patient_id, user_id, phone, city FROM patients WHERE user_id = ?");
    s.bind_all(user_id);
    if (!s.step()) return std::nullopt;
    return PatientRow{s.i64(0), s.i64(1), s.text(2), s.text(3)};
}

PageResult<DonorListing> SqliteStore::find_donors(const DonorFilter& filter, Page page) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    constexpr std::string_view where =
        " FROM donors d JOIN users u ON u.user_id = d.user_id "
        "WHERE (?1 IS NULL OR d.blood_group = ?1) AND (?2 IS NULL "
        "OR instr(lower(u.name), lower(?2)) > 0 OR instr(lower(d.phone), lower(?2)) > 0 "
        "OR instr(lower(u.email), lower(?2)) > 0 OR instr(lower(d.city), lower(?2)) > 0)";
    std::optional<std::string> group;
    if (filter.blood_group) group.emplace(domain::to_string(*filter.blood_group));

    return transaction([&] {
        PageResult<DonorListing> out;
        Stmt count(db_, sql({"SELECT count(*)", where}));
        count.bind(1, group).bind(2, filter.search);
        count.step();
        out.total = static_cast<std::size_t>(count.i64(0));

        Stmt s(db_, sql({"SELECT ", kDonorColumns, ", u.name, u.email", where,
                         " ORDER BY d.donor_id LIMIT ?3 OFFSET ?4"}));
        s.bind(1, group).bind(2, filter.search);
        s.bind(3, static_cast<std::int64_t>(detail::clamp_limit(page.limit)));
        s.bind(4, static_cast<std::int64_t>(page.offset));
        while (s.step()) out.items.push_back({read_donor(s), s.text(8), s.text(9)});
        return out;
    });
}

std::vector<DonorRow> SqliteStore::all_donors() {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kDonorColumns, " FROM donors d ORDER BY d.donor_id"}));
    std::vector<DonorRow> out;
    while (s.step()) out.push_back(read_donor(s));
    return out;
}

void SqliteStore::delete_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    transaction([&] {
        Stmt(db_, "DELETE FROM donors WHERE donor_id = ?").bind_all(donor_id).run();
        if (sqlite3_changes(db_) == 0) throw Error(ErrorCode::UnknownDonor, "no such donor");
    });
}

// blood requests --------------------------------------------------------------

BloodRequestRow SqliteStore::insert_request(const NewBloodRequest& request) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    detail::check_new_request(request);
    return transaction([&] {
        {
            Stmt p(db_, "SELECT 1 FROM patients WHERE patient_id = ?");
            if (!p.bind_all(request.patient_id).step()) {
                throw Error(ErrorCode::UnknownPatient, "no such patient");
            }
        }
        Stmt s(db_, sql({"INSERT INTO blood_requests (patient_id, blood_group, quantity_units, city, "
                         "status, created_at) VALUES (?, ?, ?, ?, 'OPEN', ?) RETURNING ",
                         kRequestColumns}));
        s.bind_all(request.patient_id, domain::to_string(request.blood_group),
                   request.quantity_units, request.city, millis(clock().now()));
        s.step();
        BloodRequestRow row = read_request(s);
        s.run();
        return row;
    });
}

std::optional<BloodRequestRow> SqliteStore::find_request_locked(Id request_id) {
    Stmt s(db_, sql({"SELECT ", kRequestColumns, " FROM blood_requests WHERE request_id = ?"}));
    s.bind_all(request_id);
    if (!s.step()) return std::nullopt;
    return read_request(s);
}

std::optional<BloodRequestRow> SqliteStore::find_request(Id request_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return find_request_locked(request_id);
}

BloodRequestRow SqliteStore::set_request_status(Id request_id, RequestStatus to) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        auto row = find_request_locked(request_id);
        if (!row) throw Error(ErrorCode::UnknownRequest, "no such request");
        if (!is_legal_transition(row->status, to)) {
            throw Error(ErrorCode::IllegalRequestState,
                        "cannot move request from " + std::string{to_string(row->status)} + " to " +
                            std::string{to_string(to)});
        }
        Stmt(db_, "UPDATE blood_requests SET status = ? WHERE request_id = ?")
            .bind_all(to_string(to), request_id)
            .run();
        row->status = to;
        return *row;
    });
}

std::vector<BloodRequestRow> SqliteStore::list_requests_by_patient(Id patient_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kRequestColumns,
                     " FROM blood_requests WHERE patient_id = ? ORDER BY request_id"}));
    s.bind_all(patient_id);
    std::vector<BloodRequestRow> out;
    while (s.step()) out.push_back(read_request(s));
    return out;
}

PageResult<BloodRequestRow> SqliteStore::list_requests(Page page) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        PageResult<BloodRequestRow> out;
        Stmt count(db_, "SELECT count(*) FROM blood_requests");
        count.step();
        out.total = static_cast<std::size_t>(count.i64(0));
        Stmt s(db_, sql({"SELECT ", kRequestColumns,
                         " FROM blood_requests ORDER BY request_id LIMIT ? OFFSET ?"}));
        s.bind_all(static_cast<std::int64_t>(detail::clamp_limit(page.limit)),
                   static_cast<std::int64_t>(page.offset));
        while (s.step()) out.items.push_back(read_request(s));
        return out;
    });
}

// donations -------------------------------------------------------------------

DonationOutcome SqliteStore::record_donation(Id donor_id, Date donated_on,
                                             std::optional<Id> request_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        auto donor = find_donor_locked(donor_id);
        if (!donor) throw Error(ErrorCode::UnknownDonor, "no such donor");
        if (donated_on > clock().today()) {
            throw Error(ErrorCode::FutureDate, "donation date is in the future");
        }
        std::optional<BloodRequestRow> request;
        if (request_id) {
            request = find_request_locked(*request_id);
            if (!request) throw Error(ErrorCode::UnknownRequest, "no such request");
            if (request->status != RequestStatus::Open &&
                request->status != RequestStatus::Matched) {
                throw Error(ErrorCode::IllegalRequestState,
                            "request is " + std::string{to_string(request->status)});
            }
        }

        DonationOutcome out;
        {
            Stmt s(db_, "INSERT INTO donations (donor_id, request_id, donated_on) VALUES (?, ?, ?) "
                        "RETURNING donation_id");
            s.bind_all(donor_id, request_id, domain::format_date(donated_on));
            s.step();
            out.donation = {s.i64(0), donor_id, request_id, donated_on};
            s.run();
        }

        fault_point(kFaultDonationInserted);

        // ISO dates compare correctly as text.
        Stmt(db_, "UPDATE donors SET last_donation_date = ?1 WHERE donor_id = ?2 AND "
                  "(last_donation_date IS NULL OR last_donation_date < ?1)")
            .bind_all(domain::format_date(donated_on), donor_id)
            .run();
        out.donor = *find_donor_locked(donor_id);

        if (request && request->status == RequestStatus::Matched) {
            Stmt(db_, "UPDATE blood_requests SET status = 'FULFILLED' WHERE request_id = ?")
                .bind_all(*request_id)
                .run();
            request->status = RequestStatus::Fulfilled;
            out.request = request;
        }
        return out;
    });
}

std::vector<DonationRow> SqliteStore::list_donations_by_donor(Id donor_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, "SELECT donation_id, donor_id, request_id, donated_on FROM donations "
                "WHERE donor_id = ? ORDER BY donation_id");
    s.bind_all(donor_id);
    std::vector<DonationRow> out;
    while (s.step()) out.push_back({s.i64(0), s.i64(1), s.opt_i64(2), date_column(s, 3)});
    return out;
}

// messages --------------------------------------------------------------------

MessageRow SqliteStore::insert_message(Id sender, Id recipient, std::string_view body) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    detail::check_message(sender, recipient, body);
    return transaction([&] {
        Stmt exists(db_, "SELECT EXISTS (SELECT 1 FROM users WHERE user_id = ?1), "
                         "EXISTS (SELECT 1 FROM users WHERE user_id = ?2)");
        exists.bind_all(sender, recipient).step();
        if (exists.i64(0) == 0) throw Error(ErrorCode::UnknownUser, "no such sender");
        if (exists.i64(1) == 0) throw Error(ErrorCode::UnknownRecipient, "no such recipient");

        Stmt s(db_, sql({"INSERT INTO messages (sender_user_id, recipient_user_id, body, sent_at) "
                         "VALUES (?, ?, ?, ?) RETURNING ", kMessageColumns}));
        s.bind_all(sender, recipient, body, millis(clock().now()));
        s.step();
        MessageRow row = read_message(s);
        s.run();
        return row;
    });
}

PageResult<MessageRow> SqliteStore::list_conversation(Id user_a, Id user_b, Page page) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    constexpr std::string_view where =
        " FROM messages WHERE (sender_user_id = ?1 AND recipient_user_id = ?2) "
        "OR (sender_user_id = ?2 AND recipient_user_id = ?1)";
    return transaction([&] {
        PageResult<MessageRow> out;
        Stmt count(db_, sql({"SELECT count(*)", where}));
        count.bind_all(user_a, user_b).step();
        out.total = static_cast<std::size_t>(count.i64(0));
        Stmt s(db_, sql({"SELECT ", kMessageColumns, where,
                         " ORDER BY sent_at, message_id LIMIT ?3 OFFSET ?4"}));
        s.bind_all(user_a, user_b, static_cast<std::int64_t>(detail::clamp_limit(page.limit)),
                   static_cast<std::int64_t>(page.offset));
        while (s.step()) out.items.push_back(read_message(s));
        return out;
    });
}

void SqliteStore::mark_messages_read(Id reader, const std::vector<Id>& message_ids) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    transaction([&] {
        Stmt s(db_, "UPDATE messages SET read = 1 WHERE message_id = ? AND recipient_user_id = ?");
        for (Id id : message_ids) {
            s.bind_all(id, reader).run();
            s.reset();
        }
    });
}

// notifications ---------------------------------------------------------------

std::optional<NotificationRow> SqliteStore::insert_notification(const NewNotification& n) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    detail::check_notification(n);
    return transaction([&]() -> std::optional<NotificationRow> {
        {
            Stmt u(db_, "SELECT 1 FROM users WHERE user_id = ?");
            if (!u.bind_all(n.user_id).step()) throw Error(ErrorCode::UnknownUser, "no such user");
        }
        Stmt s(db_, sql({"INSERT INTO notifications (user_id, kind, payload, request_id, created_at) "
                         "VALUES (?, ?, ?, ?, ?) ON CONFLICT DO NOTHING RETURNING ",
                         kNotificationColumns}));
        s.bind_all(n.user_id, to_string(n.kind), n.payload, n.request_id, millis(clock().now()));
        if (!s.step()) return std::nullopt;
        NotificationRow row = read_notification(s);
        s.run();
        return row;
    });
}

std::vector<NotificationRow> SqliteStore::list_notifications(Id user_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, sql({"SELECT ", kNotificationColumns,
                     " FROM notifications WHERE user_id = ? "
                     "ORDER BY created_at DESC, notification_id DESC"}));
    s.bind_all(user_id);
    std::vector<NotificationRow> out;
    while (s.step()) out.push_back(read_notification(s));
    return out;
}

NotificationRow SqliteStore::mark_notification_read(Id user_id, Id notification_id) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    return transaction([&] {
        Stmt s(db_, sql({"UPDATE notifications SET read = 1 WHERE notification_id = ? AND user_id = ? "
                         "RETURNING ", kNotificationColumns}));
        s.bind_all(notification_id, user_id);
        if (!s.step()) throw Error(ErrorCode::UnknownNotification, "no such notification");
        NotificationRow row = read_notification(s);
        s.run();
        return row;
    });
}

// sessions --------------------------------------------------------------------

void SqliteStore::insert_session(const SessionRow& session) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    transaction([&] {
        Stmt u(db_, "SELECT 1 FROM users WHERE user_id = ?");
        if (!u.bind_all(session.user_id).step()) throw Error(ErrorCode::UnknownUser, "no such user");
        Stmt(db_, "INSERT OR REPLACE INTO sessions (token_digest, user_id, created_at, expires_at) "
                  "VALUES (?, ?, ?, ?)")
            .bind_all(session.token_digest, session.user_id, millis(session.created_at),
                      millis(session.expires_at))
            .run();
    });
}

std::optional<SessionRow> SqliteStore::find_session(std::string_view token_digest) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt s(db_, "SELECT token_digest, user_id, created_at, expires_at FROM sessions "
                "WHERE token_digest = ?");
    s.bind_all(token_digest);
    if (!s.step()) return std::nullopt;
    return SessionRow{s.text(0), s.i64(1), from_millis(s.i64(2)), from_millis(s.i64(3))};
}

void SqliteStore::delete_session(std::string_view token_digest) {
    std::lock_guard lock(mu_);
    require_migrated_locked();
    Stmt(db_, "DELETE FROM sessions WHERE token_digest = ?").bind_all(token_digest).run();
}

// -----------------------------------------------------------------------------

std::unique_ptr<Store> open_store(std::string_view url, std::shared_ptr<const Clock> clock) {
    auto strip = [&](std::string_view prefix) {
        if (url.substr(0, prefix.size()) != prefix) return false;
        url.remove_prefix(prefix.size());
        return true;
    };
    if (url == "memory:" || url == "memory://") {
        return std::make_unique<MemoryStore>(std::move(clock));
    }
    if (strip("sqlite://") || strip("sqlite:")) {
        if (url.empty()) throw Error(ErrorCode::StoreUnavailable, "sqlite URL has no path");
        return std::make_unique<SqliteStore>(std::string{url}, std::move(clock));
    }
    if (url.ends_with(".db") || url.ends_with(".sqlite")) {
        return std::make_unique<SqliteStore>(std::string{url}, std::move(clock));
    }
    throw Error(ErrorCode::StoreUnavailable,
                "unsupported DATABASE_URL '" + std::string{url} + "' (expected memory: or sqlite://<path>)");
}

}  // namespace hemobank::store
