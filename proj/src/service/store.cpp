#include "wordify/store.hpp"

#include <openssl/rand.h>
#include <sqlite3.h>

#include <array>
#include <filesystem>
#include <mutex>

#include "wordify/error.hpp"

namespace wordify {

std::string media_type_for(std::string_view key) {
  auto ends = [&](std::string_view ext) { return key.ends_with(ext); };
  if (ends(".wav")) return "audio/wav";
  if (ends(".mp3")) return "audio/mpeg";
  if (ends(".ogg")) return "audio/ogg";
  if (ends(".m4a")) return "audio/mp4";
  return "application/octet-stream";
}

namespace {

constexpr std::string_view kSchemaTag = "wordify-store-1";

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS words (id TEXT PRIMARY KEY, seq INTEGER NOT NULL, record TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS audio (key TEXT PRIMARY KEY, media_type TEXT NOT NULL, bytes BLOB NOT NULL);
CREATE TABLE IF NOT EXISTS users (
  id TEXT PRIMARY KEY, name TEXT NOT NULL, role TEXT NOT NULL, credential_hash TEXT NOT NULL,
  teacher_id TEXT, school_id TEXT);
CREATE TABLE IF NOT EXISTS games (
  id TEXT PRIMARY KEY, owner_id TEXT NOT NULL, kind TEXT NOT NULL, document TEXT NOT NULL,
  version INTEGER NOT NULL);
CREATE INDEX IF NOT EXISTS games_owner ON games (owner_id);
CREATE TABLE IF NOT EXISTS game_history (
  game_id TEXT NOT NULL, version INTEGER NOT NULL, action TEXT NOT NULL, PRIMARY KEY (game_id, version));
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(Errc::StorageFailure, what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db, std::string("prepare ") + sql);
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view v) {
    check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Statement& bind_optional(int i, const std::optional<std::string>& v) {
    check(v ? sqlite3_bind_text(stmt_, i, v->data(), static_cast<int>(v->size()), SQLITE_TRANSIENT)
            : sqlite3_bind_null(stmt_, i));
    return *this;
  }
  Statement& bind_blob(int i, std::string_view v) {
    check(sqlite3_bind_blob(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }

  // True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step");
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::optional<std::string> optional_text(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return text(col);
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  std::string blob(int col) const {
    const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) fail(db_, "bind");
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::string random_secret() {
  std::array<unsigned char, 32> bytes{};
  if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
    throw Error(Errc::StorageFailure, "no randomness for token secret");
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

class SqliteStore final : public Store {
 public:
  SqliteStore(const std::string& path, bool create) {
    if (!create && !std::filesystem::exists(path)) throw Error(Errc::StorageFailure, "no store at '" + path + "'");
    const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_FULLMUTEX | (create ? SQLITE_OPEN_CREATE : 0);
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "open failed";
      sqlite3_close(db_);
      db_ = nullptr;
      throw Error(Errc::StorageFailure, "cannot open '" + path + "': " + msg);
    }
    sqlite3_busy_timeout(db_, 10000);
    try {
      exec("PRAGMA journal_mode=WAL");
      exec("PRAGMA foreign_keys=ON");
      if (create) {
        transaction([&] {
          exec(kSchema);
          Statement(db_, "INSERT OR IGNORE INTO meta (key, value) VALUES ('schema', ?)").bind(1, kSchemaTag).step();
          Statement(db_, "INSERT OR IGNORE INTO meta (key, value) VALUES ('token_secret', ?)")
              .bind(1, random_secret())
              .step();
          exec("INSERT OR IGNORE INTO meta (key, value) VALUES ('lexicon_revision', '0')");
          exec("INSERT OR IGNORE INTO meta (key, value) VALUES ('next_game', '1')");
        });
      }
      if (meta("schema").value_or("") != kSchemaTag) {
        throw Error(Errc::StorageFailure, "'" + path + "' is not an initialized store");
      }
    } catch (const Error& e) {
      sqlite3_close(db_);
      db_ = nullptr;
      if (e.code() == Errc::StorageFailure && std::string_view(e.detail()).find("initialized") != std::string::npos) {
        throw;
      }
      throw Error(Errc::StorageFailure, "'" + path + "' is not a usable store (" + e.detail() + ")");
    }
  }

  ~SqliteStore() override { sqlite3_close(db_); }

  void transaction(const std::function<void()>& body) override {
    std::lock_guard lock(mu_);
    if (depth_ > 0) {
      ++depth_;
      try {
        body();
      } catch (...) {
        --depth_;
        throw;
      }
      --depth_;
      return;
    }
    exec("BEGIN IMMEDIATE");
    depth_ = 1;
    try {
      body();
    } catch (...) {
      depth_ = 0;
      sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
      throw;
    }
    depth_ = 0;
    exec("COMMIT");
  }

  std::string token_secret() override {
    std::lock_guard lock(mu_);
    auto s = meta("token_secret");
    if (!s) throw Error(Errc::StorageFailure, "store has no token secret");
    return *s;
  }

  void replace_lexicon(const Lexicon& lexicon) override {
    transaction([&] {
      exec("DELETE FROM words");
      std::int64_t seq = 0;
      for (const Word* w : lexicon.ordered()) {
        Statement(db_, "INSERT INTO words (id, seq, record) VALUES (?, ?, ?)")
            .bind(1, w->id)
            .bind(2, seq++)
            .bind(3, word_to_json(*w).dump())
            .step();
      }
      set_meta("categories", lexicon.categories().to_json().dump());
      set_meta("patterns", lexicon.patterns().to_json().dump());
      set_meta("lexicon_revision", std::to_string(lexicon_revision() + 1));
    });
  }

  std::int64_t lexicon_revision() override {
    std::lock_guard lock(mu_);
    return std::stoll(meta("lexicon_revision").value_or("0"));
  }

  Lexicon load_lexicon() override {
    std::lock_guard lock(mu_);
    auto categories = meta("categories");
    auto patterns = meta("patterns");
    Lexicon lex(categories ? CategoryRegistry::from_json(nlohmann::json::parse(*categories))
                           : CategoryRegistry::standard(),
                patterns ? PatternCatalog::from_json(nlohmann::json::parse(*patterns)) : PatternCatalog::standard());
    Statement q(db_, "SELECT record FROM words ORDER BY seq");
    while (q.step()) lex.add(word_from_json(nlohmann::json::parse(q.text(0))));
    return lex;
  }

  void put_audio(const AudioAsset& asset) override {
    std::lock_guard lock(mu_);
    Statement(db_, "INSERT OR REPLACE INTO audio (key, media_type, bytes) VALUES (?, ?, ?)")
        .bind(1, asset.key)
        .bind(2, asset.media_type)
        .bind_blob(3, asset.bytes)
        .step();
  }

  std::optional<AudioAsset> get_audio(std::string_view key) override {
    std::lock_guard lock(mu_);
    Statement q(db_, "SELECT media_type, bytes FROM audio WHERE key = ?");
    q.bind(1, key);
    if (!q.step()) return std::nullopt;
    return AudioAsset{std::string(key), q.text(0), q.blob(1)};
  }

  std::vector<User> load_users() override {
    std::lock_guard lock(mu_);
    std::vector<User> out;
    Statement q(db_, "SELECT id, name, role, credential_hash, teacher_id, school_id FROM users ORDER BY id");
    while (q.step()) {
      User u;
      u.id = q.text(0);
      u.display_name = q.text(1);
      const auto role = parse_role(q.text(2));
      if (!role) throw Error(Errc::StorageFailure, "user '" + u.id + "' has unknown role");
      u.role = *role;
      u.credential_hash = q.text(3);
      u.teacher_id = q.optional_text(4);
      u.school_id = q.optional_text(5);
      out.push_back(std::move(u));
    }
    return out;
  }

  void insert_user(const User& u) override {
    std::lock_guard lock(mu_);
    Statement(db_,
              "INSERT INTO users (id, name, role, credential_hash, teacher_id, school_id) VALUES (?, ?, ?, ?, ?, ?)")
        .bind(1, u.id)
        .bind(2, u.display_name)
        .bind(3, role_name(u.role))
        .bind(4, u.credential_hash)
        .bind_optional(5, u.teacher_id)
        .bind_optional(6, u.school_id)
        .step();
  }

  std::string allocate_game_id() override {
    std::string id;
    transaction([&] {
      const auto next = std::stoll(meta("next_game").value_or("1"));
      set_meta("next_game", std::to_string(next + 1));
      id = "g-" + std::to_string(next);
    });
    return id;
  }

  void insert_game(const StoredGame& g, std::string_view action) override {
    transaction([&] {
      Statement(db_, "INSERT INTO games (id, owner_id, kind, document, version) VALUES (?, ?, ?, ?, ?)")
          .bind(1, g.game_id)
          .bind(2, g.owner_id)
          .bind(3, g.kind)
          .bind(4, g.document)
          .bind(5, static_cast<std::int64_t>(g.version))
          .step();
      record_history(g.game_id, g.version, action);
    });
  }

  std::optional<StoredGame> get_game(std::string_view game_id) override {
    std::lock_guard lock(mu_);
    Statement q(db_, "SELECT id, owner_id, kind, document, version FROM games WHERE id = ?");
    q.bind(1, game_id);
    if (!q.step()) return std::nullopt;
    return read_game(q);
  }

  bool update_game(std::string_view game_id, std::uint64_t expected_version, const std::string& document,
                   std::uint64_t new_version, std::string_view action) override {
    bool updated = false;
    transaction([&] {
      Statement(db_, "UPDATE games SET document = ?, version = ? WHERE id = ? AND version = ?")
          .bind(1, document)
          .bind(2, static_cast<std::int64_t>(new_version))
          .bind(3, game_id)
          .bind(4, static_cast<std::int64_t>(expected_version))
          .step();
      updated = sqlite3_changes(db_) == 1;
      if (updated) record_history(game_id, new_version, action);
    });
    return updated;
  }

  std::vector<StoredGame> games_owned_by(std::string_view owner_id) override {
    std::lock_guard lock(mu_);
    std::vector<StoredGame> out;
    Statement q(db_, "SELECT id, owner_id, kind, document, version FROM games WHERE owner_id = ? ORDER BY rowid");
    q.bind(1, owner_id);
    while (q.step()) out.push_back(read_game(q));
    return out;
  }

  std::vector<std::uint64_t> game_versions(std::string_view game_id) override {
    std::lock_guard lock(mu_);
    std::vector<std::uint64_t> out;
    Statement q(db_, "SELECT version FROM game_history WHERE game_id = ? ORDER BY version");
    q.bind(1, game_id);
    while (q.step()) out.push_back(static_cast<std::uint64_t>(q.integer(0)));
    return out;
  }

 private:
  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(Errc::StorageFailure, msg);
    }
  }

  std::optional<std::string> meta(std::string_view key) {
    Statement q(db_, "SELECT value FROM meta WHERE key = ?");
    q.bind(1, key);
    if (!q.step()) return std::nullopt;
    return q.text(0);
  }

  void set_meta(std::string_view key, std::string_view value) {
    Statement(db_, "INSERT OR REPLACE INTO meta (key, value) VALUES (?, ?)").bind(1, key).bind(2, value).step();
  }

  void record_history(std::string_view game_id, std::uint64_t version, std::string_view action) {
    Statement(db_, "INSERT INTO game_history (game_id, version, action) VALUES (?, ?, ?)")
        .bind(1, game_id)
        .bind(2, static_cast<std::int64_t>(version))
        .bind(3, action)
        .step();
  }

  static StoredGame read_game(const Statement& q) {
    return StoredGame{q.text(0), q.text(1), q.text(2), q.text(3), static_cast<std::uint64_t>(q.integer(4))};
  }

  sqlite3* db_ = nullptr;
  std::recursive_mutex mu_;
  int depth_ = 0;
};

}  // namespace

std::unique_ptr<Store> open_sqlite_store(const std::string& path, bool create) {
  return std::make_unique<SqliteStore>(path, create);
}

}  // namespace wordify
