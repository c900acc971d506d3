#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wordify/lexicon.hpp"
#include "wordify/roster.hpp"

namespace wordify {

struct StoredGame {
  std::string game_id;
  std::string owner_id;
  std::string kind;
  std::string document;  // serialized game; its "version" equals `version`
  std::uint64_t version = 0;
};

struct AudioAsset {
  std::string key;
  std::string media_type;
  std::string bytes;
};

std::string media_type_for(std::string_view key);

// Durable state shared by every service replica. Implementations must make
// each call atomic and let transaction() group several calls into one.
class Store {
 public:
  virtual ~Store() = default;

  virtual void transaction(const std::function<void()>& body) = 0;

  // Key used to sign bearer tokens; created with the store.
  virtual std::string token_secret() = 0;

  virtual void replace_lexicon(const Lexicon& lexicon) = 0;
  // Bumped by every replace_lexicon.
  virtual std::int64_t lexicon_revision() = 0;
  virtual Lexicon load_lexicon() = 0;

  virtual void put_audio(const AudioAsset& asset) = 0;
  virtual std::optional<AudioAsset> get_audio(std::string_view key) = 0;

  virtual std::vector<User> load_users() = 0;
  virtual void insert_user(const User& user) = 0;

  virtual std::string allocate_game_id() = 0;
  virtual void insert_game(const StoredGame& game, std::string_view action) = 0;
  virtual std::optional<StoredGame> get_game(std::string_view game_id) = 0;
  // Compare-and-set on the stored version. Returns false, leaving the game
  // untouched, when the stored version is not `expected_version`.
  virtual bool update_game(std::string_view game_id, std::uint64_t expected_version, const std::string& document,
                           std::uint64_t new_version, std::string_view action) = 0;
  virtual std::vector<StoredGame> games_owned_by(std::string_view owner_id) = 0;
  // Versions recorded for a game, ascending.
  virtual std::vector<std::uint64_t> game_versions(std::string_view game_id) = 0;
};

// Opens a SQLite-backed store. With create=false the file must already be an
// initialized store; otherwise Errc::StorageFailure.
std::unique_ptr<Store> open_sqlite_store(const std::string& path, bool create);

}  // namespace wordify
