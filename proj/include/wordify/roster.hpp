#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wordify/game.hpp"

namespace wordify {

enum class Role { Student, Teacher, Administrator, Developer, SystemAdministrator };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

struct User {
  std::string id;
  std::string display_name;
  Role role = Role::Student;
  std::string credential_hash;
  std::optional<std::string> teacher_id;  // students only
  std::optional<std::string> school_id;

  bool operator==(const User&) const = default;
};

// Public view of a user; never includes credential material.
nlohmann::json user_to_json(const User& user);

struct NewUserRequest {
  std::string name;
  std::string role;
  std::string credential;
  std::optional<std::string> teacher_id;
  std::optional<std::string> school_id;
};

// PBKDF2-HMAC-SHA256 with a random 16-byte salt, encoded as
// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
std::string hash_credential(std::string_view credential);
bool verify_credential(std::string_view credential, std::string_view encoded);

class Roster {
 public:
  Roster() = default;
  explicit Roster(std::vector<User> users);

  // Assigns the next "u-<n>" id. Throws InvalidRole, UnknownTeacher,
  // DuplicateName (same display name within the same school).
  const User& create_user(const NewUserRequest& request);

  const User* find(std::string_view id) const;
  // Returns the user whose name and credential match, if exactly one does.
  const User* authenticate(std::string_view name, std::string_view credential,
                           const std::optional<std::string>& school_id = std::nullopt) const;
  std::vector<const User*> students_of(std::string_view teacher_id) const;
  std::vector<const User*> all() const;

 private:
  std::map<std::string, User, std::less<>> users_;
  long next_serial_ = 1;
};

// ---------------------------------------------------------------------------
// Progress
// ---------------------------------------------------------------------------

struct Tally {
  int correct = 0;
  int incorrect = 0;

  Tally& operator+=(const Tally& o) {
    correct += o.correct;
    incorrect += o.incorrect;
    return *this;
  }
  bool operator==(const Tally&) const = default;
};

// Stage keys of WordProgress::attempts.
inline constexpr std::string_view kStageSound = "sound";
inline constexpr std::string_view kStagePattern = "pattern";
inline constexpr std::string_view kStageSpell = "spell";
inline constexpr std::string_view kStageFlip = "flip";

struct WordProgress {
  std::string word_id;
  std::map<std::string, int, std::less<>> attempts;  // stage -> attempt count

  bool operator==(const WordProgress&) const = default;
};

struct ProgressRecord {
  std::string student_id;
  std::string game_id;
  GameKind game_kind = GameKind::Sorting;
  Timestamp started_at = 0;
  std::optional<Timestamp> finished_at;
  std::vector<WordProgress> per_word;  // first-seen order
  std::map<std::string, Tally, std::less<>> per_pattern;
  std::map<std::string, Tally, std::less<>> per_category;

  bool operator==(const ProgressRecord&) const = default;
};

struct OwnedGame {
  std::string owner_id;
  GameState state;
};

// Folds the game's event log into a record. Choice events count against
// the submitted category or pattern; a matching pair counts against the
// category of the first card turned. Throws OrphanGame when the owner is
// not a student on the roster.
ProgressRecord build_progress(const GameState& game, std::string_view owner_id, const Roster& roster);

// Element-wise sums over any number of records.
struct ProgressTotals {
  int games = 0;
  std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>> per_word;
  std::map<std::string, Tally, std::less<>> per_pattern;
  std::map<std::string, Tally, std::less<>> per_category;

  void add(const ProgressRecord& record);
  void add(const ProgressTotals& other);
  bool operator==(const ProgressTotals&) const = default;
};

struct StudentSummary {
  std::string student_id;
  std::string display_name;
  ProgressTotals totals;
};

struct ClassReport {
  std::string teacher_id;
  std::vector<StudentSummary> students;  // ordered by display name, then id
  ProgressTotals totals;
};

// Throws UnknownTeacher. Games owned by non-students of this teacher are ignored.
ClassReport class_report(const Roster& roster, std::string_view teacher_id, std::span<const OwnedGame> games);

nlohmann::json to_json(const ProgressRecord& record);
nlohmann::json to_json(const ProgressTotals& totals);
// anonymize replaces student ids and names with "student-<n>".
nlohmann::json to_json(const ClassReport& report, bool anonymize = false);

// CSV with header student_id,game_id,word_id,stage,attempts; one row per
// (student, game, word, stage).
std::string progress_csv(std::span<const ProgressRecord> records);

}  // namespace wordify
