#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wordify/lexicon.hpp"
#include "wordify/pattern.hpp"

namespace wordify {

using Timestamp = std::int64_t;  // milliseconds since the Unix epoch

Timestamp now_ms();

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

enum class EventKind { SoundChoice, PatternChoice, SpellingAttempt, CardFlip, PairResolved, Pause, Resume, Complete };

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

// Field presence per kind:
//   SoundChoice, PatternChoice, SpellingAttempt  word_id submitted correct stage_attempt
//   CardFlip                                     word_id cards[1]
//   PairResolved                                 correct stage_attempt cards[2]
//   Pause, Resume, Complete                      (none)
struct GameEvent {
  Timestamp timestamp = 0;
  EventKind kind = EventKind::Pause;
  std::optional<std::string> word_id;
  std::optional<std::string> submitted;
  std::optional<bool> correct;
  std::optional<int> stage_attempt;
  std::vector<std::size_t> cards;

  bool operator==(const GameEvent&) const = default;
};

// Empty when the event carries exactly the fields its kind requires.
std::optional<std::string> event_schema_error(const GameEvent& event);

bool same_ignoring_time(const std::vector<GameEvent>& a, const std::vector<GameEvent>& b);

// Result of a play action, as shown to the player.
struct Outcome {
  std::optional<bool> correct;
  bool advanced = false;  // stage moved forward, or a pair was matched
  bool finished = false;
  std::vector<std::size_t> revealed;  // card indices turned over by this action

  bool operator==(const Outcome&) const = default;
};

template <typename State>
struct Step {
  State state;
  Outcome outcome;
};

// ---------------------------------------------------------------------------
// Word Sorting: per word, sound category -> spelling pattern -> spelling.
// ---------------------------------------------------------------------------

struct SortingConfig {
  std::string category_a;
  std::string category_b;
  std::map<std::string, std::vector<NamedPattern>> patterns;  // per category, button order
  std::vector<std::string> word_ids;
  std::uint64_t seed = 0;

  bool operator==(const SortingConfig&) const = default;
};

enum class SortingStage { SoundSort, PatternChoice, Spelling, Finished };

std::string_view stage_name(SortingStage stage);
std::optional<SortingStage> parse_stage(std::string_view name);

// Answers for one word, derived from the lexicon; never serialized.
struct SortingAnswer {
  std::string word_id;
  std::string spelling;
  std::string category;
  std::string pattern;

  bool operator==(const SortingAnswer&) const = default;
};

struct SortingGameState {
  std::string game_id;
  SortingConfig config;
  std::vector<std::string> word_order;
  std::size_t cursor = 0;
  SortingStage stage = SortingStage::SoundSort;
  int attempts_this_stage = 0;
  bool paused = false;
  std::vector<GameEvent> events;
  std::uint64_t version = 0;
  Timestamp created_at = 0;
  std::vector<SortingAnswer> answers;  // parallel to word_order

  bool finished() const noexcept { return stage == SortingStage::Finished; }
  // Throws GameFinished once every word is done.
  const SortingAnswer& current() const;

  bool operator==(const SortingGameState&) const = default;
};

// Throws ConfigInvalid.
SortingGameState new_sorting_game(const SortingConfig& config, const Lexicon& lexicon, std::string game_id,
                                  Timestamp at = now_ms());

Step<SortingGameState> submit_sound_choice(const SortingGameState& s, std::string_view category,
                                           Timestamp at = now_ms());
Step<SortingGameState> submit_pattern_choice(const SortingGameState& s, std::string_view pattern,
                                             Timestamp at = now_ms());
Step<SortingGameState> submit_spelling(const SortingGameState& s, std::string_view text, Timestamp at = now_ms());

// Trimmed and lowercased; what submit_spelling compares against the word.
std::string normalize_answer(std::string_view text);

// ---------------------------------------------------------------------------
// Word Matching: any two face-up cards of the same category form a pair.
// ---------------------------------------------------------------------------

struct MatchingConfig {
  std::vector<std::string> contrast;
  int cards_per_category = 2;
  std::map<std::string, std::vector<std::string>> word_pool;
  std::uint64_t seed = 0;

  bool operator==(const MatchingConfig&) const = default;
};

enum class CardStatus { FaceDown, FaceUp, Matched };

std::string_view card_status_name(CardStatus status);
std::optional<CardStatus> parse_card_status(std::string_view name);

struct Card {
  std::string word_id;
  std::string category;
  CardStatus status = CardStatus::FaceDown;

  bool operator==(const Card&) const = default;
};

struct MatchingGameState {
  std::string game_id;
  MatchingConfig config;
  std::vector<Card> cards;
  std::vector<std::size_t> face_up;
  int pairs_attempted = 0;
  bool paused = false;
  std::vector<GameEvent> events;
  std::uint64_t version = 0;
  Timestamp created_at = 0;

  std::size_t matched_count() const noexcept;
  bool finished() const noexcept { return !cards.empty() && matched_count() == cards.size(); }

  bool operator==(const MatchingGameState&) const = default;
};

// Throws ConfigInvalid or PoolTooSmall.
MatchingGameState new_matching_game(const MatchingConfig& config, const Lexicon& lexicon, std::string game_id,
                                    Timestamp at = now_ms());

Step<MatchingGameState> flip_card(const MatchingGameState& s, std::size_t index, Timestamp at = now_ms());

// ---------------------------------------------------------------------------
// Shared
// ---------------------------------------------------------------------------

using GameState = std::variant<SortingGameState, MatchingGameState>;

enum class GameKind { Sorting, Matching };

std::string_view game_kind_name(GameKind kind);
std::optional<GameKind> parse_game_kind(std::string_view name);
GameKind kind_of(const GameState& game);

SortingGameState pause_game(const SortingGameState& s, Timestamp at = now_ms());
MatchingGameState pause_game(const MatchingGameState& s, Timestamp at = now_ms());
SortingGameState resume_game(const SortingGameState& s, Timestamp at = now_ms());
MatchingGameState resume_game(const MatchingGameState& s, Timestamp at = now_ms());

GameState pause_game(const GameState& s, Timestamp at = now_ms());
GameState resume_game(const GameState& s, Timestamp at = now_ms());

const std::string& game_id_of(const GameState& game);
std::uint64_t version_of(const GameState& game);
bool is_finished(const GameState& game);
bool is_paused(const GameState& game);
const std::vector<GameEvent>& events_of(const GameState& game);
Timestamp created_at_of(const GameState& game);

// Versioned JSON document holding config, state and the full event log.
inline constexpr int kGameSchemaVersion = 1;

nlohmann::json serialize_game(const SortingGameState& s);
nlohmann::json serialize_game(const MatchingGameState& s);
nlohmann::json serialize_game(const GameState& s);

// Throws SchemaMismatch or UnknownWordId.
GameState deserialize_game(const nlohmann::json& doc, const Lexicon& lexicon);

// Config codecs shared by the service and the simulator. Omitted pattern
// sets and word pools are filled from the lexicon.
nlohmann::json sorting_config_to_json(const SortingConfig& config);
nlohmann::json matching_config_to_json(const MatchingConfig& config);
SortingConfig sorting_config_from_json(const nlohmann::json& doc, const Lexicon& lexicon);
MatchingConfig matching_config_from_json(const nlohmann::json& doc, const Lexicon& lexicon);

}  // namespace wordify
