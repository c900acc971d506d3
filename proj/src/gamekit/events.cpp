#include <array>
#include <chrono>

#include "wordify/error.hpp"
#include "wordify/game.hpp"

namespace wordify {

Timestamp now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kEventNames = {{
    {EventKind::SoundChoice, "sound_choice"},
    {EventKind::PatternChoice, "pattern_choice"},
    {EventKind::SpellingAttempt, "spelling_attempt"},
    {EventKind::CardFlip, "card_flip"},
    {EventKind::PairResolved, "pair_resolved"},
    {EventKind::Pause, "pause"},
    {EventKind::Resume, "resume"},
    {EventKind::Complete, "complete"},
}};

}  // namespace

std::string_view event_kind_name(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kEventNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<std::string> event_schema_error(const GameEvent& e) {
  bool word = false, submitted = false, correct = false, attempt = false;
  std::size_t cards = 0;
  switch (e.kind) {
    case EventKind::SoundChoice:
    case EventKind::PatternChoice:
    case EventKind::SpellingAttempt:
      word = submitted = correct = attempt = true;
      break;
    case EventKind::CardFlip:
      word = true;
      cards = 1;
      break;
    case EventKind::PairResolved:
      correct = attempt = true;
      cards = 2;
      break;
    case EventKind::Pause:
    case EventKind::Resume:
    case EventKind::Complete:
      break;
  }
  const std::string kind(event_kind_name(e.kind));
  if (e.word_id.has_value() != word) return kind + (word ? " requires" : " must not carry") + " word_id";
  if (e.submitted.has_value() != submitted) return kind + (submitted ? " requires" : " must not carry") + " submitted";
  if (e.correct.has_value() != correct) return kind + (correct ? " requires" : " must not carry") + " correct";
  if (e.stage_attempt.has_value() != attempt) return kind + (attempt ? " requires" : " must not carry") + " stage_attempt";
  if (e.cards.size() != cards) return kind + " requires " + std::to_string(cards) + " card indices";
  if (e.stage_attempt && *e.stage_attempt < 1) return kind + " stage_attempt must be positive";
  return std::nullopt;
}

bool same_ignoring_time(const std::vector<GameEvent>& a, const std::vector<GameEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    GameEvent x = a[i];
    x.timestamp = b[i].timestamp;
    if (!(x == b[i])) return false;
  }
  return true;
}

std::string_view game_kind_name(GameKind kind) { return kind == GameKind::Sorting ? "sorting" : "matching"; }

std::optional<GameKind> parse_game_kind(std::string_view name) {
  if (name == "sorting") return GameKind::Sorting;
  if (name == "matching") return GameKind::Matching;
  return std::nullopt;
}

GameKind kind_of(const GameState& game) {
  return std::holds_alternative<SortingGameState>(game) ? GameKind::Sorting : GameKind::Matching;
}

// Pause and resume are shared by both kinds.
namespace {

template <typename State>
State do_pause(const State& s, Timestamp at) {
  if (s.finished()) throw Error(Errc::GameFinished, "game '" + s.game_id + "' is finished");
  if (s.paused) throw Error(Errc::AlreadyPaused, "game '" + s.game_id + "' is already paused");
  State next = s;
  next.paused = true;
  next.events.push_back(GameEvent{at, EventKind::Pause, {}, {}, {}, {}, {}});
  ++next.version;
  return next;
}

template <typename State>
State do_resume(const State& s, Timestamp at) {
  if (!s.paused) throw Error(Errc::NotPaused, "game '" + s.game_id + "' is not paused");
  State next = s;
  next.paused = false;
  next.events.push_back(GameEvent{at, EventKind::Resume, {}, {}, {}, {}, {}});
  ++next.version;
  return next;
}

}  // namespace

SortingGameState pause_game(const SortingGameState& s, Timestamp at) { return do_pause(s, at); }
MatchingGameState pause_game(const MatchingGameState& s, Timestamp at) { return do_pause(s, at); }
SortingGameState resume_game(const SortingGameState& s, Timestamp at) { return do_resume(s, at); }
MatchingGameState resume_game(const MatchingGameState& s, Timestamp at) { return do_resume(s, at); }

GameState pause_game(const GameState& s, Timestamp at) {
  return std::visit([at](const auto& g) -> GameState { return pause_game(g, at); }, s);
}

GameState resume_game(const GameState& s, Timestamp at) {
  return std::visit([at](const auto& g) -> GameState { return resume_game(g, at); }, s);
}

const std::string& game_id_of(const GameState& game) {
  return std::visit([](const auto& g) -> const std::string& { return g.game_id; }, game);
}

std::uint64_t version_of(const GameState& game) {
  return std::visit([](const auto& g) { return g.version; }, game);
}

bool is_finished(const GameState& game) {
  return std::visit([](const auto& g) { return g.finished(); }, game);
}

bool is_paused(const GameState& game) {
  return std::visit([](const auto& g) { return g.paused; }, game);
}

const std::vector<GameEvent>& events_of(const GameState& game) {
  return std::visit([](const auto& g) -> const std::vector<GameEvent>& { return g.events; }, game);
}

Timestamp created_at_of(const GameState& game) {
  return std::visit([](const auto& g) { return g.created_at; }, game);
}

}  // namespace wordify
