#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wordify/game.hpp"
#include "wordify/lexicon.hpp"
#include "wordify/roster.hpp"

namespace wordify {

enum class PolicyKind { Scripted, AlwaysCorrect, UniformRandom };

struct SimPolicy {
  PolicyKind kind = PolicyKind::AlwaysCorrect;
  std::uint64_t seed = 0;
  // Scripted only. Same shape as the API's action objects:
  //   {"type": "sound_choice", "category": ...}, {"type": "pattern_choice", "pattern": ...},
  //   {"type": "spelling", "text": ...}, {"type": "flip", "index": n},
  //   {"type": "pause"}, {"type": "resume"}
  std::vector<nlohmann::json> actions;
};

struct SimScript {
  GameKind kind = GameKind::Sorting;
  nlohmann::json config = nlohmann::json::object();
  SimPolicy policy;
  std::string game_id = "sim-1";
  Timestamp start_at = 1'700'000'000'000;  // the simulated clock ticks one second per action
  std::size_t max_actions = 100'000;
};

// Throws ConfigInvalid, including for scripted actions that do not fit the kind.
SimScript sim_script_from_json(const nlohmann::json& doc);
nlohmann::json sim_script_to_json(const SimScript& script);

struct SimResult {
  GameState final_state;
  std::size_t actions = 0;
  std::vector<std::string> violations;  // runtime invariant failures
  ProgressRecord progress;
};

// Student id under which simulated progress is recorded.
inline constexpr std::string_view kSimStudentId = "sim-student";

// Plays one game to the end (or to the end of the script). Rejected scripted
// actions propagate as wordify::Error.
SimResult simulate(const SimScript& script, const Lexicon& lexicon);

// One action in the scripted/API shape applied to a game.
Step<GameState> apply_action(const GameState& game, const nlohmann::json& action, Timestamp at);

nlohmann::json to_json(const SimResult& result);

}  // namespace wordify
