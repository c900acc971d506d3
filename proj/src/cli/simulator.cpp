#include "wordify/simulator.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "wordify/error.hpp"
#include "wordify/rng.hpp"

namespace wordify {

using nlohmann::json;

namespace {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Scripted: return "scripted";
    case PolicyKind::AlwaysCorrect: return "always_correct";
    case PolicyKind::UniformRandom: return "uniform_random";
  }
  return "unknown";
}

std::string text_field(const json& action, const char* key) {
  auto it = action.find(key);
  if (it == action.end() || !it->is_string()) {
    throw Error(Errc::ConfigInvalid, std::string("action needs a string '") + key + "'");
  }
  return it->get<std::string>();
}

// Checks an action's shape against the game kind without applying it.
void check_action_shape(const json& action, GameKind kind) {
  if (!action.is_object()) throw Error(Errc::ConfigInvalid, "action must be an object");
  const auto type = text_field(action, "type");
  const bool sorting = kind == GameKind::Sorting;
  if (type == "sound_choice" && sorting) return (void)text_field(action, "category");
  if (type == "pattern_choice" && sorting) return (void)text_field(action, "pattern");
  if (type == "spelling" && sorting) return (void)text_field(action, "text");
  if (type == "flip" && !sorting) {
    auto it = action.find("index");
    if (it == action.end() || !it->is_number_unsigned()) {
      throw Error(Errc::ConfigInvalid, "flip needs a non-negative integer 'index'");
    }
    return;
  }
  if (type == "pause" || type == "resume") return;
  throw Error(Errc::ConfigInvalid,
              "action '" + type + "' does not apply to " + std::string(game_kind_name(kind)) + " games");
}

void round_trip(const GameState& game, const Lexicon& lexicon, std::vector<std::string>& out) {
  try {
    if (deserialize_game(serialize_game(game), lexicon) != game) out.push_back("document round trip changed the state");
  } catch (const Error& e) {
    out.push_back(std::string("document round trip failed: ") + e.what());
  }
}

std::optional<EventKind> event_for(const std::string& action_type) {
  if (action_type == "sound_choice") return EventKind::SoundChoice;
  if (action_type == "pattern_choice") return EventKind::PatternChoice;
  if (action_type == "spelling") return EventKind::SpellingAttempt;
  if (action_type == "flip") return EventKind::CardFlip;
  if (action_type == "pause") return EventKind::Pause;
  if (action_type == "resume") return EventKind::Resume;
  return std::nullopt;
}

// State carried across steps for the checks that look back over the log.
struct StepChecker {
  std::set<std::string> pattern_solved;  // words with a correct pattern choice so far

  std::vector<std::string> check(const GameState& before, const GameState& after, const json& action) {
    std::vector<std::string> out;
    if (version_of(after) != version_of(before) + 1) {
      out.push_back("version went from " + std::to_string(version_of(before)) + " to " +
                    std::to_string(version_of(after)));
    }
    const auto& old_events = events_of(before);
    const auto& new_events = events_of(after);
    if (new_events.size() <= old_events.size() || !std::equal(old_events.begin(), old_events.end(), new_events.begin())) {
      out.push_back("event log was not extended append-only");
      return out;
    }

    const auto expected = event_for(action.value("type", std::string()));
    const auto produced = std::count_if(new_events.begin() + static_cast<std::ptrdiff_t>(old_events.size()),
                                        new_events.end(), [&](const GameEvent& e) { return e.kind == expected; });
    if (produced != 1) out.push_back("action logged " + std::to_string(produced) + " events of its kind");

    const auto* m = std::get_if<MatchingGameState>(&after);
    for (std::size_t i = old_events.size(); i < new_events.size(); ++i) {
      const auto& e = new_events[i];
      if (auto err = event_schema_error(e)) out.push_back("event " + std::to_string(i) + ": " + *err);
      if (e.kind == EventKind::PatternChoice && e.correct == true && e.word_id) pattern_solved.insert(*e.word_id);
      if (e.kind == EventKind::SpellingAttempt && e.word_id && !pattern_solved.count(*e.word_id)) {
        out.push_back("spelling attempt on " + *e.word_id + " before its pattern was chosen");
      }
      if (e.kind == EventKind::PairResolved && e.correct == true && m && e.cards.size() == 2 &&
          m->cards[e.cards[0]].category != m->cards[e.cards[1]].category) {
        out.push_back("pair of different categories resolved as correct");
      }
      if (e.kind == EventKind::Complete && i + 1 != new_events.size()) out.push_back("events after complete");
    }
    const bool complete_logged = new_events.back().kind == EventKind::Complete;
    if (is_finished(after) != complete_logged) out.push_back("complete event disagrees with finished state");

    if (const auto* s = std::get_if<SortingGameState>(&after)) {
      const auto& prev = std::get<SortingGameState>(before);
      if (s->cursor < prev.cursor) out.push_back("cursor moved backwards");
      if (s->cursor > s->word_order.size()) out.push_back("cursor past the last word");
      if (s->finished() != (s->cursor == s->word_order.size())) out.push_back("finished flag disagrees with cursor");
    } else if (m) {
      if (m->matched_count() < std::get<MatchingGameState>(before).matched_count()) {
        out.push_back("matched count decreased");
      }
      if (m->face_up.size() > 1) out.push_back("more than one unresolved face-up card");
      const auto face_up = std::count_if(m->cards.begin(), m->cards.end(),
                                         [](const Card& c) { return c.status == CardStatus::FaceUp; });
      if (static_cast<std::size_t>(face_up) != m->face_up.size()) out.push_back("face-up list disagrees with cards");
      std::map<std::string, int> matched;
      for (const auto& c : m->cards) {
        if (c.status == CardStatus::Matched) ++matched[c.category];
      }
      for (const auto& [cat, n] : matched) {
        if (n % 2 != 0) out.push_back("odd number of matched cards in " + cat);
      }
    }
    return out;
  }
};

json next_sorting_action(const SortingGameState& s, const SimScript& script, Lcg64& rng) {
  const auto& answer = s.current();
  if (script.policy.kind == PolicyKind::AlwaysCorrect) {
    switch (s.stage) {
      case SortingStage::SoundSort: return {{"type", "sound_choice"}, {"category", answer.category}};
      case SortingStage::PatternChoice: return {{"type", "pattern_choice"}, {"pattern", answer.pattern}};
      default: return {{"type", "spelling"}, {"text", answer.spelling}};
    }
  }
  switch (s.stage) {
    case SortingStage::SoundSort:
      return {{"type", "sound_choice"}, {"category", rng.below(2) == 0 ? s.config.category_a : s.config.category_b}};
    case SortingStage::PatternChoice: {
      const auto& options = s.config.patterns.at(answer.category);
      return {{"type", "pattern_choice"}, {"pattern", options[rng.below(options.size())].name}};
    }
    default: {
      const auto& pick = s.answers[rng.below(s.answers.size())];
      return {{"type", "spelling"}, {"text", pick.spelling}};
    }
  }
}

json next_matching_action(const MatchingGameState& m, const SimScript& script, Lcg64& rng) {
  std::vector<std::size_t> down;
  for (std::size_t i = 0; i < m.cards.size(); ++i) {
    if (m.cards[i].status == CardStatus::FaceDown) down.push_back(i);
  }
  if (script.policy.kind == PolicyKind::AlwaysCorrect && !m.face_up.empty()) {
    const auto& category = m.cards[m.face_up.front()].category;
    for (auto i : down) {
      if (m.cards[i].category == category) return {{"type", "flip"}, {"index", i}};
    }
  }
  if (script.policy.kind == PolicyKind::AlwaysCorrect) return {{"type", "flip"}, {"index", down.front()}};
  return {{"type", "flip"}, {"index", down[rng.below(down.size())]}};
}

}  // namespace

Step<GameState> apply_action(const GameState& game, const json& action, Timestamp at) {
  check_action_shape(action, kind_of(game));
  const auto type = action["type"].get<std::string>();
  if (type == "pause") return {pause_game(game, at), {}};
  if (type == "resume") return {resume_game(game, at), {}};
  if (const auto* s = std::get_if<SortingGameState>(&game)) {
    Step<SortingGameState> step = type == "sound_choice"     ? submit_sound_choice(*s, text_field(action, "category"), at)
                                  : type == "pattern_choice" ? submit_pattern_choice(*s, text_field(action, "pattern"), at)
                                                             : submit_spelling(*s, text_field(action, "text"), at);
    return {std::move(step.state), step.outcome};
  }
  const auto& m = std::get<MatchingGameState>(game);
  auto step = flip_card(m, action["index"].get<std::size_t>(), at);
  return {std::move(step.state), step.outcome};
}

SimScript sim_script_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::ConfigInvalid, "script must be a JSON object");
  SimScript script;
  const auto kind = parse_game_kind(doc.value("kind", std::string()));
  if (!kind) throw Error(Errc::ConfigInvalid, "script 'kind' must be sorting or matching");
  script.kind = *kind;
  if (doc.contains("config")) script.config = doc["config"];
  if (doc.contains("game_id")) script.game_id = doc["game_id"].get<std::string>();
  if (doc.contains("start_at")) script.start_at = doc["start_at"].get<Timestamp>();
  if (doc.contains("max_actions")) script.max_actions = doc["max_actions"].get<std::size_t>();

  const json policy = doc.value("policy", json{{"type", "always_correct"}});
  const auto type = policy.is_object() ? policy.value("type", std::string()) : std::string();
  if (type == "always_correct") {
    script.policy.kind = PolicyKind::AlwaysCorrect;
  } else if (type == "uniform_random") {
    script.policy.kind = PolicyKind::UniformRandom;
    if (!policy.contains("seed") || !policy["seed"].is_number_unsigned()) {
      throw Error(Errc::ConfigInvalid, "uniform_random needs a non-negative integer 'seed'");
    }
    script.policy.seed = policy["seed"].get<std::uint64_t>();
  } else if (type == "scripted") {
    script.policy.kind = PolicyKind::Scripted;
    if (!policy.contains("actions") || !policy["actions"].is_array()) {
      throw Error(Errc::ConfigInvalid, "scripted policy needs an 'actions' array");
    }
    for (const auto& a : policy["actions"]) {
      check_action_shape(a, script.kind);
      script.policy.actions.push_back(a);
    }
  } else {
    throw Error(Errc::ConfigInvalid, "unknown policy '" + type + "'");
  }
  return script;
}

json sim_script_to_json(const SimScript& script) {
  json policy{{"type", policy_name(script.policy.kind)}};
  if (script.policy.kind == PolicyKind::UniformRandom) policy["seed"] = script.policy.seed;
  if (script.policy.kind == PolicyKind::Scripted) policy["actions"] = script.policy.actions;
  return json{{"kind", game_kind_name(script.kind)}, {"config", script.config},       {"policy", policy},
              {"game_id", script.game_id},          {"start_at", script.start_at}, {"max_actions", script.max_actions}};
}

SimResult simulate(const SimScript& script, const Lexicon& lexicon) {
  Timestamp clock = script.start_at;
  GameState game = script.kind == GameKind::Sorting
                       ? GameState(new_sorting_game(sorting_config_from_json(script.config, lexicon), lexicon,
                                                    script.game_id, clock))
                       : GameState(new_matching_game(matching_config_from_json(script.config, lexicon), lexicon,
                                                     script.game_id, clock));

  SimResult result{game, 0, {}, {}};
  StepChecker checker;
  Lcg64 rng(script.policy.seed);
  std::size_t scripted = 0;

  while (true) {
    json action;
    if (script.policy.kind == PolicyKind::Scripted) {
      if (scripted == script.policy.actions.size()) break;
      action = script.policy.actions[scripted++];
    } else {
      if (is_finished(game)) break;
      if (result.actions >= script.max_actions) {
        result.violations.push_back("game not finished after " + std::to_string(result.actions) + " actions");
        break;
      }
      if (is_paused(game)) {
        action = {{"type", "resume"}};
      } else if (script.policy.kind == PolicyKind::UniformRandom && rng.below(16) == 0) {
        action = {{"type", "pause"}};
      } else if (const auto* s = std::get_if<SortingGameState>(&game)) {
        action = next_sorting_action(*s, script, rng);
      } else {
        action = next_matching_action(std::get<MatchingGameState>(game), script, rng);
      }
    }

    clock += 1000;
    auto step = apply_action(game, action, clock);
    for (auto& v : checker.check(game, step.state, action)) {
      result.violations.push_back("action " + std::to_string(result.actions) + ": " + v);
    }
    game = std::move(step.state);
    ++result.actions;
  }

  std::vector<std::string> final_check;
  round_trip(game, lexicon, final_check);
  for (auto& v : final_check) result.violations.push_back("final state: " + v);

  const Roster roster({User{std::string(kSimStudentId), "simulated student", Role::Student, "", {}, {}}});
  result.final_state = std::move(game);
  result.progress = build_progress(result.final_state, kSimStudentId, roster);
  return result;
}

json to_json(const SimResult& result) {
  json state = serialize_game(result.final_state);
  json events = state["events"];
  return json{{"state", std::move(state)},
              {"finished", is_finished(result.final_state)},
              {"actions", result.actions},
              {"events", std::move(events)},
              {"violations", result.violations},
              {"progress", to_json(result.progress)}};
}

}  // namespace wordify
