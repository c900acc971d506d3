#include <algorithm>
#include <cctype>
#include <set>

#include "internal.hpp"
#include "wordify/error.hpp"
#include "wordify/rng.hpp"

namespace wordify {

std::string_view stage_name(SortingStage stage) {
  switch (stage) {
    case SortingStage::SoundSort: return "sound_sort";
    case SortingStage::PatternChoice: return "pattern_choice";
    case SortingStage::Spelling: return "spelling";
    case SortingStage::Finished: return "finished";
  }
  return "unknown";
}

std::optional<SortingStage> parse_stage(std::string_view name) {
  for (auto s : {SortingStage::SoundSort, SortingStage::PatternChoice, SortingStage::Spelling, SortingStage::Finished}) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

const SortingAnswer& SortingGameState::current() const {
  if (finished() || cursor >= answers.size()) throw Error(Errc::GameFinished, "game '" + game_id + "' is finished");
  return answers[cursor];
}

namespace detail {

void check_sorting_config(const SortingConfig& config, const Lexicon& lexicon) {
  for (const auto* name : {&config.category_a, &config.category_b}) {
    if (!lexicon.categories().find(*name)) throw Error(Errc::ConfigInvalid, "unknown category '" + *name + "'");
    auto it = config.patterns.find(*name);
    if (it == config.patterns.end() || it->second.empty()) {
      throw Error(Errc::ConfigInvalid, "no patterns configured for category '" + *name + "'");
    }
  }
  if (config.category_a == config.category_b) {
    throw Error(Errc::ConfigInvalid, "both categories are '" + config.category_a + "'");
  }
  for (const auto& [name, _] : config.patterns) {
    if (name != config.category_a && name != config.category_b) {
      throw Error(Errc::ConfigInvalid, "patterns given for category '" + name + "' outside the contrast");
    }
  }
  if (config.word_ids.empty()) throw Error(Errc::ConfigInvalid, "word list is empty");
  std::set<std::string> seen;
  for (const auto& id : config.word_ids) {
    if (!seen.insert(id).second) throw Error(Errc::ConfigInvalid, "word '" + id + "' listed twice");
  }
}

SortingAnswer sorting_answer(const SortingConfig& config, const Lexicon& lexicon, const std::string& word_id) {
  const Word& word = lexicon.at(word_id);
  const auto& cat_a = lexicon.categories().at(config.category_a);
  const auto& cat_b = lexicon.categories().at(config.category_b);
  const auto unit_a = target_unit(word, cat_a);
  const auto unit_b = target_unit(word, cat_b);
  if (unit_a.has_value() == unit_b.has_value()) {
    throw Error(Errc::ConfigInvalid, "word '" + word_id + "' must carry exactly one of '" + cat_a.name + "', '" +
                                         cat_b.name + "'");
  }
  const auto& category = unit_a ? cat_a : cat_b;
  const std::size_t unit = unit_a ? *unit_a : *unit_b;
  std::optional<std::string> pattern;
  try {
    pattern = classify_unit(word, unit, config.patterns.at(category.name));
  } catch (const Error& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  if (!pattern) {
    throw Error(Errc::ConfigInvalid, "word '" + word_id + "' matches none of the '" + category.name + "' patterns");
  }
  return SortingAnswer{word.id, word.spelling, category.name, *pattern};
}

}  // namespace detail

SortingGameState new_sorting_game(const SortingConfig& config, const Lexicon& lexicon, std::string game_id,
                                  Timestamp at) {
  detail::check_sorting_config(config, lexicon);
  for (const auto& id : config.word_ids) {
    if (!lexicon.find(id)) throw Error(Errc::ConfigInvalid, "unknown word '" + id + "'");
  }

  SortingGameState s;
  s.game_id = std::move(game_id);
  s.config = config;
  s.word_order = config.word_ids;
  Lcg64 rng(config.seed);
  seeded_shuffle(s.word_order, rng);
  for (const auto& id : s.word_order) s.answers.push_back(detail::sorting_answer(config, lexicon, id));
  s.created_at = at;
  return s;
}

namespace {

void require_stage(const SortingGameState& s, SortingStage stage) {
  if (s.finished()) throw Error(Errc::GameFinished, "game '" + s.game_id + "' is finished");
  if (s.paused) throw Error(Errc::GamePaused, "game '" + s.game_id + "' is paused");
  if (s.stage != stage) {
    throw Error(Errc::WrongStage, "expected stage " + std::string(stage_name(stage)) + ", game is at " +
                                      std::string(stage_name(s.stage)));
  }
}

GameEvent attempt_event(const SortingGameState& s, EventKind kind, std::string submitted, bool correct,
                        Timestamp at) {
  return GameEvent{at, kind, s.current().word_id, std::move(submitted), correct, s.attempts_this_stage + 1, {}};
}

void settle(SortingGameState& next, Outcome& outcome, bool correct, SortingStage on_correct) {
  if (correct) {
    next.stage = on_correct;
    next.attempts_this_stage = 0;
    outcome.advanced = true;
  } else {
    ++next.attempts_this_stage;
  }
  ++next.version;
}

}  // namespace

Step<SortingGameState> submit_sound_choice(const SortingGameState& s, std::string_view category, Timestamp at) {
  require_stage(s, SortingStage::SoundSort);
  if (category != s.config.category_a && category != s.config.category_b) {
    throw Error(Errc::UnknownCategory, "'" + std::string(category) + "' is not part of this game");
  }
  const bool correct = category == s.current().category;
  Step<SortingGameState> step{s, {}};
  step.state.events.push_back(attempt_event(s, EventKind::SoundChoice, std::string(category), correct, at));
  step.outcome.correct = correct;
  settle(step.state, step.outcome, correct, SortingStage::PatternChoice);
  return step;
}

Step<SortingGameState> submit_pattern_choice(const SortingGameState& s, std::string_view pattern, Timestamp at) {
  require_stage(s, SortingStage::PatternChoice);
  const auto& choices = s.config.patterns.at(s.current().category);
  const bool known =
      std::any_of(choices.begin(), choices.end(), [&](const NamedPattern& p) { return p.name == pattern; });
  if (!known) throw Error(Errc::UnknownPattern, "'" + std::string(pattern) + "' is not offered for this word");

  const bool correct = pattern == s.current().pattern;
  Step<SortingGameState> step{s, {}};
  step.state.events.push_back(attempt_event(s, EventKind::PatternChoice, std::string(pattern), correct, at));
  step.outcome.correct = correct;
  settle(step.state, step.outcome, correct, SortingStage::Spelling);
  return step;
}

std::string normalize_answer(std::string_view text) {
  auto begin = text.begin();
  auto end = text.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  std::string out(begin, end);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Step<SortingGameState> submit_spelling(const SortingGameState& s, std::string_view text, Timestamp at) {
  require_stage(s, SortingStage::Spelling);
  std::string answer = normalize_answer(text);
  if (answer.empty()) throw Error(Errc::EmptyAnswer, "spelling answer is empty");

  const bool correct = answer == s.current().spelling;
  Step<SortingGameState> step{s, {}};
  auto& next = step.state;
  next.events.push_back(attempt_event(s, EventKind::SpellingAttempt, std::move(answer), correct, at));
  step.outcome.correct = correct;
  if (correct) {
    ++next.cursor;
    next.attempts_this_stage = 0;
    step.outcome.advanced = true;
    if (next.cursor == next.word_order.size()) {
      next.stage = SortingStage::Finished;
      next.events.push_back(GameEvent{at, EventKind::Complete, {}, {}, {}, {}, {}});
      step.outcome.finished = true;
    } else {
      next.stage = SortingStage::SoundSort;
    }
  } else {
    ++next.attempts_this_stage;
  }
  ++next.version;
  return step;
}

}  // namespace wordify
