#include <algorithm>
#include <set>

#include "internal.hpp"
#include "wordify/error.hpp"
#include "wordify/rng.hpp"

namespace wordify {

std::string_view card_status_name(CardStatus status) {
  switch (status) {
    case CardStatus::FaceDown: return "face_down";
    case CardStatus::FaceUp: return "face_up";
    case CardStatus::Matched: return "matched";
  }
  return "unknown";
}

std::optional<CardStatus> parse_card_status(std::string_view name) {
  for (auto s : {CardStatus::FaceDown, CardStatus::FaceUp, CardStatus::Matched}) {
    if (card_status_name(s) == name) return s;
  }
  return std::nullopt;
}

std::size_t MatchingGameState::matched_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cards.begin(), cards.end(), [](const Card& c) { return c.status == CardStatus::Matched; }));
}

namespace detail {

void check_matching_config(const MatchingConfig& config, const Lexicon& lexicon) {
  if (config.contrast.size() < 2) throw Error(Errc::ConfigInvalid, "a contrast needs at least two categories");
  std::set<std::string> contrast(config.contrast.begin(), config.contrast.end());
  if (contrast.size() != config.contrast.size()) throw Error(Errc::ConfigInvalid, "contrast repeats a category");
  for (const auto& name : config.contrast) {
    if (!lexicon.categories().find(name)) throw Error(Errc::ConfigInvalid, "unknown category '" + name + "'");
  }
  if (config.cards_per_category <= 0 || config.cards_per_category % 2 != 0) {
    throw Error(Errc::ConfigInvalid, "cards per category must be even and positive, got " +
                                         std::to_string(config.cards_per_category));
  }
  for (const auto& [name, _] : config.word_pool) {
    if (!contrast.contains(name)) throw Error(Errc::ConfigInvalid, "word pool for '" + name + "' outside the contrast");
  }

  std::set<std::string> seen;
  for (const auto& name : config.contrast) {
    auto it = config.word_pool.find(name);
    if (it == config.word_pool.end()) throw Error(Errc::ConfigInvalid, "no word pool for '" + name + "'");
    for (const auto& id : it->second) {
      if (!seen.insert(id).second) throw Error(Errc::ConfigInvalid, "word '" + id + "' appears in two pools");
      const Word* w = lexicon.find(id);
      if (!w) throw Error(Errc::ConfigInvalid, "unknown word '" + id + "'");
      for (const auto& other : config.contrast) {
        const bool has = target_unit(*w, lexicon.categories().at(other)).has_value();
        if (other == name && !has) {
          throw Error(Errc::ConfigInvalid, "word '" + id + "' has no '" + name + "' sound");
        }
        if (other != name && has) {
          throw Error(Errc::ConfigInvalid, "word '" + id + "' also carries '" + other + "'");
        }
      }
    }
  }
  for (const auto& name : config.contrast) {
    const auto& pool = config.word_pool.at(name);
    if (pool.size() < static_cast<std::size_t>(config.cards_per_category)) {
      throw Error(Errc::PoolTooSmall, "'" + name + "' has " + std::to_string(pool.size()) + " words for " +
                                          std::to_string(config.cards_per_category) + " cards");
    }
  }
}

}  // namespace detail

// One generator drives the whole deal: each pool is shuffled in contrast
// order and its first cards_per_category words are taken, then the dealt
// cards are shuffled together.
MatchingGameState new_matching_game(const MatchingConfig& config, const Lexicon& lexicon, std::string game_id,
                                    Timestamp at) {
  detail::check_matching_config(config, lexicon);

  MatchingGameState s;
  s.game_id = std::move(game_id);
  s.config = config;
  s.created_at = at;

  Lcg64 rng(config.seed);
  for (const auto& name : config.contrast) {
    auto pool = config.word_pool.at(name);
    seeded_shuffle(pool, rng);
    for (int i = 0; i < config.cards_per_category; ++i) {
      s.cards.push_back(Card{pool[static_cast<std::size_t>(i)], name, CardStatus::FaceDown});
    }
  }
  seeded_shuffle(s.cards, rng);
  return s;
}

Step<MatchingGameState> flip_card(const MatchingGameState& s, std::size_t index, Timestamp at) {
  if (s.finished()) throw Error(Errc::GameFinished, "game '" + s.game_id + "' is finished");
  if (s.paused) throw Error(Errc::GamePaused, "game '" + s.game_id + "' is paused");
  if (index >= s.cards.size()) {
    throw Error(Errc::IndexOutOfRange, "card " + std::to_string(index) + " of " + std::to_string(s.cards.size()));
  }
  if (s.cards[index].status != CardStatus::FaceDown) {
    throw Error(Errc::CardNotFaceDown, "card " + std::to_string(index) + " is " +
                                           std::string(card_status_name(s.cards[index].status)));
  }
  if (s.face_up.size() >= 2) throw Error(Errc::WrongStage, "two cards are already face up");

  Step<MatchingGameState> step{s, {}};
  auto& next = step.state;
  next.cards[index].status = CardStatus::FaceUp;
  next.face_up.push_back(index);
  next.events.push_back(GameEvent{at, EventKind::CardFlip, next.cards[index].word_id, {}, {}, {}, {index}});
  step.outcome.revealed = {index};

  if (next.face_up.size() == 2) {
    const std::size_t first = next.face_up[0];
    const std::size_t second = next.face_up[1];
    const bool match = next.cards[first].category == next.cards[second].category;
    const CardStatus settled = match ? CardStatus::Matched : CardStatus::FaceDown;
    next.cards[first].status = settled;
    next.cards[second].status = settled;
    next.face_up.clear();
    ++next.pairs_attempted;
    next.events.push_back(GameEvent{at, EventKind::PairResolved, {}, {}, match, next.pairs_attempted, {first, second}});
    step.outcome.correct = match;
    step.outcome.advanced = match;
    step.outcome.revealed = {first, second};
    if (next.finished()) {
      next.events.push_back(GameEvent{at, EventKind::Complete, {}, {}, {}, {}, {}});
      step.outcome.finished = true;
    }
  }
  ++next.version;
  return step;
}

}  // namespace wordify
