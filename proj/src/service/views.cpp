#include "wordify/views.hpp"

#include <cctype>

namespace wordify {

using nlohmann::json;

namespace {

json word_face(const Lexicon& lexicon, const std::string& word_id) {
  const Word* w = lexicon.find(word_id);
  json face{{"word", w ? w->spelling : std::string()}};
  face["audio"] = (w && w->audio) ? json(audio_url(*w->audio)) : json(nullptr);
  return face;
}

}  // namespace

std::string audio_url(std::string_view key) { return "/api/v1/audio/" + std::string(key); }

std::string prompt_audio_url(std::string_view game_id) {
  return "/api/v1/games/" + std::string(game_id) + "/prompt-audio";
}

std::string mask_word(std::string_view sentence, std::string_view spelling) {
  std::string out(sentence);
  if (spelling.empty()) return out;
  auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
  for (std::size_t i = 0; i + spelling.size() <= out.size();) {
    bool hit = true;
    for (std::size_t j = 0; j < spelling.size() && hit; ++j) hit = lower(out[i + j]) == lower(spelling[j]);
    if (hit) {
      for (std::size_t j = 0; j < spelling.size(); ++j) out[i + j] = '_';
      i += spelling.size();
    } else {
      ++i;
    }
  }
  return out;
}

json sorting_view(const SortingGameState& s, const Lexicon& lexicon) {
  json view{
      {"game_id", s.game_id},
      {"kind", game_kind_name(GameKind::Sorting)},
      {"version", s.version},
      {"created_at", s.created_at},
      {"stage", stage_name(s.stage)},
      {"paused", s.paused},
      {"finished", s.finished()},
      {"words_total", s.word_order.size()},
      {"words_completed", s.cursor},
      {"attempts_this_stage", s.attempts_this_stage},
  };
  if (s.finished()) {
    view["prompt"] = nullptr;
    return view;
  }
  const auto& answer = s.current();
  const Word* w = lexicon.find(answer.word_id);
  json prompt{{"letters", answer.spelling.size()}};
  prompt["sentence"] = w ? json(mask_word(w->sentence, answer.spelling)) : json(nullptr);
  prompt["audio"] = (w && w->audio) ? json(prompt_audio_url(s.game_id)) : json(nullptr);
  view["prompt"] = std::move(prompt);
  return view;
}

json matching_view(const MatchingGameState& s, const Lexicon& lexicon) {
  json cards = json::array();
  for (std::size_t i = 0; i < s.cards.size(); ++i) {
    const auto& card = s.cards[i];
    json c{{"index", i}, {"status", card_status_name(card.status)}};
    if (card.status != CardStatus::FaceDown) c.update(word_face(lexicon, card.word_id));
    cards.push_back(std::move(c));
  }
  return json{
      {"game_id", s.game_id},
      {"kind", game_kind_name(GameKind::Matching)},
      {"version", s.version},
      {"created_at", s.created_at},
      {"paused", s.paused},
      {"finished", s.finished()},
      {"pairs_attempted", s.pairs_attempted},
      {"matched", s.matched_count()},
      {"face_up", s.face_up},
      {"cards", std::move(cards)},
  };
}

json game_view(const GameState& s, const Lexicon& lexicon) {
  return std::visit(
      [&](const auto& g) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, SortingGameState>) {
          return sorting_view(g, lexicon);
        } else {
          return matching_view(g, lexicon);
        }
      },
      s);
}

json choices_view(const SortingGameState& s) {
  json choices = json::array();
  if (!s.finished()) {
    if (s.stage == SortingStage::SoundSort) {
      choices.push_back(s.config.category_a);
      choices.push_back(s.config.category_b);
    } else if (s.stage == SortingStage::PatternChoice) {
      auto it = s.config.patterns.find(s.current().category);
      if (it != s.config.patterns.end()) {
        for (const auto& p : it->second) choices.push_back(p.name);
      }
    }
  }
  return json{{"game_id", s.game_id}, {"version", s.version}, {"stage", stage_name(s.stage)}, {"choices", choices}};
}

json outcome_view(const Outcome& outcome, const GameState& after, const Lexicon& lexicon) {
  json out{{"advanced", outcome.advanced}, {"finished", outcome.finished}};
  out["correct"] = outcome.correct ? json(*outcome.correct) : json(nullptr);
  json revealed = json::array();
  if (const auto* m = std::get_if<MatchingGameState>(&after)) {
    for (auto i : outcome.revealed) {
      json c{{"index", i}};
      if (i < m->cards.size()) c.update(word_face(lexicon, m->cards[i].word_id));
      revealed.push_back(std::move(c));
    }
  }
  out["revealed"] = std::move(revealed);
  return out;
}

}  // namespace wordify
