#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "wordify/game.hpp"
#include "wordify/lexicon.hpp"

namespace wordify {

// Replaces every case-insensitive occurrence of `spelling` with underscores.
std::string mask_word(std::string_view sentence, std::string_view spelling);

// Client-facing game state. Never names the pending word, its category, or
// its pattern; those reach the player only through choices and outcomes.
nlohmann::json sorting_view(const SortingGameState& s, const Lexicon& lexicon);
// Face-down cards are shown by index and status only.
nlohmann::json matching_view(const MatchingGameState& s, const Lexicon& lexicon);
nlohmann::json game_view(const GameState& s, const Lexicon& lexicon);

// The buttons offered at the current stage: the two contrast categories while
// sorting by sound, the word's pattern set while choosing a pattern.
nlohmann::json choices_view(const SortingGameState& s);

// Cards revealed by the action are spelled out so a mismatched pair can be
// shown before it turns back over.
nlohmann::json outcome_view(const Outcome& outcome, const GameState& after, const Lexicon& lexicon);

std::string audio_url(std::string_view key);
std::string prompt_audio_url(std::string_view game_id);

}  // namespace wordify
