#pragma once

#include <string>

#include "wordify/game.hpp"

namespace wordify::detail {

// Answer key for one word of a sorting game. Throws ConfigInvalid when the
// word does not fit the config, UnknownWordId when it is not in the lexicon.
SortingAnswer sorting_answer(const SortingConfig& config, const Lexicon& lexicon, const std::string& word_id);

// Checks the config-level invariants that do not depend on individual words.
void check_sorting_config(const SortingConfig& config, const Lexicon& lexicon);
void check_matching_config(const MatchingConfig& config, const Lexicon& lexicon);

}  // namespace wordify::detail
