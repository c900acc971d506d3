#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "wordify/lexicon.hpp"

namespace wordify {

// A distinct (grapheme, realization) pair together with the words using it.
struct UnitWitness {
  std::string grapheme;
  PhonemeSequence phonemes;
  std::vector<std::string> word_ids;

  bool operator==(const UnitWitness&) const = default;
};

// How far a lexicon departs from a perfectly transparent spelling system:
//   one_grapheme_many_sounds   graphemes with two or more distinct realizations
//   one_sound_many_graphemes   phonemes written by two or more graphemes
//   multi_phoneme_units        single graphemes realizing two or more phonemes
//   multi_letter_units         single sounds written with two or more letters
struct ConsistencyReport {
  std::map<std::string, std::set<PhonemeSequence>> grapheme_to_phonemes;
  std::map<Phoneme, std::set<std::string>> phoneme_to_graphemes;

  std::vector<std::string> one_grapheme_many_sounds;
  std::vector<Phoneme> one_sound_many_graphemes;
  std::vector<UnitWitness> multi_phoneme_units;
  std::vector<UnitWitness> multi_letter_units;

  bool empty() const noexcept { return grapheme_to_phonemes.empty(); }
};

ConsistencyReport consistency_report(const Lexicon& lexicon);

nlohmann::json to_json(const ConsistencyReport& report);
std::string render_table(const ConsistencyReport& report);

}  // namespace wordify
