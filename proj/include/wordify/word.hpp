#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wordify/phoneme.hpp"

namespace wordify {

// One grapheme of a word: the letters it spans (possibly discontinuous, as in
// the o..e of "home") and the phonemes it realizes. An empty phoneme list
// marks a silent grapheme.
struct AlignmentUnit {
  std::vector<int> letters;
  PhonemeSequence phonemes;

  bool operator==(const AlignmentUnit&) const = default;
};

struct Word {
  std::string id;
  std::string spelling;
  std::vector<AlignmentUnit> units;
  int grade = 1;
  std::string sentence;
  std::optional<std::string> audio;
  // When set, the units must realize exactly this sequence. When absent the
  // pronunciation is whatever the units concatenate to.
  std::optional<PhonemeSequence> pronunciation;

  PhonemeSequence realized() const;
  const AlignmentUnit& unit(std::size_t index) const;

  bool operator==(const Word&) const = default;
};

inline constexpr int kMinGrade = 1;
inline constexpr int kMaxGrade = 12;

bool is_vowel(char c) noexcept;
bool is_consonant(char c) noexcept;

// Letters of the unit as text; gaps in a discontinuous unit render as '_'
// ("o_e" for the o..e of "home", "ph" for "phone").
std::string grapheme_text(std::string_view spelling, const AlignmentUnit& unit);

enum class ViolationKind {
  MalformedRecord,
  DuplicateId,
  InvalidId,
  InvalidSpelling,
  GradeOutOfRange,
  EmptyUnit,
  UnsortedIndices,
  LetterOutOfRange,
  OverlappingIndex,
  CoverageGap,
  UnitOrder,
  UnknownPhoneme,
  PronunciationMismatch,
};

std::string_view violation_name(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<int> indices;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_word(const Word& word, const PhonemeInventory& inventory);

// Lexicon file record codec. Parsing is strict: the record must carry exactly
// the documented fields with the documented types; otherwise Errc::MalformedRecord.
Word word_from_json(const nlohmann::json& record);
nlohmann::json word_to_json(const Word& word);

}  // namespace wordify
