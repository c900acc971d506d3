#include "wordify/word.hpp"

#include <algorithm>
#include <array>

#include "wordify/error.hpp"

namespace wordify {

using nlohmann::json;

PhonemeSequence Word::realized() const {
  PhonemeSequence out;
  for (const auto& u : units) out.insert(out.end(), u.phonemes.begin(), u.phonemes.end());
  return out;
}

const AlignmentUnit& Word::unit(std::size_t index) const {
  if (index >= units.size()) {
    throw Error(Errc::UnitOutOfRange,
                "unit " + std::to_string(index) + " of '" + spelling + "' (has " +
                    std::to_string(units.size()) + ")");
  }
  return units[index];
}

bool is_vowel(char c) noexcept {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool is_consonant(char c) noexcept { return c >= 'a' && c <= 'z' && !is_vowel(c); }

std::string grapheme_text(std::string_view spelling, const AlignmentUnit& unit) {
  std::string out;
  for (std::size_t i = 0; i < unit.letters.size(); ++i) {
    const int pos = unit.letters[i];
    if (i > 0 && pos != unit.letters[i - 1] + 1) out += '_';
    if (pos >= 0 && static_cast<std::size_t>(pos) < spelling.size()) {
      out += spelling[static_cast<std::size_t>(pos)];
    } else {
      out += '?';
    }
  }
  return out;
}

std::string_view violation_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MalformedRecord: return "MalformedRecord";
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::InvalidId: return "InvalidId";
    case ViolationKind::InvalidSpelling: return "InvalidSpelling";
    case ViolationKind::GradeOutOfRange: return "GradeOutOfRange";
    case ViolationKind::EmptyUnit: return "EmptyUnit";
    case ViolationKind::UnsortedIndices: return "UnsortedIndices";
    case ViolationKind::LetterOutOfRange: return "LetterOutOfRange";
    case ViolationKind::OverlappingIndex: return "OverlappingIndex";
    case ViolationKind::CoverageGap: return "CoverageGap";
    case ViolationKind::UnitOrder: return "UnitOrder";
    case ViolationKind::UnknownPhoneme: return "UnknownPhoneme";
    case ViolationKind::PronunciationMismatch: return "PronunciationMismatch";
  }
  return "Unknown";
}

std::vector<Violation> validate_word(const Word& word, const PhonemeInventory& inventory) {
  std::vector<Violation> out;
  const int len = static_cast<int>(word.spelling.size());

  if (word.id.empty()) out.push_back({ViolationKind::InvalidId, {}, "empty id"});

  {
    std::vector<int> bad;
    for (int i = 0; i < len; ++i) {
      const char c = word.spelling[static_cast<std::size_t>(i)];
      if (c < 'a' || c > 'z') bad.push_back(i);
    }
    if (len == 0 || !bad.empty()) {
      out.push_back({ViolationKind::InvalidSpelling, bad, "spelling must be non-empty lowercase a-z"});
    }
  }

  if (word.grade < kMinGrade || word.grade > kMaxGrade) {
    out.push_back({ViolationKind::GradeOutOfRange, {word.grade}, "grade must be 1-12"});
  }

  std::vector<int> cover(static_cast<std::size_t>(len), 0);
  int previous_min = -1;
  for (std::size_t u = 0; u < word.units.size(); ++u) {
    const auto& unit = word.units[u];
    const int ui = static_cast<int>(u);
    if (unit.letters.empty()) {
      out.push_back({ViolationKind::EmptyUnit, {ui}, "unit has no letters"});
      continue;
    }
    if (!std::is_sorted(unit.letters.begin(), unit.letters.end(), std::less_equal<>())) {
      out.push_back({ViolationKind::UnsortedIndices, {ui}, "letter indices must be strictly increasing"});
    }
    for (int pos : unit.letters) {
      if (pos < 0 || pos >= len) {
        out.push_back({ViolationKind::LetterOutOfRange, {pos}, "unit " + std::to_string(u)});
      } else {
        ++cover[static_cast<std::size_t>(pos)];
      }
    }
    const int unit_min = *std::min_element(unit.letters.begin(), unit.letters.end());
    if (unit_min < previous_min) {
      out.push_back({ViolationKind::UnitOrder, {ui}, "units must be ordered by first letter"});
    }
    previous_min = std::max(previous_min, unit_min);
    for (const auto& p : unit.phonemes) {
      if (!inventory.contains(p)) {
        out.push_back({ViolationKind::UnknownPhoneme, {ui}, "'" + p.code() + "'"});
      }
    }
  }

  for (int pos = 0; pos < len; ++pos) {
    const int n = cover[static_cast<std::size_t>(pos)];
    if (n == 0) out.push_back({ViolationKind::CoverageGap, {pos}, "letter not covered by any unit"});
    if (n > 1) out.push_back({ViolationKind::OverlappingIndex, {pos}, "letter covered by several units"});
  }

  if (word.pronunciation && *word.pronunciation != word.realized()) {
    out.push_back({ViolationKind::PronunciationMismatch, {},
                   "units realize [" + join_phonemes(word.realized()) + "], declared [" +
                       join_phonemes(*word.pronunciation) + "]"});
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 6> kRecordFields = {"id", "spelling", "units", "grade", "sentence", "audio"};

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedRecord, what); }

}  // namespace

Word word_from_json(const json& record) {
  if (!record.is_object()) malformed("record is not a JSON object");
  for (const auto& [key, _] : record.items()) {
    if (std::find(kRecordFields.begin(), kRecordFields.end(), key) == kRecordFields.end()) {
      malformed("unexpected field '" + key + "'");
    }
  }
  for (auto field : kRecordFields) {
    if (!record.contains(field)) malformed("missing field '" + std::string(field) + "'");
  }
  if (!record["id"].is_string()) malformed("'id' must be a string");
  if (!record["spelling"].is_string()) malformed("'spelling' must be a string");
  if (!record["grade"].is_number_integer()) malformed("'grade' must be an integer");
  if (!record["sentence"].is_string()) malformed("'sentence' must be a string");
  if (!record["audio"].is_string() && !record["audio"].is_null()) malformed("'audio' must be a string or null");
  if (!record["units"].is_array()) malformed("'units' must be an array");

  Word w;
  w.id = record["id"].get<std::string>();
  w.spelling = record["spelling"].get<std::string>();
  w.grade = record["grade"].get<int>();
  w.sentence = record["sentence"].get<std::string>();
  if (record["audio"].is_string()) w.audio = record["audio"].get<std::string>();

  for (const auto& u : record["units"]) {
    if (!u.is_object() || u.size() != 2 || !u.contains("letters") || !u.contains("phonemes")) {
      malformed("unit must be {\"letters\": [...], \"phonemes\": [...]}");
    }
    if (!u["letters"].is_array() || !u["phonemes"].is_array()) malformed("unit fields must be arrays");
    AlignmentUnit unit;
    for (const auto& l : u["letters"]) {
      if (!l.is_number_integer()) malformed("letter index must be an integer");
      unit.letters.push_back(l.get<int>());
    }
    for (const auto& p : u["phonemes"]) {
      if (!p.is_string()) malformed("phoneme must be a string");
      unit.phonemes.emplace_back(p.get<std::string>());
    }
    w.units.push_back(std::move(unit));
  }
  return w;
}

json word_to_json(const Word& word) {
  json units = json::array();
  for (const auto& u : word.units) {
    json phonemes = json::array();
    for (const auto& p : u.phonemes) phonemes.push_back(p.code());
    units.push_back({{"letters", u.letters}, {"phonemes", std::move(phonemes)}});
  }
  json out = json::object();
  out["id"] = word.id;
  out["spelling"] = word.spelling;
  out["units"] = std::move(units);
  out["grade"] = word.grade;
  out["sentence"] = word.sentence;
  out["audio"] = word.audio ? json(*word.audio) : json(nullptr);
  return out;
}

}  // namespace wordify
