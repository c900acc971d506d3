#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wordify/word.hpp"

namespace wordify {

struct PatternItem {
  enum class Kind { Literal, AnyConsonant, AnyVowel };

  Kind kind = Kind::Literal;
  char letter = 0;  // set for Literal only

  static PatternItem literal(char c) { return {Kind::Literal, c}; }
  static PatternItem consonant() { return {Kind::AnyConsonant, 0}; }
  static PatternItem vowel() { return {Kind::AnyVowel, 0}; }

  bool operator==(const PatternItem&) const = default;
};

// A spelling pattern such as "oCe": lowercase letters are literals that must
// belong to the grapheme, 'C' and 'V' stand for any consonant or vowel lying
// outside it.
class GraphemePattern {
 public:
  GraphemePattern() = default;

  const std::vector<PatternItem>& items() const noexcept { return items_; }
  std::size_t literal_count() const noexcept;
  std::string render() const;

  bool operator==(const GraphemePattern&) const = default;

 private:
  friend GraphemePattern parse_pattern(std::string_view text);
  std::vector<PatternItem> items_;
};

GraphemePattern parse_pattern(std::string_view text);

bool pattern_matches(const GraphemePattern& pattern, const Word& word, std::size_t unit_index);

struct NamedPattern {
  std::string name;
  GraphemePattern pattern;

  bool operator==(const NamedPattern&) const = default;
};

NamedPattern named_pattern(std::string_view source);

// Name of the single pattern matching the unit, nullopt if none does.
// Throws AmbiguousClassification when more than one matches.
std::optional<std::string> classify_unit(const Word& word, std::size_t unit_index,
                                         std::span<const NamedPattern> patterns);

// Ordered pattern sets per sound category, e.g. long-o -> {oa, ow, oCe}.
class PatternCatalog {
 public:
  static PatternCatalog standard();
  static PatternCatalog from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  void set(std::string category, std::vector<NamedPattern> patterns);
  const std::vector<NamedPattern>* find(std::string_view category) const;
  const std::map<std::string, std::vector<NamedPattern>, std::less<>>& sets() const noexcept { return sets_; }

  bool operator==(const PatternCatalog&) const = default;

 private:
  std::map<std::string, std::vector<NamedPattern>, std::less<>> sets_;
};

}  // namespace wordify
