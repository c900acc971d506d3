#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wordify/pattern.hpp"
#include "wordify/phoneme.hpp"
#include "wordify/word.hpp"

namespace wordify {

struct SoundCategory {
  std::string name;
  std::set<Phoneme> members;

  bool operator==(const SoundCategory&) const = default;
};

class CategoryRegistry {
 public:
  // long-o, long-i, k-sound, s-sound, f-sound.
  static CategoryRegistry standard();
  // A JSON map of category name -> list of phoneme codes.
  static CategoryRegistry from_json(const nlohmann::json& doc,
                                    const PhonemeInventory& inventory = PhonemeInventory::arpabet());
  nlohmann::json to_json() const;

  void add(SoundCategory category, const PhonemeInventory& inventory = PhonemeInventory::arpabet());
  const SoundCategory* find(std::string_view name) const;
  // Throws UnknownCategory.
  const SoundCategory& at(std::string_view name) const;
  std::vector<std::string> names() const;

  bool operator==(const CategoryRegistry&) const = default;

 private:
  std::map<std::string, SoundCategory, std::less<>> categories_;
};

// Immutable once built; share it by const reference or shared_ptr<const>.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(CategoryRegistry categories, PatternCatalog patterns)
      : categories_(std::move(categories)), patterns_(std::move(patterns)) {}

  // Throws ConfigInvalid on a duplicate id.
  void add(Word word);

  const Word* find(std::string_view id) const;
  // Throws UnknownWordId.
  const Word& at(std::string_view id) const;

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  // All words ordered by (spelling, id).
  std::vector<const Word*> ordered() const;

  const CategoryRegistry& categories() const noexcept { return categories_; }
  const PatternCatalog& patterns() const noexcept { return patterns_; }

  bool operator==(const Lexicon&) const = default;

 private:
  std::map<std::string, Word, std::less<>> words_;
  CategoryRegistry categories_;
  PatternCatalog patterns_;
};

struct IngestResult {
  Lexicon lexicon;
  std::vector<std::pair<int, Violation>> violations;  // (1-based line number, violation)
};

// Reads one JSON record per line. Invalid records are reported and skipped.
// Throws UnreadableStream when the stream cannot be read.
IngestResult ingest_lexicon(std::istream& in, CategoryRegistry categories = CategoryRegistry::standard(),
                            PatternCatalog patterns = PatternCatalog::standard(),
                            const PhonemeInventory& inventory = PhonemeInventory::arpabet());

std::optional<std::size_t> target_unit(const Word& word, const SoundCategory& category);

struct WordFilter {
  std::optional<int> grade;
  std::optional<std::string> category;
  std::optional<std::string> pattern;
};

// Ids ordered by (spelling, id). Throws UnknownCategory / UnknownPattern.
std::vector<std::string> query_words(const Lexicon& lexicon, const WordFilter& filter);

}  // namespace wordify
