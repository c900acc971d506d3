#include "wordify/pattern.hpp"

#include <algorithm>

#include "wordify/error.hpp"

namespace wordify {

std::size_t GraphemePattern::literal_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(items_.begin(), items_.end(), [](const PatternItem& i) {
    return i.kind == PatternItem::Kind::Literal;
  }));
}

std::string GraphemePattern::render() const {
  std::string out;
  for (const auto& item : items_) {
    switch (item.kind) {
      case PatternItem::Kind::Literal: out += item.letter; break;
      case PatternItem::Kind::AnyConsonant: out += 'C'; break;
      case PatternItem::Kind::AnyVowel: out += 'V'; break;
    }
  }
  return out;
}

GraphemePattern parse_pattern(std::string_view text) {
  if (text.empty()) throw Error(Errc::EmptyPattern, "pattern text is empty");
  GraphemePattern p;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= 'a' && c <= 'z') {
      p.items_.push_back(PatternItem::literal(c));
    } else if (c == 'C') {
      p.items_.push_back(PatternItem::consonant());
    } else if (c == 'V') {
      p.items_.push_back(PatternItem::vowel());
    } else {
      throw Error(Errc::IllegalCharacter,
                  "'" + std::string(1, c) + "' at position " + std::to_string(i) + " of \"" + std::string(text) + "\"");
    }
  }
  if (p.literal_count() == 0) throw Error(Errc::NoLiteral, "\"" + std::string(text) + "\" has only wildcards");
  return p;
}

// The literal positions must enumerate the unit's letters in order, so the
// first literal is pinned to the unit's first letter; that fixes the only
// span that can possibly match.
bool pattern_matches(const GraphemePattern& pattern, const Word& word, std::size_t unit_index) {
  const AlignmentUnit& unit = word.unit(unit_index);
  const auto& items = pattern.items();
  if (unit.letters.empty() || unit.letters.size() != pattern.literal_count()) return false;

  const auto first_literal = std::find_if(items.begin(), items.end(), [](const PatternItem& i) {
    return i.kind == PatternItem::Kind::Literal;
  });
  const long start = static_cast<long>(unit.letters.front()) - (first_literal - items.begin());
  const long len = static_cast<long>(word.spelling.size());
  if (start < 0 || start + static_cast<long>(items.size()) > len) return false;

  std::size_t next_letter = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const long pos = start + static_cast<long>(i);
    const char c = word.spelling[static_cast<std::size_t>(pos)];
    switch (items[i].kind) {
      case PatternItem::Kind::Literal:
        if (c != items[i].letter || unit.letters[next_letter] != pos) return false;
        ++next_letter;
        break;
      case PatternItem::Kind::AnyConsonant:
        if (!is_consonant(c)) return false;
        break;
      case PatternItem::Kind::AnyVowel:
        if (!is_vowel(c)) return false;
        break;
    }
  }
  return next_letter == unit.letters.size();
}

NamedPattern named_pattern(std::string_view source) {
  return NamedPattern{std::string(source), parse_pattern(source)};
}

std::optional<std::string> classify_unit(const Word& word, std::size_t unit_index,
                                         std::span<const NamedPattern> patterns) {
  std::optional<std::string> found;
  for (const auto& np : patterns) {
    if (!pattern_matches(np.pattern, word, unit_index)) continue;
    if (found) {
      throw Error(Errc::AmbiguousClassification, "'" + word.spelling + "' unit " + std::to_string(unit_index) +
                                                     " matches both '" + *found + "' and '" + np.name + "'");
    }
    found = np.name;
  }
  return found;
}

PatternCatalog PatternCatalog::standard() {
  PatternCatalog c;
  c.set("long-o", {named_pattern("oa"), named_pattern("ow"), named_pattern("oCe")});
  c.set("long-i", {named_pattern("igh"), named_pattern("y"), named_pattern("iCe")});
  return c;
}

PatternCatalog PatternCatalog::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(Errc::ConfigInvalid, "pattern catalog must be a JSON object");
  PatternCatalog c;
  for (const auto& [category, list] : doc.items()) {
    if (!list.is_array()) throw Error(Errc::ConfigInvalid, "patterns for '" + category + "' must be an array");
    std::vector<NamedPattern> patterns;
    for (const auto& p : list) {
      if (!p.is_string()) throw Error(Errc::ConfigInvalid, "pattern must be a string");
      patterns.push_back(named_pattern(p.get<std::string>()));
    }
    c.set(category, std::move(patterns));
  }
  return c;
}

nlohmann::json PatternCatalog::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [category, patterns] : sets_) {
    auto& list = out[category] = nlohmann::json::array();
    for (const auto& p : patterns) list.push_back(p.name);
  }
  return out;
}

void PatternCatalog::set(std::string category, std::vector<NamedPattern> patterns) {
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (patterns[i].name == patterns[j].name) {
        throw Error(Errc::ConfigInvalid, "pattern '" + patterns[i].name + "' listed twice for '" + category + "'");
      }
    }
  }
  sets_[std::move(category)] = std::move(patterns);
}

const std::vector<NamedPattern>* PatternCatalog::find(std::string_view category) const {
  auto it = sets_.find(category);
  return it == sets_.end() ? nullptr : &it->second;
}

}  // namespace wordify
