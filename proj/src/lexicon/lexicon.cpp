#include "wordify/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "wordify/error.hpp"

namespace wordify {

CategoryRegistry CategoryRegistry::standard() {
  CategoryRegistry r;
  r.add({"long-o", {Phoneme("OW")}});
  r.add({"long-i", {Phoneme("AY")}});
  r.add({"k-sound", {Phoneme("K")}});
  r.add({"s-sound", {Phoneme("S")}});
  r.add({"f-sound", {Phoneme("F")}});
  return r;
}

CategoryRegistry CategoryRegistry::from_json(const nlohmann::json& doc, const PhonemeInventory& inventory) {
  if (!doc.is_object()) throw Error(Errc::ConfigInvalid, "category registry must be a JSON object");
  CategoryRegistry r;
  for (const auto& [name, codes] : doc.items()) {
    if (!codes.is_array()) throw Error(Errc::ConfigInvalid, "members of '" + name + "' must be an array");
    SoundCategory cat{name, {}};
    for (const auto& code : codes) {
      if (!code.is_string()) throw Error(Errc::ConfigInvalid, "phoneme code must be a string");
      cat.members.emplace(code.get<std::string>());
    }
    r.add(std::move(cat), inventory);
  }
  return r;
}

nlohmann::json CategoryRegistry::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, cat] : categories_) {
    auto& list = out[name] = nlohmann::json::array();
    for (const auto& p : cat.members) list.push_back(p.code());
  }
  return out;
}

void CategoryRegistry::add(SoundCategory category, const PhonemeInventory& inventory) {
  if (category.name.empty()) throw Error(Errc::ConfigInvalid, "category name is empty");
  if (category.members.empty()) throw Error(Errc::ConfigInvalid, "category '" + category.name + "' has no members");
  for (const auto& p : category.members) {
    if (!inventory.contains(p)) {
      throw Error(Errc::ConfigInvalid, "category '" + category.name + "' uses unknown phoneme '" + p.code() + "'");
    }
  }
  if (categories_.contains(category.name)) {
    throw Error(Errc::ConfigInvalid, "category '" + category.name + "' defined twice");
  }
  auto name = category.name;
  categories_.emplace(std::move(name), std::move(category));
}

const SoundCategory* CategoryRegistry::find(std::string_view name) const {
  auto it = categories_.find(name);
  return it == categories_.end() ? nullptr : &it->second;
}

const SoundCategory& CategoryRegistry::at(std::string_view name) const {
  if (const auto* c = find(name)) return *c;
  throw Error(Errc::UnknownCategory, "'" + std::string(name) + "'");
}

std::vector<std::string> CategoryRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : categories_) out.push_back(name);
  return out;
}

void Lexicon::add(Word word) {
  if (words_.contains(word.id)) throw Error(Errc::ConfigInvalid, "duplicate word id '" + word.id + "'");
  auto id = word.id;
  words_.emplace(std::move(id), std::move(word));
}

const Word* Lexicon::find(std::string_view id) const {
  auto it = words_.find(id);
  return it == words_.end() ? nullptr : &it->second;
}

const Word& Lexicon::at(std::string_view id) const {
  if (const auto* w = find(id)) return *w;
  throw Error(Errc::UnknownWordId, "'" + std::string(id) + "'");
}

std::vector<const Word*> Lexicon::ordered() const {
  std::vector<const Word*> out;
  out.reserve(words_.size());
  for (const auto& [_, w] : words_) out.push_back(&w);
  std::sort(out.begin(), out.end(), [](const Word* a, const Word* b) {
    return std::tie(a->spelling, a->id) < std::tie(b->spelling, b->id);
  });
  return out;
}

IngestResult ingest_lexicon(std::istream& in, CategoryRegistry categories, PatternCatalog patterns,
                            const PhonemeInventory& inventory) {
  if (!in.good() && !in.eof()) throw Error(Errc::UnreadableStream, "stream is not readable");
  IngestResult result{Lexicon(std::move(categories), std::move(patterns)), {}};

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;

    Word word;
    try {
      word = word_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      result.violations.emplace_back(line_no, Violation{ViolationKind::MalformedRecord, {}, e.what()});
      continue;
    } catch (const Error& e) {
      result.violations.emplace_back(line_no, Violation{ViolationKind::MalformedRecord, {}, e.detail()});
      continue;
    }

    auto violations = validate_word(word, inventory);
    if (!violations.empty()) {
      for (auto& v : violations) result.violations.emplace_back(line_no, std::move(v));
      continue;
    }
    if (result.lexicon.find(word.id)) {
      result.violations.emplace_back(line_no, Violation{ViolationKind::DuplicateId, {}, "'" + word.id + "'"});
      continue;
    }
    result.lexicon.add(std::move(word));
  }
  if (in.bad()) throw Error(Errc::UnreadableStream, "read failed at line " + std::to_string(line_no + 1));
  return result;
}

std::optional<std::size_t> target_unit(const Word& word, const SoundCategory& category) {
  for (std::size_t i = 0; i < word.units.size(); ++i) {
    for (const auto& p : word.units[i].phonemes) {
      if (category.members.contains(p)) return i;
    }
  }
  return std::nullopt;
}

namespace {

bool pattern_holds(const Word& word, const SoundCategory& category, const std::vector<NamedPattern>& patterns,
                   std::string_view pattern_name) {
  const auto unit = target_unit(word, category);
  if (!unit) return false;
  const auto name = classify_unit(word, *unit, patterns);
  return name && *name == pattern_name;
}

bool lists_pattern(const std::vector<NamedPattern>& patterns, std::string_view name) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const NamedPattern& p) { return p.name == name; });
}

}  // namespace

std::vector<std::string> query_words(const Lexicon& lexicon, const WordFilter& filter) {
  const SoundCategory* category = nullptr;
  if (filter.category) category = &lexicon.categories().at(*filter.category);

  // Categories whose pattern set names the requested pattern.
  std::vector<std::pair<const SoundCategory*, const std::vector<NamedPattern>*>> pattern_scopes;
  if (filter.pattern) {
    for (const auto& [name, patterns] : lexicon.patterns().sets()) {
      if (category && name != category->name) continue;
      if (!lists_pattern(patterns, *filter.pattern)) continue;
      if (const auto* cat = lexicon.categories().find(name)) pattern_scopes.emplace_back(cat, &patterns);
    }
    if (pattern_scopes.empty()) {
      throw Error(Errc::UnknownPattern, "'" + *filter.pattern + "'" +
                                            (category ? " for category '" + category->name + "'" : std::string()));
    }
  }

  std::vector<std::string> out;
  for (const Word* w : lexicon.ordered()) {
    if (filter.grade && w->grade != *filter.grade) continue;
    if (category && !target_unit(*w, *category)) continue;
    if (filter.pattern) {
      const bool any = std::any_of(pattern_scopes.begin(), pattern_scopes.end(), [&](const auto& scope) {
        return pattern_holds(*w, *scope.first, *scope.second, *filter.pattern);
      });
      if (!any) continue;
    }
    out.push_back(w->id);
  }
  return out;
}

}  // namespace wordify
