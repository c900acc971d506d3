#include <algorithm>
#include <set>

#include "internal.hpp"
#include "wordify/error.hpp"

namespace wordify {

using nlohmann::json;

namespace {

// Field readers used by both the config and document codecs; `code` decides
// which error a bad field raises (ConfigInvalid for API input, SchemaMismatch
// for stored documents).
struct Reader {
  Errc code;

  [[noreturn]] void fail(const std::string& what) const { throw Error(code, what); }

  const json& field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail("expected an object around '" + std::string(key) + "'");
    auto it = obj.find(key);
    if (it == obj.end()) fail("missing field '" + std::string(key) + "'");
    return *it;
  }

  std::string str(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_string()) fail("'" + std::string(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::int64_t integer(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_number_integer()) fail("'" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail("'" + std::string(key) + "' must be a non-negative integer");
  }

  bool boolean(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_boolean()) fail("'" + std::string(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const json& v, const std::string& what) const {
    if (!v.is_array()) fail(what + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& s : v) {
      if (!s.is_string()) fail(what + " must be an array of strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  }

  std::vector<std::size_t> indices(const json& v, const std::string& what) const {
    if (!v.is_array()) fail(what + " must be an array of indices");
    std::vector<std::size_t> out;
    for (const auto& s : v) {
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        fail(what + " must be an array of indices");
      }
      out.push_back(s.get<std::size_t>());
    }
    return out;
  }

  void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& what) const {
    for (const auto& [k, _] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; })) {
        fail(what + " has unexpected field '" + k + "'");
      }
    }
  }
};

std::vector<NamedPattern> patterns_from(const Reader& r, const json& list, const std::string& category) {
  std::vector<NamedPattern> out;
  for (const auto& name : r.strings(list, "patterns for '" + category + "'")) {
    try {
      out.push_back(named_pattern(name));
    } catch (const Error& e) {
      r.fail(e.what());
    }
  }
  return out;
}

SortingConfig read_sorting_config(const Reader& r, const json& doc, const Lexicon* defaults) {
  r.only_keys(doc, {"category_a", "category_b", "patterns_by_category", "word_ids", "rng_seed"}, "sorting config");
  SortingConfig c;
  c.category_a = r.str(doc, "category_a");
  c.category_b = r.str(doc, "category_b");
  c.word_ids = r.strings(r.field(doc, "word_ids"), "'word_ids'");
  c.seed = r.unsigned_integer(doc, "rng_seed");
  if (doc.contains("patterns_by_category")) {
    const auto& m = doc["patterns_by_category"];
    if (!m.is_object()) r.fail("'patterns_by_category' must be an object");
    for (const auto& [category, list] : m.items()) c.patterns[category] = patterns_from(r, list, category);
  } else if (defaults) {
    for (const auto* name : {&c.category_a, &c.category_b}) {
      if (const auto* set = defaults->patterns().find(*name)) c.patterns[*name] = *set;
    }
  } else {
    r.fail("missing field 'patterns_by_category'");
  }
  return c;
}

MatchingConfig read_matching_config(const Reader& r, const json& doc, const Lexicon* defaults) {
  r.only_keys(doc, {"contrast", "cards_per_category", "word_pool", "rng_seed"}, "matching config");
  MatchingConfig c;
  c.contrast = r.strings(r.field(doc, "contrast"), "'contrast'");
  const auto cards = r.integer(doc, "cards_per_category");
  if (cards < 0 || cards > 1'000'000) r.fail("'cards_per_category' out of range");
  c.cards_per_category = static_cast<int>(cards);
  c.seed = r.unsigned_integer(doc, "rng_seed");
  if (doc.contains("word_pool")) {
    const auto& m = doc["word_pool"];
    if (!m.is_object()) r.fail("'word_pool' must be an object");
    for (const auto& [category, list] : m.items()) c.word_pool[category] = r.strings(list, "pool for '" + category + "'");
  } else if (defaults) {
    // Every word carrying this category's sound and none of the others'.
    for (const auto& name : c.contrast) {
      const auto* cat = defaults->categories().find(name);
      if (!cat) continue;
      auto& pool = c.word_pool[name];
      for (const Word* w : defaults->ordered()) {
        if (!target_unit(*w, *cat)) continue;
        const bool exclusive = std::none_of(c.contrast.begin(), c.contrast.end(), [&](const std::string& other) {
          const auto* o = defaults->categories().find(other);
          return other != name && o && target_unit(*w, *o);
        });
        if (exclusive) pool.push_back(w->id);
      }
    }
  } else {
    r.fail("missing field 'word_pool'");
  }
  return c;
}

json event_to_json(const GameEvent& e) {
  json out{{"timestamp", e.timestamp}, {"kind", event_kind_name(e.kind)}};
  if (e.word_id) out["word_id"] = *e.word_id;
  if (e.submitted) out["submitted"] = *e.submitted;
  if (e.correct) out["correct"] = *e.correct;
  if (e.stage_attempt) out["stage_attempt"] = *e.stage_attempt;
  if (!e.cards.empty()) out["cards"] = e.cards;
  return out;
}

GameEvent event_from_json(const Reader& r, const json& doc) {
  r.only_keys(doc, {"timestamp", "kind", "word_id", "submitted", "correct", "stage_attempt", "cards"}, "event");
  GameEvent e;
  e.timestamp = r.integer(doc, "timestamp");
  const auto kind = parse_event_kind(r.str(doc, "kind"));
  if (!kind) r.fail("unknown event kind '" + doc["kind"].get<std::string>() + "'");
  e.kind = *kind;
  if (doc.contains("word_id")) e.word_id = r.str(doc, "word_id");
  if (doc.contains("submitted")) e.submitted = r.str(doc, "submitted");
  if (doc.contains("correct")) e.correct = r.boolean(doc, "correct");
  if (doc.contains("stage_attempt")) e.stage_attempt = static_cast<int>(r.integer(doc, "stage_attempt"));
  if (doc.contains("cards")) e.cards = r.indices(doc["cards"], "'cards'");
  if (auto err = event_schema_error(e)) r.fail(*err);
  return e;
}

json events_to_json(const std::vector<GameEvent>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back(event_to_json(e));
  return out;
}

void require_words(const Lexicon& lexicon, const std::vector<std::string>& ids) {
  for (const auto& id : ids) {
    if (!lexicon.find(id)) throw Error(Errc::UnknownWordId, "'" + id + "'");
  }
}

const Reader kSchema{Errc::SchemaMismatch};
const Reader kConfig{Errc::ConfigInvalid};

}  // namespace

json sorting_config_to_json(const SortingConfig& c) {
  json patterns = json::object();
  for (const auto& [category, list] : c.patterns) {
    auto& names = patterns[category] = json::array();
    for (const auto& p : list) names.push_back(p.name);
  }
  return json{{"category_a", c.category_a},   {"category_b", c.category_b}, {"patterns_by_category", patterns},
              {"word_ids", c.word_ids},       {"rng_seed", c.seed}};
}

json matching_config_to_json(const MatchingConfig& c) {
  return json{{"contrast", c.contrast},
              {"cards_per_category", c.cards_per_category},
              {"word_pool", c.word_pool},
              {"rng_seed", c.seed}};
}

SortingConfig sorting_config_from_json(const json& doc, const Lexicon& lexicon) {
  return read_sorting_config(kConfig, doc, &lexicon);
}

MatchingConfig matching_config_from_json(const json& doc, const Lexicon& lexicon) {
  return read_matching_config(kConfig, doc, &lexicon);
}

json serialize_game(const SortingGameState& s) {
  return json{
      {"schemaVersion", kGameSchemaVersion},
      {"kind", "sorting"},
      {"game_id", s.game_id},
      {"version", s.version},
      {"created_at", s.created_at},
      {"config", sorting_config_to_json(s.config)},
      {"state",
       {{"word_order", s.word_order},
        {"cursor", s.cursor},
        {"stage", stage_name(s.stage)},
        {"attempts_this_stage", s.attempts_this_stage},
        {"paused", s.paused}}},
      {"events", events_to_json(s.events)},
  };
}

json serialize_game(const MatchingGameState& s) {
  json cards = json::array();
  for (const auto& c : s.cards) {
    cards.push_back({{"word_id", c.word_id}, {"category", c.category}, {"status", card_status_name(c.status)}});
  }
  return json{
      {"schemaVersion", kGameSchemaVersion},
      {"kind", "matching"},
      {"game_id", s.game_id},
      {"version", s.version},
      {"created_at", s.created_at},
      {"config", matching_config_to_json(s.config)},
      {"state",
       {{"cards", std::move(cards)},
        {"face_up", s.face_up},
        {"pairs_attempted", s.pairs_attempted},
        {"paused", s.paused}}},
      {"events", events_to_json(s.events)},
  };
}

json serialize_game(const GameState& s) {
  return std::visit([](const auto& g) { return serialize_game(g); }, s);
}

namespace {

SortingGameState read_sorting(const json& doc, const Lexicon& lexicon) {
  const Reader& r = kSchema;
  SortingGameState s;
  s.config = read_sorting_config(r, r.field(doc, "config"), nullptr);
  const auto& st = r.field(doc, "state");
  r.only_keys(st, {"word_order", "cursor", "stage", "attempts_this_stage", "paused"}, "sorting state");
  s.word_order = r.strings(r.field(st, "word_order"), "'word_order'");
  const auto cursor = r.integer(st, "cursor");
  const auto stage = parse_stage(r.str(st, "stage"));
  if (!stage) r.fail("unknown stage '" + st["stage"].get<std::string>() + "'");
  s.stage = *stage;
  const auto attempts = r.integer(st, "attempts_this_stage");
  s.paused = r.boolean(st, "paused");

  require_words(lexicon, s.config.word_ids);
  require_words(lexicon, s.word_order);

  auto sorted_order = s.word_order;
  auto sorted_ids = s.config.word_ids;
  std::sort(sorted_order.begin(), sorted_order.end());
  std::sort(sorted_ids.begin(), sorted_ids.end());
  if (sorted_order != sorted_ids) r.fail("word_order is not a permutation of word_ids");
  if (cursor < 0 || static_cast<std::size_t>(cursor) > s.word_order.size()) r.fail("cursor out of range");
  s.cursor = static_cast<std::size_t>(cursor);
  if ((s.stage == SortingStage::Finished) != (s.cursor == s.word_order.size())) {
    r.fail("stage and cursor disagree about completion");
  }
  if (attempts < 0) r.fail("attempts_this_stage is negative");
  s.attempts_this_stage = static_cast<int>(attempts);
  if (s.paused && s.finished()) r.fail("a finished game cannot be paused");

  try {
    detail::check_sorting_config(s.config, lexicon);
    for (const auto& id : s.word_order) s.answers.push_back(detail::sorting_answer(s.config, lexicon, id));
  } catch (const Error& e) {
    if (e.code() == Errc::UnknownWordId) throw;
    r.fail(e.what());
  }
  return s;
}

MatchingGameState read_matching(const json& doc, const Lexicon& lexicon) {
  const Reader& r = kSchema;
  MatchingGameState s;
  s.config = read_matching_config(r, r.field(doc, "config"), nullptr);
  const auto& st = r.field(doc, "state");
  r.only_keys(st, {"cards", "face_up", "pairs_attempted", "paused"}, "matching state");
  const auto& cards = r.field(st, "cards");
  if (!cards.is_array()) r.fail("'cards' must be an array");
  for (const auto& c : cards) {
    r.only_keys(c, {"word_id", "category", "status"}, "card");
    Card card{r.str(c, "word_id"), r.str(c, "category"), CardStatus::FaceDown};
    const auto status = parse_card_status(r.str(c, "status"));
    if (!status) r.fail("unknown card status '" + c["status"].get<std::string>() + "'");
    card.status = *status;
    s.cards.push_back(std::move(card));
  }
  s.face_up = r.indices(r.field(st, "face_up"), "'face_up'");
  const auto pairs = r.integer(st, "pairs_attempted");
  if (pairs < 0) r.fail("pairs_attempted is negative");
  s.pairs_attempted = static_cast<int>(pairs);
  s.paused = r.boolean(st, "paused");

  for (const auto& [_, pool] : s.config.word_pool) require_words(lexicon, pool);
  for (const auto& c : s.cards) require_words(lexicon, {c.word_id});

  try {
    detail::check_matching_config(s.config, lexicon);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  const auto expected = s.config.contrast.size() * static_cast<std::size_t>(s.config.cards_per_category);
  if (s.cards.size() != expected) r.fail("card count does not match the config");
  for (const auto& c : s.cards) {
    const auto& pool = s.config.word_pool.at(c.category);
    if (std::find(pool.begin(), pool.end(), c.word_id) == pool.end()) {
      r.fail("card '" + c.word_id + "' is not in the '" + c.category + "' pool");
    }
  }
  if (s.face_up.size() > 2) r.fail("more than two cards face up");
  std::set<std::size_t> up(s.face_up.begin(), s.face_up.end());
  if (up.size() != s.face_up.size()) r.fail("face_up repeats a card");
  for (std::size_t i = 0; i < s.cards.size(); ++i) {
    if ((s.cards[i].status == CardStatus::FaceUp) != up.contains(i)) r.fail("face_up disagrees with card statuses");
  }
  if (s.paused && s.finished()) r.fail("a finished game cannot be paused");
  return s;
}

}  // namespace

GameState deserialize_game(const json& doc, const Lexicon& lexicon) {
  const Reader& r = kSchema;
  if (!doc.is_object()) r.fail("game document must be an object");
  r.only_keys(doc, {"schemaVersion", "kind", "game_id", "version", "created_at", "config", "state", "events"},
              "game document");
  if (r.integer(doc, "schemaVersion") != kGameSchemaVersion) r.fail("unsupported schemaVersion");
  const auto kind = parse_game_kind(r.str(doc, "kind"));
  if (!kind) r.fail("unknown game kind");

  const auto& events_json = r.field(doc, "events");
  if (!events_json.is_array()) r.fail("'events' must be an array");
  std::vector<GameEvent> events;
  for (const auto& e : events_json) events.push_back(event_from_json(r, e));

  auto finish = [&](auto s) -> GameState {
    s.game_id = r.str(doc, "game_id");
    s.version = r.unsigned_integer(doc, "version");
    s.created_at = r.integer(doc, "created_at");
    s.events = std::move(events);
    for (const auto& e : s.events) {
      if (e.word_id) require_words(lexicon, {*e.word_id});
    }
    return s;
  };
  if (*kind == GameKind::Sorting) return finish(read_sorting(doc, lexicon));
  return finish(read_matching(doc, lexicon));
}

}  // namespace wordify
