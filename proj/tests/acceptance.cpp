// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "httplib.h"
#include "oracles.hpp"
#include "process.hpp"
#include "recount.hpp"
#include "service_fixture.hpp"
#include "wordify/commands.hpp"
#include "wordify/consistency.hpp"
#include "wordify/error.hpp"
#include "wordify/simulator.hpp"

using namespace wordify;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok && problems.size() < 5) problems.push_back(what);
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Long-o and long-i words whose vowel is spelled by one of the taught patterns.
std::vector<std::string> sortable_words(const Lexicon& lex) {
  std::set<std::string> ids;
  for (const std::string category : {"long-o", "long-i"}) {
    for (const auto& p : *lex.patterns().find(category)) {
      for (const auto& id : query_words(lex, {std::nullopt, category, p.name})) ids.insert(id);
    }
  }
  return {ids.begin(), ids.end()};
}

// ---------------------------------------------------------------------------

Verdict seed_fidelity() {
  Verdict v;
  std::ifstream in(testing::data_dir() / "seed_lexicon.jsonl");
  const auto result = ingest_lexicon(in, CategoryRegistry::from_json(testing::read_json(testing::data_dir() / "categories.json")),
                                     PatternCatalog::from_json(testing::read_json(testing::data_dir() / "patterns.json")));
  const auto& lex = result.lexicon;
  v.expect(result.violations.empty(), std::to_string(result.violations.size()) + " violations");

  const std::set<std::string> expected{"cane", "comb", "cucumber", "cent", "cinch", "kite",  "luck", "tax",  "phone",
                                       "rope", "ripe", "boat",     "know", "home",  "light", "sky",  "rice", "hide"};
  std::set<std::string> loaded;
  for (const auto* w : lex.ordered()) loaded.insert(w->spelling);
  v.expect(loaded == expected && lex.size() == 18, "loaded word set differs");

  const std::vector<std::pair<std::string, std::string>> classes{
      {"boat", "oa"}, {"know", "ow"}, {"home", "oCe"}, {"light", "igh"}, {"sky", "y"}, {"rice", "iCe"}, {"hide", "iCe"}};
  int matched = 0;
  for (const auto& [spelling, pattern] : classes) {
    std::optional<std::string> got;
    for (const auto& category : {"long-o", "long-i"}) {
      const Word& w = lex.at("w-" + spelling);
      const auto unit = target_unit(w, lex.categories().at(category));
      if (unit) got = classify_unit(w, *unit, *lex.patterns().find(category));
      if (got) break;
    }
    if (got == pattern) {
      ++matched;
    } else {
      v.expect(false, spelling + " classified as " + got.value_or("nothing"));
    }
  }

  testing::TempDir dir;
  const auto run = testing::run_wordify({"ingest", (testing::data_dir() / "seed_lexicon.jsonl").string(), "--out",
                                         dir.file("s.db"), "--categories", (testing::data_dir() / "categories.json").string(),
                                         "--patterns", (testing::data_dir() / "patterns.json").string()});
  v.expect(run.exit_code == 0 && run.out.find("18 words loaded") != std::string::npos, "wordify ingest: " + run.out);
  v.detail = std::to_string(lex.size()) + " words, " + std::to_string(result.violations.size()) + " violations, " +
             std::to_string(matched) + "/7 classifications";
  return v;
}

Verdict principle_witnesses() {
  Verdict v;
  const auto lex = testing::seed_lexicon();
  const auto r = consistency_report(lex);
  int found = 0;

  const bool c_listed = std::find(r.one_grapheme_many_sounds.begin(), r.one_grapheme_many_sounds.end(), "c") !=
                        r.one_grapheme_many_sounds.end();
  const bool c_exact = r.grapheme_to_phonemes.count("c") &&
                       r.grapheme_to_phonemes.at("c") == std::set<PhonemeSequence>{{Phoneme("K")}, {Phoneme("S")}};
  v.expect(c_listed && c_exact, "c not listed with exactly {[K],[S]}");
  found += c_listed && c_exact;

  const bool k_listed = std::find(r.one_sound_many_graphemes.begin(), r.one_sound_many_graphemes.end(), Phoneme("K")) !=
                        r.one_sound_many_graphemes.end();
  bool k_superset = r.phoneme_to_graphemes.count(Phoneme("K")) > 0;
  for (const char* g : {"c", "k", "ck"}) k_superset = k_superset && r.phoneme_to_graphemes.at(Phoneme("K")).count(g);
  v.expect(k_listed && k_superset, "K not listed with graphemes covering c, k, ck");
  found += k_listed && k_superset;

  const bool x = std::any_of(r.multi_phoneme_units.begin(), r.multi_phoneme_units.end(), [](const UnitWitness& w) {
    return w.grapheme == "x" && w.phonemes == PhonemeSequence{Phoneme("K"), Phoneme("S")};
  });
  v.expect(x, "x not listed with [K,S]");
  found += x;

  const bool ph = std::any_of(r.multi_letter_units.begin(), r.multi_letter_units.end(),
                              [](const UnitWitness& w) { return w.grapheme == "ph"; });
  v.expect(ph, "ph not listed as a multi-letter unit");
  found += ph;

  v.detail = std::to_string(found) + "/4 witnesses";
  return v;
}

Verdict matcher_oracle() {
  Verdict v;
  const auto lex = testing::seed_lexicon();
  const std::vector<std::string> patterns{"oa", "ow", "oCe", "igh", "y", "iCe"};
  std::vector<GraphemePattern> parsed;
  for (const auto& p : patterns) parsed.push_back(parse_pattern(p));

  const auto start = Clock::now();
  int checks = 0, agree = 0;
  for (const auto* w : lex.ordered()) {
    for (std::size_t u = 0; u < w->units.size(); ++u) {
      for (std::size_t p = 0; p < patterns.size(); ++p) {
        ++checks;
        if (pattern_matches(parsed[p], *w, u) == oracle::matches(patterns[p], w->spelling, w->units[u].letters)) {
          ++agree;
        } else {
          v.expect(false, w->spelling + " unit " + std::to_string(u) + " pattern " + patterns[p]);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  v.expect(checks >= 300, "only " + std::to_string(checks) + " checks");
  v.expect(elapsed < 1.0, "took " + fixed(elapsed) + " s");
  v.detail = std::to_string(agree) + "/" + std::to_string(checks) + " agree in " + fixed(elapsed, 4) + " s";
  return v;
}

// Random sorting and matching scripts drawn from the seed lexicon.
struct ScriptMaker {
  const Lexicon& lex;
  std::vector<std::string> both;
  std::mt19937_64 rng;

  ScriptMaker(const Lexicon& l, std::uint64_t seed) : lex(l), both(sortable_words(l)), rng(seed) {}

  std::uint64_t draw(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }

  json sorting_config(std::uint64_t seed) {
    auto pool = both;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + draw(pool.size()));
    return {{"category_a", "long-o"}, {"category_b", "long-i"}, {"word_ids", pool}, {"rng_seed", seed}};
  }

  json matching_config(std::uint64_t seed) {
    const int per = 2 * static_cast<int>(1 + draw(3));
    return {{"contrast", {"long-o", "long-i"}}, {"cards_per_category", per}, {"rng_seed", seed}};
  }

  json script(GameKind kind, std::uint64_t seed, const json& policy) {
    return {{"kind", game_kind_name(kind)},
            {"config", kind == GameKind::Sorting ? sorting_config(seed) : matching_config(seed)},
            {"policy", policy}};
  }
};

Verdict determinism_and_completeness() {
  Verdict v;
  testing::TempDir dir;
  const auto data = testing::data_dir();
  const auto store = dir.file("s.db");
  const auto ingest = testing::run_wordify({"ingest", (data / "seed_lexicon.jsonl").string(), "--out", store, "--categories",
                                            (data / "categories.json").string(), "--patterns",
                                            (data / "patterns.json").string()});
  if (ingest.exit_code != 0) {
    v.expect(false, "ingest failed: " + ingest.out);
    return v;
  }
  const auto lex = open_sqlite_store(store, false)->load_lexicon();
  ScriptMaker maker(lex, 7);

  const auto start = Clock::now();
  int runs = 0, violations = 0, identical = 0, finished_matching = 0, finished_sorting = 0, binary_runs = 0;
  int always_correct_ok = 0, always_correct_runs = 0;
  double binary_seconds = 0, replay_seconds = 0;
  const std::string script_path = dir.file("script.json");

  for (const auto kind : {GameKind::Sorting, GameKind::Matching}) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const auto doc = maker.script(kind, i, {{"type", "uniform_random"}, {"seed", 5000 + i}});
      std::ofstream(script_path) << doc.dump();
      const auto spawn_start = Clock::now();
      const auto run = testing::run_wordify({"simulate", script_path, "--store", store, "--json"});
      binary_seconds += seconds_since(spawn_start);
      ++runs;
      ++binary_runs;
      json out;
      try {
        out = json::parse(run.out);
      } catch (const json::exception&) {
        v.expect(false, "unparseable simulate output (exit " + std::to_string(run.exit_code) + "): " + run.out.substr(0, 200));
        continue;
      }
      v.expect(run.exit_code == 0, "simulate exit " + std::to_string(run.exit_code));
      violations += static_cast<int>(out["violations"].size());
      for (const auto& msg : out["violations"]) v.expect(false, msg.get<std::string>());

      const bool done = out["finished"] == true && !out["events"].empty() && out["events"].back()["kind"] == "complete";
      if (kind == GameKind::Matching) {
        finished_matching += done;
        v.expect(done, "matching game " + std::to_string(i) + " did not complete");
      } else {
        finished_sorting += done;
      }

      // Same seed, separate execution: the in-process replay must reproduce the event log.
      const auto replay_start = Clock::now();
      const auto again = to_json(simulate(sim_script_from_json(doc), lex));
      replay_seconds += seconds_since(replay_start);
      const bool same = again["events"] == out["events"];
      identical += same;
      v.expect(same, std::string(game_kind_name(kind)) + " seed " + std::to_string(i) + " diverged");
    }
  }

  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto doc = maker.script(GameKind::Sorting, 100000 + i, {{"type", "always_correct"}});
    json out;
    if (i < 50) {
      std::ofstream(script_path) << doc.dump();
      const auto run = testing::run_wordify({"simulate", script_path, "--store", store, "--json"});
      ++binary_runs;
      out = json::parse(run.out);
    } else {
      out = to_json(simulate(sim_script_from_json(doc), lex));
    }
    ++always_correct_runs;
    violations += static_cast<int>(out["violations"].size());
    std::map<std::string, int> correct;
    int incorrect = 0;
    for (const auto& e : out["events"]) {
      if (!e.contains("correct")) continue;
      if (e["correct"] == true) {
        correct[e["word_id"]]++;
      } else {
        ++incorrect;
      }
    }
    bool ok = incorrect == 0 && out["finished"] == true;
    for (const auto& id : doc["config"]["word_ids"]) ok = ok && correct[id.get<std::string>()] == 3;
    ok = ok && correct.size() == doc["config"]["word_ids"].size();
    always_correct_ok += ok;
    v.expect(ok, "always_correct sorting " + std::to_string(i) + " is not 3 correct events per word");
  }

  const double elapsed = seconds_since(start);
  v.expect(violations == 0, std::to_string(violations) + " invariant violations");
  v.expect(elapsed < 10.0, "took " + fixed(elapsed) + " s");
  v.detail = std::to_string(runs) + " random plays (" + std::to_string(identical) + " reproduced, " +
             std::to_string(finished_sorting) + " sorting and " + std::to_string(finished_matching) +
             " matching complete), " + std::to_string(always_correct_ok) + "/" + std::to_string(always_correct_runs) +
             " always-correct with 3 per word, " + std::to_string(violations) + " violations, " +
             std::to_string(binary_runs) + " binary runs, " + fixed(elapsed) + " s (" + fixed(binary_seconds) +
             " s in random-play processes, " + fixed(replay_seconds) + " s replaying in-process)";
  return v;
}

Verdict pause_round_trip() {
  Verdict v;
  const auto lex = testing::seed_lexicon();
  ScriptMaker maker(lex, 11);
  int checked = 0, equal = 0, paused = 0;
  for (const auto kind : {GameKind::Sorting, GameKind::Matching}) {
    int per_kind = 0;
    for (std::uint64_t i = 0; per_kind < 100 && i < 10000; ++i) {
      auto script = sim_script_from_json(maker.script(kind, 300 + i, {{"type", "uniform_random"}, {"seed", 900 + i}}));
      const auto full = simulate(script, lex);
      if (full.actions < 2) continue;
      script.max_actions = 1 + maker.draw(full.actions - 1);
      const auto mid = simulate(script, lex).final_state;
      if (is_finished(mid)) continue;
      ++per_kind;
      ++checked;
      paused += is_paused(mid);
      const auto text = serialize_game(mid).dump();
      const auto back = deserialize_game(json::parse(text), lex);
      const bool same = back == mid && serialize_game(back).dump() == text;
      equal += same;
      v.expect(same, std::string(game_kind_name(kind)) + " state " + std::to_string(i) + " changed in the round trip");
    }
    v.expect(per_kind == 100, "only " + std::to_string(per_kind) + " mid-game states");
  }
  v.detail = std::to_string(equal) + "/" + std::to_string(checked) + " mid-game states identical (" +
             std::to_string(paused) + " paused)";
  return v;
}

// ---------------------------------------------------------------------------

void mask_volatile(json& j) {
  static const std::set<std::string> keys{"created_at", "timestamp", "expires_at", "token", "started_at", "finished_at"};
  if (j.is_object()) {
    for (auto& [k, value] : j.items()) {
      if (keys.count(k)) {
        value = "<masked>";
      } else {
        mask_volatile(value);
      }
    }
  } else if (j.is_array()) {
    for (auto& e : j) mask_volatile(e);
  }
}

struct SessionStep {
  int replica;  // which of the two shared-store replicas receives it
  std::string method;
  std::string path;
  std::string who;  // login name whose token to send; empty for none
  json body;
  std::string login_as;  // when set, the response token is remembered for this name
};

struct Exchange {
  int status = 0;
  std::string body;
};

std::vector<Exchange> play_session(const std::vector<SessionStep>& steps, const std::vector<int>& ports) {
  std::vector<Exchange> out;
  std::map<std::string, std::string> tokens;
  std::vector<std::unique_ptr<httplib::Client>> clients;
  for (int port : ports) clients.push_back(std::make_unique<httplib::Client>("127.0.0.1", port));
  for (const auto& step : steps) {
    auto& client = *clients[static_cast<std::size_t>(step.replica) % clients.size()];
    httplib::Headers headers;
    if (!step.who.empty()) headers.emplace("Authorization", "Bearer " + tokens[step.who]);
    httplib::Result res = step.method == "GET"
                              ? client.Get(step.path, headers)
                              : client.Post(step.path, headers, step.body.dump(), "application/json");
    Exchange e;
    if (res) {
      e.status = res->status;
      e.body = res->body;
      if (!step.login_as.empty() && res->status == 200) tokens[step.login_as] = json::parse(res->body)["token"];
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string prepare_store(const testing::TempDir& dir, const std::string& name) {
  const auto data = testing::data_dir();
  const auto store = dir.file(name);
  testing::run_wordify({"ingest", (data / "seed_lexicon.jsonl").string(), "--out", store, "--categories",
                        (data / "categories.json").string(), "--patterns", (data / "patterns.json").string()});
  testing::run_wordify({"user", "add", "--store", store, "--name", "Rivera", "--role", "teacher", "--credential", "t"});
  testing::run_wordify(
      {"user", "add", "--store", store, "--name", "Ana", "--role", "student", "--credential", "a", "--teacher", "u-1"});
  return store;
}

Verdict statelessness() {
  Verdict v;
  testing::TempDir dir;
  const auto shared = prepare_store(dir, "shared.db");
  const auto single = prepare_store(dir, "single.db");

  auto act = [](std::uint64_t version, json action) { return json{{"expected_version", version}, {"action", action}}; };
  const json sorting{{"kind", "sorting"},
                     {"config",
                      {{"category_a", "long-o"}, {"category_b", "long-i"}, {"word_ids", {"w-boat"}}, {"rng_seed", 4}}}};
  const json matching{{"kind", "matching"},
                      {"config", {{"contrast", {"long-o", "long-i"}}, {"cards_per_category", 2}, {"rng_seed", 42}}}};
  const std::string g1 = "/api/v1/games/g-1", g2 = "/api/v1/games/g-2";
  const std::vector<SessionStep> steps{
      {0, "POST", "/api/v1/sessions", "", {{"name", "Ana"}, {"credential", "a"}}, "Ana"},
      {1, "GET", "/api/v1/me", "Ana", nullptr, ""},
      {0, "GET", "/api/v1/words?category=long-o", "Ana", nullptr, ""},
      {1, "POST", "/api/v1/games", "Ana", sorting, ""},
      {0, "GET", g1, "Ana", nullptr, ""},
      {1, "GET", g1 + "/choices", "Ana", nullptr, ""},
      {0, "POST", g1 + "/actions", "Ana", act(0, {{"type", "sound_choice"}, {"category", "long-i"}}), ""},
      {1, "POST", g1 + "/actions", "Ana", act(1, {{"type", "sound_choice"}, {"category", "long-o"}}), ""},
      {1, "POST", g1 + "/actions", "Ana", act(1, {{"type", "sound_choice"}, {"category", "long-o"}}), ""},  // replay
      {0, "POST", g1 + "/actions", "Ana", act(2, {{"type", "pause"}}), ""},
      {1, "POST", g1 + "/actions", "Ana", act(3, {{"type", "resume"}}), ""},
      {0, "GET", g1 + "/choices", "Ana", nullptr, ""},
      {1, "POST", g1 + "/actions", "Ana", act(4, {{"type", "pattern_choice"}, {"pattern", "oa"}}), ""},
      {0, "POST", g1 + "/actions", "Ana", act(5, {{"type", "spelling"}, {"text", "bote"}}), ""},
      {0, "POST", g1 + "/actions", "Ana", act(5, {{"type", "spelling"}, {"text", "bote"}}), ""},  // replay
      {1, "GET", g1, "Ana", nullptr, ""},
      {0, "POST", "/api/v1/games", "Ana", matching, ""},
      {1, "POST", g2 + "/actions", "Ana", act(0, {{"type", "flip"}, {"index", 0}}), ""},
      {0, "POST", g2 + "/actions", "Ana", act(1, {{"type", "flip"}, {"index", 3}}), ""},
      {1, "POST", g2 + "/actions", "Ana", act(1, {{"type", "flip"}, {"index", 3}}), ""},  // replay
      {0, "GET", g2, "Ana", nullptr, ""},
      {1, "GET", "/api/v1/students/u-2/progress", "Ana", nullptr, ""},
      {0, "POST", "/api/v1/sessions", "", {{"name", "Rivera"}, {"credential", "t"}}, "Rivera"},
      {1, "GET", "/api/v1/teachers/u-1/class-report", "Rivera", nullptr, ""},
  };

  std::vector<Exchange> two, one;
  {
    testing::ServerProcess a({"--store", shared, "--listen", "127.0.0.1:0"});
    testing::ServerProcess b({"--store", shared, "--listen", "127.0.0.1:0"});
    if (a.port() <= 0 || b.port() <= 0) {
      v.expect(false, "replicas did not start");
      return v;
    }
    two = play_session(steps, {a.port(), b.port()});
  }
  {
    testing::ServerProcess c({"--store", single, "--listen", "127.0.0.1:0"});
    if (c.port() <= 0) {
      v.expect(false, "single replica did not start");
      return v;
    }
    one = play_session(steps, {c.port()});
  }

  int identical = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    json x, y;
    try {
      x = json::parse(two[i].body);
      y = json::parse(one[i].body);
    } catch (const json::exception&) {
      v.expect(false, "step " + std::to_string(i) + " returned no JSON");
      continue;
    }
    mask_volatile(x);
    mask_volatile(y);
    const bool same = two[i].status == one[i].status && x.dump() == y.dump();
    identical += same;
    v.expect(same, "step " + std::to_string(i) + " " + steps[i].path + " differs");
  }

  int conflicts = 0;
  for (const std::size_t replay : {8u, 14u, 19u}) {
    const bool is409 = two[replay].status == 409 && json::parse(two[replay].body)["error"] == "VersionConflict";
    conflicts += is409;
    v.expect(is409, "replay at step " + std::to_string(replay) + " was " + std::to_string(two[replay].status));
  }
  auto store = open_sqlite_store(shared, false);
  const bool g1_linear = store->game_versions("g-1") == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6};
  const bool g2_linear = store->game_versions("g-2") == std::vector<std::uint64_t>{0, 1, 2};
  const auto doc = json::parse(store->get_game("g-1")->document);
  int sound_events = 0;
  for (const auto& e : doc["events"]) sound_events += e["kind"] == "sound_choice";
  v.expect(g1_linear && g2_linear, "history is not one version per accepted action");
  v.expect(sound_events == 2, "sound choice applied " + std::to_string(sound_events) + " times");

  v.detail = std::to_string(identical) + "/" + std::to_string(steps.size()) + " bodies identical across replicas, " +
             std::to_string(conflicts) + "/3 replays answered 409 with no double apply";
  return v;
}

// ---------------------------------------------------------------------------

// Whole-word tokens of every string value in a JSON document, plus its keys.
void collect_tokens(const json& j, std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, value] : j.items()) {
      out.insert(k);
      collect_tokens(value, out);
    }
  } else if (j.is_array()) {
    for (const auto& e : j) collect_tokens(e, out);
  } else if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    out.insert(s);
    std::string token;
    for (char c : s + " ") {
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        token += c;
      } else if (!token.empty()) {
        out.insert(token);
        token.clear();
      }
    }
  }
}

struct Pending {
  std::vector<std::string> spellings;
  std::vector<std::string> categories;
  std::vector<std::string> patterns;
};

Pending pending_of(const GameState& g, const Lexicon& lex) {
  Pending p;
  if (const auto* s = std::get_if<SortingGameState>(&g)) {
    const auto& a = s->current();
    p.spellings.push_back(a.spelling);
    p.categories.push_back(a.category);
    p.patterns.push_back(a.pattern);
  } else {
    const auto& m = std::get<MatchingGameState>(g);
    for (const auto& c : m.cards) {
      if (c.status != CardStatus::FaceDown) continue;
      p.spellings.push_back(lex.at(c.word_id).spelling);
      p.categories.push_back(c.category);
    }
  }
  return p;
}

struct LeakCounter {
  int bodies = 0;
  int leaks = 0;
  int pattern_substrings = 0;  // letters of a pattern inside ordinary words, e.g. "oa" in "floats"
  std::vector<std::string> examples;

  void check(const std::string& body, const Pending& p) {
    ++bodies;
    const auto text = lower(body);
    std::set<std::string> tokens;
    collect_tokens(json::parse(body), tokens);
    auto leak = [&](const std::string& what) {
      ++leaks;
      if (examples.size() < 3) examples.push_back(what + " in " + body.substr(0, 160));
    };
    for (const auto& s : p.spellings) {
      if (text.find(lower(s)) != std::string::npos) leak("spelling '" + s + "'");
    }
    for (const auto& c : p.categories) {
      if (text.find(lower(c)) != std::string::npos) leak("category '" + c + "'");
    }
    for (const auto& pat : p.patterns) {
      if (tokens.count(pat)) leak("pattern '" + pat + "'");
      if (body.find(pat) != std::string::npos) ++pattern_substrings;
    }
  }
};

// Plays random games through the API for a small school; used by the leak fuzz
// and the progress conservation check.
struct Classroom {
  testing::School school;
  Service service{school.store};
  testing::Client client{service};
  std::map<std::string, std::string> tokens;  // student id -> token
  std::mt19937_64 rng{2024};

  Classroom() {
    tokens["u-2"] = client.login("Ana", "ana-pw");
    tokens["u-3"] = client.login("Ben", "ben-pw");
    tokens["u-5"] = client.login("Cal", "cal-pw");
  }

  std::uint64_t draw(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }

  GameState load(const std::string& id) {
    return deserialize_game(json::parse(school.store->get_game(id)->document), *service.lexicon());
  }

  // A plausible next action: a legal choice with a fair chance of being wrong.
  json next_action(const std::string& id, const std::string& token) {
    const auto state = load(id);
    if (is_paused(state)) return {{"type", "resume"}};
    if (draw(20) == 0) return {{"type", "pause"}};
    if (const auto* s = std::get_if<SortingGameState>(&state)) {
      const auto choices = client.json_call("GET", "/api/v1/games/" + id + "/choices", token)["choices"];
      switch (s->stage) {
        case SortingStage::SoundSort: return {{"type", "sound_choice"}, {"category", choices[draw(choices.size())]}};
        case SortingStage::PatternChoice: return {{"type", "pattern_choice"}, {"pattern", choices[draw(choices.size())]}};
        default: {
          const auto& words = s->answers;
          const auto text = draw(2) == 0 ? s->current().spelling : words[draw(words.size())].spelling + "x";
          return {{"type", "spelling"}, {"text", text}};
        }
      }
    }
    const auto& m = std::get<MatchingGameState>(state);
    std::vector<std::size_t> down;
    for (std::size_t i = 0; i < m.cards.size(); ++i) {
      if (m.cards[i].status == CardStatus::FaceDown) down.push_back(i);
    }
    return {{"type", "flip"}, {"index", down[draw(down.size())]}};
  }

  json new_game_request(bool sorting, std::uint64_t seed) {
    const auto lex = service.lexicon();
    if (sorting) {
      auto pool = sortable_words(*lex);
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(1 + draw(pool.size()));
      return {{"kind", "sorting"},
              {"config", {{"category_a", "long-o"}, {"category_b", "long-i"}, {"word_ids", pool}, {"rng_seed", seed}}}};
    }
    return {{"kind", "matching"},
            {"config", {{"contrast", {"long-o", "long-i"}}, {"cards_per_category", 2 * (1 + draw(3))}, {"rng_seed", seed}}}};
  }
};

Verdict answer_hiding(Classroom& room) {
  Verdict v;
  LeakCounter views, outcomes, embedded;
  const auto lex = room.service.lexicon();
  std::uint64_t seed = 0;
  while (views.bodies < 500) {
    const auto& [student, token] = *std::next(room.tokens.begin(), static_cast<long>(seed % room.tokens.size()));
    const auto created = room.client.json_call("POST", "/api/v1/games", token, room.new_game_request(seed % 2 == 0, seed));
    ++seed;
    const std::string id = created["game_id"];
    for (int step = 0; step < 400 && views.bodies < 500; ++step) {
      const auto state = room.load(id);
      if (is_finished(state)) break;
      const auto pending = pending_of(state, *lex);
      views.check(room.client.call("GET", "/api/v1/games/" + id, token).body, pending);

      const auto action = room.next_action(id, token);
      const auto r = room.client.call("POST", "/api/v1/games/" + id + "/actions", token,
                                      json{{"expected_version", version_of(state)}, {"action", action}}.dump());
      v.expect(r.status == 200, "action rejected: " + r.body);
      const auto after = room.load(id);
      if (is_finished(after)) continue;
      // Cards turned over by this very action are shown to the player before they turn back.
      auto shown = pending_of(after, *lex);
      const auto body = json::parse(r.body);
      if (const auto* m = std::get_if<MatchingGameState>(&after)) {
        shown = {};
        std::set<std::size_t> revealed;
        for (const auto& c : body["outcome"]["revealed"]) revealed.insert(c["index"].get<std::size_t>());
        for (std::size_t i = 0; i < m->cards.size(); ++i) {
          if (m->cards[i].status != CardStatus::FaceDown || revealed.count(i)) continue;
          shown.spellings.push_back(lex->at(m->cards[i].word_id).spelling);
        }
        for (const auto& c : m->cards) {
          if (c.status == CardStatus::FaceDown) shown.categories.push_back(c.category);
        }
      }
      outcomes.check(r.body, shown);
      embedded.check(body["state"].dump(), pending_of(after, *lex));
    }
  }
  std::vector<std::string> examples = views.examples;
  examples.insert(examples.end(), outcomes.examples.begin(), outcomes.examples.end());
  examples.insert(examples.end(), embedded.examples.begin(), embedded.examples.end());
  const int leaks = views.leaks + outcomes.leaks + embedded.leaks;
  v.expect(leaks == 0, examples.empty() ? "" : examples.front());
  v.detail = std::to_string(views.bodies) + " state views + " + std::to_string(outcomes.bodies) +
             " action responses over " + std::to_string(seed) + " games, " + std::to_string(leaks) +
             " leaks (pattern letters inside sentence words: " +
             std::to_string(views.pattern_substrings + outcomes.pattern_substrings) + ")";
  return v;
}

json recount_totals(const testing::Recount& r, int games) {
  json per_word = json::object();
  for (const auto& [w, stages] : r.attempts) per_word[w] = stages;
  auto tallies = [](const std::map<std::string, std::pair<int, int>>& m) {
    json out = json::object();
    for (const auto& [k, t] : m) out[k] = {{"correct", t.first}, {"incorrect", t.second}};
    return out;
  };
  return {{"games", games}, {"per_word", per_word}, {"per_pattern", tallies(r.per_pattern)}, {"per_category", tallies(r.per_category)}};
}

Verdict progress_conservation(Classroom& room) {
  Verdict v;
  // Finish a few more games so the class holds complete and partial ones alike.
  for (std::uint64_t g = 0; g < 12; ++g) {
    const auto& [student, token] = *std::next(room.tokens.begin(), static_cast<long>(g % room.tokens.size()));
    const auto created = room.client.json_call("POST", "/api/v1/games", token, room.new_game_request(g % 2 == 1, 700 + g));
    const std::string id = created["game_id"];
    const int steps = g % 3 == 0 ? 5 : 1000;
    for (int s = 0; s < steps && !is_finished(room.load(id)); ++s) {
      room.client.call("POST", "/api/v1/games/" + id + "/actions", token,
                       json{{"expected_version", version_of(room.load(id))}, {"action", room.next_action(id, token)}}.dump());
    }
  }

  int compared = 0, equal = 0;
  const auto report_for = [&](const std::string& teacher, const std::string& name, const std::string& cred,
                              const std::vector<std::string>& students) {
    const auto report =
        room.client.json_call("GET", "/api/v1/teachers/" + teacher + "/class-report", room.client.login(name, cred));
    testing::Recount class_count;
    int class_games = 0;
    for (const auto& s : students) {
      testing::Recount one;
      int games = 0;
      for (const auto& stored : room.school.store->games_owned_by(s)) {
        const auto g = room.load(stored.game_id);
        one.add(g);
        class_count.add(g);
        ++games;
        ++class_games;
      }
      json listed;
      for (const auto& entry : report["students"]) {
        if (entry["student_id"] == s) listed = entry["totals"];
      }
      ++compared;
      const bool same = listed == recount_totals(one, games);
      equal += same;
      v.expect(same, "student " + s + " totals differ from the recount");
    }
    ++compared;
    const bool same = report["totals"] == recount_totals(class_count, class_games);
    equal += same;
    v.expect(same, "class totals for " + teacher + " differ from the recount");
    return class_games;
  };
  const int games = report_for("u-1", "Ms. Rivera", "teach", {"u-2", "u-3"}) + report_for("u-4", "Mr. Diaz", "teach2", {"u-5"});

  // A larger simulated class through the library.
  const auto lex = room.service.lexicon();
  std::vector<User> users{User{"t-1", "T", Role::Teacher, "", std::nullopt, std::nullopt}};
  for (int i = 0; i < 25; ++i) {
    users.push_back(User{"s-" + std::to_string(i), "S" + std::to_string(i), Role::Student, "", "t-1", std::nullopt});
  }
  const Roster roster(users);
  ScriptMaker maker(*lex, 99);
  std::vector<OwnedGame> owned;
  testing::Recount all;
  for (std::uint64_t g = 0; g < 400; ++g) {
    const auto kind = g % 2 ? GameKind::Matching : GameKind::Sorting;
    const auto result = simulate(sim_script_from_json(maker.script(kind, g, {{"type", "uniform_random"}, {"seed", g}})), *lex);
    owned.push_back(OwnedGame{"s-" + std::to_string(g % 25), result.final_state});
    all.add(result.final_state);
  }
  const auto report = class_report(roster, "t-1", owned);
  ++compared;
  const bool same = to_json(report.totals) == recount_totals(all, 400);
  equal += same;
  v.expect(same, "simulated class totals differ from the recount");

  v.detail = std::to_string(equal) + "/" + std::to_string(compared) + " reports equal the raw-event recount (" +
             std::to_string(games) + " API games, 400 simulated)";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  Classroom room;
  const std::vector<Criterion> criteria{
      {"seed lexicon fidelity", seed_fidelity},
      {"principle witnesses", principle_witnesses},
      {"matcher agrees with span oracle", matcher_oracle},
      {"game determinism and completeness", determinism_and_completeness},
      {"mid-game serialize round trip", pause_round_trip},
      {"statelessness across replicas", statelessness},
      {"answer key hidden from views", [&] { return answer_hiding(room); }},
      {"progress conservation", [&] { return progress_conservation(room); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.problems.push_back(std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << v.detail << '\n';
    for (const auto& p : v.problems) std::cout << "         " << p << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
