#include <sstream>

#include "doctest.h"
#include "httplib.h"
#include "process.hpp"
#include "support.hpp"
#include "wordify/commands.hpp"

using nlohmann::json;
using wordify::run_cli;

namespace {

struct Cli {
  int code = -1;
  std::string out;
  std::string err;
};

Cli cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Cli r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string seed_file(const std::string& name) { return (testing::data_dir() / name).string(); }

std::vector<std::string> ingest_args(const std::string& lexicon, const std::string& store) {
  return {"ingest",       lexicon, "--out", store, "--categories", seed_file("categories.json"), "--patterns",
          seed_file("patterns.json")};
}

std::string seeded_store(const testing::TempDir& dir) {
  const auto store = dir.file("store.db");
  REQUIRE(cli(ingest_args(seed_file("seed_lexicon.jsonl"), store)).code == 0);
  return store;
}

std::string write_file(const testing::TempDir& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir.file(name)) << text;
  return dir.file(name);
}

std::string seed_line(const std::string& spelling) {
  std::ifstream in(testing::data_dir() / "seed_lexicon.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (json::parse(line)["spelling"] == spelling) return line;
  }
  return {};
}

}  // namespace

TEST_CASE("ingest") {
  testing::TempDir dir;
  const auto store = dir.file("store.db");
  auto r = cli(ingest_args(seed_file("seed_lexicon.jsonl"), store));
  CHECK(r.code == 0);
  CHECK(r.out.find("18 words loaded") != std::string::npos);
  CHECK(r.out.find("18 audio files stored") != std::string::npos);

  auto as_json = cli({"ingest", seed_file("seed_lexicon.jsonl"), "--out", dir.file("j.db"), "--categories",
                      seed_file("categories.json"), "--patterns", seed_file("patterns.json"), "--json"});
  CHECK(as_json.code == 0);
  CHECK(json::parse(as_json.out)["words"] == 18);

  auto broken = json::parse(seed_line("rope"));
  broken["units"].erase(2);
  const auto bad = write_file(dir, "bad.jsonl", seed_line("boat") + "\n" + broken.dump() + "\n");
  r = cli(ingest_args(bad, dir.file("bad.db")));
  CHECK(r.code == 1);
  CHECK(r.out.find("line 2: ") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.file("bad.db")));

  r = cli(ingest_args(dir.file("missing.jsonl"), dir.file("m.db")));
  CHECK(r.code == 2);
  CHECK(cli({"ingest"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("report and query") {
  testing::TempDir dir;
  const auto store = seeded_store(dir);

  auto r = cli({"report", store, "--json"});
  REQUIRE(r.code == 0);
  const auto report = json::parse(r.out);
  std::vector<std::string> ambiguous;
  for (const auto& w : report["one_grapheme_many_sounds"]["witnesses"]) ambiguous.push_back(w["grapheme"]);
  CHECK(std::find(ambiguous.begin(), ambiguous.end(), "c") != ambiguous.end());
  bool ph = false;
  for (const auto& w : report["multi_letter_units"]["witnesses"]) ph |= w["grapheme"] == "ph";
  CHECK(ph);
  CHECK(cli({"report", store}).out.find("ph") != std::string::npos);

  const auto kite = write_file(dir, "kite.jsonl", seed_line("kite") + "\n");
  REQUIRE(cli(ingest_args(kite, dir.file("kite.db"))).code == 0);
  const auto small = json::parse(cli({"report", dir.file("kite.db"), "--json"}).out);
  CHECK(small["one_grapheme_many_sounds"]["count"] == 0);
  CHECK(small["multi_letter_units"]["count"] == 1);
  CHECK(small["multi_letter_units"]["witnesses"][0]["grapheme"] == "i_e");

  const auto empty = write_file(dir, "empty.jsonl", "");
  REQUIRE(cli(ingest_args(empty, dir.file("empty.db"))).code == 0);
  const auto none = json::parse(cli({"report", dir.file("empty.db"), "--json"}).out);
  CHECK(none["multi_letter_units"]["count"] == 0);
  CHECK(none["one_sound_many_graphemes"]["count"] == 0);

  r = cli({"query", store, "--category", "long-i", "--pattern", "igh"});
  CHECK(r.code == 0);
  CHECK(r.out == "w-light\n");
  r = cli({"query", store, "--category", "long-o", "--json"});
  CHECK(json::parse(r.out).size() == 6);
  CHECK(cli({"query", store, "--category", "nope"}).code == 1);
  CHECK(cli({"query", dir.file("absent.db")}).code == 2);
}

TEST_CASE("simulate") {
  testing::TempDir dir;
  const auto store = seeded_store(dir);

  const json sorting{{"kind", "sorting"},
                     {"config",
                      {{"category_a", "long-o"}, {"category_b", "long-i"}, {"word_ids", {"w-boat", "w-light"}}, {"rng_seed", 3}}},
                     {"policy", {{"type", "always_correct"}}}};
  auto r = cli({"simulate", write_file(dir, "s.json", sorting.dump()), "--store", store, "--json"});
  REQUIRE(r.code == 0);
  auto result = json::parse(r.out);
  CHECK(result["finished"] == true);
  CHECK(result["violations"].empty());
  int correct = 0;
  for (const auto& e : result["events"]) correct += e.value("correct", false) ? 1 : 0;
  CHECK(correct == 6);

  const json matching{{"kind", "matching"},
                      {"config", {{"contrast", {"long-o", "long-i"}}, {"cards_per_category", 4}, {"rng_seed", 9}}},
                      {"policy", {{"type", "uniform_random"}, {"seed", 77}}}};
  const auto mpath = write_file(dir, "m.json", matching.dump());
  r = cli({"simulate", mpath, "--store", store, "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["finished"] == true);
  CHECK(cli({"simulate", mpath, "--store", store, "--json"}).out == r.out);
  CHECK(cli({"simulate", mpath, "--store", store}).out.find("finished: yes") != std::string::npos);

  json scripted = sorting;
  scripted["policy"] = {{"type", "scripted"}, {"actions", {{{"type", "spelling"}, {"text", "boat"}}}}};
  r = cli({"simulate", write_file(dir, "x.json", scripted.dump()), "--store", store});
  CHECK(r.code == 1);
  CHECK(r.err.find("WrongStage") != std::string::npos);

  CHECK(cli({"simulate", write_file(dir, "junk.json", "{"), "--store", store}).code == 1);
  CHECK(cli({"simulate", dir.file("none.json"), "--store", store}).code == 2);
}

TEST_CASE("user add") {
  testing::TempDir dir;
  const auto store = seeded_store(dir);
  auto r = cli({"user", "add", "--store", store, "--name", "T", "--role", "teacher", "--credential", "pw"});
  CHECK(r.code == 0);
  CHECK(r.out == "u-1\n");
  r = cli({"user", "add", "--store", store, "--name", "S", "--role", "student", "--credential", "pw", "--teacher", "u-1",
           "--json"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["teacher_id"] == "u-1");
  CHECK(cli({"user", "add", "--store", store, "--name", "S", "--role", "student", "--credential", "pw", "--teacher",
             "u-1"})
            .code == 1);
  CHECK(cli({"user", "add", "--store", store, "--name", "Z", "--role", "wizard", "--credential", "pw"}).code == 1);
}

TEST_CASE("the binary serves the API") {
  testing::TempDir dir;
  const auto store = seeded_store(dir);
  REQUIRE(cli({"user", "add", "--store", store, "--name", "Ana", "--role", "student", "--credential", "pw"}).code == 0);

  const auto direct = testing::run_wordify({"query", store, "--pattern", "igh"});
  CHECK(direct.exit_code == 0);
  CHECK(direct.out == "w-light\n");
  CHECK(testing::run_wordify({"report", dir.file("nothing.db")}).exit_code == 2);

  testing::ServerProcess server({"--store", store, "--listen", "127.0.0.1:0"});
  REQUIRE_MESSAGE(server.port() > 0, server.first_line());
  CHECK(json::parse(server.first_line())["event"] == "listening");

  httplib::Client client("127.0.0.1", server.port());
  auto denied = client.Get("/api/v1/words");
  REQUIRE(denied);
  CHECK(denied->status == 401);
  auto login = client.Post("/api/v1/sessions", R"({"name":"Ana","credential":"pw"})", "application/json");
  REQUIRE(login);
  REQUIRE(login->status == 200);
  const std::string token = json::parse(login->body)["token"];
  auto words = client.Get("/api/v1/words?grade=1", {{"Authorization", "Bearer " + token}});
  REQUIRE(words);
  CHECK(words->status == 200);
  CHECK_FALSE(json::parse(words->body)["words"].empty());
  CHECK(server.stop() == 0);

  testing::ServerProcess missing({"--store", dir.file("nothing.db"), "--listen", "127.0.0.1:0"});
  CHECK(missing.wait() == 2);
}
