#include "wordify/commands.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wordify/consistency.hpp"
#include "wordify/error.hpp"
#include "wordify/lexicon.hpp"
#include "wordify/roster.hpp"
#include "wordify/service.hpp"
#include "wordify/simulator.hpp"
#include "wordify/store.hpp"

namespace wordify {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct IoFailure {
  std::string message;
};

std::string read_file(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoFailure{"cannot read '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const std::string& path) {
  auto doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::ConfigInvalid, "'" + path + "' is not valid JSON");
  return doc;
}

CategoryRegistry load_categories(const std::string& path) {
  return path.empty() ? CategoryRegistry::standard() : CategoryRegistry::from_json(read_json_file(path));
}

PatternCatalog load_patterns(const std::string& path) {
  return path.empty() ? PatternCatalog::standard() : PatternCatalog::from_json(read_json_file(path));
}

IngestResult ingest_file(const std::string& path, const std::string& categories, const std::string& patterns) {
  std::ifstream in(path);
  if (!in) throw IoFailure{"cannot read '" + path + "'"};
  return ingest_lexicon(in, load_categories(categories), load_patterns(patterns));
}

json violations_json(const IngestResult& result) {
  json out = json::array();
  for (const auto& [line, v] : result.violations) {
    out.push_back({{"line", line}, {"kind", violation_name(v.kind)}, {"indices", v.indices}, {"detail", v.detail}});
  }
  return out;
}

void print_violations(const IngestResult& result, std::ostream& out) {
  for (const auto& [line, v] : result.violations) {
    out << "line " << line << ": " << violation_name(v.kind);
    if (!v.indices.empty()) {
      out << " [";
      for (std::size_t i = 0; i < v.indices.size(); ++i) out << (i ? "," : "") << v.indices[i];
      out << "]";
    }
    if (!v.detail.empty()) out << ": " << v.detail;
    out << '\n';
  }
}

// Stores every audio file the lexicon refers to that exists under dir.
std::size_t import_audio(Store& store, const Lexicon& lexicon, const fs::path& dir, std::ostream& err) {
  std::size_t imported = 0;
  if (dir.empty() || !fs::is_directory(dir)) return 0;
  for (const Word* w : lexicon.ordered()) {
    if (!w->audio) continue;
    const auto file = dir / *w->audio;
    if (!fs::is_regular_file(file)) {
      err << "warning: no audio file for " << w->id << " at " << file.string() << '\n';
      continue;
    }
    store.put_audio(AudioAsset{*w->audio, media_type_for(*w->audio), read_file(file.string(), true)});
    ++imported;
  }
  return imported;
}

std::atomic<HttpServer*> g_running_server{nullptr};

extern "C" void stop_on_signal(int) {
  if (auto* s = g_running_server.load()) s->stop();
}

struct Options {
  bool json_out = false;
  std::string file, out_store, categories, patterns, audio_dir;
  std::string store;
  std::optional<int> grade;
  std::string category, pattern;
  std::string script;
  std::string listen = "127.0.0.1:8080";
  long ttl = 3600;
  std::string lexicon;
  std::string name, role, credential, teacher, school;
};

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const auto result = ingest_file(o.file, o.categories, o.patterns);
  if (!result.violations.empty()) {
    if (o.json_out) {
      out << json{{"words", result.lexicon.size()}, {"violations", violations_json(result)}, {"audio", 0}}.dump(2)
          << '\n';
    } else {
      print_violations(result, out);
      out << result.violations.size() << " violation(s); store not written\n";
    }
    return kExitFailure;
  }
  auto store = open_sqlite_store(o.out_store, true);
  store->replace_lexicon(result.lexicon);
  const fs::path audio_dir = o.audio_dir.empty() ? fs::path(o.file).parent_path() / "audio" : fs::path(o.audio_dir);
  const auto audio = import_audio(*store, result.lexicon, audio_dir, err);
  if (o.json_out) {
    out << json{{"words", result.lexicon.size()}, {"violations", json::array()}, {"audio", audio}}.dump(2) << '\n';
  } else {
    out << result.lexicon.size() << " words loaded\n";
    out << audio << " audio files stored\n";
  }
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  auto store = open_sqlite_store(o.store, false);
  const auto report = consistency_report(store->load_lexicon());
  if (o.json_out) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << render_table(report);
  }
  return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out) {
  auto store = open_sqlite_store(o.store, false);
  const auto lex = store->load_lexicon();
  WordFilter filter;
  filter.grade = o.grade;
  if (!o.category.empty()) filter.category = o.category;
  if (!o.pattern.empty()) filter.pattern = o.pattern;
  const auto ids = query_words(lex, filter);
  if (o.json_out) {
    out << json(ids).dump(2) << '\n';
  } else {
    for (const auto& id : ids) out << id << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto script = sim_script_from_json(read_json_file(o.script));
  auto store = open_sqlite_store(o.store, false);
  const auto lex = store->load_lexicon();
  const auto result = simulate(script, lex);
  if (o.json_out) {
    out << to_json(result).dump(2) << '\n';
  } else {
    out << "game: " << game_id_of(result.final_state) << " (" << game_kind_name(kind_of(result.final_state)) << ")\n";
    out << "finished: " << (is_finished(result.final_state) ? "yes" : "no") << '\n';
    out << "actions: " << result.actions << '\n';
    out << "events: " << events_of(result.final_state).size() << '\n';
    out << "violations: " << result.violations.size() << '\n';
  }
  for (const auto& v : result.violations) err << "violation: " << v << '\n';
  return result.violations.empty() ? kExitOk : kExitFailure;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto colon = o.listen.rfind(':');
  if (colon == std::string::npos) {
    err << "error: --listen must be host:port\n";
    return kExitEnvironment;
  }
  const std::string host = o.listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.listen.substr(colon + 1));
  } catch (const std::exception&) {
    err << "error: bad port in '" << o.listen << "'\n";
    return kExitEnvironment;
  }

  std::shared_ptr<Store> store = open_sqlite_store(o.store, !o.lexicon.empty());
  if (!o.lexicon.empty()) {
    const auto result = ingest_file(o.lexicon, o.categories, o.patterns);
    if (!result.violations.empty()) {
      print_violations(result, err);
      return kExitFailure;
    }
    store->replace_lexicon(result.lexicon);
    import_audio(*store, result.lexicon, fs::path(o.lexicon).parent_path() / "audio", err);
  } else if (!o.categories.empty()) {
    err << "error: --categories applies together with --lexicon\n";
    return kExitEnvironment;
  }

  Service service(store, ServiceOptions{std::chrono::seconds(o.ttl), now_ms});
  HttpServer server(service, &out);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    err << "error: cannot listen on " << o.listen << '\n';
    return kExitEnvironment;
  }
  out << json{{"event", "listening"}, {"host", host}, {"port", bound}}.dump() << std::endl;

  g_running_server = &server;
  auto previous_int = std::signal(SIGINT, stop_on_signal);
  auto previous_term = std::signal(SIGTERM, stop_on_signal);
  const bool ok = server.run();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  g_running_server = nullptr;
  out << json{{"event", "stopped"}}.dump() << std::endl;
  return ok ? kExitOk : kExitEnvironment;
}

int cmd_user_add(const Options& o, std::ostream& out) {
  auto store = open_sqlite_store(o.store, false);
  NewUserRequest request{o.name, o.role, o.credential, std::nullopt, std::nullopt};
  if (!o.teacher.empty()) request.teacher_id = o.teacher;
  if (!o.school.empty()) request.school_id = o.school;
  User created;
  store->transaction([&] {
    Roster roster(store->load_users());
    created = roster.create_user(request);
    store->insert_user(created);
  });
  if (o.json_out) {
    out << user_to_json(created).dump(2) << '\n';
  } else {
    out << created.id << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wordification lexicon, game and service tooling", "wordify"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Validate a lexicon file and load it into a store");
  ingest->add_option("file", o.file, "Lexicon file, one JSON record per line")->required();
  ingest->add_option("--out", o.out_store, "Store to create or update")->required();
  ingest->add_option("--categories", o.categories, "Sound category registry (JSON)");
  ingest->add_option("--patterns", o.patterns, "Pattern sets per category (JSON)");
  ingest->add_option("--audio-dir", o.audio_dir, "Directory holding the audio files");
  ingest->add_flag("--json", o.json_out, "Machine-readable output");

  auto* report = app.add_subcommand("report", "Print the sound/spelling consistency report");
  report->add_option("store", o.store, "Store path")->required();
  report->add_flag("--json", o.json_out, "Machine-readable output");

  auto* query = app.add_subcommand("query", "List words by grade, sound category and pattern");
  query->add_option("store", o.store, "Store path")->required();
  query->add_option("--grade", o.grade, "Grade level");
  query->add_option("--category", o.category, "Sound category");
  query->add_option("--pattern", o.pattern, "Spelling pattern");
  query->add_flag("--json", o.json_out, "Machine-readable output");

  auto* sim = app.add_subcommand("simulate", "Play a game headlessly from a script");
  sim->add_option("script", o.script, "Simulation script (JSON)")->required();
  sim->add_option("--store", o.store, "Store holding the lexicon")->required();
  sim->add_flag("--json", o.json_out, "Machine-readable output");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--store", o.store, "Store path")->envname("WORDIFY_STORE")->required();
  serve->add_option("--listen", o.listen, "host:port (port 0 picks a free port)")
      ->envname("WORDIFY_LISTEN")
      ->capture_default_str();
  serve->add_option("--ttl", o.ttl, "Token lifetime in seconds")->envname("WORDIFY_TOKEN_TTL")->capture_default_str();
  serve->add_option("--lexicon", o.lexicon, "Lexicon file to load at startup")->envname("WORDIFY_LEXICON");
  serve->add_option("--categories", o.categories, "Sound category registry for --lexicon")
      ->envname("WORDIFY_CATEGORIES");
  serve->add_option("--patterns", o.patterns, "Pattern sets for --lexicon")->envname("WORDIFY_PATTERNS");

  auto* user = app.add_subcommand("user", "Manage accounts");
  user->require_subcommand(1);
  auto* user_add = user->add_subcommand("add", "Register a user");
  user_add->add_option("--store", o.store, "Store path")->required();
  user_add->add_option("--name", o.name, "Display name")->required();
  user_add->add_option("--role", o.role, "student, teacher, administrator, developer or system_administrator")
      ->required();
  user_add->add_option("--credential", o.credential, "Password")->required();
  user_add->add_option("--teacher", o.teacher, "Teacher id (students)");
  user_add->add_option("--school", o.school, "School id");
  user_add->add_flag("--json", o.json_out, "Machine-readable output");

  std::vector<const char*> argv{"wordify"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitEnvironment;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out, err);
    if (report->parsed()) return cmd_report(o, out);
    if (query->parsed()) return cmd_query(o, out);
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (serve->parsed()) return cmd_serve(o, out, err);
    if (user_add->parsed()) return cmd_user_add(o, out);
  } catch (const IoFailure& e) {
    err << "I/O error: " << e.message << '\n';
    return kExitEnvironment;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool environment = e.code() == Errc::StorageFailure || e.code() == Errc::UnreadableStream;
    return environment ? kExitEnvironment : kExitFailure;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitEnvironment;
}

}  // namespace wordify
