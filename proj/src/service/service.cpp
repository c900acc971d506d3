#include "wordify/service.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <vector>

#include "httplib.h"
#include "wordify/error.hpp"
#include "wordify/roster.hpp"
#include "wordify/token.hpp"
#include "wordify/views.hpp"

namespace wordify {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string error;
  std::string detail;
  json extra = json::object();
};

[[noreturn]] void reject(int status, std::string error, std::string detail = {}) {
  throw HttpError{status, std::move(error), std::move(detail)};
}

ApiResponse json_response(int status, const json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

ApiResponse error_response(const HttpError& e) {
  json body = e.extra;
  body["error"] = e.error;
  body["detail"] = e.detail;
  return json_response(e.status, body);
}

std::string etag_of(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "\"%016llx\"", static_cast<unsigned long long>(h));
  return buf;
}

// Sets the validator and turns a matching If-None-Match into a bodiless 304.
ApiResponse cacheable(const ApiRequest& req, ApiResponse r, std::string cache_control) {
  const auto tag = etag_of(r.body);
  r.headers["ETag"] = tag;
  r.headers["Cache-Control"] = std::move(cache_control);
  auto it = req.headers.find("if-none-match");
  if (it != req.headers.end() && it->second == tag) {
    r.status = 304;
    r.body.clear();
  }
  return r;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    out.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return out;
}

std::optional<std::string> query_param(const ApiRequest& req, const std::string& key) {
  auto it = req.query.find(key);
  if (it == req.query.end()) return std::nullopt;
  return it->second;
}

const json& require_field(const json& body, const char* key, const char* error) {
  auto it = body.find(key);
  if (it == body.end()) reject(400, error, std::string("missing '") + key + "'");
  return *it;
}

std::string string_field(const json& body, const char* key, const char* error) {
  const auto& v = require_field(body, key, error);
  if (!v.is_string()) reject(400, error, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* key, const char* error) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) reject(400, error, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

bool is_admin(Role r) { return r == Role::Administrator || r == Role::SystemAdministrator; }

int status_for(Errc code) {
  switch (code) {
    case Errc::StorageFailure:
    case Errc::OrphanGame:
    case Errc::SchemaMismatch:
      return 500;
    default:
      return 400;
  }
}

}  // namespace

struct Service::Context {
  const ApiRequest& req;
  TokenClaims claims;

  json body() const {
    auto parsed = json::parse(req.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) reject(400, "InvalidRequest", "body must be a JSON object");
    return parsed;
  }
};

Service::Service(std::shared_ptr<Store> store, ServiceOptions options)
    : store_(std::move(store)), options_(std::move(options)) {}

std::shared_ptr<const Lexicon> Service::lexicon() {
  const auto revision = store_->lexicon_revision();
  std::lock_guard lock(lexicon_mu_);
  if (!lexicon_ || revision != lexicon_revision_) {
    lexicon_ = std::make_shared<const Lexicon>(store_->load_lexicon());
    lexicon_revision_ = revision;
  }
  return lexicon_;
}

ApiResponse Service::handle(const ApiRequest& req) {
  try {
    const auto seg = split_path(req.path);
    if (seg.size() < 3 || seg[0] != "api" || seg[1] != "v1") reject(404, "NotFound", req.path);
    const std::vector<std::string> rest(seg.begin() + 2, seg.end());
    const auto& m = req.method;

    auto method_is = [&](const char* expected) {
      if (m != expected) reject(405, "MethodNotAllowed", m + " " + req.path);
    };

    if (rest.size() == 1 && rest[0] == "sessions") {
      method_is("POST");
      return login(req);
    }

    auto auth = req.headers.find("authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (auth == req.headers.end() || !std::string_view(auth->second).starts_with(kBearer)) {
      reject(401, "Unauthorized", "bearer token required");
    }
    const auto claims =
        verify_token(std::string_view(auth->second).substr(kBearer.size()), store_->token_secret(), options_.clock());
    if (!claims) reject(401, "Unauthorized", "token is invalid or expired");
    const Context ctx{req, *claims};

    if (rest.size() == 1) {
      if (rest[0] == "me") return method_is("GET"), me(ctx);
      if (rest[0] == "users") return method_is("POST"), create_user(ctx);
      if (rest[0] == "catalog") return method_is("GET"), catalog(ctx);
      if (rest[0] == "words") return method_is("GET"), words(ctx);
      if (rest[0] == "games") return method_is("POST"), create_game(ctx);
    }
    if (rest[0] == "games" && rest.size() == 2) return method_is("GET"), get_game(ctx, rest[1]);
    if (rest[0] == "games" && rest.size() == 3) {
      if (rest[2] == "actions") return method_is("POST"), game_action(ctx, rest[1]);
      if (rest[2] == "choices") return method_is("GET"), game_choices(ctx, rest[1]);
      if (rest[2] == "prompt-audio") return method_is("GET"), prompt_audio(ctx, rest[1]);
    }
    if (rest[0] == "students" && rest.size() == 3 && rest[2] == "progress") {
      return method_is("GET"), student_progress(ctx, rest[1]);
    }
    if (rest[0] == "teachers" && rest.size() == 3 && rest[2] == "class-report") {
      return method_is("GET"), class_report(ctx, rest[1]);
    }
    if (rest[0] == "audio" && rest.size() >= 2) {
      std::string key = rest[1];
      for (std::size_t i = 2; i < rest.size(); ++i) key += "/" + rest[i];
      return method_is("GET"), audio(ctx, key);
    }
    reject(404, "NotFound", req.path);
  } catch (const HttpError& e) {
    return error_response(e);
  } catch (const Error& e) {
    return error_response(HttpError{status_for(e.code()), std::string(errc_name(e.code())), e.detail()});
  } catch (const std::exception& e) {
    return error_response(HttpError{500, "InternalError", e.what()});
  }
}

ApiResponse Service::login(const ApiRequest& req) {
  const Context anon{req, {}};
  const json body = anon.body();
  const auto name = string_field(body, "name", "InvalidRequest");
  const auto credential = string_field(body, "credential", "InvalidRequest");
  const auto school = optional_string(body, "school_id", "InvalidRequest");

  const Roster roster(store_->load_users());
  const User* user = roster.authenticate(name, credential, school);
  if (!user) reject(401, "InvalidCredentials", "name or credential not recognized");

  const TokenClaims claims{user->id, user->role, options_.clock() + options_.token_ttl.count() * 1000};
  return json_response(200, json{{"token", issue_token(claims, store_->token_secret())},
                                 {"expires_at", claims.expires_at},
                                 {"user", user_to_json(*user)}});
}

ApiResponse Service::me(const Context& ctx) {
  const Roster roster(store_->load_users());
  const User* user = roster.find(ctx.claims.user_id);
  if (!user) reject(401, "Unauthorized", "user no longer exists");
  return json_response(200, user_to_json(*user));
}

ApiResponse Service::create_user(const Context& ctx) {
  const json body = ctx.body();
  NewUserRequest request{string_field(body, "name", "InvalidRequest"), string_field(body, "role", "InvalidRequest"),
                         string_field(body, "credential", "InvalidRequest"),
                         optional_string(body, "teacher_id", "InvalidRequest"),
                         optional_string(body, "school_id", "InvalidRequest")};

  if (ctx.claims.role == Role::Teacher) {
    if (request.role != role_name(Role::Student)) reject(403, "Forbidden", "teachers register students only");
    if (!request.teacher_id) request.teacher_id = ctx.claims.user_id;
    if (*request.teacher_id != ctx.claims.user_id) reject(403, "Forbidden", "teachers register their own students");
  } else if (!is_admin(ctx.claims.role)) {
    reject(403, "Forbidden", "role may not register users");
  }

  User created;
  store_->transaction([&] {
    Roster roster(store_->load_users());
    created = roster.create_user(request);
    store_->insert_user(created);
  });
  return json_response(201, user_to_json(created));
}

ApiResponse Service::catalog(const Context&) {
  const auto lex = lexicon();
  return json_response(200, json{{"categories", lex->categories().to_json()}, {"patterns", lex->patterns().to_json()}});
}

ApiResponse Service::words(const Context& ctx) {
  WordFilter filter;
  if (auto grade = query_param(ctx.req, "grade"); grade && !grade->empty()) {
    int g = 0;
    auto [ptr, ec] = std::from_chars(grade->data(), grade->data() + grade->size(), g);
    if (ec != std::errc() || ptr != grade->data() + grade->size()) reject(400, "InvalidRequest", "grade must be an integer");
    filter.grade = g;
  }
  if (auto c = query_param(ctx.req, "category"); c && !c->empty()) filter.category = *c;
  if (auto p = query_param(ctx.req, "pattern"); p && !p->empty()) filter.pattern = *p;

  const auto lex = lexicon();
  json list = json::array();
  for (const auto& id : query_words(*lex, filter)) {
    const Word& w = lex->at(id);
    json entry{{"id", w.id}, {"spelling", w.spelling}, {"grade", w.grade}, {"sentence", w.sentence}};
    entry["audio"] = w.audio ? json(audio_url(*w.audio)) : json(nullptr);
    list.push_back(std::move(entry));
  }
  return cacheable(ctx.req, json_response(200, json{{"words", std::move(list)}}), "private, no-cache");
}

namespace {

struct LoadedGame {
  StoredGame stored;
  GameState state;
};

LoadedGame load_game(Store& store, const Lexicon& lex, const std::string& id) {
  auto stored = store.get_game(id);
  if (!stored) reject(404, "NotFound", "no game '" + id + "'");
  auto state = deserialize_game(json::parse(stored->document), lex);
  return {std::move(*stored), std::move(state)};
}

// Owner, the owner's teacher, or an administrator may look at a game.
void require_viewer(const TokenClaims& who, const StoredGame& game, const Roster& roster) {
  if (who.user_id == game.owner_id || is_admin(who.role)) return;
  if (who.role == Role::Teacher) {
    const User* owner = roster.find(game.owner_id);
    if (owner && owner->teacher_id == who.user_id) return;
  }
  reject(403, "Forbidden", "not your game");
}

}  // namespace

ApiResponse Service::create_game(const Context& ctx) {
  const json body = ctx.body();
  const auto kind = parse_game_kind(string_field(body, "kind", "ConfigInvalid"));
  if (!kind) reject(400, "ConfigInvalid", "kind must be sorting or matching");
  const json config = body.contains("config") ? body["config"] : json::object();
  const auto student_id = optional_string(body, "student_id", "ConfigInvalid");

  const Roster roster(store_->load_users());
  std::string owner;
  if (ctx.claims.role == Role::Student) {
    if (student_id && *student_id != ctx.claims.user_id) reject(403, "Forbidden", "students create their own games");
    owner = ctx.claims.user_id;
  } else if (ctx.claims.role == Role::Teacher) {
    if (!student_id) reject(400, "ConfigInvalid", "student_id is required for an assignment");
    const User* student = roster.find(*student_id);
    if (!student || student->role != Role::Student) reject(404, "NotFound", "no student '" + *student_id + "'");
    if (student->teacher_id != ctx.claims.user_id) reject(403, "Forbidden", "not your student");
    owner = student->id;
  } else {
    reject(403, "Forbidden", "role may not create games");
  }

  const auto lex = lexicon();
  const auto at = options_.clock();
  GameState state = [&]() -> GameState {
    if (*kind == GameKind::Sorting) return new_sorting_game(sorting_config_from_json(config, *lex), *lex, "pending", at);
    return new_matching_game(matching_config_from_json(config, *lex), *lex, "pending", at);
  }();

  const auto id = store_->allocate_game_id();
  std::visit([&](auto& g) { g.game_id = id; }, state);
  store_->insert_game(
      StoredGame{id, owner, std::string(game_kind_name(*kind)), serialize_game(state).dump(), version_of(state)}, "create");
  return json_response(201, json{{"game_id", id}, {"owner_id", owner}, {"state", game_view(state, *lex)}});
}

ApiResponse Service::get_game(const Context& ctx, const std::string& id) {
  const auto lex = lexicon();
  auto game = load_game(*store_, *lex, id);
  require_viewer(ctx.claims, game.stored, Roster(store_->load_users()));
  return json_response(200, game_view(game.state, *lex));
}

ApiResponse Service::game_choices(const Context& ctx, const std::string& id) {
  const auto lex = lexicon();
  auto game = load_game(*store_, *lex, id);
  require_viewer(ctx.claims, game.stored, Roster(store_->load_users()));
  const auto* sorting = std::get_if<SortingGameState>(&game.state);
  if (!sorting) reject(400, "InvalidAction", "choices exist only in sorting games");
  return json_response(200, choices_view(*sorting));
}

ApiResponse Service::prompt_audio(const Context& ctx, const std::string& id) {
  const auto lex = lexicon();
  auto game = load_game(*store_, *lex, id);
  require_viewer(ctx.claims, game.stored, Roster(store_->load_users()));
  const auto* sorting = std::get_if<SortingGameState>(&game.state);
  if (!sorting) reject(400, "InvalidAction", "prompt audio exists only in sorting games");
  if (sorting->finished()) reject(404, "NotFound", "game is finished");
  const Word* w = lex->find(sorting->current().word_id);
  if (!w || !w->audio) reject(404, "NotFound", "no audio for the current word");
  auto asset = store_->get_audio(*w->audio);
  if (!asset) reject(404, "NotFound", "audio asset missing");
  ApiResponse r;
  r.content_type = asset->media_type;
  r.body = std::move(asset->bytes);
  return cacheable(ctx.req, std::move(r), "private, no-cache");
}

ApiResponse Service::game_action(const Context& ctx, const std::string& id) {
  const json body = ctx.body();
  const auto& expected_json = require_field(body, "expected_version", "InvalidAction");
  if (!expected_json.is_number_unsigned() && !(expected_json.is_number_integer() && expected_json.get<std::int64_t>() >= 0)) {
    reject(400, "InvalidAction", "expected_version must be a non-negative integer");
  }
  const auto expected = expected_json.get<std::uint64_t>();

  const auto lex = lexicon();
  auto game = load_game(*store_, *lex, id);
  if (ctx.claims.user_id != game.stored.owner_id) reject(403, "Forbidden", "only the player may act on a game");

  auto conflict = [&](const GameState& current) {
    HttpError e{409, "VersionConflict", "game is at version " + std::to_string(version_of(current))};
    e.extra["state"] = game_view(current, *lex);
    throw e;
  };
  if (expected != version_of(game.state)) conflict(game.state);

  const auto& action = require_field(body, "action", "InvalidAction");
  if (!action.is_object()) reject(400, "InvalidAction", "action must be an object");
  const auto type = string_field(action, "type", "InvalidAction");
  const auto at = options_.clock();

  Step<GameState> step{game.state, {}};
  auto* sorting = std::get_if<SortingGameState>(&game.state);
  auto* matching = std::get_if<MatchingGameState>(&game.state);
  auto need_sorting = [&] {
    if (!sorting) reject(400, "InvalidAction", "'" + type + "' applies to sorting games");
  };
  if (type == "sound_choice") {
    need_sorting();
    auto s = submit_sound_choice(*sorting, string_field(action, "category", "InvalidAction"), at);
    step = {std::move(s.state), s.outcome};
  } else if (type == "pattern_choice") {
    need_sorting();
    auto s = submit_pattern_choice(*sorting, string_field(action, "pattern", "InvalidAction"), at);
    step = {std::move(s.state), s.outcome};
  } else if (type == "spelling") {
    need_sorting();
    auto s = submit_spelling(*sorting, string_field(action, "text", "InvalidAction"), at);
    step = {std::move(s.state), s.outcome};
  } else if (type == "flip") {
    if (!matching) reject(400, "InvalidAction", "'flip' applies to matching games");
    const auto& index = require_field(action, "index", "InvalidAction");
    if (!index.is_number_integer()) reject(400, "InvalidAction", "index must be an integer");
    const auto i = index.get<std::int64_t>();
    if (i < 0) reject(400, errc_name(Errc::IndexOutOfRange).data(), "index is negative");
    auto s = flip_card(*matching, static_cast<std::size_t>(i), at);
    step = {std::move(s.state), s.outcome};
  } else if (type == "pause") {
    step.state = pause_game(game.state, at);
  } else if (type == "resume") {
    step.state = resume_game(game.state, at);
  } else {
    reject(400, "InvalidAction", "unknown action type '" + type + "'");
  }

  const auto new_version = version_of(step.state);
  if (!store_->update_game(id, expected, serialize_game(step.state).dump(), new_version, type)) {
    conflict(load_game(*store_, *lex, id).state);
  }
  return json_response(200, json{{"outcome", outcome_view(step.outcome, step.state, *lex)},
                                 {"state", game_view(step.state, *lex)}});
}

ApiResponse Service::student_progress(const Context& ctx, const std::string& id) {
  const Roster roster(store_->load_users());
  const User* student = roster.find(id);
  if (!student || student->role != Role::Student) reject(404, "NotFound", "no student '" + id + "'");
  const bool allowed = ctx.claims.user_id == id || is_admin(ctx.claims.role) ||
                       (ctx.claims.role == Role::Teacher && student->teacher_id == ctx.claims.user_id);
  if (!allowed) reject(403, "Forbidden", "not permitted to read this student's progress");

  const auto lex = lexicon();
  std::vector<ProgressRecord> records;
  ProgressTotals totals;
  for (const auto& g : store_->games_owned_by(id)) {
    records.push_back(build_progress(deserialize_game(json::parse(g.document), *lex), id, roster));
    totals.add(records.back());
  }

  if (query_param(ctx.req, "format") == std::optional<std::string>("csv")) {
    ApiResponse r;
    r.content_type = "text/csv";
    r.body = progress_csv(records);
    return r;
  }
  json list = json::array();
  for (const auto& r : records) list.push_back(to_json(r));
  return json_response(200, json{{"student_id", id}, {"records", std::move(list)}, {"totals", to_json(totals)}});
}

ApiResponse Service::class_report(const Context& ctx, const std::string& id) {
  const Roster roster(store_->load_users());
  const User* teacher = roster.find(id);
  if (!teacher || teacher->role != Role::Teacher) reject(404, "NotFound", "no teacher '" + id + "'");
  bool anonymize = false;
  if (ctx.claims.role == Role::Developer) {
    anonymize = true;
  } else if (ctx.claims.user_id != id && !is_admin(ctx.claims.role)) {
    reject(403, "Forbidden", "not permitted to read this class report");
  }

  const auto lex = lexicon();
  std::vector<OwnedGame> games;
  for (const User* s : roster.students_of(id)) {
    for (const auto& g : store_->games_owned_by(s->id)) {
      games.push_back(OwnedGame{g.owner_id, deserialize_game(json::parse(g.document), *lex)});
    }
  }
  return json_response(200, to_json(wordify::class_report(roster, id, games), anonymize));
}

ApiResponse Service::audio(const Context& ctx, const std::string& key) {
  auto asset = store_->get_audio(key);
  if (!asset) reject(404, "NotFound", "no audio '" + key + "'");
  ApiResponse r;
  r.content_type = asset->media_type;
  r.body = std::move(asset->bytes);
  return cacheable(ctx.req, std::move(r), "private, max-age=86400");
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  std::ostream* log;
  std::mutex log_mu;
  httplib::Server server;

  Impl(Service& s, std::ostream* l) : service(s), log(l) {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    server.Put(".*", dispatch);
    server.Delete(".*", dispatch);
    server.Patch(".*", dispatch);
  }

  void serve(const httplib::Request& req, httplib::Response& res) {
    const auto started = std::chrono::steady_clock::now();
    ApiRequest api;
    api.method = req.method;
    api.path = req.path;
    for (const auto& [k, v] : req.params) api.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) {
      std::string name = k;
      for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      api.headers[name] = v;
    }
    api.body = req.body;

    ApiResponse out = service.handle(api);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    if (out.status != 304) res.set_content(out.body, out.content_type);

    if (log) {
      const auto elapsed =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      const json line{{"ts", now_ms()},      {"method", req.method}, {"path", req.path},
                      {"status", out.status}, {"duration_ms", elapsed}};
      std::lock_guard lock(log_mu);
      *log << line.dump() << std::endl;
    }
  }
};

HttpServer::HttpServer(Service& service, std::ostream* log) : impl_(std::make_unique<Impl>(service, log)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace wordify
