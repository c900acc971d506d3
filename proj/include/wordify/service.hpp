#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "wordify/game.hpp"
#include "wordify/lexicon.hpp"
#include "wordify/store.hpp"

namespace wordify {

struct ServiceOptions {
  std::chrono::seconds token_ttl{3600};
  std::function<Timestamp()> clock = now_ms;
};

// Transport-neutral request; header names are lowercase.
struct ApiRequest {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// The /api/v1 HTTP/JSON API. Holds no per-client state: every request is
// resolved against the store, so replicas sharing a store are interchangeable.
class Service {
 public:
  explicit Service(std::shared_ptr<Store> store, ServiceOptions options = {});

  ApiResponse handle(const ApiRequest& request);

  // The current lexicon, reloaded whenever the store's revision moves.
  std::shared_ptr<const Lexicon> lexicon();
  Store& store() { return *store_; }

 private:
  struct Context;

  ApiResponse login(const ApiRequest& request);
  ApiResponse me(const Context& ctx);
  ApiResponse create_user(const Context& ctx);
  ApiResponse catalog(const Context& ctx);
  ApiResponse words(const Context& ctx);
  ApiResponse create_game(const Context& ctx);
  ApiResponse get_game(const Context& ctx, const std::string& id);
  ApiResponse game_choices(const Context& ctx, const std::string& id);
  ApiResponse prompt_audio(const Context& ctx, const std::string& id);
  ApiResponse game_action(const Context& ctx, const std::string& id);
  ApiResponse student_progress(const Context& ctx, const std::string& id);
  ApiResponse class_report(const Context& ctx, const std::string& id);
  ApiResponse audio(const Context& ctx, const std::string& key);

  std::shared_ptr<Store> store_;
  ServiceOptions options_;
  std::mutex lexicon_mu_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::int64_t lexicon_revision_ = -1;
};

// Serves a Service over HTTP/1.1 and writes one JSON log line per request.
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::ostream* log = nullptr);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wordify
