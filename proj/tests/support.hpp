#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"
#include "wordify/lexicon.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return WORDIFY_DATA_DIR; }

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

inline wordify::Lexicon seed_lexicon() {
  std::ifstream in(data_dir() / "seed_lexicon.jsonl");
  auto result = wordify::ingest_lexicon(in, wordify::CategoryRegistry::from_json(read_json(data_dir() / "categories.json")),
                                        wordify::PatternCatalog::from_json(read_json(data_dir() / "patterns.json")));
  return std::move(result.lexicon);
}

// A fresh directory removed with everything in it on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("wordify-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
