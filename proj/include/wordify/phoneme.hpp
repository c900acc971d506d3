#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wordify {

// An ARPAbet-style phoneme code without stress digits, e.g. "K", "OW".
class Phoneme {
 public:
  Phoneme() = default;
  explicit Phoneme(std::string code) : code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

  auto operator<=>(const Phoneme&) const = default;
  bool operator==(const Phoneme&) const = default;

 private:
  std::string code_;
};

using PhonemeSequence = std::vector<Phoneme>;

std::string join_phonemes(const PhonemeSequence& seq, std::string_view sep = " ");

class PhonemeInventory {
 public:
  PhonemeInventory() = default;
  explicit PhonemeInventory(std::set<std::string, std::less<>> codes) : codes_(std::move(codes)) {}

  // The 39 stressless ARPAbet phonemes.
  static const PhonemeInventory& arpabet();

  bool contains(const Phoneme& p) const { return codes_.contains(p.code()); }
  bool contains(std::string_view code) const { return codes_.contains(code); }
  std::size_t size() const noexcept { return codes_.size(); }

 private:
  std::set<std::string, std::less<>> codes_;
};

}  // namespace wordify
