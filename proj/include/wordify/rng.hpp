#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace wordify {

// 64-bit linear congruential generator with Knuth's MMIX constants. Layouts
// must be reproducible by any implementation, so the recurrence, the output
// function and the shuffle below are a fixed contract:
//
//   state' = state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
//   below(n) = (state' >> 33) % n
//
// The generator's first state is the seed itself.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }

  // Uniform-ish draw in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept { return (next() >> 33) % bound; }

 private:
  std::uint64_t state_;
};

// Fisher-Yates from the back: for i = n-1 .. 1, swap(v[i], v[below(i+1)]).
template <typename T>
void seeded_shuffle(std::vector<T>& values, Lcg64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    if (j != i - 1) std::swap(values[i - 1], values[j]);
  }
}

}  // namespace wordify
