#pragma once

#include <cstdint>
#include <string_view>

namespace abxeval {

// Stateless 64-bit mixing (SplitMix64 finalizer). Every draw is a pure
// function of (key, counter), using only integer arithmetic, so streams are
// reproducible bit-for-bit across platforms, runs and thread schedules.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::string_view stream)
      : key_(mix64(seed, fnv1a64(stream))) {}

  std::uint64_t next() { return mix64(key_, counter_++); }

  // uniform in [0, 1), 53 random bits
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n) by rejection, unbiased
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // standard normal via Box-Muller; consumes two draws per call
  double next_gaussian();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace abxeval
