// Reproducible random streams.
//
// Every random draw in the library comes from a Stream keyed on
// (master_seed, trial_index, site label). The key is mixed with SplitMix64
// and seeds a std::mt19937_64, whose output sequence is fixed by the C++
// standard. Conversions to doubles and bounded integers are done here rather
// than through <random> distributions, whose algorithms are
// implementation-defined. The result is bit-identical across platforms.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace stablelab {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  SeedSpec with_trial(std::uint64_t t) const { return {master_seed, t}; }
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

/// Parses decimal or 0x-prefixed hexadecimal; throws std::invalid_argument.
std::uint64_t parse_seed(std::string_view text);

class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(const SeedSpec& seed, std::string_view label);
  explicit Stream(std::uint64_t key) : engine_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., bound - 1}, unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t stream_key(const SeedSpec& seed, std::string_view label);

}  // namespace stablelab
