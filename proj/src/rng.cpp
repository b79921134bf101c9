#include "stablelab/rng.hpp"

#include <charconv>
#include <stdexcept>

namespace stablelab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t parse_seed(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("invalid seed '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t stream_key(const SeedSpec& seed, std::string_view label) {
  std::uint64_t k = splitmix64(seed.master_seed);
  k = splitmix64(k ^ splitmix64(seed.trial_index + 0x5851f42d4c957f2dULL));
  return splitmix64(k ^ fnv1a64(label));
}

Stream::Stream(const SeedSpec& seed, std::string_view label) : engine_(stream_key(seed, label)) {}

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("below(0)");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

}  // namespace stablelab
