#pragma once

#include <cstdint>
#include <random>

namespace ftir {

/// Purpose tags for derived random streams. Adding a tag never perturbs the
/// draws of existing ones: every stream seed is a hash of
/// (master, tag, a, b).
enum class Stream : std::uint64_t {
  layout = 1,
  peaks = 2,
  baseline = 3,
  noise = 4,
  drift = 5,
  drift_scan = 6,
  thickness = 7,
  split = 8,
  shuffle = 9,
  init = 10,
  bench = 11,
};

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632BE59BD9B4E019ull));
  return h;
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(master, stream, a, b));
}

}  // namespace ftir
