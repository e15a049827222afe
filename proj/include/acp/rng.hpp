#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace acp {

// splitmix64 finalizer; used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Named sub-stream derivation: one master seed fans out into independent
// streams ("scenario", "learner", "policy", ...) so paired experiments can
// share traces while keeping policy noise independent.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return splitmix64(master ^ h);
}

// Per-episode seed within a stream.
inline std::uint64_t episode_seed(std::uint64_t stream, int episode) {
  return splitmix64(stream + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(episode + 1));
}

// mt19937_64 core with hand-rolled output transforms so that draws are
// bit-identical across platforms (std::uniform_real_distribution is not
// guaranteed portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1): never returns an exact endpoint (safe for log()).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range, unbiased via rejection.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard Gumbel(0,1).
  double gumbel() { return -std::log(-std::log(uniform_open())); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace acp
