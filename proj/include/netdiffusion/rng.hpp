#ifndef NETDIFF_RNG_HPP
#define NETDIFF_RNG_HPP

#include <cstdint>
#include <random>

namespace netdiff {

// splitmix64; used to derive independent engine seeds from (seed, stream).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream));
}

// Stream ids for the pipeline stages. Row r of a generated matrix uses
// stream kStreamRowBase + r, so rows can be sampled independently (and in
// parallel) with serial/parallel equality.
constexpr uint64_t kStreamShape = 0x01;
constexpr uint64_t kStreamInter = 0x02;
constexpr uint64_t kStreamTimestamps = 0x03;
constexpr uint64_t kStreamRowBase = 0x1000;

// Thin deterministic wrapper; distributions are hand-rolled so results
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }
  uint32_t u32() { return static_cast<uint32_t>(next() >> 32); }
  uint16_t u16() { return static_cast<uint16_t>(next() >> 48); }

  // Uniform in [0, n); n > 0.
  uint64_t below(uint64_t n) {
    uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace netdiff

#endif
