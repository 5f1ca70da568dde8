#pragma once

#include <cstdint>
#include <random>

namespace popproto {

// splitmix64 step (Vigna). Used for seed derivation and for expanding one
// 64-bit word into the handful of sub-values a transition needs.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// k-th derived seed of a master seed. Different tags give independent streams
// (edge schedule, transition randomness, initial configuration, per-trial).
inline uint64_t derive_seed(uint64_t master, uint64_t tag) {
  uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (tag + 1));
  uint64_t v = splitmix64(s);
  v ^= splitmix64(s);
  return v;
}

// Small self-contained generator for expanding a per-step random word.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() { return splitmix64(state); }
};

// Uniform draw in [0, n) by rejection; identical results on every platform
// for a given generator state. n must be >= 1.
template <class G>
uint64_t uniform_below(G& g, uint64_t n) {
  const uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
  for (;;) {
    uint64_t v = g();
    if (rem == 0 || v <= UINT64_MAX - rem) return v % n;
  }
}

inline uint64_t uniform_below(SplitMix64& g, uint64_t n) {
  const uint64_t rem = (UINT64_MAX % n + 1) % n;
  for (;;) {
    uint64_t v = g.next();
    if (rem == 0 || v <= UINT64_MAX - rem) return v % n;
  }
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, uint64_t tag) { return Rng(derive_seed(master, tag)); }

}  // namespace popproto
