#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "popproto/graph.hpp"
#include "popproto/rng.hpp"

namespace popproto {

// Shared upper bounds every agent knows: N >= n and Delta >= max degree.
// The hop-color palette has 8*N^3*Delta^2 colors, numbered from 1.
struct KnowledgeParams {
  uint32_t cap_n = 2;
  uint32_t cap_delta = 1;

  uint64_t color_space() const {
    uint64_t n3 = static_cast<uint64_t>(cap_n) * cap_n * cap_n;
    return 8ull * n3 * cap_delta * cap_delta;
  }
  // Bits needed to index the palette; also the length of the numbers the
  // deterministic variant assembles from role bits.
  uint32_t number_bits() const { return std::bit_width(color_space() - 1); }
};

// Agent state for randomized two-hop coloring. prev/stamp hold the colors of
// the Delta most recently met partners, most recent first (slot k of the
// protocol is prev[k-1] here). idx keeps the result of the last memory read:
// 0 means the partner's color was not on record.
struct TwoHopState {
  uint64_t hopcolor = 1;
  std::vector<uint64_t> prev;
  std::vector<uint8_t> stamp;
  uint32_t idx = 0;

  bool operator==(const TwoHopState&) const = default;
};

// Sub-values one randomized interaction may consume: two fresh colors (used
// only on collision) and the shared stamp bit.
struct LruRandom {
  uint64_t color0 = 1;
  uint64_t color1 = 1;
  uint8_t bit = 0;
};

LruRandom lru_random_from_word(uint64_t r, const KnowledgeParams& kp);

// One interaction of the randomized protocol: read memory, detect a stamped
// collision, refresh the recency list, stamp the partner's color with the
// shared bit. Returns true when the collision branch fired (both agents got
// the fresh colors from rnd).
bool lru_interact(TwoHopState& a0, TwoHopState& a1, const LruRandom& rnd,
                  const KnowledgeParams& kp);

// Normal (one-hop) coloring sublayer state: the color in [0, Delta] plus a
// shift register of the agent's own role bits used to derive replacements.
struct NcState {
  uint32_t ncolor = 0;
  uint64_t reg = 0;

  bool operator==(const NcState&) const = default;
};

// Register width: enough bits to index Delta+1 colors.
inline uint32_t nc_register_bits(uint32_t delta) { return std::bit_width(delta); }

// Conflict resolution first (responder re-derives from its register, +1 if
// the draw equals the initiator's color), then both agents append their role
// bit. Deterministic in (states, roles).
void nc_interact(NcState& a0, NcState& a1, uint32_t delta);

// Extra state for the deterministic two-hop variant: the normal-coloring
// sublayer, an x-bit number under construction from role bits, and a queue of
// at most two finished numbers waiting to serve as fresh colors.
struct DetExt {
  NcState nc;
  uint64_t pool = 0;
  uint32_t pool_fill = 0;
  std::array<uint64_t, 2> ready{0, 0};
  uint32_t ready_count = 0;
  bool pending_recolor = false;

  bool operator==(const DetExt&) const = default;
};

struct DetTwoHopState {
  TwoHopState hop;
  DetExt det;

  bool operator==(const DetTwoHopState&) const = default;
};

enum class DlruOutcome { None, Recolored, Deferred };

// Deterministic interaction: run the normal-coloring step, let the agent with
// the larger normal color bank its role bit, then run the two-hop parts. A
// detected collision recolors both agents from the banked numbers if two are
// ready, and otherwise defers (memory kept intact so detection recurs).
DlruOutcome dlru_interact(DetTwoHopState& a0, DetTwoHopState& a1,
                          const KnowledgeParams& kp);

// Every pair of agents with a common neighbor has distinct colors. Pairs
// without a common neighbor may share a color even if adjacent.
bool check_two_hop(const Graph& g, std::span<const uint64_t> colors);

// Adjacent agents have distinct colors.
bool check_normal(const Graph& g, std::span<const uint64_t> colors);

std::vector<uint64_t> colors_of(std::span<const TwoHopState> config);
std::vector<uint64_t> colors_of(std::span<const DetTwoHopState> config);
std::vector<uint64_t> colors_of(std::span<const NcState> config);

struct PlruProtocol {
  using State = TwoHopState;
  static constexpr bool kDeterministic = false;

  KnowledgeParams kp;

  void transition(State& a0, State& a1, uint64_t r) const;
  State sample_state(Rng& rng) const;
  static uint64_t color_of(const State& s) { return s.hopcolor; }
};

struct DlruProtocol {
  using State = DetTwoHopState;
  static constexpr bool kDeterministic = true;

  KnowledgeParams kp;

  void transition(State& a0, State& a1, uint64_t) const { dlru_interact(a0, a1, kp); }
  State sample_state(Rng& rng) const;
  static uint64_t color_of(const State& s) { return s.hop.hopcolor; }
};

struct PncProtocol {
  using State = NcState;
  static constexpr bool kDeterministic = true;

  uint32_t cap_delta = 1;

  void transition(State& a0, State& a1, uint64_t) const { nc_interact(a0, a1, cap_delta); }
  State sample_state(Rng& rng) const;
  static uint64_t color_of(const State& s) { return s.ncolor; }
};

}  // namespace popproto
