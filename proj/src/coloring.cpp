#include "popproto/coloring.hpp"

#include <algorithm>
#include <cassert>

namespace popproto {

namespace {

// Earliest recency slot holding the partner's color, 1-based; 0 if absent.
uint32_t read_memory(const TwoHopState& self, uint64_t partner_color) {
  for (size_t j = 0; j < self.prev.size(); ++j)
    if (self.prev[j] == partner_color) return static_cast<uint32_t>(j + 1);
  return 0;
}

// Move the record at the agent's current idx (Delta if none) to the front,
// shifting everything above it down one slot, then write (color, bit) there.
void save_and_stamp(TwoHopState& s, uint64_t partner_color, uint8_t bit) {
  uint32_t idx = s.idx == 0 ? static_cast<uint32_t>(s.prev.size()) : s.idx;
  for (uint32_t j = idx - 1; j >= 1; --j) {
    s.prev[j] = s.prev[j - 1];
    s.stamp[j] = s.stamp[j - 1];
  }
  s.prev[0] = partner_color;
  s.stamp[0] = bit;
}

}  // namespace

LruRandom lru_random_from_word(uint64_t r, const KnowledgeParams& kp) {
  SplitMix64 sm(r);
  LruRandom out;
  const uint64_t k = kp.color_space();
  out.color0 = 1 + uniform_below(sm, k);
  out.color1 = 1 + uniform_below(sm, k);
  out.bit = static_cast<uint8_t>(sm.next() & 1);
  return out;
}

bool lru_interact(TwoHopState& a0, TwoHopState& a1, const LruRandom& rnd,
                  const KnowledgeParams& kp) {
  (void)kp;
  a0.idx = read_memory(a0, a1.hopcolor);
  a1.idx = read_memory(a1, a0.hopcolor);

  bool collision = a0.idx > 0 && a1.idx > 0 && a0.stamp[a0.idx - 1] != a1.stamp[a1.idx - 1];
  if (collision) {
    a0.hopcolor = rnd.color0;
    a1.hopcolor = rnd.color1;
    a0.idx = 0;
    a1.idx = 0;
  }

  // Both agents record each other's (possibly fresh) color with one shared bit.
  uint64_t c0 = a0.hopcolor, c1 = a1.hopcolor;
  save_and_stamp(a0, c1, rnd.bit);
  save_and_stamp(a1, c0, rnd.bit);
  return collision;
}

void nc_interact(NcState& a0, NcState& a1, uint32_t delta) {
  const uint32_t palette = delta + 1;
  if (a0.ncolor == a1.ncolor) {
    uint32_t cand = static_cast<uint32_t>(a1.reg % palette);
    if (cand == a0.ncolor) cand = (cand + 1) % palette;
    a1.ncolor = cand;
  }
  const uint64_t mask = (nc_register_bits(delta) >= 64)
                            ? ~0ull
                            : ((1ull << nc_register_bits(delta)) - 1);
  a0.reg = ((a0.reg << 1) | 0ull) & mask;
  a1.reg = ((a1.reg << 1) | 1ull) & mask;
}

DlruOutcome dlru_interact(DetTwoHopState& a0, DetTwoHopState& a1,
                          const KnowledgeParams& kp) {
  nc_interact(a0.det.nc, a1.det.nc, kp.cap_delta);
  // Normal colors differ after the sublayer step, so the consumer of this
  // interaction's role bit is well defined.
  assert(a0.det.nc.ncolor != a1.det.nc.ncolor);
  const uint32_t sup = a0.det.nc.ncolor > a1.det.nc.ncolor ? 0 : 1;
  DetExt& bank = (sup == 0 ? a0 : a1).det;

  const uint32_t x = kp.number_bits();
  const uint64_t mask = x >= 64 ? ~0ull : ((1ull << x) - 1);
  bank.pool = ((bank.pool << 1) | sup) & mask;
  if (++bank.pool_fill == x) {
    if (bank.ready_count < 2) bank.ready[bank.ready_count++] = bank.pool;
    bank.pool = 0;
    bank.pool_fill = 0;
  }
  const uint8_t stamp_bit = static_cast<uint8_t>(sup);

  a0.hop.idx = read_memory(a0.hop, a1.hop.hopcolor);
  a1.hop.idx = read_memory(a1.hop, a0.hop.hopcolor);

  DlruOutcome outcome = DlruOutcome::None;
  if (a0.hop.idx > 0 && a1.hop.idx > 0 &&
      a0.hop.stamp[a0.hop.idx - 1] != a1.hop.stamp[a1.hop.idx - 1]) {
    if (bank.ready_count >= 2) {
      const uint64_t k = kp.color_space();
      a0.hop.hopcolor = 1 + bank.ready[0] % k;
      a1.hop.hopcolor = 1 + bank.ready[1] % k;
      bank.ready_count = 0;
      a0.hop.idx = 0;
      a1.hop.idx = 0;
      a0.det.pending_recolor = false;
      a1.det.pending_recolor = false;
      outcome = DlruOutcome::Recolored;
    } else {
      // Not enough banked numbers: keep memory untouched so the same stamp
      // mismatch is found again next time this pair meets.
      a0.det.pending_recolor = true;
      a1.det.pending_recolor = true;
      return DlruOutcome::Deferred;
    }
  }

  uint64_t c0 = a0.hop.hopcolor, c1 = a1.hop.hopcolor;
  save_and_stamp(a0.hop, c1, stamp_bit);
  save_and_stamp(a1.hop, c0, stamp_bit);
  return outcome;
}

bool check_two_hop(const Graph& g, std::span<const uint64_t> colors) {
  for (uint32_t w = 0; w < g.n; ++w) {
    const auto& nb = g.adj[w];
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j)
        if (colors[nb[i]] == colors[nb[j]]) return false;
  }
  return true;
}

bool check_normal(const Graph& g, std::span<const uint64_t> colors) {
  for (auto [u, v] : g.edges)
    if (colors[u] == colors[v]) return false;
  return true;
}

std::vector<uint64_t> colors_of(std::span<const TwoHopState> config) {
  std::vector<uint64_t> c(config.size());
  for (size_t i = 0; i < config.size(); ++i) c[i] = config[i].hopcolor;
  return c;
}

std::vector<uint64_t> colors_of(std::span<const DetTwoHopState> config) {
  std::vector<uint64_t> c(config.size());
  for (size_t i = 0; i < config.size(); ++i) c[i] = config[i].hop.hopcolor;
  return c;
}

std::vector<uint64_t> colors_of(std::span<const NcState> config) {
  std::vector<uint64_t> c(config.size());
  for (size_t i = 0; i < config.size(); ++i) c[i] = config[i].ncolor;
  return c;
}

void PlruProtocol::transition(State& a0, State& a1, uint64_t r) const {
  lru_interact(a0, a1, lru_random_from_word(r, kp), kp);
}

TwoHopState PlruProtocol::sample_state(Rng& rng) const {
  TwoHopState s;
  const uint64_t k = kp.color_space();
  s.hopcolor = 1 + uniform_below(rng, k);
  s.prev.resize(kp.cap_delta);
  s.stamp.resize(kp.cap_delta);
  for (uint32_t j = 0; j < kp.cap_delta; ++j) {
    s.prev[j] = 1 + uniform_below(rng, k);
    s.stamp[j] = static_cast<uint8_t>(uniform_below(rng, 2));
  }
  s.idx = static_cast<uint32_t>(uniform_below(rng, kp.cap_delta + 1));
  return s;
}

DetTwoHopState DlruProtocol::sample_state(Rng& rng) const {
  DetTwoHopState s;
  PlruProtocol base{kp};
  s.hop = base.sample_state(rng);
  s.det.nc.ncolor = static_cast<uint32_t>(uniform_below(rng, kp.cap_delta + 1));
  const uint32_t w = nc_register_bits(kp.cap_delta);
  s.det.nc.reg = uniform_below(rng, 1ull << w);
  const uint32_t x = kp.number_bits();
  s.det.pool_fill = static_cast<uint32_t>(uniform_below(rng, x));
  s.det.pool = s.det.pool_fill == 0 ? 0 : uniform_below(rng, 1ull << s.det.pool_fill);
  s.det.ready_count = static_cast<uint32_t>(uniform_below(rng, 3));
  for (uint32_t j = 0; j < s.det.ready_count; ++j)
    s.det.ready[j] = uniform_below(rng, x >= 64 ? ~0ull : (1ull << x));
  s.det.pending_recolor = uniform_below(rng, 2) == 1;
  return s;
}

NcState PncProtocol::sample_state(Rng& rng) const {
  NcState s;
  s.ncolor = static_cast<uint32_t>(uniform_below(rng, cap_delta + 1));
  s.reg = uniform_below(rng, 1ull << nc_register_bits(cap_delta));
  return s;
}

}  // namespace popproto
