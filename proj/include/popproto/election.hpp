#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "popproto/coloring.hpp"
#include "popproto/engine.hpp"
#include "popproto/graph.hpp"
#include "popproto/rng.hpp"

namespace popproto {

// Leader/follower role. B is a candidate still competing, L0/L1 are elected
// leaders (L1 while running the detection round), F is a follower. The output
// map reports L for everything except F.
enum class LF : uint8_t { B, L0, L1, F };

inline bool is_leader_role(LF lf) { return lf == LF::L0 || lf == LF::L1; }
inline char bc_output(LF lf) { return lf == LF::F ? 'F' : 'L'; }

struct BcParams {
  uint32_t tau = 1;
  int32_t t_bc = 16;          // 16 * tau
  uint32_t id_threshold = 4;    // 2^ceil(log2 N^2); ids are finished at or above it
  uint32_t type_threshold = 2;  // 2^ceil(log2 N)

  int32_t half() const { return t_bc / 2; }
};

// tau = ceil(max(2*diameter, ceil(log2 N)/2, 15 + 3*log2 n)), t_bc = 16*tau.
BcParams compute_params(const GraphStats& st, uint32_t cap_n);

// Election-layer slice of an agent. The agent's color lives in the coloring
// sublayer; pcol/rc implement the repeated-encounter test that gates every
// timer countdown.
struct BcAgent {
  LF lf = LF::F;
  uint32_t type = 1;   // [1, 2*type_threshold - 1]
  uint32_t id = 1;     // [1, 2*id_threshold - 1]
  uint64_t pcol = 1;
  uint8_t rc = 0;
  int32_t timer_lf = 0;  // [0, 2*t_bc]
  int32_t timer_kl = 0;  // [0, t_bc]
  int32_t timer_v = 0;   // [0, 2*t_bc]
  int32_t timer_e = 0;   // [0, 2*t_bc]

  bool operator==(const BcAgent&) const = default;
};

// rc_i = (old pcol_i == current partner color), then pcol_i takes that color.
void repeat_check(BcAgent& a0, BcAgent& a1, uint64_t color0, uint64_t color1);

// Larger-timer propagation: both sides end at max(own, partner - 1), computed
// from the values before the call.
void ltp(int32_t& t0, int32_t& t1);

// Timers only tick on repeated encounters; saturates at zero.
void count_down(int32_t& t, uint8_t rc);

// Both agents drop to follower with a virgin id and no virus.
void reset_pair(BcAgent& a0, BcAgent& a1);

void generate_leader(BcAgent& a0, BcAgent& a1, const BcParams& p);
void detect(BcAgent& a0, BcAgent& a1, const BcParams& p);

// Everything after the coloring sub-step, in protocol order. color0/color1
// are the agents' colors after this interaction's coloring step.
void bc_core_interact(BcAgent& a0, BcAgent& a1, uint64_t color0, uint64_t color1,
                      const BcParams& p);

BcAgent sample_bc_agent(Rng& rng, const BcParams& p, uint64_t color_space);

// Which target/helper configuration sets a snapshot belongs to. Each field
// holds the per-state condition; the ambient requirement (safe coloring with
// consistent pcol) enters through scolor, which the caller supplies because
// it depends on the run history, not the snapshot alone.
struct PredicateReport {
  bool le = false;       // exactly one agent outputs L
  bool kl_zero = false;
  bool b_no = false;
  bool l_one = false;
  bool lf_qua = false;
  bool l_v1 = false;
  bool v_clean = false;
  bool v_make = false;
  bool v_only = false;
  bool e_half = false;
  bool scolor = false;
  bool s_le = false;
};

PredicateReport evaluate_predicates(std::span<const BcAgent> agents, const BcParams& p,
                                    bool scolor_ok);

// Full agent state: a coloring sublayer state plus the election slice.
template <class CS>
struct LeaderState {
  CS coloring;
  BcAgent bc;

  bool operator==(const LeaderState&) const = default;
};

template <class Base>
struct BcProtocol {
  using State = LeaderState<typename Base::State>;
  static constexpr bool kDeterministic = Base::kDeterministic;

  Base base;
  BcParams params;

  void transition(State& a0, State& a1, uint64_t r) const {
    base.transition(a0.coloring, a1.coloring, r);
    bc_core_interact(a0.bc, a1.bc, Base::color_of(a0.coloring),
                     Base::color_of(a1.coloring), params);
  }

  State sample_state(Rng& rng) const {
    State s;
    s.coloring = base.sample_state(rng);
    s.bc = sample_bc_agent(rng, params, base.kp.color_space());
    return s;
  }

  static uint64_t color_of(const State& s) { return Base::color_of(s.coloring); }
};

using BcOverPlru = BcProtocol<PlruProtocol>;
using BcOverDlru = BcProtocol<DlruProtocol>;

template <class CS>
std::vector<BcAgent> bc_slice(std::span<const LeaderState<CS>> config) {
  std::vector<BcAgent> out(config.size());
  for (size_t i = 0; i < config.size(); ++i) out[i] = config[i].bc;
  return out;
}

}  // namespace popproto
