#include "popproto/election.hpp"

#include <algorithm>
#include <cmath>

namespace popproto {

BcParams compute_params(const GraphStats& st, uint32_t cap_n) {
  const double d_term = 2.0 * st.diameter;
  const double log_term = std::bit_width(static_cast<uint64_t>(cap_n) - 1) / 2.0;
  const double n_term = 15.0 + 3.0 * std::log2(static_cast<double>(st.n));
  BcParams p;
  p.tau = static_cast<uint32_t>(std::ceil(std::max({d_term, log_term, n_term})));
  p.t_bc = static_cast<int32_t>(16 * p.tau);
  const uint64_t n2 = static_cast<uint64_t>(cap_n) * cap_n;
  p.id_threshold = static_cast<uint32_t>(1ull << std::bit_width(n2 - 1));
  p.type_threshold = static_cast<uint32_t>(1u << std::bit_width(cap_n - 1));
  return p;
}

void repeat_check(BcAgent& a0, BcAgent& a1, uint64_t color0, uint64_t color1) {
  a0.rc = a0.pcol == color1 ? 1 : 0;
  a1.rc = a1.pcol == color0 ? 1 : 0;
  a0.pcol = color1;
  a1.pcol = color0;
}

void ltp(int32_t& t0, int32_t& t1) {
  const int32_t o0 = t0, o1 = t1;
  t0 = std::max(o0, o1 - 1);
  t1 = std::max(o1, o0 - 1);
}

void count_down(int32_t& t, uint8_t rc) {
  if (rc == 1) t = std::max(0, t - 1);
}

void reset_pair(BcAgent& a0, BcAgent& a1) {
  for (BcAgent* a : {&a0, &a1}) {
    a->lf = LF::F;
    a->id = 1;
    a->timer_v = 0;
  }
}

void generate_leader(BcAgent& a0, BcAgent& a1, const BcParams& p) {
  BcAgent* a[2] = {&a0, &a1};

  // A live kill signal keeps everyone's candidacy timer pinned.
  if (a0.timer_kl > 0 || a1.timer_kl > 0) {
    a0.timer_lf = p.t_bc;
    a1.timer_lf = p.t_bc;
  }

  // Follower timeout. A non-virgin id means a reset already happened once, so
  // raise a kill instead of creating a candidate from stale state.
  for (int i = 0; i < 2; ++i) {
    if (a[i]->lf == LF::F && a[i]->timer_lf == 0) {
      if (a[i]->id != 1) {
        a0.timer_kl = p.t_bc;
        a1.timer_kl = p.t_bc;
      } else {
        a[i]->lf = LF::B;
        a[i]->timer_lf = 2 * p.t_bc;
      }
    }
  }

  // Two candidates still assembling ids: the responder backs off.
  if (a0.lf == LF::B && a0.id < p.id_threshold && a1.lf == LF::B &&
      a1.id < p.id_threshold) {
    a1.lf = LF::F;
    a1.id = 1;
    a1.timer_lf = p.t_bc;
  }

  // Append one role bit to an unfinished id.
  for (int i = 0; i < 2; ++i) {
    if (a[i]->lf == LF::B && a[i]->id < p.id_threshold) {
      a[i]->id = 2 * a[i]->id + static_cast<uint32_t>(i);
      a[i]->timer_lf = 2 * p.t_bc;
    }
  }

  // The larger finished or forwarded id spreads; whoever held the smaller one
  // continues as a follower carrying the winner's id.
  for (int i = 0; i < 2; ++i) {
    BcAgent& self = *a[i];
    BcAgent& other = *a[1 - i];
    const bool both_fb = (self.lf == LF::F || self.lf == LF::B) &&
                         (other.lf == LF::F || other.lf == LF::B);
    const bool qualifies =
        (self.lf == LF::B && self.id > p.id_threshold) || self.lf == LF::F;
    if (both_fb && qualifies && self.id > other.id) {
      other.lf = LF::F;
      other.id = self.id;
    }
  }

  // A follower next to a candidate stays on the brink of timing out.
  for (int i = 0; i < 2; ++i)
    if (a[i]->lf == LF::F && a[1 - i]->lf == LF::B) a[i]->timer_lf = p.t_bc - 1;

  // Candidacy countdown and promotion.
  for (int i = 0; i < 2; ++i) {
    if (a[i]->lf == LF::B && a[i]->rc == 1)
      a[i]->timer_lf = std::max(0, a[i]->timer_lf - 1);
    if (a[i]->lf == LF::B && a[i]->timer_lf == 0) {
      a[i]->lf = LF::L0;
      a[i]->timer_lf = p.t_bc;
    }
  }
}

void detect(BcAgent& a0, BcAgent& a1, const BcParams& p) {
  BcAgent* a[2] = {&a0, &a1};
  const int32_t full = 2 * p.t_bc;

  // No detection rounds while candidates are still around.
  if (a0.lf == LF::B || a1.lf == LF::B) {
    a0.timer_e = full;
    a1.timer_e = full;
  }

  for (int i = 0; i < 2; ++i) {
    BcAgent& s = *a[i];
    if (is_leader_role(s.lf) && s.timer_e == 0) {
      s.lf = LF::L1;
      s.type = 1;
      s.timer_e = full;
    }
    if (s.lf == LF::L1 && s.type < p.type_threshold) {
      s.type = 2 * s.type + static_cast<uint32_t>(i);
      s.timer_e = full;
      if (s.type >= p.type_threshold) s.timer_v = full;  // round's virus is live
    }
  }

  int fi = -1;  // follower index when the partner is a leader
  if (a0.lf == LF::F && is_leader_role(a1.lf)) fi = 0;
  if (a1.lf == LF::F && is_leader_role(a0.lf)) fi = 1;

  if (fi >= 0) {
    BcAgent& f = *a[fi];
    BcAgent& l = *a[1 - fi];
    if (f.timer_v > 0 &&
        (l.lf == LF::L0 || l.type < p.type_threshold || f.type != l.type)) {
      // The virus didn't come from this leader's current round.
      a0.timer_kl = p.t_bc;
      a1.timer_kl = p.t_bc;
    } else if (f.timer_v == 0 && l.lf == LF::L1 && l.timer_v > 0) {
      f.type = l.type;
      f.timer_v = l.timer_v - 1;
    }
  } else if (a0.lf == LF::F && a1.lf == LF::F) {
    if (a0.timer_v > 0 && a1.timer_v > 0 && a0.type != a1.type) {
      a0.timer_kl = p.t_bc;
      a1.timer_kl = p.t_bc;
    } else {
      for (int i = 0; i < 2; ++i) {
        if (a[i]->timer_v == 0 && a[1 - i]->timer_v > 0) {
          a[i]->type = a[1 - i]->type;
          a[i]->timer_v = a[1 - i]->timer_v - 1;
          break;
        }
      }
    }
  } else if (is_leader_role(a0.lf) && is_leader_role(a1.lf)) {
    a0.timer_kl = p.t_bc;
    a1.timer_kl = p.t_bc;
  }

  ltp(a0.timer_v, a1.timer_v);
  count_down(a0.timer_v, a0.rc);
  count_down(a1.timer_v, a1.rc);

  for (int i = 0; i < 2; ++i) {
    if (a[i]->timer_v > 0) a[i]->timer_e = full;
    if (a[i]->lf == LF::L1 && a[i]->timer_e < p.half()) a[i]->lf = LF::L0;
  }
}

void bc_core_interact(BcAgent& a0, BcAgent& a1, uint64_t color0, uint64_t color1,
                      const BcParams& p) {
  repeat_check(a0, a1, color0, color1);
  if (a0.timer_kl > 0 || a1.timer_kl > 0) reset_pair(a0, a1);
  ltp(a0.timer_kl, a1.timer_kl);
  count_down(a0.timer_kl, a0.rc);
  count_down(a1.timer_kl, a1.rc);
  ltp(a0.timer_e, a1.timer_e);
  count_down(a0.timer_e, a0.rc);
  count_down(a1.timer_e, a1.rc);
  if (a0.lf != LF::B && a1.lf != LF::B) {
    ltp(a0.timer_lf, a1.timer_lf);
    count_down(a0.timer_lf, a0.rc);
    count_down(a1.timer_lf, a1.rc);
  }
  for (BcAgent* x : {&a0, &a1})
    if (is_leader_role(x->lf)) x->timer_lf = p.t_bc;
  generate_leader(a0, a1, p);
  detect(a0, a1, p);
}

BcAgent sample_bc_agent(Rng& rng, const BcParams& p, uint64_t color_space) {
  BcAgent a;
  constexpr LF kRoles[4] = {LF::B, LF::L0, LF::L1, LF::F};
  a.lf = kRoles[uniform_below(rng, 4)];
  a.type = 1 + static_cast<uint32_t>(uniform_below(rng, 2ull * p.type_threshold - 1));
  a.id = 1 + static_cast<uint32_t>(uniform_below(rng, 2ull * p.id_threshold - 1));
  a.pcol = 1 + uniform_below(rng, color_space);
  a.rc = static_cast<uint8_t>(uniform_below(rng, 2));
  a.timer_lf = static_cast<int32_t>(uniform_below(rng, 2ull * p.t_bc + 1));
  a.timer_kl = static_cast<int32_t>(uniform_below(rng, static_cast<uint64_t>(p.t_bc) + 1));
  a.timer_v = static_cast<int32_t>(uniform_below(rng, 2ull * p.t_bc + 1));
  a.timer_e = static_cast<int32_t>(uniform_below(rng, 2ull * p.t_bc + 1));
  return a;
}

PredicateReport evaluate_predicates(std::span<const BcAgent> agents, const BcParams& p,
                                    bool scolor_ok) {
  PredicateReport r;
  r.scolor = scolor_ok;
  r.kl_zero = r.b_no = r.lf_qua = r.v_clean = r.v_make = r.e_half = true;

  size_t leaders = 0, outputs_l = 0, l1s = 0;
  uint32_t virus_type = 0;
  bool virus_seen = false, virus_types_agree = true, l1_done = true;

  for (const BcAgent& a : agents) {
    if (a.timer_kl != 0) r.kl_zero = false;
    if (a.lf == LF::B) r.b_no = false;
    if (is_leader_role(a.lf)) ++leaders;
    if (a.lf != LF::F) ++outputs_l;
    if (a.lf == LF::L1) ++l1s;
    if (a.lf != LF::B && a.timer_lf < p.half()) r.lf_qua = false;
    if (a.timer_v != 0) r.v_clean = false;
    if (a.lf == LF::L1 && a.type >= p.type_threshold) r.v_make = false;
    if (a.lf != LF::L1 && a.timer_v != 0) r.v_make = false;
    if (a.timer_v > 0) {
      if (virus_seen && a.type != virus_type) virus_types_agree = false;
      virus_seen = true;
      virus_type = a.type;
    }
    if (a.lf == LF::L1 && a.type < p.type_threshold) l1_done = false;
    if (is_leader_role(a.lf) && a.timer_e < p.t_bc) r.e_half = false;
  }

  r.le = outputs_l == 1;
  r.l_one = leaders == 1;
  r.l_v1 = l1s >= 1;
  r.v_only = virus_types_agree && l1_done;

  const bool virus_branch = r.l_v1 && (r.v_make || r.v_only) && r.e_half;
  r.s_le = scolor_ok && r.b_no && r.l_one && r.lf_qua && r.kl_zero &&
           (r.v_clean || virus_branch);
  return r;
}

}  // namespace popproto
