#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "popproto/graph.hpp"
#include "popproto/rng.hpp"

namespace popproto {

// One interaction per step: the scheduler picks an ordered pair (initiator,
// responder) uniformly from the graph's m ordered edges, draws one 64-bit
// random word, and hands both to the protocol's transition. Deterministic
// protocols ignore the word; the engine draws it regardless so a protocol's
// independence from it is actually exercised.

template <class S>
using Configuration = std::vector<S>;

template <class P>
concept Protocol = requires(const P p, typename P::State& a, typename P::State& b,
                            uint64_t r, Rng& rng) {
  typename P::State;
  p.transition(a, b, r);
  { p.sample_state(rng) } -> std::same_as<typename P::State>;
  { P::kDeterministic } -> std::convertible_to<bool>;
};

namespace stream_tag {
inline constexpr uint64_t kEdges = 1;
inline constexpr uint64_t kTransitions = 2;
inline constexpr uint64_t kInit = 3;
}  // namespace stream_tag

inline std::pair<uint32_t, uint32_t> schedule_next(Rng& rng, const Graph& g) {
  return g.edges[uniform_below(rng, g.m())];
}

// Pure single step: returns a copy of c with the transition applied to the
// endpoints of e. Everything else is untouched by construction.
template <Protocol P>
Configuration<typename P::State> step(const P& proto,
                                      const Configuration<typename P::State>& c,
                                      std::pair<uint32_t, uint32_t> e, uint64_t r) {
  Configuration<typename P::State> out = c;
  proto.transition(out[e.first], out[e.second], r);
  return out;
}

// Worst-case start: every agent state drawn independently from the protocol's
// full state domain.
template <Protocol P>
Configuration<typename P::State> adversarial_config(const P& proto, const Graph& g,
                                                    uint64_t seed) {
  Rng rng = make_rng(seed, stream_tag::kInit);
  Configuration<typename P::State> c;
  c.reserve(g.n);
  for (uint32_t i = 0; i < g.n; ++i) c.push_back(proto.sample_state(rng));
  return c;
}

// In-place simulation loop. Edge choices and transition words come from two
// independent generators derived from the seed, so replaying with a different
// transition stream keeps the interaction schedule fixed.
template <Protocol P>
class Runner {
 public:
  using State = typename P::State;

  Runner(const P& proto, const Graph& g, Configuration<State> c0, uint64_t seed,
         std::optional<uint64_t> transition_stream_seed = std::nullopt)
      : proto_(&proto),
        g_(&g),
        config_(std::move(c0)),
        edge_rng_(make_rng(seed, stream_tag::kEdges)),
        num_rng_(transition_stream_seed ? Rng(*transition_stream_seed)
                                        : make_rng(seed, stream_tag::kTransitions)),
        last_partner_(g.n, -1) {}

  std::pair<uint32_t, uint32_t> step_once() {
    auto e = schedule_next(edge_rng_, *g_);
    uint64_t r = num_rng_();
    proto_->transition(config_[e.first], config_[e.second], r);
    ++steps_;
    last_partner_[e.first] = e.second;
    last_partner_[e.second] = e.first;
    return e;
  }

  const Configuration<State>& config() const { return config_; }
  const std::vector<int64_t>& last_partner() const { return last_partner_; }
  uint64_t steps() const { return steps_; }
  const Graph& graph() const { return *g_; }

 private:
  const P* proto_;
  const Graph* g_;
  Configuration<State> config_;
  Rng edge_rng_;
  Rng num_rng_;
  std::vector<int64_t> last_partner_;
  uint64_t steps_ = 0;
};

template <class S>
struct PredicateDef {
  std::string name;
  std::function<bool(const Configuration<S>&, const std::vector<int64_t>& last_partner)> eval;
  bool stop = false;  // stop the run when this predicate first holds
};

template <class S>
struct Trace {
  uint64_t steps_taken = 0;
  uint64_t max_steps = 0;
  uint64_t seed = 0;
  uint64_t check_every = 1;  // predicate evaluation granularity actually used
  std::map<std::string, uint64_t> first_hit;  // name -> earliest evaluated step where true
  std::string stopped_by;                     // stop predicate name, empty if budget ran out
  Configuration<S> final_config;
  std::vector<int64_t> last_partner;
};

struct RunOptions {
  uint64_t max_steps = 0;
  uint64_t seed = 0;
  uint64_t check_every = 0;  // 0: every step for n <= 16, else every m steps
  std::optional<uint64_t> transition_stream_seed;
};

// Runs up to max_steps interactions, recording for each named predicate the
// first evaluated step at which it held. Predicates are evaluated on the
// initial configuration (step 0), on every check_every-th step, and on the
// final step. The observer, if given, sees every applied step.
template <Protocol P>
Trace<typename P::State> run_until(
    const P& proto, const Graph& g, Configuration<typename P::State> c0,
    const std::vector<PredicateDef<typename P::State>>& predicates, const RunOptions& opts,
    const std::function<void(uint64_t step, uint32_t u, uint32_t v,
                             const Configuration<typename P::State>&)>& observer = {}) {
  using S = typename P::State;
  Trace<S> tr;
  tr.max_steps = opts.max_steps;
  tr.seed = opts.seed;
  tr.check_every = opts.check_every ? opts.check_every : (g.n <= 16 ? 1 : g.m());

  Runner<P> run(proto, g, std::move(c0), opts.seed, opts.transition_stream_seed);

  auto evaluate = [&](uint64_t step_index) -> bool {
    bool should_stop = false;
    for (const auto& p : predicates) {
      if (tr.first_hit.count(p.name)) {
        if (p.stop) should_stop = true;  // already hit earlier
        continue;
      }
      if (p.eval(run.config(), run.last_partner())) {
        tr.first_hit[p.name] = step_index;
        if (p.stop) {
          should_stop = true;
          if (tr.stopped_by.empty()) tr.stopped_by = p.name;
        }
      }
    }
    return should_stop;
  };

  bool stop = evaluate(0);
  uint64_t t = 0;
  while (!stop && t < opts.max_steps) {
    auto [u, v] = run.step_once();
    ++t;
    if (observer) observer(t, u, v, run.config());
    if (t % tr.check_every == 0 || t == opts.max_steps) stop = evaluate(t);
  }
  tr.steps_taken = t;
  tr.final_config = run.config();
  tr.last_partner = run.last_partner();
  return tr;
}

}  // namespace popproto
