#include "popproto/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "popproto/coloring.hpp"
#include "popproto/engine.hpp"

namespace popproto {

namespace {

constexpr uint64_t kGraphSeedTag = 100;
constexpr uint64_t kTrialSeedBase = 1000;

// First step index at which the configuration's colors are valid and then
// stay untouched for a full probation window. nullopt if no such segment
// starts within the budget; the simulation horizon is budget + probation so a
// segment starting exactly at the budget can still be confirmed.
template <class Proto, class Valid>
std::optional<uint64_t> coloring_trial(const Proto& proto, const Graph& g,
                                       uint64_t trial_seed, uint64_t budget,
                                       uint64_t probation, Valid&& valid) {
  Runner<Proto> run(proto, g, adversarial_config(proto, g, trial_seed), trial_seed);
  std::vector<uint64_t> colors(g.n);
  for (uint32_t i = 0; i < g.n; ++i) colors[i] = Proto::color_of(run.config()[i]);

  uint64_t seg_start = 0;
  bool seg_valid = valid(colors);
  if (seg_valid && probation == 0) return 0;

  const uint64_t horizon = budget + probation;
  for (uint64_t t = 1; t <= horizon; ++t) {
    auto [u, v] = run.step_once();
    const uint64_t cu = Proto::color_of(run.config()[u]);
    const uint64_t cv = Proto::color_of(run.config()[v]);
    if (cu != colors[u] || cv != colors[v]) {
      colors[u] = cu;
      colors[v] = cv;
      if (t > budget) return std::nullopt;  // later segments can't qualify
      seg_start = t;
      seg_valid = valid(colors);
    } else if (seg_valid && t - seg_start >= probation) {
      return seg_start;
    }
  }
  return std::nullopt;
}

struct ElectOutcome {
  std::optional<uint64_t> color_stable;
  std::optional<uint64_t> s_le;
  uint64_t holding = 0;
};

// Single election run: find the first step whose configuration satisfies the
// target predicate (the state formula plus the safe-coloring overlay, which
// needs the colors to stay put for a probation window), then watch how long
// exactly one agent keeps outputting L.
template <class Proto>
ElectOutcome elect_trial(const Proto& proto, const Graph& g, uint64_t trial_seed,
                         uint64_t budget, uint64_t probation, uint64_t holding_budget,
                         const BcParams& bp) {
  Runner<Proto> run(proto, g, adversarial_config(proto, g, trial_seed), trial_seed);
  const auto& cfg = run.config();

  // Mirrors of the fields the per-step bookkeeping needs, so counters can be
  // updated by diffing just the two touched agents.
  std::vector<uint64_t> colors(g.n);
  std::vector<LF> lf_mirror(g.n);
  std::vector<uint8_t> kl_mirror(g.n);
  size_t n_b = 0, n_lead = 0, n_kl = 0, n_out_l = 0;
  for (uint32_t i = 0; i < g.n; ++i) {
    const BcAgent& b = cfg[i].bc;
    colors[i] = Proto::color_of(cfg[i]);
    lf_mirror[i] = b.lf;
    kl_mirror[i] = b.timer_kl > 0;
    n_b += b.lf == LF::B;
    n_lead += is_leader_role(b.lf);
    n_kl += b.timer_kl > 0;
    n_out_l += b.lf != LF::F;
  }

  uint64_t seg_start = 0;
  bool seg_valid = check_two_hop(g, colors);
  ElectOutcome out;
  constexpr uint64_t kNone = UINT64_MAX;
  uint64_t tentative = kNone, confirmed = kNone, first_violation = kNone;
  std::vector<BcAgent> buf(g.n);

  auto full_check = [&]() -> bool {
    for (uint32_t u = 0; u < g.n; ++u) {
      int64_t lp = run.last_partner()[u];
      if (lp < 0 || cfg[u].bc.pcol != Proto::color_of(cfg[static_cast<size_t>(lp)]))
        return false;
    }
    for (uint32_t u = 0; u < g.n; ++u) buf[u] = cfg[u].bc;
    return evaluate_predicates(buf, bp, true).s_le;
  };

  // Counter prefilter first; the O(n) scan only runs when it allows membership.
  auto try_search = [&](uint64_t t) {
    if (n_b == 0 && n_lead == 1 && n_kl == 0 && seg_valid && full_check()) tentative = t;
  };
  try_search(0);

  for (uint64_t t = 1;; ++t) {
    const auto [u, v] = run.step_once();

    bool color_changed = false;
    for (uint32_t w : {u, v}) {
      const BcAgent& b = cfg[w].bc;
      const uint64_t c = Proto::color_of(cfg[w]);
      if (c != colors[w]) {
        colors[w] = c;
        color_changed = true;
      }
      n_b += (b.lf == LF::B) - (lf_mirror[w] == LF::B);
      n_lead += is_leader_role(b.lf) - is_leader_role(lf_mirror[w]);
      n_out_l += (b.lf != LF::F) - (lf_mirror[w] != LF::F);
      n_kl += (b.timer_kl > 0) - (kl_mirror[w] > 0);
      lf_mirror[w] = b.lf;
      kl_mirror[w] = b.timer_kl > 0;
    }

    if (color_changed) {
      seg_start = t;
      seg_valid = check_two_hop(g, colors);
      if (tentative != kNone && confirmed == kNone) {
        tentative = kNone;  // colors moved inside the stability window
        first_violation = kNone;
      }
    } else if (!out.color_stable && seg_valid && t - seg_start >= probation &&
               seg_start <= budget) {
      out.color_stable = seg_start;
    }

    if ((tentative != kNone || confirmed != kNone) && first_violation == kNone &&
        n_out_l != 1)
      first_violation = t;

    if (tentative != kNone && confirmed == kNone && t - tentative >= probation)
      confirmed = tentative;

    if (tentative == kNone && confirmed == kNone && t <= budget) try_search(t);

    if (confirmed != kNone) {
      if (first_violation != kNone && first_violation <= confirmed + holding_budget) {
        out.s_le = confirmed;
        out.holding = first_violation - confirmed - 1;
        return out;
      }
      if (t >= confirmed + holding_budget && t - confirmed >= probation) {
        out.s_le = confirmed;
        out.holding = holding_budget;
        return out;
      }
    } else if (tentative == kNone && t >= budget) {
      return out;  // timeout: no qualifying step within the budget
    }
  }
}

template <class Fn>
void parallel_trials(uint32_t trials, uint32_t jobs, Fn&& body) {
  if (jobs <= 1) {
    for (uint32_t i = 0; i < trials; ++i) body(i);
    return;
  }
  std::atomic<uint32_t> next{0};
  std::vector<std::thread> pool;
  const uint32_t workers = std::min(jobs, trials ? trials : 1u);
  pool.reserve(workers);
  for (uint32_t j = 0; j < workers; ++j) {
    pool.emplace_back([&] {
      for (;;) {
        uint32_t i = next.fetch_add(1);
        if (i >= trials) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<uint64_t> present(const std::vector<TrialResult>& trials,
                              std::optional<uint64_t> TrialResult::*field) {
  std::vector<uint64_t> v;
  for (const auto& t : trials)
    if (t.*field) v.push_back(*(t.*field));
  return v;
}

Aggregate aggregate(const std::vector<TrialResult>& trials,
                    std::optional<uint64_t> TrialResult::*field) {
  Aggregate a;
  a.count = static_cast<uint32_t>(trials.size());
  std::vector<uint64_t> v = present(trials, field);
  a.timeouts = a.count - static_cast<uint32_t>(v.size());
  if (v.empty()) return a;
  std::sort(v.begin(), v.end());
  double sum = 0;
  for (uint64_t x : v) sum += static_cast<double>(x);
  a.mean = sum / static_cast<double>(v.size());
  const size_t k = v.size();
  a.median = (static_cast<double>(v[(k - 1) / 2]) + static_cast<double>(v[k / 2])) / 2.0;
  a.p95 = static_cast<double>(v[(95 * k + 99) / 100 == 0 ? 0 : (95 * k + 99) / 100 - 1]);
  return a;
}

std::string opt_str(const std::optional<uint64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

nlohmann::json aggregate_json(const Aggregate& a) {
  return {{"trials", a.count},
          {"timeouts", a.timeouts},
          {"mean", a.mean},
          {"median", a.median},
          {"p95", a.p95}};
}

nlohmann::json meta_json(const RunMeta& m) {
  return {{"protocol", m.protocol},
          {"graph", m.graph},
          {"n", m.n},
          {"m", m.m},
          {"max_degree", m.max_degree},
          {"diameter", m.diameter},
          {"cap_n", m.cap_n},
          {"cap_delta", m.cap_delta},
          {"color_space", m.color_space},
          {"number_bits", m.number_bits},
          {"tau", m.tau},
          {"t_bc", m.t_bc},
          {"seed", m.master_seed},
          {"max_steps", m.max_steps},
          {"probation", m.probation},
          {"holding_budget", m.holding_budget},
          {"jobs", m.jobs}};
}

double normalizer_for(RunKind kind, const GraphStats& st, const KnowledgeParams& kp,
                      const BcParams& bp) {
  const double m = static_cast<double>(st.m);
  switch (kind) {
    case RunKind::ColorPlru:
    case RunKind::ColorPnc:
      return m * st.n;
    case RunKind::ColorDlru:
      return m * (st.n + static_cast<double>(kp.cap_delta) * kp.number_bits());
    case RunKind::ElectPlru:
    case RunKind::ElectDlru:
      return m * bp.tau * std::log2(static_cast<double>(st.n));
  }
  return 1;
}

}  // namespace

const char* run_kind_name(RunKind k) {
  switch (k) {
    case RunKind::ColorPlru: return "plru";
    case RunKind::ColorDlru: return "dlru";
    case RunKind::ColorPnc: return "pnc";
    case RunKind::ElectPlru: return "pbc+plru";
    case RunKind::ElectDlru: return "pbc+dlru";
  }
  return "?";
}

bool is_elect(RunKind k) { return k == RunKind::ElectPlru || k == RunKind::ElectDlru; }

std::string GraphSpec::describe() const {
  if (!path.empty()) return "file:" + path;
  std::ostringstream os;
  os << family_name(family) << ":n=" << n;
  if (family == GraphFamily::Gnp) os << ",p=" << p;
  return os.str();
}

Graph GraphSpec::build(uint64_t seed) const {
  if (!path.empty()) return load_edge_list(path);
  return gen_family(family, n, p, seed);
}

uint64_t default_budget(RunKind k, const GraphStats& st, const KnowledgeParams& kp,
                        const BcParams& bp) {
  const double m = static_cast<double>(st.m);
  switch (k) {
    case RunKind::ColorPlru:
      return static_cast<uint64_t>(50.0 * m * st.n);
    case RunKind::ColorDlru:
      return static_cast<uint64_t>(
          50.0 * m * (st.n + static_cast<double>(kp.cap_delta) * kp.number_bits()));
    case RunKind::ColorPnc:
      return static_cast<uint64_t>(
          std::ceil(100.0 * m * st.n * std::log2(static_cast<double>(st.n))));
    case RunKind::ElectPlru:
    case RunKind::ElectDlru:
      return static_cast<uint64_t>(
          std::ceil(200.0 * m * bp.tau * std::log2(static_cast<double>(st.n))));
  }
  return 0;
}

uint64_t default_probation(RunKind k, const GraphStats& st) {
  switch (k) {
    case RunKind::ColorPlru:
    case RunKind::ColorDlru:
      return 20ull * st.m * st.n;
    case RunKind::ColorPnc:
    case RunKind::ElectPlru:
    case RunKind::ElectDlru:
      return 10ull * st.m * st.n;
  }
  return 0;
}

RunResult measure_convergence(RunKind kind, const GraphSpec& gs, uint32_t trials,
                              uint64_t seed, const HarnessOptions& opt) {
  const Graph g = gs.build(derive_seed(seed, kGraphSeedTag));
  const GraphStats st = stats(g);
  const uint32_t cap_n = opt.cap_n ? opt.cap_n : st.n;
  const uint32_t cap_d = opt.cap_delta ? opt.cap_delta : st.max_degree;
  if (cap_n < st.n)
    throw std::invalid_argument("cap-N below the actual agent count");
  if (cap_d < st.max_degree)
    throw std::invalid_argument("cap-Delta below the actual max degree");

  const KnowledgeParams kp{cap_n, cap_d};
  const BcParams bp = compute_params(st, cap_n);
  const uint64_t budget = opt.max_steps ? opt.max_steps : default_budget(kind, st, kp, bp);
  const uint64_t probation = opt.probation ? opt.probation : default_probation(kind, st);
  const uint64_t holding = is_elect(kind) ? opt.holding_budget : 0;

  RunResult out;
  out.meta.protocol = run_kind_name(kind);
  out.meta.graph = gs.describe();
  out.meta.n = st.n;
  out.meta.m = st.m;
  out.meta.max_degree = st.max_degree;
  out.meta.diameter = st.diameter;
  out.meta.cap_n = cap_n;
  out.meta.cap_delta = cap_d;
  out.meta.color_space = kp.color_space();
  out.meta.number_bits = kp.number_bits();
  out.meta.tau = bp.tau;
  out.meta.t_bc = bp.t_bc;
  out.meta.master_seed = seed;
  out.meta.max_steps = budget;
  out.meta.probation = probation;
  out.meta.holding_budget = holding;
  out.meta.jobs = opt.jobs;
  out.trials.resize(trials);

  parallel_trials(trials, opt.jobs, [&](uint32_t i) {
    const uint64_t ts = derive_seed(seed, kTrialSeedBase + i);
    TrialResult tr;
    tr.trial = i;
    tr.seed = ts;
    switch (kind) {
      case RunKind::ColorPlru: {
        PlruProtocol p{kp};
        tr.steps_to_two_hop = coloring_trial(
            p, g, ts, budget, probation,
            [&](const std::vector<uint64_t>& c) { return check_two_hop(g, c); });
        break;
      }
      case RunKind::ColorDlru: {
        DlruProtocol p{kp};
        tr.steps_to_two_hop = coloring_trial(
            p, g, ts, budget, probation,
            [&](const std::vector<uint64_t>& c) { return check_two_hop(g, c); });
        break;
      }
      case RunKind::ColorPnc: {
        PncProtocol p{cap_d};
        tr.steps_to_two_hop = coloring_trial(
            p, g, ts, budget, probation,
            [&](const std::vector<uint64_t>& c) { return check_normal(g, c); });
        break;
      }
      case RunKind::ElectPlru: {
        BcOverPlru p{PlruProtocol{kp}, bp};
        ElectOutcome o = elect_trial(p, g, ts, budget, probation, holding, bp);
        tr.steps_to_two_hop = o.color_stable;
        tr.steps_to_s_le = o.s_le;
        tr.holding_window = o.holding;
        break;
      }
      case RunKind::ElectDlru: {
        BcOverDlru p{DlruProtocol{kp}, bp};
        ElectOutcome o = elect_trial(p, g, ts, budget, probation, holding, bp);
        tr.steps_to_two_hop = o.color_stable;
        tr.steps_to_s_le = o.s_le;
        tr.holding_window = o.holding;
        break;
      }
    }
    out.trials[i] = tr;
  });
  return out;
}

RunResult measure_holding(RunKind kind, const GraphSpec& gs, uint32_t trials,
                          uint64_t seed, uint64_t holding_budget,
                          const HarnessOptions& opt) {
  if (!is_elect(kind))
    throw std::invalid_argument("measure_holding needs an election run kind");
  HarnessOptions o = opt;
  o.holding_budget = holding_budget;
  return measure_convergence(kind, gs, trials, seed, o);
}

Aggregate aggregate_two_hop(const std::vector<TrialResult>& trials) {
  return aggregate(trials, &TrialResult::steps_to_two_hop);
}

Aggregate aggregate_s_le(const std::vector<TrialResult>& trials) {
  return aggregate(trials, &TrialResult::steps_to_s_le);
}

uint32_t count_full_holds(const std::vector<TrialResult>& trials, uint64_t holding_budget) {
  uint32_t c = 0;
  for (const auto& t : trials)
    if (t.steps_to_s_le && t.holding_window >= holding_budget) ++c;
  return c;
}

SweepResult sweep(RunKind kind, GraphFamily family, const std::vector<uint32_t>& sizes,
                  uint32_t trials, uint64_t seed, const HarnessOptions& opt) {
  if (sizes.empty()) throw std::invalid_argument("sweep: need at least one size");
  SweepResult out;
  out.kind = kind;
  out.family = family;
  for (uint32_t n : sizes) {
    GraphSpec gs;
    gs.family = family;
    gs.n = n;
    gs.p = 0.4;
    const uint64_t size_seed = derive_seed(seed, 2000 + n);
    RunResult r = measure_convergence(kind, gs, trials, size_seed, opt);

    const GraphStats st{r.meta.n, r.meta.m, r.meta.max_degree, r.meta.diameter};
    const KnowledgeParams kp{r.meta.cap_n, r.meta.cap_delta};
    BcParams bp;
    bp.tau = r.meta.tau;
    bp.t_bc = r.meta.t_bc;

    SweepRow row;
    row.n = r.meta.n;
    row.m = r.meta.m;
    row.tau = r.meta.tau;
    row.agg = is_elect(kind) ? aggregate_s_le(r.trials) : aggregate_two_hop(r.trials);
    row.normalizer = normalizer_for(kind, st, kp, bp);
    row.fitted = row.agg.median / row.normalizer;
    out.rows.push_back(row);
    out.runs.push_back(std::move(r));
  }
  double lo = 0, hi = 0;
  for (const auto& row : out.rows) {
    if (row.agg.count == row.agg.timeouts || row.fitted <= 0) continue;
    if (lo == 0 || row.fitted < lo) lo = row.fitted;
    if (row.fitted > hi) hi = row.fitted;
  }
  out.spread = lo > 0 ? hi / lo : 0;
  return out;
}

std::string csv_header() {
  return "trial,seed,protocol,graph,n,m,max_degree,diameter,cap_n,cap_delta,tau,t_bc,"
         "max_steps,probation,holding_budget,steps_to_two_hop,two_hop_timeout,"
         "steps_to_s_le,s_le_timeout,holding_window,le_held";
}

void append_csv_rows(std::ostream& out, const RunResult& r) {
  const RunMeta& m = r.meta;
  const bool elect = m.protocol.rfind("pbc", 0) == 0;
  for (const TrialResult& t : r.trials) {
    out << t.trial << ',' << t.seed << ',' << m.protocol << ',' << m.graph << ',' << m.n
        << ',' << m.m << ',' << m.max_degree << ',' << m.diameter << ',' << m.cap_n << ','
        << m.cap_delta << ',' << m.tau << ',' << m.t_bc << ',' << m.max_steps << ','
        << m.probation << ',' << m.holding_budget << ',' << opt_str(t.steps_to_two_hop)
        << ',' << (t.steps_to_two_hop ? 0 : 1) << ',' << opt_str(t.steps_to_s_le) << ',';
    if (elect) {
      out << (t.steps_to_s_le ? 0 : 1) << ',' << t.holding_window << ','
          << (m.holding_budget > 0
                  ? std::to_string(t.steps_to_s_le && t.holding_window >= m.holding_budget
                                       ? 1
                                       : 0)
                  : std::string());
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

std::string summary_json(const RunResult& r) {
  nlohmann::json j = meta_json(r.meta);
  j["two_hop"] = aggregate_json(aggregate_two_hop(r.trials));
  if (r.meta.protocol.rfind("pbc", 0) == 0) {
    j["s_le"] = aggregate_json(aggregate_s_le(r.trials));
    if (r.meta.holding_budget > 0) {
      const uint32_t holds = count_full_holds(r.trials, r.meta.holding_budget);
      j["holding"] = {{"budget", r.meta.holding_budget},
                      {"full_holds", holds},
                      {"fraction", r.trials.empty()
                                       ? 0.0
                                       : static_cast<double>(holds) / r.trials.size()}};
    }
  }
  return j.dump(2) + "\n";
}

std::string summary_json(const SweepResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json jr = {{"n", row.n},
                         {"m", row.m},
                         {"tau", row.tau},
                         {"normalizer", row.normalizer},
                         {"fitted", row.fitted}};
    jr["steps"] = aggregate_json(row.agg);
    rows.push_back(jr);
  }
  nlohmann::json j = {{"protocol", run_kind_name(r.kind)},
                      {"family", family_name(r.family)},
                      {"rows", rows},
                      {"spread", r.spread}};
  return j.dump(2) + "\n";
}

namespace {

void write_files(const std::string& dir, const std::string& csv, const std::string& json) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "trials.csv");
    if (!f) throw std::runtime_error("cannot write " + dir + "/trials.csv");
    f << csv;
  }
  {
    std::ofstream f(fs::path(dir) / "summary.json");
    if (!f) throw std::runtime_error("cannot write " + dir + "/summary.json");
    f << json;
  }
}

}  // namespace

void write_outputs(const RunResult& r, const std::string& dir) {
  std::ostringstream csv;
  csv << csv_header() << '\n';
  append_csv_rows(csv, r);
  write_files(dir, csv.str(), summary_json(r));
}

void write_outputs(const SweepResult& r, const std::string& dir) {
  std::ostringstream csv;
  csv << csv_header() << '\n';
  for (const auto& run : r.runs) append_csv_rows(csv, run);
  write_files(dir, csv.str(), summary_json(r));
}

uint64_t resolve_seed(uint64_t cli_seed) {
  const char* env = std::getenv("POPPROTO_SEED");
  if (!env || !*env) return cli_seed;
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(env, &pos);
    if (env[pos] != '\0') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("POPPROTO_SEED is not a number: ") + env);
  }
}

}  // namespace popproto
