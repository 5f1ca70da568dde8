#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popproto/election.hpp"
#include "popproto/graph.hpp"

namespace popproto {

// What a measurement run simulates. Color* run a coloring protocol on its
// own; Elect* run leader election on top of the chosen coloring layer.
enum class RunKind { ColorPlru, ColorDlru, ColorPnc, ElectPlru, ElectDlru };

const char* run_kind_name(RunKind k);
bool is_elect(RunKind k);

struct GraphSpec {
  GraphFamily family = GraphFamily::Ring;
  uint32_t n = 6;
  double p = 0.4;            // gnp only
  std::string path;          // non-empty: load edge list, ignore the rest
  std::string describe() const;
  Graph build(uint64_t seed) const;  // gnp uses the seed; other families ignore it
};

struct HarnessOptions {
  uint32_t cap_n = 0;          // 0: exact n
  uint32_t cap_delta = 0;      // 0: exact max degree
  uint64_t max_steps = 0;      // 0: protocol default budget
  uint64_t probation = 0;      // 0: default stability window
  uint64_t holding_budget = 0; // elect runs: how long to watch LE after S_LE
  uint64_t check_every = 0;    // 0: auto granularity
  uint32_t jobs = 1;
};

struct TrialResult {
  uint32_t trial = 0;
  uint64_t seed = 0;
  std::optional<uint64_t> steps_to_two_hop;  // start of the confirmed stable coloring
  std::optional<uint64_t> steps_to_s_le;     // elect runs only
  uint64_t holding_window = 0;               // steps LE held continuously after S_LE
};

struct RunMeta {
  std::string protocol;
  std::string graph;
  uint32_t n = 0;
  uint64_t m = 0;
  uint32_t max_degree = 0;
  uint32_t diameter = 0;
  uint32_t cap_n = 0;
  uint32_t cap_delta = 0;
  uint64_t color_space = 0;
  uint32_t number_bits = 0;
  uint32_t tau = 0;
  int32_t t_bc = 0;
  uint64_t master_seed = 0;
  uint64_t max_steps = 0;
  uint64_t probation = 0;
  uint64_t holding_budget = 0;
  uint32_t jobs = 1;
};

struct RunResult {
  RunMeta meta;
  std::vector<TrialResult> trials;
};

// Default step budgets, exposed so callers can reason about them.
uint64_t default_budget(RunKind k, const GraphStats& st, const KnowledgeParams& kp,
                        const BcParams& bp);
uint64_t default_probation(RunKind k, const GraphStats& st);

// Runs `trials` independent simulations from adversarial starts. Trial i uses
// a seed derived from (seed, i), so results are a pure function of the
// arguments; jobs only changes wall time, not output.
RunResult measure_convergence(RunKind kind, const GraphSpec& gs, uint32_t trials,
                              uint64_t seed, const HarnessOptions& opt = {});

// Election convergence plus a holding phase of holding_budget steps.
RunResult measure_holding(RunKind kind, const GraphSpec& gs, uint32_t trials,
                          uint64_t seed, uint64_t holding_budget,
                          const HarnessOptions& opt = {});

struct Aggregate {
  uint32_t count = 0;     // trials
  uint32_t timeouts = 0;  // trials with no recorded convergence
  double mean = 0, median = 0, p95 = 0;
};

Aggregate aggregate_two_hop(const std::vector<TrialResult>& trials);
Aggregate aggregate_s_le(const std::vector<TrialResult>& trials);
uint32_t count_full_holds(const std::vector<TrialResult>& trials, uint64_t holding_budget);

struct SweepRow {
  uint32_t n = 0;
  uint64_t m = 0;
  uint32_t tau = 0;
  Aggregate agg;
  double normalizer = 1;  // protocol's expected growth term
  double fitted = 0;      // median / normalizer
};

struct SweepResult {
  RunKind kind;
  GraphFamily family;
  std::vector<RunResult> runs;  // one per size, same order as rows
  std::vector<SweepRow> rows;
  double spread = 0;  // max fitted / min fitted across sizes
};

SweepResult sweep(RunKind kind, GraphFamily family, const std::vector<uint32_t>& sizes,
                  uint32_t trials, uint64_t seed, const HarnessOptions& opt = {});

// CSV with one row per trial; a stable column set shared by all run kinds.
std::string csv_header();
void append_csv_rows(std::ostream& out, const RunResult& r);
std::string summary_json(const RunResult& r);
std::string summary_json(const SweepResult& r);

// Writes trials.csv and summary.json under dir, creating it if needed.
void write_outputs(const RunResult& r, const std::string& dir);
void write_outputs(const SweepResult& r, const std::string& dir);

// Seed precedence: the environment variable POPPROTO_SEED, when set, beats
// the command-line value. Throws if the variable is set but not a number.
uint64_t resolve_seed(uint64_t cli_seed);

}  // namespace popproto
