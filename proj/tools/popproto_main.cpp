// Command-line front end: run coloring or leader-election measurements and
// emit per-trial CSV plus a JSON summary.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popproto/harness.hpp"

namespace {

struct CommonArgs {
  std::string graph = "ring";
  uint32_t n = 6;
  double p = 0.4;
  uint32_t cap_n = 0;
  uint32_t cap_delta = 0;
  std::string protocol = "plru";
  uint32_t trials = 10;
  uint64_t seed = 1;
  uint64_t max_steps = 0;
  uint64_t holding_budget = 100000;
  uint32_t jobs = 1;
  uint64_t check_every = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_graph) {
  if (with_graph) {
    cmd->add_option("--graph", a.graph,
                    "graph family: complete|ring|star|gnp|file:<path>");
    cmd->add_option("--n", a.n, "number of agents for generated families");
    cmd->add_option("--p", a.p, "edge probability for gnp");
  }
  cmd->add_option("--cap-N", a.cap_n, "known upper bound on n (default: exact)");
  cmd->add_option("--cap-Delta", a.cap_delta,
                  "known upper bound on the max degree (default: exact)");
  cmd->add_option("--trials", a.trials, "number of independent trials");
  cmd->add_option("--seed", a.seed, "master seed (POPPROTO_SEED overrides)");
  cmd->add_option("--max-steps", a.max_steps, "step budget (0: protocol default)");
  cmd->add_option("--jobs", a.jobs, "worker threads for trials");
  cmd->add_option("--check-every", a.check_every, "predicate evaluation granularity");
  cmd->add_option("--out", a.out, "directory for trials.csv and summary.json");
}

popproto::GraphSpec graph_spec(const CommonArgs& a) {
  popproto::GraphSpec gs;
  gs.n = a.n;
  gs.p = a.p;
  if (a.graph.rfind("file:", 0) == 0) {
    gs.path = a.graph.substr(5);
  } else if (a.graph == "complete") {
    gs.family = popproto::GraphFamily::Complete;
  } else if (a.graph == "ring") {
    gs.family = popproto::GraphFamily::Ring;
  } else if (a.graph == "star") {
    gs.family = popproto::GraphFamily::Star;
  } else if (a.graph == "gnp") {
    gs.family = popproto::GraphFamily::Gnp;
  } else {
    throw CLI::ValidationError("--graph", "unknown graph spec: " + a.graph);
  }
  return gs;
}

popproto::HarnessOptions options(const CommonArgs& a) {
  popproto::HarnessOptions opt;
  opt.cap_n = a.cap_n;
  opt.cap_delta = a.cap_delta;
  opt.max_steps = a.max_steps;
  opt.check_every = a.check_every;
  opt.jobs = a.jobs;
  return opt;
}

void emit(const popproto::RunResult& r, const std::string& out_dir) {
  if (!out_dir.empty()) popproto::write_outputs(r, out_dir);
  std::cout << popproto::summary_json(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"population protocol simulator: two-hop coloring and leader election"};
  app.require_subcommand(1);

  CommonArgs color_args, elect_args, sweep_args;
  std::string sizes_arg = "6,12,24";

  CLI::App* color = app.add_subcommand("color", "run a two-hop coloring protocol");
  add_common(color, color_args, true);
  color->add_option("--protocol", color_args.protocol, "plru|dlru");

  CLI::App* elect = app.add_subcommand("elect", "run leader election over a coloring layer");
  add_common(elect, elect_args, true);
  elect->add_option("--protocol", elect_args.protocol, "coloring layer: plru|dlru");
  elect->add_option("--holding-budget", elect_args.holding_budget,
                    "steps to watch the elected leader after convergence");

  CLI::App* sw = app.add_subcommand("sweep", "convergence scaling across sizes");
  add_common(sw, sweep_args, false);
  sw->add_option("--graph", sweep_args.graph, "graph family: complete|ring|star|gnp");
  sw->add_option("--p", sweep_args.p, "edge probability for gnp");
  sw->add_option("--protocol", sweep_args.protocol, "plru|dlru|pbc");
  sw->add_option("--sizes", sizes_arg, "comma-separated agent counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (color->parsed()) {
      popproto::RunKind kind;
      if (color_args.protocol == "plru") kind = popproto::RunKind::ColorPlru;
      else if (color_args.protocol == "dlru") kind = popproto::RunKind::ColorDlru;
      else throw std::invalid_argument("color --protocol must be plru or dlru");
      auto r = popproto::measure_convergence(kind, graph_spec(color_args), color_args.trials,
                                             popproto::resolve_seed(color_args.seed),
                                             options(color_args));
      emit(r, color_args.out);
    } else if (elect->parsed()) {
      popproto::RunKind kind;
      if (elect_args.protocol == "plru") kind = popproto::RunKind::ElectPlru;
      else if (elect_args.protocol == "dlru") kind = popproto::RunKind::ElectDlru;
      else throw std::invalid_argument("elect --protocol must be plru or dlru");
      auto r = popproto::measure_holding(kind, graph_spec(elect_args), elect_args.trials,
                                         popproto::resolve_seed(elect_args.seed),
                                         elect_args.holding_budget, options(elect_args));
      emit(r, elect_args.out);
    } else if (sw->parsed()) {
      popproto::RunKind kind;
      if (sweep_args.protocol == "plru") kind = popproto::RunKind::ColorPlru;
      else if (sweep_args.protocol == "dlru") kind = popproto::RunKind::ColorDlru;
      else if (sweep_args.protocol == "pbc") kind = popproto::RunKind::ElectPlru;
      else throw std::invalid_argument("sweep --protocol must be plru, dlru, or pbc");

      popproto::GraphFamily family = graph_spec(sweep_args).family;
      if (!sweep_args.graph.empty() && sweep_args.graph.rfind("file:", 0) == 0)
        throw std::invalid_argument("sweep needs a generated family, not a file");

      std::vector<uint32_t> sizes;
      std::stringstream ss(sizes_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) sizes.push_back(static_cast<uint32_t>(std::stoul(tok)));
      }
      auto r = popproto::sweep(kind, family, sizes, sweep_args.trials,
                               popproto::resolve_seed(sweep_args.seed), options(sweep_args));
      if (!sweep_args.out.empty()) popproto::write_outputs(r, sweep_args.out);
      std::cout << popproto::summary_json(r);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
