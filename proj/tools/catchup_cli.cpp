#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catchup/config.hpp"
#include "catchup/metrics.hpp"
#include "catchup/run.hpp"
#include "catchup/scenarios.hpp"

namespace {

catchup::Vec to_vec(const std::vector<double>& v) {
  catchup::Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

int cmd_run(const std::string& config_path, const std::string& scenario_name,
            const CLI::App& cmd, double h, int refine, std::uint64_t seed,
            double slack, double delta, const std::string& out_dir, bool no_pair) {
  if (config_path.empty() == scenario_name.empty()) {
    std::fprintf(stderr, "run: provide exactly one of <config> or --scenario\n");
    return catchup::kExitInput;
  }
  catchup::ScenarioConfig cfg;
  try {
    if (!scenario_name.empty()) {
      cfg.bundle = catchup::builtin_scenario(scenario_name);
      cfg.kind = scenario_name;
      cfg.name = cfg.bundle.name;
    } else {
      cfg = catchup::load_scenario_config_file(config_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return catchup::kExitInput;
  }
  if (cmd.count("--h")) cfg.run.h = h;
  if (cmd.count("--refine")) cfg.run.refine = refine;
  if (cmd.count("--seed")) cfg.run.seed = seed;
  if (cmd.count("--slack")) cfg.run.slack = slack;
  if (cmd.count("--delta")) cfg.run.delta = delta;
  if (cmd.count("--out")) cfg.run.out_dir = out_dir;
  if (no_pair) cfg.lyap.enabled = false;

  const catchup::RunOutcome out = catchup::run_config(cfg);
  std::printf("scenario: %s\n", out.scenario.c_str());
  for (const auto& f : out.files) std::printf("wrote: %s\n", f.c_str());
  std::printf("%s\n", out.message.c_str());
  return out.exit_code;
}

int cmd_dis(const std::vector<double>& lo1, const std::vector<double>& hi1,
            const std::vector<double>& lo2, const std::vector<double>& hi2,
            long budget, std::uint64_t seed) {
  if (lo1.size() != hi1.size() || lo2.size() != hi2.size() ||
      lo1.size() != lo2.size() || lo1.empty()) {
    std::fprintf(stderr, "dis: --lo1/--hi1/--lo2/--hi2 must share one length\n");
    return catchup::kExitInput;
  }
  const int dim = static_cast<int>(lo1.size());
  const catchup::Vec l1 = to_vec(lo1), h1 = to_vec(hi1), l2 = to_vec(lo2),
                     h2 = to_vec(hi2);
  try {
    const auto op1 = catchup::normal_cone(
        dim, [l1, h1](double, const catchup::Vec&) {
          return catchup::ConvexSet::interval_product(l1, h1);
        });
    const auto op2 = catchup::normal_cone(
        dim, [l2, h2](double, const catchup::Vec&) {
          return catchup::ConvexSet::interval_product(l2, h2);
        });
    try {
      const double dh = catchup::hausdorff(catchup::ConvexSet::interval_product(l1, h1),
                                           catchup::ConvexSet::interval_product(l2, h2));
      std::printf("hausdorff: %.17g\n", dh);
    } catch (const std::invalid_argument& e) {
      std::printf("hausdorff: undefined (%s)\n", e.what());
    }
    catchup::DisParams params;
    params.seed = seed;
    const catchup::Vec zero = catchup::Vec::Zero(dim);
    const catchup::DisEstimate est =
        catchup::dis_estimate(op1, 0.0, zero, op2, 0.0, zero, budget, params);
    std::printf("dis_lower_bound: %.17g\n", est.lower_bound);
    std::printf("samples_used: %ld\n", est.samples_used);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dis: %s\n", e.what());
    return catchup::kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"implicit catching-up solver for state-dependent monotone inclusions"};
  app.require_subcommand(1);

  std::string config_path, scenario_name, out_dir;
  double h = 0, slack = 0, delta = 0;
  int refine = 0;
  std::uint64_t seed = 42;
  bool no_pair = false;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "solve a scenario; writes trajectory.csv, report.txt, and "
             "convergence.csv when refining");
  run_cmd->set_help_flag("--help", "print this help message and exit");
  run_cmd->add_option("config", config_path, "scenario config file");
  run_cmd->add_option("--scenario", scenario_name,
                      "builtin scenario name (see `scenarios`)");
  run_cmd->add_option("--h", h, "step size override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--refine", refine, "halvings for a convergence study")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out_dir, "output directory (default .)");
  run_cmd->add_option("--seed", seed, "sampling seed");
  run_cmd->add_option("--slack", slack, "decay slack override (default 5h)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--delta", delta, "step-rule delta")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-pair", no_pair, "skip Lyapunov evaluation");

  std::vector<double> lo1, hi1, lo2, hi2;
  long budget = 100000;
  std::uint64_t dis_seed = 12345;
  CLI::App* dis_cmd = app.add_subcommand(
      "dis", "estimate the graph distance between two interval normal cones");
  dis_cmd->add_option("--lo1", lo1, "lower endpoints, first set")->required();
  dis_cmd->add_option("--hi1", hi1, "upper endpoints, first set")->required();
  dis_cmd->add_option("--lo2", lo2, "lower endpoints, second set")->required();
  dis_cmd->add_option("--hi2", hi2, "upper endpoints, second set")->required();
  dis_cmd->add_option("--budget", budget, "resolvent evaluation budget")
      ->check(CLI::PositiveNumber);
  dis_cmd->add_option("--seed", dis_seed, "sampling seed");

  CLI::App* list_cmd = app.add_subcommand("scenarios", "list builtin scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : catchup::kExitInput;
  }

  if (*list_cmd) {
    for (const auto& name : catchup::builtin_scenario_names())
      std::printf("%s\n", name.c_str());
    return 0;
  }
  if (*dis_cmd) return cmd_dis(lo1, hi1, lo2, hi2, budget, dis_seed);
  return cmd_run(config_path, scenario_name, *run_cmd, h, refine, seed, slack, delta,
                 out_dir, no_pair);
}
