#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cgdyn/scenario.hpp"

namespace {

using namespace cgdyn;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Scenario config (JSON)")->required();
  cmd->add_option("--out", opts.out_path, "Output file (default: stdout)");
  cmd->add_option("--seed", opts.seed, "Override the config seed");
}

ScenarioConfig load(const CommonOpts& opts) {
  ScenarioConfig config = load_scenario(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  for (const std::string& w : config.warnings) std::cerr << "warning: " << w << "\n";
  return config;
}

void emit(const Trajectory& traj, const CommonOpts& opts) {
  if (opts.out_path.empty())
    write_csv(traj, std::cout);
  else
    write_csv_file(traj, opts.out_path);
}

void emit_json(const nlohmann::json& j, const CommonOpts& opts) {
  if (opts.out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(opts.out_path);
    if (!out) throw ValidationError("cannot open output file: " + opts.out_path);
    out << j.dump(2) << "\n";
  }
}

int cmd_check_channel(const CommonOpts& opts) {
  const ScenarioConfig config = load(opts);
  const ChannelCheck check = run_check_channel(config);
  std::cout << "completeness_residual " << check.report.completeness_residual << "\n";
  std::cout << "choi_min_eig " << check.report.choi_min_eig << "\n";
  if (check.table_residual >= 0.0)
    std::cout << "detector_table_residual " << check.table_residual << "\n";
  std::cout << (check.pass ? "PASS" : "FAIL") << "\n";
  return check.pass ? 0 : 1;
}

int cmd_simulate(const CommonOpts& opts) {
  const ScenarioConfig config = load(opts);
  const SimulateRun run = run_simulate(config);
  emit(run.trajectory, opts);
  std::cerr << "max effective/direct discrepancy: " << run.max_discrepancy << "\n";
  return 0;
}

int cmd_distance(const CommonOpts& opts, bool override_check) {
  const ScenarioConfig config = load(opts);
  const DistanceRun run = run_distance(config, override_check);
  emit(run.trajectory, opts);
  std::cerr << "eff_distance_0 " << run.eff_distance_0 << ", underlying_distance_0 "
            << run.underlying_distance_0 << ", max_eff_distance " << run.max_eff_distance
            << ", same_map_residual " << run.same_map_residual << "\n";
  return 0;
}

int cmd_find_pair(const CommonOpts& opts, std::optional<int> budget) {
  ScenarioConfig config = load(opts);
  if (budget) config.search_budget = *budget;
  const FindPairReport report = run_find_pair(config);
  emit_json(find_pair_to_json(report), opts);
  std::cerr << "excess " << report.excess << " over eff_distance_0 " << report.eff_distance_0
            << " (" << report.candidates_valid << "/" << report.candidates_tried
            << " candidates valid)\n";
  return 0;
}

int cmd_domain_probe(const CommonOpts& opts, int samples) {
  const ScenarioConfig config = load(opts);
  const DomainProbeRun run = run_domain_probe(config, samples);
  std::cout << "samples " << run.report.samples << "\n";
  std::cout << "violations " << run.report.violations << "\n";
  std::cout << "max_residual " << run.report.max_residual << "\n";
  return run.report.violations == 0 ? 0 : 1;
}

int cmd_divisibility(const CommonOpts& opts) {
  const ScenarioConfig config = load(opts);
  const DivisibilityRun run = run_divisibility(config);
  Trajectory traj;
  traj.columns = {"tau_j", "tau_k", "min_choi_eig", "reconstruction_residual"};
  for (const DivisibilityRow& row : run.rows)
    traj.rows.push_back({row.tau_j, row.tau_k, row.min_eig, row.residual});
  // CSV plus a readable status table on stderr.
  emit(traj, opts);
  for (const DivisibilityRow& row : run.rows)
    std::cerr << "(" << row.tau_j << " -> " << row.tau_k << ") " << to_string(row.status)
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-grained quantum dynamics experiments"};
  app.require_subcommand(1);

  CommonOpts check_opts, sim_opts, dist_opts, pair_opts, domain_opts, div_opts;
  bool override_check = false;
  std::optional<int> budget;
  int samples = 100;

  add_common(app.add_subcommand("check-channel", "Channel CPTP diagnostics"), check_opts);
  add_common(app.add_subcommand("simulate", "Purity/Bloch trajectory CSV"), sim_opts);
  CLI::App* dist = app.add_subcommand("distance", "Effective-distance trajectory CSV");
  add_common(dist, dist_opts);
  dist->add_flag("--override-same-map-check", override_check,
                 "Proceed even if the two states generate different effective maps");
  CLI::App* pair = app.add_subcommand("find-pair", "Search for a distance-increasing pair");
  add_common(pair, pair_opts);
  pair->add_option("--budget", budget, "Override the config search budget");
  CLI::App* domain = app.add_subcommand("domain-probe", "Domain convexity probe");
  add_common(domain, domain_opts);
  domain->add_option("--samples", samples, "Number of member pairs to sample");
  add_common(app.add_subcommand("divisibility", "Intermediate-map CP report"), div_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("check-channel")) return cmd_check_channel(check_opts);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_opts);
    if (app.got_subcommand("distance")) return cmd_distance(dist_opts, override_check);
    if (app.got_subcommand("find-pair")) return cmd_find_pair(pair_opts, budget);
    if (app.got_subcommand("domain-probe")) return cmd_domain_probe(domain_opts, samples);
    if (app.got_subcommand("divisibility")) return cmd_divisibility(div_opts);
  } catch (const cgdyn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cgdyn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
