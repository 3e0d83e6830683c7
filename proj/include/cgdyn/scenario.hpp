#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cgdyn/effective.hpp"
#include "cgdyn/gamma_space.hpp"

namespace cgdyn {

/// Unreadable or structurally invalid input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed input that fails a semantic requirement (CLI exit code 1).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimensionless times tau = J*t, inclusive linspace with `steps` points.
struct TimeGrid {
  double tau_start = 0.0;
  double tau_end = 3.141592653589793;
  int steps = 101;

  std::vector<double> points() const;
};

Matrix hamiltonian_zz();
Matrix hamiltonian_zz_transverse(double g);

struct ScenarioConfig {
  KrausChannel channel;
  bool builtin_detector = false;
  Matrix hamiltonian;  // empty when the config omits it
  std::vector<Vector> initial_states;
  TimeGrid grid;
  std::uint64_t seed = 0;
  int search_budget = 500;
  std::vector<std::string> warnings;

  bool has_hamiltonian() const { return hamiltonian.size() > 0; }
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

/// Rows of real observables with a fixed header; written as CSV with 17
/// significant digits, LF line endings.
struct Trajectory {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const Trajectory& t, std::ostream& os);
void write_csv_file(const Trajectory& t, const std::string& path);

struct ChannelCheck {
  CptpReport report;
  double table_residual;  // < 0 when the golden table does not apply
  bool pass;
};

ChannelCheck run_check_channel(const ScenarioConfig& config);

struct SimulateRun {
  Trajectory trajectory;
  double max_discrepancy;  // effective route vs direct route, over the grid
};

/// Purity/Bloch trajectory of the single configured state, computed both
/// through the effective map and through the direct path; aborts if the two
/// routes disagree beyond 1e-9.
SimulateRun run_simulate(const ScenarioConfig& config);

struct DistanceRun {
  Trajectory trajectory;
  double eff_distance_0;
  double underlying_distance_0;
  double max_eff_distance;
  double same_map_residual;
};

/// Distance trajectory for two arbitrary underlying states (no same-map
/// enforcement); used by the pair search and by run_distance.
DistanceRun distance_trajectory(const KrausChannel& ch, const Matrix& hamiltonian,
                                const TimeGrid& grid, const DensityMatrix& a,
                                const DensityMatrix& b);

/// Distance trajectory of the two configured states. Refuses pairs whose
/// Bloch difference is not a perpendicular displacement (the two states would
/// generate different effective maps) unless overridden.
DistanceRun run_distance(const ScenarioConfig& config, bool override_same_map_check = false);

struct FindPairReport {
  DensityMatrix seed_state;
  DensityMatrix partner;
  BlochVector seed_gamma;
  BlochVector partner_gamma;
  RealVector coefficients;
  double excess;  // max_tau eff_distance(tau) - eff_distance(0)
  double eff_distance_0;
  int candidates_tried;
  int candidates_valid;
};

/// Randomized search over perpendicular displacements of the configured seed
/// state, maximizing the distance excess over the time grid.
FindPairReport run_find_pair(const ScenarioConfig& config);

nlohmann::json find_pair_to_json(const FindPairReport& report);

struct DomainProbeRun {
  ConvexityReport report;
};

DomainProbeRun run_domain_probe(const ScenarioConfig& config, int samples = 100);

struct DivisibilityRow {
  double tau_j;
  double tau_k;
  double min_eig;
  double residual;
  CpStatus status;
};

struct DivisibilityRun {
  std::vector<DivisibilityRow> rows;
};

/// Intermediate-map CP report for every ordered pair of grid times.
DivisibilityRun run_divisibility(const ScenarioConfig& config);

}  // namespace cgdyn
