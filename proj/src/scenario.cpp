#include "cgdyn/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cgdyn {

namespace {

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Matrix parse_complex_matrix(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected matrix rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<size_t>(r));
    if (static_cast<Index>(row.size()) != cols)
      throw ConfigError(std::string(what) + ": ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row.at(static_cast<size_t>(c));
      if (!e.is_array() || e.size() != 2)
        throw ConfigError(std::string(what) + ": entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

void require_cptp(const KrausChannel& ch) {
  const Matrix id = Matrix::Identity(ch.in_dim(), ch.in_dim());
  Matrix sum = Matrix::Zero(ch.in_dim(), ch.in_dim());
  for (const Matrix& k : ch.kraus()) sum += k.adjoint() * k;
  if (operator_norm(sum - id) > kAlgebraTol)
    throw ValidationError("channel is not trace preserving; run check-channel for diagnostics");
}

void require_hamiltonian(const ScenarioConfig& config) {
  if (!config.has_hamiltonian())
    throw ValidationError("this command requires a hamiltonian in the config");
}

std::vector<Matrix> evolution_grid(const Matrix& hamiltonian, const TimeGrid& grid) {
  const HermitianEigen eig = eig_hermitian(hamiltonian);
  std::vector<Matrix> us;
  for (double tau : grid.points()) {
    Vector phases(eig.values.size());
    for (Index k = 0; k < eig.values.size(); ++k)
      phases(k) = std::exp(Complex(0.0, -eig.values(k) * tau));
    us.push_back(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint());
  }
  return us;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> TimeGrid::points() const {
  if (steps < 1) throw ConfigError("time_grid: steps must be >= 1");
  if (tau_end < tau_start) throw ConfigError("time_grid: tau_end must be >= tau_start");
  std::vector<double> ts;
  ts.reserve(static_cast<size_t>(steps));
  if (steps == 1) {
    ts.push_back(tau_start);
    return ts;
  }
  const double dt = (tau_end - tau_start) / static_cast<double>(steps - 1);
  for (int i = 0; i < steps; ++i) ts.push_back(tau_start + dt * i);
  return ts;
}

Matrix hamiltonian_zz() { return kron(pauli_z(), pauli_z()); }

Matrix hamiltonian_zz_transverse(double g) {
  const Matrix id = Matrix::Identity(2, 2);
  return kron(pauli_z(), pauli_z()) + g * (kron(pauli_x(), id) + kron(id, pauli_x()));
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("channel")) throw ConfigError("config: missing channel");

  const auto& jch = j.at("channel");
  bool builtin_detector = false;
  KrausChannel channel = [&]() -> KrausChannel {
    if (jch.is_object() && jch.contains("builtin")) {
      const std::string name = jch.at("builtin").get<std::string>();
      if (name != "blurred_detector")
        throw ConfigError("config: unknown builtin channel '" + name + "'");
      builtin_detector = true;
      return blurred_detector_channel();
    }
    try {
      return channel_from_json(jch, /*strict=*/false);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();

  ScenarioConfig config{std::move(channel), builtin_detector, Matrix(), {}, {}, 0, 500, {}};

  if (j.contains("hamiltonian")) {
    const auto& jh = j.at("hamiltonian");
    if (jh.is_object() && jh.contains("builtin")) {
      const std::string name = jh.at("builtin").get<std::string>();
      if (name == "zz") {
        config.hamiltonian = hamiltonian_zz();
      } else if (name == "zz_transverse") {
        if (!jh.contains("g")) throw ConfigError("config: zz_transverse needs field g");
        config.hamiltonian = hamiltonian_zz_transverse(jh.at("g").get<double>());
      } else {
        throw ConfigError("config: unknown builtin hamiltonian '" + name + "'");
      }
    } else {
      config.hamiltonian = parse_complex_matrix(jh, "hamiltonian");
    }
    if (config.hamiltonian.rows() != config.hamiltonian.cols())
      throw ConfigError("config: hamiltonian must be square");
    if (config.hamiltonian.rows() != config.channel.in_dim())
      throw ConfigError("config: hamiltonian dimension must match channel input dimension");
    if (!is_hermitian(config.hamiltonian, kAlgebraTol))
      throw ConfigError("config: hamiltonian is not Hermitian within 1e-10");
  }

  if (j.contains("initial_states")) {
    for (const auto& js : j.at("initial_states")) {
      if (!js.is_array() || js.empty()) throw ConfigError("config: bad initial state");
      Vector amps(static_cast<Index>(js.size()));
      for (Index i = 0; i < amps.size(); ++i) {
        const auto& e = js.at(static_cast<size_t>(i));
        if (!e.is_array() || e.size() != 2)
          throw ConfigError("config: state amplitudes must be [re, im] pairs");
        amps(i) = Complex(e[0].get<double>(), e[1].get<double>());
      }
      if (amps.size() != config.channel.in_dim())
        throw ConfigError("config: initial state dimension must match channel input");
      const double norm = amps.norm();
      if (std::abs(norm - 1.0) > 1e-8)
        throw ConfigError("config: initial state norm deviates from 1 beyond 1e-8");
      if (norm != 1.0) {
        amps /= norm;
        config.warnings.push_back("initial state renormalized (|norm - 1| = " +
                                  format_value(std::abs(norm - 1.0)) + ")");
      }
      config.initial_states.push_back(std::move(amps));
    }
  }

  if (j.contains("time_grid")) {
    const auto& jg = j.at("time_grid");
    if (jg.contains("tau_start")) config.grid.tau_start = jg.at("tau_start").get<double>();
    if (jg.contains("tau_end")) config.grid.tau_end = jg.at("tau_end").get<double>();
    if (jg.contains("steps")) config.grid.steps = jg.at("steps").get<int>();
    config.grid.points();  // validate eagerly
  }

  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("search_budget")) {
    config.search_budget = j.at("search_budget").get<int>();
    if (config.search_budget < 0) throw ConfigError("config: search_budget must be >= 0");
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

void write_csv(const Trajectory& t, std::ostream& os) {
  for (size_t c = 0; c < t.columns.size(); ++c)
    os << (c ? "," : "") << t.columns[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_value(row[c]);
    os << "\n";
  }
}

void write_csv_file(const Trajectory& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  write_csv(t, out);
}

ChannelCheck run_check_channel(const ScenarioConfig& config) {
  const CptpReport report = verify_cptp(config.channel);
  const bool builtin = config.builtin_detector;
  double table_residual = -1.0;
  if (builtin) table_residual = blurred_detector_table_residual(config.channel);

  const double completeness_limit = builtin ? 1e-12 : kAlgebraTol;
  bool pass = report.completeness_residual < completeness_limit && report.choi_min_eig >= -1e-10;
  if (builtin) pass = pass && table_residual < 1e-12;
  return {report, table_residual, pass};
}

SimulateRun run_simulate(const ScenarioConfig& config) {
  require_cptp(config.channel);
  require_hamiltonian(config);
  if (config.initial_states.size() != 1)
    throw ValidationError("simulate requires exactly one initial state");

  const Dilation dil = dilation_from_kraus(config.channel);
  const DensityMatrix psi0 = PureState(config.initial_states.front()).density();
  const Decomposition dec = decompose(build_virtual_state(dil, psi0));

  const Index d = config.channel.out_dim();
  const bool bloch_columns = (d == 2);
  const GellMannBasis basis_d(d);

  Trajectory traj;
  traj.columns = bloch_columns
                     ? std::vector<std::string>{"tau", "purity", "bx", "by", "bz",
                                                "zeta_norm", "min_output_eig"}
                     : std::vector<std::string>{"tau", "purity", "zeta_norm", "min_output_eig"};

  const std::vector<double> taus = config.grid.points();
  const std::vector<Matrix> us = evolution_grid(config.hamiltonian, config.grid);

  double max_discrepancy = 0.0;
  for (size_t i = 0; i < taus.size(); ++i) {
    const Matrix w = intertwined_unitary(dil, us[i]);
    const EffectiveMapComponents map = build_effective_map(dec, w);
    const EffectiveState eff = effective_evolve(map, dec.rho0);

    const Matrix psi_t = us[i] * psi0.matrix() * us[i].adjoint();
    const Matrix direct = config.channel.apply_to_operator(psi_t);
    max_discrepancy = std::max(max_discrepancy, max_abs_diff(eff.state, direct));

    std::vector<double> row{taus[i], purity(eff.state)};
    if (bloch_columns)
      for (Index b = 0; b < 3; ++b)
        row.push_back((eff.state * basis_d[b]).trace().real());
    row.push_back(trace_norm(map.zeta_term));
    row.push_back(eff.min_eig);
    traj.rows.push_back(std::move(row));
  }

  if (max_discrepancy >= 1e-9)
    throw ValidationError("simulate: effective and direct routes disagree (max " +
                          format_value(max_discrepancy) + ")");
  return {std::move(traj), max_discrepancy};
}

DistanceRun distance_trajectory(const KrausChannel& ch, const Matrix& hamiltonian,
                                const TimeGrid& grid, const DensityMatrix& a,
                                const DensityMatrix& b) {
  const std::vector<double> taus = grid.points();
  const std::vector<Matrix> us = evolution_grid(hamiltonian, grid);

  const double underlying_0 = trace_distance(a, b);
  const double eff_0 =
      trace_distance(ch.apply_to_operator(a.matrix()), ch.apply_to_operator(b.matrix()));

  Trajectory traj;
  traj.columns = {"tau", "eff_distance", "eff_distance_0", "underlying_distance_0"};
  double max_eff = 0.0;
  for (size_t i = 0; i < taus.size(); ++i) {
    const Matrix at = us[i] * a.matrix() * us[i].adjoint();
    const Matrix bt = us[i] * b.matrix() * us[i].adjoint();
    const double eff = trace_distance(ch.apply_to_operator(at), ch.apply_to_operator(bt));
    max_eff = std::max(max_eff, eff);
    if (eff > underlying_0 + 1e-10)
      throw ValidationError("distance: effective distance exceeded the underlying bound");
    traj.rows.push_back({taus[i], eff, eff_0, underlying_0});
  }
  return {std::move(traj), eff_0, underlying_0, max_eff, 0.0};
}

DistanceRun run_distance(const ScenarioConfig& config, bool override_same_map_check) {
  require_cptp(config.channel);
  require_hamiltonian(config);
  if (config.initial_states.size() != 2)
    throw ValidationError("distance requires exactly two initial states");

  const DensityMatrix a = PureState(config.initial_states[0]).density();
  const DensityMatrix b = PureState(config.initial_states[1]).density();

  const GellMannBasis basis_in(config.channel.in_dim());
  const GellMannBasis basis_out(config.channel.out_dim());
  const HyperplaneSystem sys = hyperplanes(config.channel, basis_in, basis_out);
  const DomainQuery q = in_domain(sys, bloch_vector(a, basis_in), bloch_vector(b, basis_in));
  if (!q.member && !override_same_map_check)
    throw ValidationError(
        "distance: the two states do not generate the same effective map "
        "(perpendicular-displacement residual " +
        format_value(q.residual) + "); pass --override-same-map-check to proceed");

  DistanceRun run = distance_trajectory(config.channel, config.hamiltonian, config.grid, a, b);
  run.same_map_residual = q.residual;
  return run;
}

FindPairReport run_find_pair(const ScenarioConfig& config) {
  require_cptp(config.channel);
  require_hamiltonian(config);
  if (config.initial_states.size() != 1)
    throw ValidationError("find-pair requires exactly one seed state");

  const DensityMatrix seed_state = PureState(config.initial_states.front()).density();
  const GellMannBasis basis_in(config.channel.in_dim());
  const GellMannBasis basis_out(config.channel.out_dim());
  const HyperplaneSystem sys = hyperplanes(config.channel, basis_in, basis_out);
  const BlochVector gamma0 = bloch_vector(seed_state, basis_in);

  const std::vector<double> taus = config.grid.points();
  const std::vector<Matrix> us = evolution_grid(config.hamiltonian, config.grid);
  std::vector<Matrix> seed_effective;
  seed_effective.reserve(us.size());
  for (const Matrix& u : us)
    seed_effective.push_back(
        config.channel.apply_to_operator(u * seed_state.matrix() * u.adjoint()));
  const Matrix seed_effective_0 = config.channel.apply_to_operator(seed_state.matrix());

  FindPairReport best{seed_state,
                      seed_state,
                      gamma0,
                      gamma0,
                      RealVector::Zero(basis_out.size()),
                      0.0,
                      0.0,
                      0,
                      0};

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 0.5);
  bool found_candidate = false;

  for (int attempt = 0; attempt < config.search_budget; ++attempt) {
    ++best.candidates_tried;
    RealVector c(basis_out.size());
    for (Index k = 0; k < c.size(); ++k) c(k) = gauss(rng);

    // Bound the displacement so the reconstruction stays a valid state.
    MoveResult moved = perpendicular_move(sys, gamma0, c);
    int shrink = 0;
    while (!moved.psd_ok && shrink < 20) {
      c *= 0.5;
      moved = perpendicular_move(sys, gamma0, c);
      ++shrink;
    }
    if (!moved.psd_ok) continue;
    ++best.candidates_valid;
    found_candidate = true;

    const DensityMatrix candidate = from_bloch(moved.gamma, basis_in);
    const double eff_0 =
        trace_distance(seed_effective_0, config.channel.apply_to_operator(candidate.matrix()));
    double max_eff = 0.0;
    for (size_t i = 0; i < us.size(); ++i) {
      const Matrix evolved = us[i] * candidate.matrix() * us[i].adjoint();
      max_eff = std::max(max_eff, trace_distance(seed_effective[i],
                                                 config.channel.apply_to_operator(evolved)));
    }
    const double excess = max_eff - eff_0;
    if (excess > best.excess) {
      best.partner = candidate;
      best.partner_gamma = moved.gamma;
      best.coefficients = c;
      best.excess = excess;
      best.eff_distance_0 = eff_0;
    }
  }

  if (config.search_budget > 0 && !found_candidate)
    throw ValidationError("find-pair: no PSD candidate found within the attempt budget");
  return best;
}

nlohmann::json find_pair_to_json(const FindPairReport& report) {
  auto matrix_json = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
      rows.push_back(std::move(row));
    }
    return rows;
  };
  auto real_vector_json = [](const RealVector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
  };
  nlohmann::json out;
  out["excess"] = report.excess;
  out["eff_distance_0"] = report.eff_distance_0;
  out["coefficients"] = real_vector_json(report.coefficients);
  out["seed_gamma"] = real_vector_json(report.seed_gamma);
  out["partner_gamma"] = real_vector_json(report.partner_gamma);
  out["seed_state"] = matrix_json(report.seed_state.matrix());
  out["partner_state"] = matrix_json(report.partner.matrix());
  out["candidates_tried"] = report.candidates_tried;
  out["candidates_valid"] = report.candidates_valid;
  return out;
}

DomainProbeRun run_domain_probe(const ScenarioConfig& config, int samples) {
  require_cptp(config.channel);
  if (config.initial_states.empty())
    throw ValidationError("domain-probe requires at least one initial state");
  const DensityMatrix seed = PureState(config.initial_states.front()).density();
  const GellMannBasis basis_in(config.channel.in_dim());
  const GellMannBasis basis_out(config.channel.out_dim());
  const HyperplaneSystem sys = hyperplanes(config.channel, basis_in, basis_out);
  return {convexity_probe(sys, bloch_vector(seed, basis_in), samples, config.seed)};
}

DivisibilityRun run_divisibility(const ScenarioConfig& config) {
  require_cptp(config.channel);
  require_hamiltonian(config);
  const std::vector<double> taus = config.grid.points();
  const std::vector<Matrix> us = evolution_grid(config.hamiltonian, config.grid);
  const Dilation dil = dilation_from_kraus(config.channel);

  DivisibilityRun run;
  for (size_t j = 0; j < us.size(); ++j)
    for (size_t k = j; k < us.size(); ++k) {
      const IntermediateMapResult r = intermediate_map(dil, us, k, j);
      run.rows.push_back({taus[j], taus[k], r.min_eig, r.reconstruction_residual, r.status});
    }
  return run;
}

}  // namespace cgdyn
