// Acceptance suite: one pass/fail line per criterion, exit code = #failures.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "cgdyn/scenario.hpp"
#include "reference_data.hpp"
#include "test_support.hpp"

using namespace cgdyn;
using namespace cgdyn::testing;

namespace {

constexpr double kPi = 3.141592653589793;

int failures = 0;

void report(int n, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", n, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

DensityMatrix equal_amplitude_state() {
  Vector c(4);
  c << 0.5, 0.5, 0.5, 0.5;
  return PureState(c).density();
}

ScenarioConfig pair_search_config(Matrix hamiltonian) {
  Vector c(4);
  c << 0.5, 0.5, 0.5, 0.5;
  ScenarioConfig config{blurred_detector_channel(), true,      std::move(hamiltonian),
                        {c},                        TimeGrid{}, 20250809,
                        500,                        {}};
  config.grid = {0.0, 3.0, 61};
  return config;
}

void criterion_1_channel_validity() {
  const CptpReport r = verify_cptp(blurred_detector_channel());
  report(1, "detector channel validity", r.completeness_residual < 1e-12 && r.choi_min_eig >= -1e-10,
         "completeness " + num(r.completeness_residual) + ", choi min eig " + num(r.choi_min_eig));
}

void criterion_2_reference_unitary() {
  const Matrix v = blurred_detector_reference_unitary();
  const double unitarity =
      operator_norm(v.adjoint() * v - Matrix::Identity(8, 8));
  const Dilation dil(4, 1, 2, v);
  double worst = 0.0;
  for (const DetectorTableEntry& e : blurred_detector_golden_actions()) {
    Matrix unit = Matrix::Zero(4, 4);
    unit(e.i, e.j) = 1.0;
    worst = std::max(worst, max_abs_diff(apply_dilation_to_operator(dil, unit), e.expected));
  }
  report(2, "reference dilation unitary golden test", unitarity < 1e-12 && worst < 1e-12,
         "unitarity " + num(unitarity) + ", table residual " + num(worst));
}

void criterion_3_dilation_round_trip() {
  const KrausChannel det = blurred_detector_channel();
  const Dilation dil = dilation_from_kraus(det);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix psi = random_pure_state(4, rng).density();
    worst =
        std::max(worst, max_abs_diff(apply_dilation(dil, psi).matrix(), det.apply(psi).matrix()));
  }
  report(3, "dilation reproduces the channel, r = 1", dil.dim_aux == 1 && worst < 1e-10,
         "r = " + std::to_string(dil.dim_aux) + ", worst action gap " + num(worst));
}

void criteria_4_5_diagram_consistency() {
  const KrausChannel det = blurred_detector_channel();
  const Dilation dil = dilation_from_kraus(det);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> tau_dist(0.0, 2.0 * kPi);

  double worst_route_gap = 0.0;
  double worst_completeness = 0.0;
  double worst_zeta_trace = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix psi = random_pure_state(4, rng).density();
    const Matrix h = random_hermitian(4, rng);
    const Matrix u = matrix_exp_hermitian_generator(h, tau_dist(rng));

    const Decomposition dec = decompose(build_virtual_state(dil, psi));
    const Matrix w = intertwined_unitary(dil, u);
    const EffectiveMapComponents map = build_effective_map(dec, w);

    const Matrix direct = det.apply_to_operator(u * psi.matrix() * u.adjoint());
    const Matrix via_theta = effective_evolve(map, dec.rho0).state;
    const Matrix via_spectral = kraus_term(map, dec.rho0.matrix()) + correlation_term_direct(dec, w);

    worst_route_gap = std::max({worst_route_gap, max_abs_diff(via_theta, direct),
                                max_abs_diff(via_spectral, direct),
                                max_abs_diff(via_theta, via_spectral)});

    Matrix total = Matrix::Zero(2, 2);
    for (const Matrix& m : map.kraus) total += m.adjoint() * m;
    worst_completeness =
        std::max(worst_completeness, max_abs_diff(total, Matrix::Identity(2, 2)));
    worst_zeta_trace = std::max(worst_zeta_trace, std::abs(map.zeta_term.trace()));
  }
  report(4, "diagram consistency over 100 random scenarios", worst_route_gap < 1e-9,
         "worst pairwise route gap " + num(worst_route_gap));
  report(5, "effective Kraus completeness and traceless zeta",
         worst_completeness < 1e-9 && worst_zeta_trace < 1e-12,
         "completeness " + num(worst_completeness) + ", |tr zeta| " + num(worst_zeta_trace));
}

void criterion_6_purity_oscillation() {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Decomposition dec = decompose(build_virtual_state(dil, equal_amplitude_state()));
  const Matrix zz = hamiltonian_zz();

  auto purity_at = [&](double tau) {
    const Matrix u = matrix_exp_hermitian_generator(zz, tau);
    const EffectiveMapComponents map = build_effective_map(dec, intertwined_unitary(dil, u));
    return purity(effective_evolve(map, dec.rho0).state);
  };

  const double p0 = purity_at(0.0);
  const double pmid = purity_at(kPi / 2.0);
  double worst_period = 0.0;
  for (int i = 0; i < 101; ++i) {
    const double tau = kPi * i / 100.0;
    worst_period = std::max(worst_period, std::abs(purity_at(tau) - purity_at(tau + kPi)));
  }
  const bool pass = std::abs(p0 - 1.0) < 1e-9 && std::abs(pmid - 2.0 / 3.0) < 1e-9 &&
                    worst_period < 1e-9;
  report(6, "purity oscillation of the equal-amplitude scenario", pass,
         "purity(0) = " + num(p0) + ", purity(pi/2) = " + num(pmid) + ", periodicity gap " +
             num(worst_period));
}

void criterion_7_pure_marginal_collapse() {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  Vector ground = Vector::Zero(4);
  ground(0) = 1.0;
  const Decomposition dec = decompose(build_virtual_state(dil, PureState(ground).density()));
  const Matrix zz = hamiltonian_zz();

  double worst_theta = 0.0, worst_zeta = 0.0, worst_kraus_gap = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double tau = 2.0 * kPi * i / 20.0;
    const Matrix w = intertwined_unitary(dil, matrix_exp_hermitian_generator(zz, tau));
    const EffectiveMapComponents map = build_effective_map(dec, w);
    worst_theta = std::max(worst_theta, map.theta.cwiseAbs().maxCoeff());
    worst_zeta = std::max(worst_zeta, max_abs_diff(map.zeta_term, Matrix::Zero(2, 2)));
    // With zeta = 0 the evolution is exactly of Kraus form.
    const Matrix full = effective_evolve(map, dec.rho0).state;
    worst_kraus_gap =
        std::max(worst_kraus_gap, max_abs_diff(full, kraus_term(map, dec.rho0.matrix())));
  }
  const bool pass = worst_theta < 1e-12 && worst_zeta < 1e-12 && worst_kraus_gap < 1e-12;
  report(7, "pure marginal collapses the correlation term", pass,
         "|Theta| " + num(worst_theta) + ", |zeta| " + num(worst_zeta));
}

void criterion_8_distance_bound() {
  const KrausChannel det = blurred_detector_channel();
  const GellMannBasis basis_in(4), basis_out(2);
  const HyperplaneSystem sys = hyperplanes(det, basis_in, basis_out);
  const std::vector<Matrix> hams{hamiltonian_zz(), hamiltonian_zz_transverse(3.0)};

  std::mt19937_64 rng(303);
  std::normal_distribution<double> gauss(0.0, 0.5);
  double worst_bound_gap = -1.0;   // max over tau of eff - underlying_0 (must stay <= 1e-10)
  double worst_invariance = 0.0;   // unitary invariance of the underlying distance
  int pairs_done = 0;

  while (pairs_done < 50) {
    const DensityMatrix seed = random_density(4, rng);
    const BlochVector gamma0 = bloch_vector(seed, basis_in);
    RealVector c(3);
    for (Index k = 0; k < 3; ++k) c(k) = gauss(rng);
    MoveResult moved = perpendicular_move(sys, gamma0, c);
    for (int shrink = 0; shrink < 30 && !moved.psd_ok; ++shrink) {
      c *= 0.5;
      moved = perpendicular_move(sys, gamma0, c);
    }
    if (!moved.psd_ok) continue;
    const DensityMatrix partner = from_bloch(moved.gamma, basis_in);
    ++pairs_done;

    const double underlying_0 = trace_distance(seed, partner);
    for (const Matrix& h : hams) {
      const HermitianEigen eig = eig_hermitian(h);
      for (int t = 0; t < 25; ++t) {
        const double tau = kPi * t / 24.0;
        Vector phases(4);
        for (Index k = 0; k < 4; ++k) phases(k) = std::exp(Complex(0.0, -eig.values(k) * tau));
        const Matrix u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
        const Matrix at = u * seed.matrix() * u.adjoint();
        const Matrix bt = u * partner.matrix() * u.adjoint();
        const double eff =
            trace_distance(det.apply_to_operator(at), det.apply_to_operator(bt));
        worst_bound_gap = std::max(worst_bound_gap, eff - underlying_0);
        worst_invariance =
            std::max(worst_invariance, std::abs(trace_distance(at, bt) - underlying_0));
      }
    }
  }
  const bool pass = worst_bound_gap <= 1e-10 && worst_invariance < 1e-10;
  report(8, "distance bound over 50 same-map pairs and both couplings", pass,
         "worst eff - underlying gap " + num(worst_bound_gap) + ", invariance " +
             num(worst_invariance));
}

void criterion_9_no_excess_under_zz() {
  ScenarioConfig config = pair_search_config(hamiltonian_zz());
  config.grid = {0.0, kPi, 41};
  const FindPairReport best = run_find_pair(config);
  const DistanceRun run = distance_trajectory(config.channel, config.hamiltonian, config.grid,
                                              best.seed_state, best.partner);
  const bool pass =
      best.excess <= 1e-10 && run.max_eff_distance <= run.eff_distance_0 + 1e-10;
  report(9, "zz coupling builds no distance excess", pass,
         "best excess " + num(best.excess) + " over " +
             std::to_string(best.candidates_valid) + " candidates");
}

void criterion_10_excess_with_transverse_field() {
  const FindPairReport best = run_find_pair(pair_search_config(hamiltonian_zz_transverse(3.0)));
  report(10, "transverse field produces a distance excess", best.excess > 1e-3,
         "excess " + num(best.excess) + ", eff_distance_0 " + num(best.eff_distance_0));
}

void criterion_11_domain_geometry() {
  const KrausChannel det = blurred_detector_channel();
  const GellMannBasis basis_in(4), basis_out(2);
  const HyperplaneSystem sys = hyperplanes(det, basis_in, basis_out);

  std::mt19937_64 rng(404);
  double worst_affine = 0.0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix psi = random_density(4, rng);
    const BlochVector gamma = bloch_vector(psi, basis_in);
    const RealVector gap = effective_state_from_gamma(sys, gamma) -
                           bloch_vector(det.apply(psi), basis_out);
    worst_affine = std::max(worst_affine, gap.cwiseAbs().maxCoeff());
  }

  const ConvexityReport probe =
      convexity_probe(sys, bloch_vector(equal_amplitude_state(), basis_in), 100, 505);
  const bool pass = worst_affine < 1e-10 && probe.violations == 0;
  report(11, "hyperplane affine form and domain convexity", pass,
         "affine gap " + num(worst_affine) + ", violations " +
             std::to_string(probe.violations));
}

void criterion_12_contraction_control() {
  const KrausChannel det = blurred_detector_channel();
  std::mt19937_64 rng(606);
  double worst = -1.0;
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix a = random_density(4, rng);
    const DensityMatrix b = random_density(4, rng);
    worst = std::max(worst, trace_distance(det.apply(a), det.apply(b)) - trace_distance(a, b));
  }
  report(12, "CPTP contraction baseline on 100 random pairs", worst <= 1e-10,
         "worst contraction gap " + num(worst));
}

}  // namespace

int main() {
  criterion_1_channel_validity();
  criterion_2_reference_unitary();
  criterion_3_dilation_round_trip();
  criteria_4_5_diagram_consistency();
  criterion_6_purity_oscillation();
  criterion_7_pure_marginal_collapse();
  criterion_8_distance_bound();
  criterion_9_no_excess_under_zz();
  criterion_10_excess_with_transverse_field();
  criterion_11_domain_geometry();
  criterion_12_contraction_control();

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
