#include <doctest.h>

#include "cgdyn/effective.hpp"
#include "reference_data.hpp"
#include "test_support.hpp"

using namespace cgdyn;
using namespace cgdyn::testing;

namespace {

DensityMatrix equal_amplitude_state() {
  Vector c(4);
  c << 0.5, 0.5, 0.5, 0.5;
  return PureState(c).density();
}

// Uneven amplitudes leave the larger Kraus operators active, so the virtual
// state carries genuine correlations between the two factors.
DensityMatrix lopsided_state() {
  Vector c(4);
  c << 1.0, 2.0, 1.0, 0.0;
  c /= c.norm();
  return PureState(c).density();
}

DensityMatrix ground_state() {
  Vector c = Vector::Zero(4);
  c(0) = 1.0;
  return PureState(c).density();
}

Matrix swap_gate() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = 1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 3) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("virtual state construction") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  std::mt19937_64 rng(3);

  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix psi = random_pure_state(4, rng).density();
    const VirtualState chi = build_virtual_state(dil, psi);
    CHECK(purity(chi.chi) == doctest::Approx(purity(psi)).epsilon(1e-10));
    // Marginal over the discarded factors is the coarse-grained state.
    const Matrix marginal = partial_trace(chi.chi.matrix(), chi.split, Side::A);
    CHECK(approx_equal(marginal, blurred_detector_channel().apply(psi).matrix(), 1e-10));
    CHECK(std::abs(partial_trace(chi.chi.matrix(), chi.split, Side::B).trace() -
                   Complex(1.0)) < 1e-12);
  }

  const VirtualState chi0 = build_virtual_state(dil, ground_state());
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(approx_equal(partial_trace(chi0.chi.matrix(), chi0.split, Side::A), expected, 1e-12));
}

TEST_CASE("decomposition into product plus correlation") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());

  // A pure coarse-grained marginal forces a product structure.
  const Decomposition ground = decompose(build_virtual_state(dil, ground_state()));
  CHECK(trace_norm(ground.correlation) < 1e-12);

  // Equal amplitudes annihilate every Kraus operator but the first, so the
  // virtual state is again a product despite the state being entangled.
  const Decomposition equal = decompose(build_virtual_state(dil, equal_amplitude_state()));
  CHECK(trace_norm(equal.correlation) < 1e-12);

  const Decomposition dec = decompose(build_virtual_state(dil, lopsided_state()));
  CHECK(trace_norm(dec.correlation) > 0.1);
  // Reassembly is exact and the correlation has no local content.
  const Matrix rebuilt = kron(dec.omega0.matrix(), dec.rho0.matrix()) + dec.correlation;
  CHECK(approx_equal(rebuilt, build_virtual_state(dil, lopsided_state()).chi.matrix(),
                     1e-12));
  CHECK(is_hermitian(dec.correlation, 1e-12));
  CHECK(std::abs(dec.correlation.trace()) < 1e-12);
  CHECK(max_abs_diff(partial_trace(dec.correlation, dec.split, Side::A),
                     Matrix::Zero(2, 2)) < 1e-10);
  CHECK(max_abs_diff(partial_trace(dec.correlation, dec.split, Side::B),
                     Matrix::Zero(4, 4)) < 1e-10);

  // Spectral weights of the discarded marginal sum to one.
  const HermitianEigen om = eig_hermitian(dec.omega0.matrix());
  CHECK(om.values.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Synthetic product state: zero correlation by construction.
  std::mt19937_64 rng(5);
  const Matrix prod = kron(random_density(4, rng).matrix(), random_density(2, rng).matrix());
  const Decomposition dp = decompose(VirtualState{Bipartition(4, 2), DensityMatrix(prod)});
  CHECK(trace_norm(dp.correlation) < 1e-12);
}

TEST_CASE("intertwined unitary") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  CHECK(approx_equal(intertwined_unitary(dil, Matrix::Identity(4, 4)),
                     Matrix::Identity(8, 8), 1e-12));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix u = random_unitary(4, rng);
    const Matrix w = intertwined_unitary(dil, u);
    CHECK(is_unitary(w, 1e-10));

    const DensityMatrix psi = random_pure_state(4, rng).density();
    const Matrix chi0 = build_virtual_state(dil, psi).chi.matrix();
    const Matrix chi_t = w * chi0 * w.adjoint();
    const DensityMatrix evolved(u * psi.matrix() * u.adjoint());
    CHECK(approx_equal(chi_t, build_virtual_state(dil, evolved).chi.matrix(), 1e-10));
    // Marginal consistency of the evolved virtual state.
    CHECK(approx_equal(partial_trace(chi_t, dil.traced_split(), Side::A),
                       blurred_detector_channel().apply(evolved).matrix(), 1e-10));
  }

  CHECK_THROWS_AS(intertwined_unitary(dil, (2.0 * Matrix::Identity(4, 4)).eval()),
                  std::invalid_argument);
}

TEST_CASE("effective Kraus operators") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  std::mt19937_64 rng(11);

  // Identity evolution: the effective map is the identity on any input.
  const Decomposition dec = decompose(build_virtual_state(dil, equal_amplitude_state()));
  const std::vector<Matrix> ms = effective_kraus(dec, Matrix::Identity(8, 8));
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_density(2, rng);
    Matrix out = Matrix::Zero(2, 2);
    for (const Matrix& m : ms) out += m * rho.matrix() * m.adjoint();
    CHECK(approx_equal(out, rho.matrix(), 1e-10));
  }

  // Zero-correlation scenario: the Kraus term alone reproduces the dynamics.
  const Decomposition ground = decompose(build_virtual_state(dil, ground_state()));
  const Matrix u = matrix_exp_hermitian_generator(kron(pauli('z'), pauli('z')), 0.9);
  const Matrix w = intertwined_unitary(dil, u);
  const std::vector<Matrix> mg = effective_kraus(ground, w);
  Matrix out = Matrix::Zero(2, 2);
  for (const Matrix& m : mg) out += m * ground.rho0.matrix() * m.adjoint();
  const Matrix direct = blurred_detector_channel().apply_to_operator(
      u * ground_state().matrix() * u.adjoint());
  CHECK(approx_equal(out, direct, 1e-10));

  // Completeness across random scenarios.
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix psi = random_pure_state(4, rng).density();
    const Matrix ur = random_unitary(4, rng);
    const Decomposition d = decompose(build_virtual_state(dil, psi));
    const std::vector<Matrix> mr = effective_kraus(d, intertwined_unitary(dil, ur));
    Matrix total = Matrix::Zero(2, 2);
    for (const Matrix& m : mr) total += m.adjoint() * m;
    CHECK(max_abs_diff(total, Matrix::Identity(2, 2)) < 1e-9);
  }
}

TEST_CASE("correlation matrix and zeta") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const GellMannBasis basis_a(4), basis_b(2);

  const Decomposition ground = decompose(build_virtual_state(dil, ground_state()));
  CHECK(correlation_matrix(ground, basis_a, basis_b).cwiseAbs().maxCoeff() < 1e-12);

  const Decomposition dec = decompose(build_virtual_state(dil, lopsided_state()));
  const RealMatrix theta = correlation_matrix(dec, basis_a, basis_b);
  CHECK(theta.cwiseAbs().maxCoeff() > 1e-2);
  // Theta reconstructs the correlation operator exactly.
  Matrix rebuilt = Matrix::Zero(8, 8);
  for (Index i = 0; i < basis_a.size(); ++i)
    for (Index j = 0; j < basis_b.size(); ++j)
      rebuilt += theta(i, j) * kron(basis_a[i], basis_b[j]);
  CHECK(approx_equal(rebuilt, dec.correlation, 1e-10));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix u = random_unitary(4, rng);
    const Matrix w = intertwined_unitary(dil, u);
    const Matrix z = zeta(theta, w, basis_a, basis_b, dec.split);
    CHECK(std::abs(z.trace()) < 1e-12);
    CHECK(is_hermitian(z, 1e-10));
    // Both routes to the correlation term agree.
    CHECK(approx_equal(z, correlation_term_direct(dec, w), 1e-10));
  }

  const RealMatrix zero = RealMatrix::Zero(basis_a.size(), basis_b.size());
  CHECK(max_abs_diff(zeta(zero, Matrix::Identity(8, 8), basis_a, basis_b, dec.split),
                     Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("effective evolution closes the diagram") {
  const KrausChannel det = blurred_detector_channel();
  const Dilation dil = dilation_from_kraus(det);
  std::mt19937_64 rng(17);

  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix psi = random_pure_state(4, rng).density();
    const Matrix h = random_hermitian(4, rng);
    const double tau = 2.0 * 3.141592653589793 * (trial + 1) / 20.0;
    const Matrix u = matrix_exp_hermitian_generator(h, tau);

    const Decomposition dec = decompose(build_virtual_state(dil, psi));
    const Matrix w = intertwined_unitary(dil, u);
    const EffectiveMapComponents map = build_effective_map(dec, w);

    const Matrix direct = det.apply_to_operator(u * psi.matrix() * u.adjoint());
    const EffectiveState via_theta = effective_evolve(map, dec.rho0);
    const Matrix via_spectral =
        kraus_term(map, dec.rho0.matrix()) + correlation_term_direct(dec, w);

    CHECK(approx_equal(via_theta.state, direct, 1e-9));
    CHECK(approx_equal(via_spectral, direct, 1e-9));
    CHECK(approx_equal(via_theta.state, via_spectral, 1e-9));
    CHECK(std::abs(via_theta.state.trace() - Complex(1.0)) < 1e-10);
  }
}

TEST_CASE("identity evolution fixes the effective state") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Decomposition dec = decompose(build_virtual_state(dil, equal_amplitude_state()));
  const EffectiveMapComponents map = build_effective_map(dec, Matrix::Identity(8, 8));
  const EffectiveState out = effective_evolve(map, dec.rho0);
  CHECK(approx_equal(out.state, dec.rho0.matrix(), 1e-10));
  CHECK(out.min_eig >= -1e-10);
}

TEST_CASE("purity dip of the equal-amplitude scenario") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Decomposition dec = decompose(build_virtual_state(dil, equal_amplitude_state()));
  const Matrix zz = kron(pauli('z'), pauli('z'));

  const Matrix u = matrix_exp_hermitian_generator(zz, 3.141592653589793 / 2.0);
  const EffectiveMapComponents map = build_effective_map(dec, intertwined_unitary(dil, u));
  const EffectiveState out = effective_evolve(map, dec.rho0);
  CHECK(purity(out.state) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("pure marginal collapses the correlation term") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Decomposition dec = decompose(build_virtual_state(dil, ground_state()));
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix w = intertwined_unitary(dil, random_unitary(4, rng));
    const EffectiveMapComponents map = build_effective_map(dec, w);
    CHECK(map.theta.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs_diff(map.zeta_term, Matrix::Zero(2, 2)) < 1e-12);
  }
}

TEST_CASE("intermediate map at equal times is the identity") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Matrix u = matrix_exp_hermitian_generator(kron(pauli('z'), pauli('z')), 0.4);
  const std::vector<Matrix> grid{u, u};
  const IntermediateMapResult r = intermediate_map(dil, grid, 1, 0);
  CHECK(r.status == CpStatus::cp);
  CHECK(r.min_eig >= -1e-10);
  CHECK(r.reconstruction_residual < 1e-10);
  // Identity map's Choi is the unnormalized maximally entangled projector.
  Vector bell = Vector::Zero(4);
  bell(0) = 1.0;
  bell(3) = 1.0;
  CHECK(approx_equal(r.choi, (bell * bell.adjoint()).eval(), 1e-10));
}

TEST_CASE("swap plus partial trace breaks divisibility") {
  const Dilation dil = dilation_from_kraus(trace_out_second_qubit());
  const std::vector<Matrix> grid{Matrix::Identity(4, 4), swap_gate()};
  const IntermediateMapResult r = intermediate_map(dil, grid, 1, 0);
  CHECK((r.status == CpStatus::indeterminate || r.status == CpStatus::not_cp));
}

TEST_CASE("divisibility sweep over a zz grid emits statuses") {
  const Dilation dil = dilation_from_kraus(blurred_detector_channel());
  const Matrix zz = kron(pauli('z'), pauli('z'));
  std::vector<Matrix> grid;
  for (int i = 0; i < 10; ++i)
    grid.push_back(matrix_exp_hermitian_generator(zz, 0.3 * i));
  for (size_t j = 0; j < grid.size(); ++j)
    for (size_t k = j; k < grid.size(); ++k) {
      const IntermediateMapResult r = intermediate_map(dil, grid, k, j);
      CHECK(std::isfinite(r.min_eig));
      if (k == j) CHECK(r.status == CpStatus::cp);
    }
}
