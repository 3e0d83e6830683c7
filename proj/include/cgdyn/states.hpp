#pragma once

#include <random>
#include <vector>

#include "cgdyn/linalg.hpp"

namespace cgdyn {

/// Validated density operator: Hermitian, unit trace, eigenvalues >= -1e-9.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, double hermiticity_tol = kAlgebraTol,
                         double trace_tol = kAlgebraTol, double psd_floor = kPsdFloor);

  static DensityMatrix maximally_mixed(Index dim);

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

/// Normalized state vector.
class PureState {
 public:
  explicit PureState(Vector amplitudes, double norm_tol = kAlgebraTol);

  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  DensityMatrix density() const;

 private:
  Vector amps_;
};

/// The q^2-1 generalized Pauli matrices for dimension q, ordered as symmetric
/// pairs (row-major over index pairs j<k), then antisymmetric pairs in the
/// same pair order, then the q-1 diagonal members. Each element is Hermitian,
/// traceless, and normalized to Tr(s_i s_j) = 2 delta_ij.
class GellMannBasis {
 public:
  explicit GellMannBasis(Index q);

  Index dim() const { return q_; }
  Index size() const { return static_cast<Index>(elements_.size()); }
  const Matrix& operator[](Index i) const { return elements_.at(static_cast<size_t>(i)); }
  const std::vector<Matrix>& elements() const { return elements_; }

 private:
  Index q_;
  std::vector<Matrix> elements_;
};

/// Real coordinate vector of a state in a GellMannBasis; length q^2-1.
using BlochVector = RealVector;

/// Component i = Tr(rho * basis[i]).
BlochVector bloch_vector(const DensityMatrix& rho, const GellMannBasis& basis);

/// 1/q + (1/2) sum_i v_i s_i, without any state validation.
Matrix bloch_reconstruct(const BlochVector& v, const GellMannBasis& basis);

/// Reconstructs a state from Bloch coordinates; throws if the result is not
/// PSD within the floor (the vector lies outside state space).
DensityMatrix from_bloch(const BlochVector& v, const GellMannBasis& basis);

double purity(const Matrix& rho);
double purity(const DensityMatrix& rho);

/// ||a - b||_1.
double trace_distance(const Matrix& a, const Matrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Haar-random state via normalized complex Gaussian amplitudes.
PureState random_pure_state(Index dim, std::mt19937_64& rng);
PureState random_pure_state(Index dim, std::uint64_t seed);

}  // namespace cgdyn
