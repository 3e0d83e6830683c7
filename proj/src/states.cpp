#include "cgdyn/states.hpp"

#include <cmath>

namespace cgdyn {

DensityMatrix::DensityMatrix(Matrix m, double hermiticity_tol, double trace_tol,
                             double psd_floor)
    : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols())
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  if (!is_hermitian(mat_, hermiticity_tol))
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within tolerance");
  if (std::abs(mat_.trace() - Complex(1.0)) > trace_tol)
    throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond tolerance");
  if (min_eigenvalue(mat_) < psd_floor)
    throw std::invalid_argument("DensityMatrix: matrix has an eigenvalue below the PSD floor");
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

PureState::PureState(Vector amplitudes, double norm_tol) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) throw std::invalid_argument("PureState: dimension must be >= 1");
  if (std::abs(amps_.norm() - 1.0) > norm_tol)
    throw std::invalid_argument("PureState: amplitudes are not normalized within tolerance");
}

DensityMatrix PureState::density() const {
  return DensityMatrix(amps_ * amps_.adjoint());
}

GellMannBasis::GellMannBasis(Index q) : q_(q) {
  if (q < 2) throw std::invalid_argument("GellMannBasis: dimension must be >= 2");
  elements_.reserve(static_cast<size_t>(q * q - 1));

  // Symmetric pairs |j><k| + |k><j|, row-major over j<k.
  for (Index j = 0; j < q; ++j)
    for (Index k = j + 1; k < q; ++k) {
      Matrix s = Matrix::Zero(q, q);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      elements_.push_back(std::move(s));
    }
  // Antisymmetric pairs -i|j><k| + i|k><j|.
  for (Index j = 0; j < q; ++j)
    for (Index k = j + 1; k < q; ++k) {
      Matrix s = Matrix::Zero(q, q);
      s(j, k) = Complex(0.0, -1.0);
      s(k, j) = Complex(0.0, 1.0);
      elements_.push_back(std::move(s));
    }
  // Diagonal members sqrt(2/(l(l+1))) (sum_{j<l} |j><j| - l |l><l|).
  for (Index l = 1; l < q; ++l) {
    Matrix s = Matrix::Zero(q, q);
    const double factor = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Index j = 0; j < l; ++j) s(j, j) = factor;
    s(l, l) = -factor * static_cast<double>(l);
    elements_.push_back(std::move(s));
  }
}

BlochVector bloch_vector(const DensityMatrix& rho, const GellMannBasis& basis) {
  if (rho.dim() != basis.dim())
    throw std::invalid_argument("bloch_vector: state and basis dimensions differ");
  BlochVector v(basis.size());
  for (Index i = 0; i < basis.size(); ++i) {
    const Complex t = (rho.matrix() * basis[i]).trace();
    if (std::abs(t.imag()) > kAlgebraTol)
      throw std::runtime_error("bloch_vector: non-real component encountered");
    v(i) = t.real();
  }
  return v;
}

Matrix bloch_reconstruct(const BlochVector& v, const GellMannBasis& basis) {
  if (v.size() != basis.size())
    throw std::invalid_argument("bloch_reconstruct: vector length does not match basis");
  const Index q = basis.dim();
  Matrix m = Matrix::Identity(q, q) / static_cast<double>(q);
  for (Index i = 0; i < basis.size(); ++i) m += 0.5 * v(i) * basis[i];
  return m;
}

DensityMatrix from_bloch(const BlochVector& v, const GellMannBasis& basis) {
  return DensityMatrix(bloch_reconstruct(v, basis));
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return trace_norm(a - b);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

PureState random_pure_state(Index dim, std::mt19937_64& rng) {
  if (dim < 1) throw std::invalid_argument("random_pure_state: dimension must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector amps(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    amps(i) = Complex(re, im);
  }
  amps /= amps.norm();
  return PureState(std::move(amps));
}

PureState random_pure_state(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_pure_state(dim, rng);
}

}  // namespace cgdyn
