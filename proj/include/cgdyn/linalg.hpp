#pragma once

#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace cgdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default tolerances. Algebraic identities are checked at 1e-10 absolute,
// matrix-exponential chains at 1e-9; all dimensions in this library are <= 16.
inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kExpChainTol = 1e-9;
inline constexpr double kPsdFloor = -1e-9;

/// Tensor-product split dim_a (x) dim_b of a composite space.
struct Bipartition {
  Index dim_a;
  Index dim_b;

  Bipartition(Index a, Index b) : dim_a(a), dim_b(b) {
    if (a < 1 || b < 1)
      throw std::invalid_argument("Bipartition: both factors must be >= 1");
  }
  Index total() const { return dim_a * dim_b; }
};

/// Which factor of a Bipartition an operation targets.
enum class Side { A, B };

template <typename DA, typename DB>
double max_abs_diff(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  if (a.size() == 0 && b.size() == 0) return 0.0;
  return (a.derived() - b.derived()).cwiseAbs().maxCoeff();
}

/// Entrywise comparison with an explicit absolute tolerance.
template <typename DA, typename DB>
bool approx_equal(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                  double tol = kAlgebraTol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs_diff(a, b) <= tol;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kAlgebraTol) {
  return m.rows() == m.cols() && max_abs_diff(m.derived(), m.derived().adjoint()) <= tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = kAlgebraTol) {
  if (m.rows() != m.cols()) return false;
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return max_abs_diff((m.derived().adjoint() * m.derived()).eval(),
                      Mat::Identity(m.cols(), m.cols())) <= tol;
}

/// Kronecker product; output dimensions multiply.
template <typename DA, typename DB>
auto kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = decltype(typename DA::Scalar{} * typename DB::Scalar{});
  using Out = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Out bm = b.derived().template cast<Scalar>();
  Out out(a.rows() * bm.rows(), a.cols() * bm.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * bm.rows(), j * bm.cols(), bm.rows(), bm.cols()) = Scalar(a(i, j)) * bm;
  return out;
}

/// Trace over one factor of a bipartite operator. `side` names the factor
/// that is traced out; the result lives on the remaining factor.
Matrix partial_trace(const Matrix& m, const Bipartition& part, Side side);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, vectors.col(k) <-> values(k)
};

/// Spectral decomposition of a Hermitian matrix. Throws on non-Hermitian input.
HermitianEigen eig_hermitian(const Matrix& m, double hermiticity_tol = kAlgebraTol);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Matrix& m);

/// U(tau) = exp(-i * h * tau) for a Hermitian generator h.
Matrix matrix_exp_hermitian_generator(const Matrix& h, double tau,
                                      double hermiticity_tol = kAlgebraTol);

/// Sum of singular values, ||m||_1 = Tr sqrt(m^dag m).
double trace_norm(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Extends orthonormal columns to a full unitary. The given columns end up at
/// `positions` (defaults to 0..k-1); the remaining column slots are filled, in
/// ascending index order, with canonical basis vectors orthogonalized against
/// everything accepted so far (modified Gram-Schmidt, two passes), skipping
/// candidates whose residual norm falls below 1e-8. Deterministic.
Matrix complete_to_unitary(const Matrix& columns, Index total_dim,
                           std::span<const Index> positions = {});

}  // namespace cgdyn
