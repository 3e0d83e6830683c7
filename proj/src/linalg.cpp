#include "cgdyn/linalg.hpp"

#include <vector>

namespace cgdyn {

Matrix partial_trace(const Matrix& m, const Bipartition& part, Side side) {
  const Index da = part.dim_a;
  const Index db = part.dim_b;
  if (m.rows() != m.cols() || m.rows() != part.total())
    throw std::invalid_argument("partial_trace: matrix dimension does not match bipartition");

  if (side == Side::A) {
    Matrix out = Matrix::Zero(db, db);
    for (Index a = 0; a < da; ++a)
      out += m.block(a * db, a * db, db, db);
    return out;
  }
  Matrix out = Matrix::Zero(da, da);
  for (Index a = 0; a < da; ++a)
    for (Index ap = 0; ap < da; ++ap)
      out(a, ap) = m.block(a * db, ap * db, db, db).trace();
  return out;
}

HermitianEigen eig_hermitian(const Matrix& m, double hermiticity_tol) {
  if (!is_hermitian(m, hermiticity_tol))
    throw std::invalid_argument("eig_hermitian: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Matrix matrix_exp_hermitian_generator(const Matrix& h, double tau, double hermiticity_tol) {
  const HermitianEigen eig = eig_hermitian(h, hermiticity_tol);
  Vector phases(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -eig.values(k) * tau));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("trace_norm: matrix must be square");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

Matrix complete_to_unitary(const Matrix& columns, Index total_dim,
                           std::span<const Index> positions) {
  const Index k = columns.cols();
  if (columns.rows() != total_dim)
    throw std::invalid_argument("complete_to_unitary: column height must equal total_dim");
  if (k > total_dim)
    throw std::invalid_argument("complete_to_unitary: more columns than total_dim");
  if (!positions.empty() && static_cast<Index>(positions.size()) != k)
    throw std::invalid_argument("complete_to_unitary: positions size must match column count");
  if (!approx_equal((columns.adjoint() * columns).eval(), Matrix::Identity(k, k), kAlgebraTol))
    throw std::invalid_argument("complete_to_unitary: input columns are not orthonormal");

  // Accepted vectors: the inputs first, then completions in generation order.
  Matrix basis(total_dim, total_dim);
  basis.leftCols(k) = columns;
  Index count = k;

  constexpr double kResidualCutoff = 1e-8;
  for (Index e = 0; e < total_dim && count < total_dim; ++e) {
    Vector r = Vector::Unit(total_dim, e);
    for (Index b = 0; b < count; ++b)
      r -= basis.col(b) * basis.col(b).dot(r);
    if (r.norm() < kResidualCutoff) continue;
    // Second pass removes the residue the first one leaves behind.
    for (Index b = 0; b < count; ++b)
      r -= basis.col(b) * basis.col(b).dot(r);
    basis.col(count++) = r / r.norm();
  }
  if (count < total_dim)
    throw std::runtime_error("complete_to_unitary: failed to complete the basis");

  std::vector<bool> taken(total_dim, false);
  std::vector<Index> slots(total_dim);
  for (Index i = 0; i < k; ++i) {
    const Index p = positions.empty() ? i : positions[i];
    if (p < 0 || p >= total_dim || taken[p])
      throw std::invalid_argument("complete_to_unitary: invalid or duplicate column position");
    taken[p] = true;
    slots[i] = p;
  }
  Index next = 0;
  for (Index i = k; i < total_dim; ++i) {
    while (taken[next]) ++next;
    taken[next] = true;
    slots[i] = next;
  }

  Matrix out(total_dim, total_dim);
  for (Index i = 0; i < total_dim; ++i) out.col(slots[i]) = basis.col(i);
  return out;
}

}  // namespace cgdyn
