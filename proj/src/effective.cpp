#include "cgdyn/effective.hpp"

#include <cmath>

namespace cgdyn {

VirtualState build_virtual_state(const Dilation& dil, const DensityMatrix& psi0) {
  if (psi0.dim() != dil.dim_in)
    throw std::invalid_argument("build_virtual_state: state dimension must be D");
  const Matrix cols = dil.input_columns();
  return {dil.traced_split(), DensityMatrix(cols * psi0.matrix() * cols.adjoint())};
}

Decomposition decompose(const VirtualState& chi) {
  DensityMatrix omega0(partial_trace(chi.chi.matrix(), chi.split, Side::B));
  DensityMatrix rho0(partial_trace(chi.chi.matrix(), chi.split, Side::A));
  Matrix correlation = chi.chi.matrix() - kron(omega0.matrix(), rho0.matrix());
  return {chi.split, std::move(omega0), std::move(rho0), std::move(correlation)};
}

Matrix intertwined_unitary(const Dilation& dil, const Matrix& u_t, double unitarity_tol) {
  if (u_t.rows() != dil.dim_in || u_t.cols() != dil.dim_in)
    throw std::invalid_argument("intertwined_unitary: U must act on H_D");
  if (!is_unitary(u_t, unitarity_tol))
    throw std::invalid_argument("intertwined_unitary: U is not unitary within tolerance");
  const Index rd = dil.dim_aux * dil.dim_out;
  const Matrix lifted = kron(u_t, Matrix::Identity(rd, rd));
  return dil.v * lifted * dil.v.adjoint();
}

std::vector<Matrix> effective_kraus(const Decomposition& dec, const Matrix& w_t,
                                    double prob_floor) {
  const Index dim_a = dec.split.dim_a;
  const Index d = dec.split.dim_b;
  if (w_t.rows() != dec.split.total() || w_t.cols() != dec.split.total())
    throw std::invalid_argument("effective_kraus: W must act on the dilation space");

  const HermitianEigen eig = eig_hermitian(dec.omega0.matrix());
  const Matrix id = Matrix::Identity(d, d);

  std::vector<Matrix> ms;
  for (Index j = 0; j < dim_a; ++j) {
    if (eig.values(j) < prob_floor) continue;
    const double weight = std::sqrt(eig.values(j));
    const Matrix right = w_t * kron(eig.vectors.col(j), id);  // n x d
    for (Index i = 0; i < dim_a; ++i)
      ms.push_back(weight * kron(eig.vectors.col(i), id).adjoint() * right);
  }
  return ms;
}

RealMatrix correlation_matrix(const Decomposition& dec, const GellMannBasis& basis_a,
                              const GellMannBasis& basis_b) {
  if (basis_a.dim() != dec.split.dim_a || basis_b.dim() != dec.split.dim_b)
    throw std::invalid_argument("correlation_matrix: basis dimensions must match the split");
  RealMatrix theta(basis_a.size(), basis_b.size());
  for (Index i = 0; i < basis_a.size(); ++i)
    for (Index j = 0; j < basis_b.size(); ++j) {
      const Complex t = (dec.correlation * kron(basis_a[i], basis_b[j])).trace();
      theta(i, j) = 0.25 * t.real();
    }
  return theta;
}

Matrix zeta(const RealMatrix& theta, const Matrix& w_t, const GellMannBasis& basis_a,
            const GellMannBasis& basis_b, const Bipartition& split) {
  if (theta.rows() != basis_a.size() || theta.cols() != basis_b.size())
    throw std::invalid_argument("zeta: Theta shape must match the bases");
  Matrix out = Matrix::Zero(split.dim_b, split.dim_b);
  for (Index i = 0; i < basis_a.size(); ++i)
    for (Index j = 0; j < basis_b.size(); ++j) {
      if (theta(i, j) == 0.0) continue;
      const Matrix propagated = w_t * kron(basis_a[i], basis_b[j]) * w_t.adjoint();
      out += theta(i, j) * partial_trace(propagated, split, Side::A);
    }
  return out;
}

Matrix correlation_term_direct(const Decomposition& dec, const Matrix& w_t) {
  return partial_trace(w_t * dec.correlation * w_t.adjoint(), dec.split, Side::A);
}

EffectiveMapComponents build_effective_map(const Decomposition& dec, const Matrix& w_t) {
  const HermitianEigen eig = eig_hermitian(dec.omega0.matrix());
  GellMannBasis basis_a(dec.split.dim_a);
  GellMannBasis basis_b(dec.split.dim_b);
  RealMatrix theta = correlation_matrix(dec, basis_a, basis_b);
  Matrix zeta_term = zeta(theta, w_t, basis_a, basis_b, dec.split);
  return {dec.split,
          w_t,
          eig.values,
          eig.vectors,
          effective_kraus(dec, w_t),
          std::move(basis_a),
          std::move(basis_b),
          std::move(theta),
          std::move(zeta_term)};
}

Matrix kraus_term(const EffectiveMapComponents& map, const Matrix& rho) {
  Matrix out = Matrix::Zero(map.split.dim_b, map.split.dim_b);
  for (const Matrix& m : map.kraus) out += m * rho * m.adjoint();
  return out;
}

EffectiveState effective_evolve(const EffectiveMapComponents& map, const DensityMatrix& rho0) {
  if (rho0.dim() != map.split.dim_b)
    throw std::invalid_argument("effective_evolve: state dimension must be d");
  Matrix state = kraus_term(map, rho0.matrix()) + map.zeta_term;
  const double min_eig = min_eigenvalue(state);
  return {std::move(state), min_eig};
}

const char* to_string(CpStatus s) {
  switch (s) {
    case CpStatus::cp: return "CP";
    case CpStatus::not_cp: return "NOT-CP";
    case CpStatus::indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

// Column-stacked operator-space representation of X -> Lambda(U X U^dag),
// with Lambda realized by the dilation; shape (d*d) x (D*D).
Matrix composite_superoperator(const Dilation& dil, const Matrix& u) {
  const Index din = dil.dim_in;
  const Index dout = dil.dim_out;
  Matrix s(dout * dout, din * din);
  for (Index j = 0; j < din; ++j)
    for (Index i = 0; i < din; ++i) {
      Matrix unit = Matrix::Zero(din, din);
      unit(i, j) = 1.0;
      const Matrix image = apply_dilation_to_operator(dil, u * unit * u.adjoint());
      s.col(j * din + i) = Eigen::Map<const Vector>(image.data(), image.size());
    }
  return s;
}

Matrix pseudo_inverse(const Matrix& m, double sv_cutoff) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  RealVector inv = RealVector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > sv_cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal().toDenseMatrix().cast<Complex>() *
         svd.matrixU().adjoint();
}

}  // namespace

IntermediateMapResult intermediate_map(const Dilation& dil, const std::vector<Matrix>& u_grid,
                                       size_t k, size_t j, double sv_cutoff, double recon_tol) {
  if (k >= u_grid.size() || j >= u_grid.size())
    throw std::out_of_range("intermediate_map: grid index out of range");
  const Matrix s_k = composite_superoperator(dil, u_grid[k]);
  const Matrix s_j = composite_superoperator(dil, u_grid[j]);
  const Matrix gamma = s_k * pseudo_inverse(s_j, sv_cutoff);
  const double residual = max_abs_diff((gamma * s_j).eval(), s_k);

  const Index d = dil.dim_out;
  Matrix choi_mat = Matrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      const Vector image = gamma * Eigen::Map<const Vector>(unit.data(), unit.size());
      choi_mat.block(a * d, b * d, d, d) += Eigen::Map<const Matrix>(image.data(), d, d);
    }
  // The pinv route can leave a tiny anti-Hermitian residue; diagnose on the
  // Hermitian part.
  const double min_eig = min_eigenvalue(choi_mat);

  CpStatus status;
  if (residual > recon_tol)
    status = CpStatus::indeterminate;
  else
    status = (min_eig >= kPsdFloor) ? CpStatus::cp : CpStatus::not_cp;
  return {std::move(choi_mat), min_eig, residual, status};
}

}  // namespace cgdyn
