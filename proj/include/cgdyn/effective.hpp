#pragma once

#include "cgdyn/channels.hpp"

namespace cgdyn {

/// State on the dilation space H_{Dr} (x) H_d separating accessible from
/// non-accessible degrees of freedom: chi = V (psi (x) |0><0| (x) |0><0|) V^dag.
struct VirtualState {
  Bipartition split;  // (D*r, d)
  DensityMatrix chi;
};

VirtualState build_virtual_state(const Dilation& dil, const DensityMatrix& psi0);

/// chi = omega0 (x) rho0 + correlation, with omega0 = Tr_d(chi) the marginal
/// on the discarded factors, rho0 = Tr_{Dr}(chi) the coarse-grained state, and
/// the correlation traceless with vanishing partial traces.
struct Decomposition {
  Bipartition split;
  DensityMatrix omega0;  // dim D*r
  DensityMatrix rho0;    // dim d
  Matrix correlation;    // chi - omega0 (x) rho0
};

Decomposition decompose(const VirtualState& chi);

/// W_t = V (U_t (x) 1_r (x) 1_d) V^dag, the evolution lifted to the dilation
/// space; chi_t = W_t chi_0 W_t^dag.
Matrix intertwined_unitary(const Dilation& dil, const Matrix& u_t,
                           double unitarity_tol = 1e-8);

/// Effective Kraus operators M_ij = sqrt(p_j) (<phi_i| (x) 1) W_t (|phi_j> (x) 1)
/// from the spectral decomposition omega0 = sum_j p_j |phi_j><phi_j|; i runs
/// over the full eigenbasis, j over eigenvalues above `prob_floor`.
std::vector<Matrix> effective_kraus(const Decomposition& dec, const Matrix& w_t,
                                    double prob_floor = 1e-12);

/// Expansion coefficients of the correlation operator in the product basis:
/// Theta_ij = Tr[(chi - omega0 (x) rho0)(s_A^i (x) s_B^j)] / 4, so that
/// sum_ij Theta_ij s_A^i (x) s_B^j reconstructs the correlation exactly.
RealMatrix correlation_matrix(const Decomposition& dec, const GellMannBasis& basis_a,
                              const GellMannBasis& basis_b);

/// zeta = sum_ij Theta_ij Tr_{Dr}(W_t s_A^i (x) s_B^j W_t^dag); Hermitian and
/// traceless, the additive non-Kraus contribution to the effective map.
Matrix zeta(const RealMatrix& theta, const Matrix& w_t, const GellMannBasis& basis_a,
            const GellMannBasis& basis_b, const Bipartition& split);

/// The correlation term evaluated directly, Tr_{Dr}(W_t correlation W_t^dag);
/// must agree with the zeta() route.
Matrix correlation_term_direct(const Decomposition& dec, const Matrix& w_t);

/// Everything defining the effective map at one time.
struct EffectiveMapComponents {
  Bipartition split;
  Matrix w_t;
  RealVector omega_probs;  // ascending
  Matrix omega_vectors;
  std::vector<Matrix> kraus;  // M_ij
  GellMannBasis basis_a;
  GellMannBasis basis_b;
  RealMatrix theta;
  Matrix zeta_term;  // d x d
};

EffectiveMapComponents build_effective_map(const Decomposition& dec, const Matrix& w_t);

/// sum_ij M_ij rho M_ij^dag.
Matrix kraus_term(const EffectiveMapComponents& map, const Matrix& rho);

struct EffectiveState {
  Matrix state;  // Hermitian, unit trace; PSD only inside the map's domain
  double min_eig;
};

/// Gamma_t(rho) = sum M rho M^dag + zeta. Positivity of the output is
/// reported, not enforced: states outside the domain may legitimately map to
/// non-PSD operators.
EffectiveState effective_evolve(const EffectiveMapComponents& map, const DensityMatrix& rho0);

enum class CpStatus { cp, not_cp, indeterminate };

const char* to_string(CpStatus s);

struct IntermediateMapResult {
  Matrix choi;  // (d*d) x (d*d)
  double min_eig;
  double reconstruction_residual;
  CpStatus status;
};

/// Intermediate map Gamma_(t_k, t_j) solving N_{t_k} = Gamma o N_{t_j} for the
/// composites N_t = Lambda o U_t, computed as N_{t_k} pinv(N_{t_j}) on the
/// operator-space representation (singular-value cutoff `sv_cutoff`). When the
/// factorization does not exist (reconstruction residual above `recon_tol`)
/// the status is `indeterminate`; otherwise the sign of the Choi minimum
/// eigenvalue decides between `cp` and `not_cp`.
IntermediateMapResult intermediate_map(const Dilation& dil, const std::vector<Matrix>& u_grid,
                                       size_t k, size_t j, double sv_cutoff = 1e-9,
                                       double recon_tol = 1e-8);

}  // namespace cgdyn
