#pragma once

#include "cgdyn/channels.hpp"

namespace cgdyn {

/// Affine form of the coarse graining on Bloch coordinates: the k-th effective
/// component is alpha_k(gamma) = offsets(k) + <normals[k], gamma>. The normals
/// are the rows of the channel's Bloch-space transfer matrix,
/// (v_k)_m = (1/2) Tr[Lambda(s_D^m) s_d^k], and offsets(k) = Tr[Lambda(1/D) s_d^k].
struct HyperplaneSystem {
  Index ambient_dim;                 // D^2 - 1
  std::vector<RealVector> normals;   // d^2 - 1 vectors of length ambient_dim
  RealVector offsets;
  GellMannBasis basis_in;   // dim D
  GellMannBasis basis_out;  // dim d

  /// ambient_dim x (d^2-1) matrix with the normals as columns.
  RealMatrix normal_matrix() const;
};

HyperplaneSystem hyperplanes(const KrausChannel& ch, const GellMannBasis& basis_in,
                             const GellMannBasis& basis_out);

/// alpha(gamma), the Bloch vector of the coarse-grained state.
BlochVector effective_state_from_gamma(const HyperplaneSystem& sys, const BlochVector& gamma);

struct MoveResult {
  BlochVector gamma;
  bool psd_ok;     // underlying reconstruction valid as a state
  double min_eig;  // of the reconstruction
};

/// gamma0 + sum_k coeffs(k) * normals[k]: changes the effective state while
/// keeping the effective map. Validity of the displaced underlying state is
/// reported, not assumed.
MoveResult perpendicular_move(const HyperplaneSystem& sys, const BlochVector& gamma0,
                              const RealVector& coeffs);

/// Steps along the component of `direction` orthogonal to the normal span
/// (normalized), which leaves the effective state unchanged. Throws when the
/// direction lies entirely inside the normal span.
BlochVector parallel_move(const HyperplaneSystem& sys, const BlochVector& gamma0,
                          const RealVector& direction, double step);

struct DomainQuery {
  bool member;
  double residual;  // least-squares residual of gamma - gamma0 in the normal span
  bool psd_ok;
};

/// Membership of `query` in the domain generated from gamma0: the difference
/// must lie in the normal span (residual < 1e-9) and the underlying
/// reconstruction must be PSD.
DomainQuery in_domain(const HyperplaneSystem& sys, const BlochVector& gamma0,
                      const BlochVector& query);

struct ConvexityReport {
  int samples;
  int violations;
  double max_residual;
};

/// Samples pairs of domain members reachable from gamma0 and checks that the
/// convex combination of the underlying states certifies membership of the
/// combined effective state.
ConvexityReport convexity_probe(const HyperplaneSystem& sys, const BlochVector& gamma0,
                                int samples, std::uint64_t seed);

}  // namespace cgdyn
