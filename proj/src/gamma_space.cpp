#include "cgdyn/gamma_space.hpp"

#include <random>

namespace cgdyn {

namespace {
constexpr double kMembershipTol = 1e-9;
}

RealMatrix HyperplaneSystem::normal_matrix() const {
  RealMatrix n(ambient_dim, static_cast<Index>(normals.size()));
  for (size_t k = 0; k < normals.size(); ++k) n.col(static_cast<Index>(k)) = normals[k];
  return n;
}

HyperplaneSystem hyperplanes(const KrausChannel& ch, const GellMannBasis& basis_in,
                             const GellMannBasis& basis_out) {
  if (basis_in.dim() != ch.in_dim() || basis_out.dim() != ch.out_dim())
    throw std::invalid_argument("hyperplanes: basis dimensions must match the channel");

  const Index ambient = basis_in.size();
  std::vector<RealVector> normals;
  normals.reserve(static_cast<size_t>(basis_out.size()));
  for (Index k = 0; k < basis_out.size(); ++k) {
    RealVector v(ambient);
    for (Index m = 0; m < ambient; ++m)
      v(m) = 0.5 * (ch.apply_to_operator(basis_in[m]) * basis_out[k]).trace().real();
    normals.push_back(std::move(v));
  }

  const Matrix mixed = Matrix::Identity(ch.in_dim(), ch.in_dim()) /
                       static_cast<double>(ch.in_dim());
  const Matrix image = ch.apply_to_operator(mixed);
  RealVector offsets(basis_out.size());
  for (Index k = 0; k < basis_out.size(); ++k)
    offsets(k) = (image * basis_out[k]).trace().real();

  return {ambient, std::move(normals), std::move(offsets), basis_in, basis_out};
}

BlochVector effective_state_from_gamma(const HyperplaneSystem& sys, const BlochVector& gamma) {
  if (gamma.size() != sys.ambient_dim)
    throw std::invalid_argument("effective_state_from_gamma: gamma has wrong length");
  BlochVector alpha(sys.offsets.size());
  for (size_t k = 0; k < sys.normals.size(); ++k)
    alpha(static_cast<Index>(k)) = sys.offsets(static_cast<Index>(k)) +
                                   sys.normals[k].dot(gamma);
  return alpha;
}

MoveResult perpendicular_move(const HyperplaneSystem& sys, const BlochVector& gamma0,
                              const RealVector& coeffs) {
  if (coeffs.size() != static_cast<Index>(sys.normals.size()))
    throw std::invalid_argument("perpendicular_move: need one coefficient per normal");
  BlochVector gamma = gamma0;
  for (size_t k = 0; k < sys.normals.size(); ++k)
    gamma += coeffs(static_cast<Index>(k)) * sys.normals[k];
  const double min_eig = min_eigenvalue(bloch_reconstruct(gamma, sys.basis_in));
  return {std::move(gamma), min_eig >= kPsdFloor, min_eig};
}

BlochVector parallel_move(const HyperplaneSystem& sys, const BlochVector& gamma0,
                          const RealVector& direction, double step) {
  if (direction.size() != sys.ambient_dim)
    throw std::invalid_argument("parallel_move: direction has wrong length");
  const RealMatrix n = sys.normal_matrix();
  // Orthonormalize the span once; columns may be linearly dependent.
  Eigen::ColPivHouseholderQR<RealMatrix> qr(n);
  const Index rank = qr.rank();
  const RealMatrix q = qr.householderQ() * RealMatrix::Identity(n.rows(), rank);
  RealVector parallel = direction - q * (q.transpose() * direction);
  const double norm = parallel.norm();
  if (norm < 1e-12)
    throw std::invalid_argument("parallel_move: direction lies entirely in the normal span");
  return gamma0 + step * parallel / norm;
}

DomainQuery in_domain(const HyperplaneSystem& sys, const BlochVector& gamma0,
                      const BlochVector& query) {
  if (gamma0.size() != sys.ambient_dim || query.size() != sys.ambient_dim)
    throw std::invalid_argument("in_domain: vector length mismatch");
  const RealMatrix n = sys.normal_matrix();
  const RealVector delta = query - gamma0;
  const RealVector coeffs = n.colPivHouseholderQr().solve(delta);
  const double residual = (n * coeffs - delta).norm();
  const double min_eig = min_eigenvalue(bloch_reconstruct(query, sys.basis_in));
  const bool psd_ok = min_eig >= kPsdFloor;
  return {residual < kMembershipTol && psd_ok, residual, psd_ok};
}

ConvexityReport convexity_probe(const HyperplaneSystem& sys, const BlochVector& gamma0,
                                int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index n_coeffs = static_cast<Index>(sys.normals.size());

  auto draw_member = [&]() -> BlochVector {
    for (int attempt = 0; attempt < 64; ++attempt) {
      RealVector c(n_coeffs);
      for (Index k = 0; k < n_coeffs; ++k) c(k) = gauss(rng);
      // Shrink toward the seed until the underlying state is valid.
      for (int shrink = 0; shrink < 30; ++shrink) {
        const MoveResult moved = perpendicular_move(sys, gamma0, c);
        if (moved.psd_ok) return moved.gamma;
        c *= 0.5;
      }
    }
    return gamma0;  // the seed itself is always a member
  };

  ConvexityReport report{samples, 0, 0.0};
  for (int s = 0; s < samples; ++s) {
    const BlochVector ga = draw_member();
    const BlochVector gb = draw_member();
    const double p = unit(rng);
    const BlochVector mix = p * ga + (1.0 - p) * gb;
    const DomainQuery q = in_domain(sys, gamma0, mix);
    report.max_residual = std::max(report.max_residual, q.residual);
    if (!q.member) ++report.violations;
  }
  return report;
}

}  // namespace cgdyn
