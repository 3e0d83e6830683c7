#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cgdyn/states.hpp"

namespace cgdyn {

/// CPTP map in Kraus form: Lambda(psi) = sum_i K_i psi K_i^dag with the K_i
/// of shape out_dim x in_dim and sum K_i^dag K_i = 1 (checked at 1e-10 unless
/// constructed via unchecked(), which is meant for diagnostics on suspect data).
class KrausChannel {
 public:
  KrausChannel(Index in_dim, Index out_dim, std::vector<Matrix> kraus,
               double completeness_tol = kAlgebraTol);

  static KrausChannel unchecked(Index in_dim, Index out_dim, std::vector<Matrix> kraus);

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Linear extension of the channel action to arbitrary operators.
  Matrix apply_to_operator(const Matrix& x) const;

 private:
  KrausChannel() = default;

  Index in_dim_ = 0;
  Index out_dim_ = 0;
  std::vector<Matrix> kraus_;
};

struct CptpReport {
  double completeness_residual;  // ||sum K^dag K - 1|| (operator norm)
  double choi_min_eig;
};

CptpReport verify_cptp(const KrausChannel& ch);

/// J = sum_ij E_ij (x) Lambda(E_ij), input factor first; (D*d) x (D*d).
struct ChoiMatrix {
  Index in_dim;
  Index out_dim;
  Matrix matrix;
};

ChoiMatrix choi(const KrausChannel& ch);

/// Channel action reconstructed from a Choi matrix (block contraction).
Matrix apply_choi_to_operator(const ChoiMatrix& j, const Matrix& x);

/// Eigen-decomposes J and reshapes eigenpairs above `eig_cutoff` into Kraus
/// operators. Throws if J has an eigenvalue below -1e-9 (non-CP input).
KrausChannel kraus_from_choi(const ChoiMatrix& j, double eig_cutoff = 1e-10);

/// Unitary realization on H_D (x) H_r (x) H_d: Lambda(psi) =
/// Tr_{Dr}[V (psi (x) |0><0| (x) |0><0|) V^dag]. Composite index ordering is
/// (i_D * r + i_r) * d + i_d.
struct Dilation {
  Index dim_in;   // D
  Index dim_aux;  // r
  Index dim_out;  // d

  Matrix v;  // (D*r*d) x (D*r*d), unitary

  Dilation(Index d_in, Index r, Index d_out, Matrix unitary, double tol = kAlgebraTol);

  Index total_dim() const { return dim_in * dim_aux * dim_out; }
  Bipartition traced_split() const { return {dim_in * dim_aux, dim_out}; }
  /// Columns of V addressed by inputs |k> (x) |0> (x) |0>, as an n x D matrix.
  Matrix input_columns() const;
};

/// Builds a dilation with r = ceil(N/D): the N Kraus operators are padded
/// with zeros to D*r operators K_{ij} (flat index i*r+j), the D input columns
/// are fixed by V(|k> (x) |0> (x) |0>) = sum_ij |i>|j> (x) K_ij |k>, and the
/// rest of V comes from complete_to_unitary.
Dilation dilation_from_kraus(const KrausChannel& ch);

DensityMatrix apply_dilation(const Dilation& dil, const DensityMatrix& psi);
Matrix apply_dilation_to_operator(const Dilation& dil, const Matrix& x);

/// True iff the two channels have the same action (Choi matrices equal within tol).
bool kraus_equivalent(const KrausChannel& a, const KrausChannel& b, double tol = 1e-9);

/// The D=4 -> d=2 coarse graining of a detector that cannot resolve the two
/// sites and saturates at one excitation: |00> maps to |0>, the three excited
/// basis states merge into |1>, cross coherences pick up 1/sqrt(3) factors.
KrausChannel blurred_detector_channel();

/// Expected action of the blurred detector on a 4x4 matrix unit |i><j|.
struct DetectorTableEntry {
  Index i;
  Index j;
  Matrix expected;  // 2x2
};

/// All 16 golden entries for the blurred detector.
const std::vector<DetectorTableEntry>& blurred_detector_golden_actions();

/// Max absolute deviation of a channel's action from the golden table.
double blurred_detector_table_residual(const KrausChannel& ch);

/// JSON wire format: {"in_dim": D, "out_dim": d, "kraus": [[[re, im], ...], ...]}
/// with each operator a flat row-major entry list.
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j, bool strict = true);

}  // namespace cgdyn
