#include "cgdyn/channels.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace cgdyn {

namespace {

void check_kraus_shapes(Index in_dim, Index out_dim, const std::vector<Matrix>& kraus) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("KrausChannel: dimensions must be >= 1");
  if (kraus.empty()) throw std::invalid_argument("KrausChannel: empty Kraus list");
  for (const Matrix& k : kraus)
    if (k.rows() != out_dim || k.cols() != in_dim)
      throw std::invalid_argument("KrausChannel: operator shape must be out_dim x in_dim");
}

Matrix completeness_sum(const std::vector<Matrix>& kraus) {
  Matrix sum = Matrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const Matrix& k : kraus) sum += k.adjoint() * k;
  return sum;
}

}  // namespace

KrausChannel::KrausChannel(Index in_dim, Index out_dim, std::vector<Matrix> kraus,
                           double completeness_tol)
    : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
  check_kraus_shapes(in_dim_, out_dim_, kraus_);
  const Matrix residual = completeness_sum(kraus_) - Matrix::Identity(in_dim_, in_dim_);
  if (operator_norm(residual) > completeness_tol)
    throw std::invalid_argument("KrausChannel: sum K^dag K differs from identity");
}

KrausChannel KrausChannel::unchecked(Index in_dim, Index out_dim, std::vector<Matrix> kraus) {
  check_kraus_shapes(in_dim, out_dim, kraus);
  KrausChannel ch;
  ch.in_dim_ = in_dim;
  ch.out_dim_ = out_dim;
  ch.kraus_ = std::move(kraus);
  return ch;
}

Matrix KrausChannel::apply_to_operator(const Matrix& x) const {
  if (x.rows() != in_dim_ || x.cols() != in_dim_)
    throw std::invalid_argument("KrausChannel: operator dimension mismatch");
  Matrix out = Matrix::Zero(out_dim_, out_dim_);
  for (const Matrix& k : kraus_) out += k * x * k.adjoint();
  return out;
}

DensityMatrix KrausChannel::apply(const DensityMatrix& rho) const {
  if (rho.dim() != in_dim_)
    throw std::invalid_argument("KrausChannel: state dimension mismatch");
  return DensityMatrix(apply_to_operator(rho.matrix()));
}

CptpReport verify_cptp(const KrausChannel& ch) {
  const Matrix residual =
      completeness_sum(ch.kraus()) - Matrix::Identity(ch.in_dim(), ch.in_dim());
  const ChoiMatrix j = choi(ch);
  return {operator_norm(residual), min_eigenvalue(j.matrix)};
}

ChoiMatrix choi(const KrausChannel& ch) {
  const Index din = ch.in_dim();
  const Index dout = ch.out_dim();
  Matrix j = Matrix::Zero(din * dout, din * dout);
  // Lambda(E_ij) = sum_k (col_i K_k)(col_j K_k)^dag.
  for (const Matrix& k : ch.kraus())
    for (Index i = 0; i < din; ++i)
      for (Index jj = 0; jj < din; ++jj)
        j.block(i * dout, jj * dout, dout, dout) += k.col(i) * k.col(jj).adjoint();
  return {din, dout, std::move(j)};
}

Matrix apply_choi_to_operator(const ChoiMatrix& j, const Matrix& x) {
  if (x.rows() != j.in_dim || x.cols() != j.in_dim)
    throw std::invalid_argument("apply_choi_to_operator: dimension mismatch");
  Matrix out = Matrix::Zero(j.out_dim, j.out_dim);
  for (Index i = 0; i < j.in_dim; ++i)
    for (Index jj = 0; jj < j.in_dim; ++jj)
      out += x(i, jj) * j.matrix.block(i * j.out_dim, jj * j.out_dim, j.out_dim, j.out_dim);
  return out;
}

KrausChannel kraus_from_choi(const ChoiMatrix& j, double eig_cutoff) {
  const HermitianEigen eig = eig_hermitian(j.matrix);
  if (eig.values.minCoeff() < kPsdFloor)
    throw std::invalid_argument("kraus_from_choi: Choi matrix is not PSD (non-CP map)");
  std::vector<Matrix> kraus;
  for (Index n = 0; n < eig.values.size(); ++n) {
    if (eig.values(n) < eig_cutoff) continue;
    const double scale = std::sqrt(eig.values(n));
    Matrix k(j.out_dim, j.in_dim);
    for (Index i = 0; i < j.in_dim; ++i)
      for (Index o = 0; o < j.out_dim; ++o)
        k(o, i) = scale * eig.vectors(i * j.out_dim + o, n);
    kraus.push_back(std::move(k));
  }
  return KrausChannel(j.in_dim, j.out_dim, std::move(kraus));
}

Dilation::Dilation(Index d_in, Index r, Index d_out, Matrix unitary, double tol)
    : dim_in(d_in), dim_aux(r), dim_out(d_out), v(std::move(unitary)) {
  if (dim_in < 1 || dim_aux < 1 || dim_out < 1)
    throw std::invalid_argument("Dilation: dimensions must be >= 1");
  if (v.rows() != total_dim() || v.cols() != total_dim())
    throw std::invalid_argument("Dilation: unitary size must be D*r*d");
  if (!is_unitary(v, tol)) throw std::invalid_argument("Dilation: matrix is not unitary");
}

Matrix Dilation::input_columns() const {
  Matrix cols(total_dim(), dim_in);
  for (Index k = 0; k < dim_in; ++k) cols.col(k) = v.col(k * dim_aux * dim_out);
  return cols;
}

Dilation dilation_from_kraus(const KrausChannel& ch) {
  const Index d_in = ch.in_dim();
  const Index d_out = ch.out_dim();
  const Index n_ops = static_cast<Index>(ch.kraus().size());
  const Index r = (n_ops + d_in - 1) / d_in;
  const Index total = d_in * r * d_out;

  // Input columns: w_k[(i*r + j)*d + l] = K_{i*r+j}[l, k], zero-padded list.
  Matrix cols = Matrix::Zero(total, d_in);
  for (Index m = 0; m < n_ops; ++m) {
    const Matrix& k = ch.kraus()[static_cast<size_t>(m)];
    for (Index in = 0; in < d_in; ++in)
      for (Index l = 0; l < d_out; ++l) cols(m * d_out + l, in) = k(l, in);
  }

  std::vector<Index> positions(static_cast<size_t>(d_in));
  for (Index k = 0; k < d_in; ++k) positions[static_cast<size_t>(k)] = k * r * d_out;

  Matrix v;
  try {
    v = complete_to_unitary(cols, total, positions);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(
        "dilation_from_kraus: channel is not trace preserving (input columns not orthonormal)");
  }
  return Dilation(d_in, r, d_out, std::move(v));
}

Matrix apply_dilation_to_operator(const Dilation& dil, const Matrix& x) {
  if (x.rows() != dil.dim_in || x.cols() != dil.dim_in)
    throw std::invalid_argument("apply_dilation_to_operator: dimension mismatch");
  const Matrix cols = dil.input_columns();
  return partial_trace(cols * x * cols.adjoint(), dil.traced_split(), Side::A);
}

DensityMatrix apply_dilation(const Dilation& dil, const DensityMatrix& psi) {
  return DensityMatrix(apply_dilation_to_operator(dil, psi.matrix()));
}

bool kraus_equivalent(const KrausChannel& a, const KrausChannel& b, double tol) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) return false;
  return approx_equal(choi(a).matrix, choi(b).matrix, tol);
}

KrausChannel blurred_detector_channel() {
  const double s = 1.0 / std::sqrt(3.0);
  Matrix k1 = Matrix::Zero(2, 4), k2 = Matrix::Zero(2, 4), k3 = Matrix::Zero(2, 4),
         k4 = Matrix::Zero(2, 4);
  k1(0, 0) = 1.0;
  k1(1, 1) = s;
  k1(1, 2) = s;
  k1(1, 3) = s;
  k2(1, 1) = s;
  k2(1, 3) = -s;
  k3(1, 1) = s;
  k3(1, 2) = -s;
  k4(1, 2) = s;
  k4(1, 3) = -s;
  return KrausChannel(4, 2, {k1, k2, k3, k4});
}

const std::vector<DetectorTableEntry>& blurred_detector_golden_actions() {
  static const std::vector<DetectorTableEntry> table = [] {
    const double s = 1.0 / std::sqrt(3.0);
    auto unit2 = [](Index a, Index b) {
      Matrix m = Matrix::Zero(2, 2);
      m(a, b) = 1.0;
      return m;
    };
    std::vector<DetectorTableEntry> t;
    // Basis order |00>,|01>,|10>,|11|; the detector merges the last three.
    t.push_back({0, 0, unit2(0, 0)});
    t.push_back({1, 1, unit2(1, 1)});
    t.push_back({2, 2, unit2(1, 1)});
    t.push_back({3, 3, unit2(1, 1)});
    for (Index e : {Index(1), Index(2), Index(3)}) {
      t.push_back({0, e, s * unit2(0, 1)});
      t.push_back({e, 0, s * unit2(1, 0)});
    }
    // No coherence survives inside the merged subspace.
    t.push_back({1, 2, Matrix::Zero(2, 2)});
    t.push_back({2, 1, Matrix::Zero(2, 2)});
    t.push_back({1, 3, Matrix::Zero(2, 2)});
    t.push_back({3, 1, Matrix::Zero(2, 2)});
    t.push_back({2, 3, Matrix::Zero(2, 2)});
    t.push_back({3, 2, Matrix::Zero(2, 2)});
    return t;
  }();
  return table;
}

double blurred_detector_table_residual(const KrausChannel& ch) {
  if (ch.in_dim() != 4 || ch.out_dim() != 2)
    throw std::invalid_argument("blurred_detector_table_residual: channel must be 4 -> 2");
  double worst = 0.0;
  for (const DetectorTableEntry& e : blurred_detector_golden_actions()) {
    Matrix unit = Matrix::Zero(4, 4);
    unit(e.i, e.j) = 1.0;
    worst = std::max(worst, max_abs_diff(ch.apply_to_operator(unit), e.expected));
  }
  return worst;
}

nlohmann::json channel_to_json(const KrausChannel& ch) {
  nlohmann::json out;
  out["in_dim"] = ch.in_dim();
  out["out_dim"] = ch.out_dim();
  nlohmann::json ops = nlohmann::json::array();
  for (const Matrix& k : ch.kraus()) {
    nlohmann::json entries = nlohmann::json::array();
    for (Index r = 0; r < k.rows(); ++r)
      for (Index c = 0; c < k.cols(); ++c)
        entries.push_back({k(r, c).real(), k(r, c).imag()});
    ops.push_back(std::move(entries));
  }
  out["kraus"] = std::move(ops);
  return out;
}

KrausChannel channel_from_json(const nlohmann::json& j, bool strict) {
  if (!j.is_object() || !j.contains("in_dim") || !j.contains("out_dim") || !j.contains("kraus"))
    throw std::invalid_argument("channel_from_json: expected {in_dim, out_dim, kraus}");
  const Index din = j.at("in_dim").get<Index>();
  const Index dout = j.at("out_dim").get<Index>();
  if (din < 1 || dout < 1)
    throw std::invalid_argument("channel_from_json: dimensions must be >= 1");
  std::vector<Matrix> kraus;
  for (const auto& op : j.at("kraus")) {
    if (static_cast<Index>(op.size()) != din * dout)
      throw std::invalid_argument("channel_from_json: operator entry count must be in_dim*out_dim");
    Matrix k(dout, din);
    Index idx = 0;
    for (const auto& entry : op) {
      if (!entry.is_array() || entry.size() != 2)
        throw std::invalid_argument("channel_from_json: entries must be [re, im] pairs");
      k(idx / din, idx % din) = Complex(entry[0].get<double>(), entry[1].get<double>());
      ++idx;
    }
    kraus.push_back(std::move(k));
  }
  if (strict) return KrausChannel(din, dout, std::move(kraus));
  return KrausChannel::unchecked(din, dout, std::move(kraus));
}

}  // namespace cgdyn
