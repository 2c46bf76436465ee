#include "pptmc/operators.hpp"

#include <algorithm>
#include <cmath>

namespace pptmc {

namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("operator needs at least one subsystem");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("subsystem dimension must be >= 1");
}

}  // namespace

int dims_product(const std::vector<int>& dims) {
  long long p = 1;
  for (int d : dims) {
    p *= d;
    if (p > (1 << 30)) throw std::invalid_argument("dims product overflow");
  }
  return static_cast<int>(p);
}

std::vector<int> decode_index(int flat, const std::vector<int>& dims) {
  std::vector<int> idx(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    idx[k] = flat % dims[k];
    flat /= dims[k];
  }
  return idx;
}

int encode_index(const std::vector<int>& idx, const std::vector<int>& dims) {
  int flat = 0;
  for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
  return flat;
}

HermitianOp::HermitianOp(std::vector<int> dims, const MatrixXcd& m) : dims_(std::move(dims)) {
  check_dims(dims_);
  const int side = dims_product(dims_);
  if (m.rows() != side || m.cols() != side)
    throw std::invalid_argument("matrix side does not match dims product");
  double scale = 1.0 + m.cwiseAbs().maxCoeff();
  double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOp HermitianOp::zero(std::vector<int> dims) {
  check_dims(dims);
  int side = dims_product(dims);
  return HermitianOp(std::move(dims), MatrixXcd::Zero(side, side));
}

HermitianOp HermitianOp::identity(std::vector<int> dims) {
  check_dims(dims);
  int side = dims_product(dims);
  return HermitianOp(std::move(dims), MatrixXcd::Identity(side, side));
}

HermitianOp HermitianOp::with_dims(std::vector<int> new_dims) const {
  check_dims(new_dims);
  if (dims_product(new_dims) != side())
    throw std::invalid_argument("with_dims: dims product must equal matrix side");
  HermitianOp r;
  r.dims_ = std::move(new_dims);
  r.m_ = m_;
  return r;
}

HermitianOp HermitianOp::operator+(const HermitianOp& o) const {
  if (dims_ != o.dims_) throw std::invalid_argument("dims mismatch in operator+");
  HermitianOp r;
  r.dims_ = dims_;
  r.m_ = m_ + o.m_;
  return r;
}

HermitianOp HermitianOp::operator-(const HermitianOp& o) const {
  if (dims_ != o.dims_) throw std::invalid_argument("dims mismatch in operator-");
  HermitianOp r;
  r.dims_ = dims_;
  r.m_ = m_ - o.m_;
  return r;
}

HermitianOp HermitianOp::operator*(double s) const {
  HermitianOp r;
  r.dims_ = dims_;
  r.m_ = s * m_;
  return r;
}

HermitianOp tensor(const HermitianOp& a, const HermitianOp& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const int sa = a.side(), sb = b.side();
  MatrixXcd m(sa * sb, sa * sb);
  for (int i = 0; i < sa; ++i)
    for (int j = 0; j < sa; ++j) m.block(i * sb, j * sb, sb, sb) = a.mat()(i, j) * b.mat();
  HermitianOp r;
  r = HermitianOp(std::move(dims), m);
  return r;
}

HermitianOp partial_trace(const HermitianOp& o, const std::vector<int>& keep) {
  const auto& dims = o.dims();
  const int ns = o.num_subsystems();
  std::vector<bool> kept(ns, false);
  int prev = -1;
  for (int k : keep) {
    if (k < 0 || k >= ns) throw std::invalid_argument("partial_trace: keep index out of range");
    if (k <= prev) throw std::invalid_argument("partial_trace: keep must be strictly ascending");
    kept[k] = true;
    prev = k;
  }
  std::vector<int> out_dims;
  for (int k : keep) out_dims.push_back(dims[k]);
  if (out_dims.empty()) out_dims.push_back(1);
  const int out_side = dims_product(out_dims);
  MatrixXcd out = MatrixXcd::Zero(out_side, out_side);
  const int side = o.side();
  for (int i = 0; i < side; ++i) {
    auto ci = decode_index(i, dims);
    for (int j = 0; j < side; ++j) {
      auto cj = decode_index(j, dims);
      bool diag = true;
      for (int k = 0; k < ns; ++k)
        if (!kept[k] && ci[k] != cj[k]) {
          diag = false;
          break;
        }
      if (!diag) continue;
      std::vector<int> oi, oj;
      for (int k : keep) {
        oi.push_back(ci[k]);
        oj.push_back(cj[k]);
      }
      out(oi.empty() ? 0 : encode_index(oi, out_dims), oj.empty() ? 0 : encode_index(oj, out_dims)) +=
          o.mat()(i, j);
    }
  }
  return HermitianOp(out_dims, out);
}

HermitianOp partial_transpose(const HermitianOp& o, const std::vector<int>& subs) {
  const auto& dims = o.dims();
  const int ns = o.num_subsystems();
  std::vector<bool> flip(ns, false);
  for (int s : subs) {
    if (s < 0 || s >= ns) throw std::invalid_argument("partial_transpose: index out of range");
    flip[s] = true;
  }
  const int side = o.side();
  MatrixXcd out(side, side);
  for (int i = 0; i < side; ++i) {
    auto ci = decode_index(i, dims);
    for (int j = 0; j < side; ++j) {
      auto cj = decode_index(j, dims);
      std::vector<int> ri = ci, rj = cj;
      for (int k = 0; k < ns; ++k)
        if (flip[k]) std::swap(ri[k], rj[k]);
      out(encode_index(ri, dims), encode_index(rj, dims)) = o.mat()(i, j);
    }
  }
  return HermitianOp(dims, out);
}

HermitianOp partial_transpose(const HermitianOp& o, int sub) {
  return partial_transpose(o, std::vector<int>{sub});
}

HermitianOp permute_subsystems(const HermitianOp& o, const std::vector<int>& perm) {
  const auto& dims = o.dims();
  const int ns = o.num_subsystems();
  if (static_cast<int>(perm.size()) != ns)
    throw std::invalid_argument("permute_subsystems: perm size mismatch");
  std::vector<bool> seen(ns, false);
  std::vector<int> new_dims(ns);
  for (int k = 0; k < ns; ++k) {
    if (perm[k] < 0 || perm[k] >= ns || seen[perm[k]])
      throw std::invalid_argument("permute_subsystems: not a permutation");
    seen[perm[k]] = true;
    new_dims[k] = dims[perm[k]];
  }
  const int side = o.side();
  MatrixXcd out(side, side);
  std::vector<int> ni(ns), nj(ns);
  for (int i = 0; i < side; ++i) {
    auto ci = decode_index(i, dims);
    for (int k = 0; k < ns; ++k) ni[k] = ci[perm[k]];
    const int ei = encode_index(ni, new_dims);
    for (int j = 0; j < side; ++j) {
      auto cj = decode_index(j, dims);
      for (int k = 0; k < ns; ++k) nj[k] = cj[perm[k]];
      out(ei, encode_index(nj, new_dims)) = o.mat()(i, j);
    }
  }
  return HermitianOp(new_dims, out);
}

HermitianOp transpose(const HermitianOp& o) {
  return HermitianOp(o.dims(), o.mat().transpose().eval());
}

MatrixXd real_embedding(const MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  MatrixXd e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = m.real();
  e.topRightCorner(n, n) = -m.imag();
  e.bottomLeftCorner(n, n) = m.imag();
  e.bottomRightCorner(n, n) = m.real();
  return e;
}

MatrixXcd from_real_embedding(const MatrixXd& e) {
  const int n = static_cast<int>(e.rows()) / 2;
  MatrixXcd m(n, n);
  m.real() = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  m.imag() = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  return m;
}

SpectralReport spectral(const HermitianOp& o) {
  const int n = o.side();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(real_embedding(o.mat()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("eigensolver failed to converge");
  const VectorXd& all = es.eigenvalues();  // ascending, each value doubled
  SpectralReport r;
  r.eigenvalues.resize(n);
  for (int k = 0; k < n; ++k) r.eigenvalues[k] = all[2 * k];
  r.min_eigenvalue = all[0];
  r.max_abs_eigenvalue = std::max(std::abs(all[0]), std::abs(all[2 * n - 1]));
  r.trace = all.sum() / 2.0;
  r.trace_norm = all.cwiseAbs().sum() / 2.0;
  return r;
}

bool is_psd(const HermitianOp& o, double tol) {
  SpectralReport r = spectral(o);
  return r.min_eigenvalue >= -tol * (1.0 + r.max_abs_eigenvalue);
}

double trace_of(const HermitianOp& o) { return o.mat().trace().real(); }

double trace_inner(const HermitianOp& a, const HermitianOp& b) {
  if (a.side() != b.side()) throw std::invalid_argument("trace_inner: side mismatch");
  return a.mat().cwiseProduct(b.mat().conjugate()).sum().real();
}

double max_abs(const HermitianOp& o) { return o.mat().cwiseAbs().maxCoeff(); }

double max_abs_diff(const HermitianOp& a, const HermitianOp& b) {
  if (a.side() != b.side()) throw std::invalid_argument("max_abs_diff: side mismatch");
  return (a.mat() - b.mat()).cwiseAbs().maxCoeff();
}

HermitianOp outer(const VectorXcd& v, std::vector<int> dims) {
  return HermitianOp(std::move(dims), (v * v.adjoint()).eval());
}

HermitianOp omega(int d) {
  if (d < 2) throw std::invalid_argument("omega: dimension must be >= 2");
  MatrixXcd m = MatrixXcd::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) m(k * d + k, l * d + l) = 1.0;
  return HermitianOp({d, d}, m);
}

HermitianOp max_entangled_state(int d) { return omega(d) * (1.0 / d); }

HermitianOp maximally_mixed(int d) {
  return HermitianOp::identity({d}) * (1.0 / d);
}

namespace {
HermitianOp bell(int a, int b) {
  // |Phi_ab> = (|0,b> + (-1)^a |1,1-b>)/sqrt(2)
  VectorXcd v = VectorXcd::Zero(4);
  v[b] = 1.0 / std::sqrt(2.0);
  v[2 + (1 - b)] = (a ? -1.0 : 1.0) / std::sqrt(2.0);
  return outer(v, {2, 2});
}
}  // namespace

HermitianOp bell_phi_plus() { return bell(0, 0); }
HermitianOp bell_phi_minus() { return bell(1, 0); }
HermitianOp bell_psi_plus() { return bell(0, 1); }
HermitianOp bell_psi_minus() { return bell(1, 1); }

HermitianOp swap_operator(int d) {
  MatrixXcd m = MatrixXcd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i * d + j, j * d + i) = 1.0;
  return HermitianOp({d, d}, m);
}

MatrixXcd pauli(int k) {
  MatrixXcd m(2, 2);
  const cxd I(0.0, 1.0);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: index must be 0..3");
  }
  return m;
}

}  // namespace pptmc
