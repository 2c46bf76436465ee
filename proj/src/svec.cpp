#include "pptmc/svec.hpp"

#include <cmath>
#include <unordered_map>

namespace pptmc {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct CEntry {
  int row, col;
  cxd val;
};

// Entries of the csvec basis element with coordinate u (at most two).
std::vector<CEntry> basis_entries(int u, int n) {
  const int npairs = n * (n - 1) / 2;
  if (u < n) return {{u, u, cxd(1.0, 0.0)}};
  int q = u - n;
  bool is_im = false;
  if (q >= npairs) {
    q -= npairs;
    is_im = true;
  }
  // invert pair_index
  int i = 0;
  while (q >= n - 1 - i) {
    q -= n - 1 - i;
    ++i;
  }
  int j = i + 1 + q;
  if (is_im) return {{i, j, cxd(0.0, kInvSqrt2)}, {j, i, cxd(0.0, -kInvSqrt2)}};
  return {{i, j, cxd(kInvSqrt2, 0.0)}, {j, i, cxd(kInvSqrt2, 0.0)}};
}
}  // namespace

int csvec_dim(int n) { return n * n; }

int pair_index(int i, int j, int n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

VectorXd csvec(const MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  VectorXd v(csvec_dim(n));
  const int npairs = n * (n - 1) / 2;
  for (int k = 0; k < n; ++k) v[k] = a(k, k).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int q = pair_index(i, j, n);
      v[n + q] = kSqrt2 * a(i, j).real();
      v[n + npairs + q] = kSqrt2 * a(i, j).imag();
    }
  return v;
}

MatrixXcd csmat(const VectorXd& v, int n) {
  MatrixXcd a = MatrixXcd::Zero(n, n);
  const int npairs = n * (n - 1) / 2;
  for (int k = 0; k < n; ++k) a(k, k) = v[k];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int q = pair_index(i, j, n);
      cxd z(v[n + q] * kInvSqrt2, v[n + npairs + q] * kInvSqrt2);
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  return a;
}

int rsvec_dim(int n) { return n * (n + 1) / 2; }

VectorXd rsvec(const MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  VectorXd v(rsvec_dim(n));
  for (int k = 0; k < n; ++k) v[k] = a(k, k);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v[n + pair_index(i, j, n)] = kSqrt2 * a(i, j);
  return v;
}

MatrixXd rsmat(const VectorXd& v, int n) {
  MatrixXd a(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = v[k];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double x = v[n + pair_index(i, j, n)] * kInvSqrt2;
      a(i, j) = x;
      a(j, i) = x;
    }
  return a;
}

void LinMap::add_entry(int row, int col, double val) {
  if (val == 0.0) return;
  entries_.push_back({row, col, val});
}

VectorXd LinMap::apply(const VectorXd& x) const {
  if (x.size() != csvec_dim(in_side_)) {
    throw std::invalid_argument("LinMap::apply: coordinate vector has size " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(csvec_dim(in_side_)));
  }
  VectorXd y = VectorXd::Zero(csvec_dim(out_side_));
  for (const auto& e : entries_) y[e.row] += e.val * x[e.col];
  return y;
}

MatrixXcd LinMap::apply_op(const MatrixXcd& x) const {
  return csmat(apply(csvec(x)), out_side_);
}

LinMap LinMap::adjoint() const {
  LinMap r(out_side_, in_side_);
  r.entries_.reserve(entries_.size());
  for (const auto& e : entries_) r.entries_.push_back({e.col, e.row, e.val});
  return r;
}

LinMap LinMap::scaled(double s) const {
  LinMap r(*this);
  for (auto& e : r.entries_) e.val *= s;
  return r;
}

MatrixXd LinMap::to_matrix() const {
  MatrixXd m = MatrixXd::Zero(csvec_dim(out_side_), csvec_dim(in_side_));
  for (const auto& e : entries_) m(e.row, e.col) += e.val;
  return m;
}

namespace {

// Build a LinMap from an entry-level relocation rule: the rule receives one
// matrix entry of the input and emits the entries it contributes to the
// (Hermitian) image. Only emitted entries with row <= col are collected; the
// lower triangle is redundant by Hermiticity.
LinMap build_from_rule(int in_side, int out_side,
                       const std::function<std::vector<CEntry>(const CEntry&)>& rule) {
  LinMap m(in_side, out_side);
  const int n_out = out_side;
  const int npairs_out = n_out * (n_out - 1) / 2;
  std::unordered_map<long long, double> acc;
  for (int u = 0; u < csvec_dim(in_side); ++u) {
    acc.clear();
    for (const auto& src : basis_entries(u, in_side)) {
      for (const auto& out : rule(src)) {
        if (out.row > out.col) continue;
        if (out.row == out.col) {
          acc[out.row] += out.val.real();
        } else {
          const int q = pair_index(out.row, out.col, n_out);
          acc[n_out + q] += kSqrt2 * out.val.real();
          acc[n_out + npairs_out + q] += kSqrt2 * out.val.imag();
        }
      }
    }
    for (const auto& [coord, val] : acc)
      if (std::abs(val) > 1e-15) m.add_entry(static_cast<int>(coord), u, val);
  }
  return m;
}

}  // namespace

LinMap LinMap::identity(int n) {
  return build_from_rule(n, n, [](const CEntry& e) { return std::vector<CEntry>{e}; });
}

LinMap LinMap::transpose_map(int n) {
  return build_from_rule(n, n, [](const CEntry& e) {
    return std::vector<CEntry>{{e.col, e.row, e.val}};
  });
}

LinMap LinMap::partial_transpose_map(const std::vector<int>& dims, int sub) {
  const int n = dims_product(dims);
  return build_from_rule(n, n, [&dims, sub](const CEntry& e) {
    auto ri = decode_index(e.row, dims);
    auto ci = decode_index(e.col, dims);
    std::swap(ri[sub], ci[sub]);
    return std::vector<CEntry>{{encode_index(ri, dims), encode_index(ci, dims), e.val}};
  });
}

LinMap LinMap::tensor_id_right(int n, int d) {
  return build_from_rule(n, n * d, [d](const CEntry& e) {
    std::vector<CEntry> out;
    for (int k = 0; k < d; ++k) out.push_back({e.row * d + k, e.col * d + k, e.val});
    return out;
  });
}

LinMap LinMap::tensor_id_left(int d, int n) {
  return build_from_rule(n, d * n, [d, n](const CEntry& e) {
    std::vector<CEntry> out;
    for (int k = 0; k < d; ++k) out.push_back({k * n + e.row, k * n + e.col, e.val});
    return out;
  });
}

LinMap LinMap::ptrace_map(const std::vector<int>& dims, const std::vector<int>& keep) {
  const int n = dims_product(dims);
  std::vector<int> out_dims;
  for (int k : keep) out_dims.push_back(dims[k]);
  if (out_dims.empty()) out_dims.push_back(1);
  const int ns = static_cast<int>(dims.size());
  std::vector<bool> kept(ns, false);
  for (int k : keep) kept[k] = true;
  const int n_out = dims_product(out_dims);
  return build_from_rule(n, n_out, [&dims, &out_dims, &kept, ns, keep](const CEntry& e) {
    auto ri = decode_index(e.row, dims);
    auto ci = decode_index(e.col, dims);
    for (int k = 0; k < ns; ++k)
      if (!kept[k] && ri[k] != ci[k]) return std::vector<CEntry>{};
    std::vector<int> ro, co;
    for (int k : keep) {
      ro.push_back(ri[k]);
      co.push_back(ci[k]);
    }
    int r = ro.empty() ? 0 : encode_index(ro, out_dims);
    int c = co.empty() ? 0 : encode_index(co, out_dims);
    return std::vector<CEntry>{{r, c, e.val}};
  });
}

LinMap LinMap::inner_map(const MatrixXcd& f) {
  const int n = static_cast<int>(f.rows());
  LinMap m(n, 1);
  VectorXd row = csvec(f);
  for (int u = 0; u < row.size(); ++u)
    if (std::abs(row[u]) > 1e-15) m.add_entry(0, u, row[u]);
  return m;
}

LinMap LinMap::times_op_map(const MatrixXcd& f) {
  return inner_map(f).adjoint();
}

LinMap compose(const LinMap& a, const LinMap& b) {
  if (b.out_side_ != a.in_side_) throw std::invalid_argument("compose: side mismatch");
  std::unordered_map<int, std::vector<const MapEntry*>> b_by_row;
  for (const auto& e : b.entries_) b_by_row[e.row].push_back(&e);
  std::unordered_map<long long, double> acc;
  for (const auto& ea : a.entries_) {
    auto it = b_by_row.find(ea.col);
    if (it == b_by_row.end()) continue;
    for (const MapEntry* eb : it->second)
      acc[static_cast<long long>(ea.row) * csvec_dim(b.in_side_) + eb->col] += ea.val * eb->val;
  }
  LinMap r(b.in_side_, a.out_side_);
  for (const auto& [key, val] : acc) {
    if (std::abs(val) <= 1e-15) continue;
    r.add_entry(static_cast<int>(key / csvec_dim(b.in_side_)),
                static_cast<int>(key % csvec_dim(b.in_side_)), val);
  }
  return r;
}

LinMap add(const LinMap& a, const LinMap& b) {
  if (a.in_side_ != b.in_side_ || a.out_side_ != b.out_side_)
    throw std::invalid_argument("add: side mismatch");
  LinMap r(a.in_side_, a.out_side_);
  r.entries_ = a.entries_;
  r.entries_.insert(r.entries_.end(), b.entries_.begin(), b.entries_.end());
  return r;
}

}  // namespace pptmc
