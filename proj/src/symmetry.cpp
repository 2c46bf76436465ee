#include "pptmc/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/SVD>

#include "pptmc/hypothesis.hpp"

namespace pptmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_unitary(const MatrixXcd& u, double tol) {
  if (u.rows() != u.cols() || u.rows() < 1) return false;
  return (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

HermitianOp average(const HermitianOp& o, const GroupRep& g, bool alternate) {
  g.validate();
  const int side = g.dim_a() * g.dim_b();
  if (o.side() != side) {
    throw std::invalid_argument("twirl: operator side does not match the group");
  }
  MatrixXcd acc = MatrixXcd::Zero(side, side);
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    const auto& e = g.elements[i];
    MatrixXcd w = alternate ? kron(e.u, e.v).adjoint()
                            : kron(e.u.transpose(), e.v.adjoint());
    acc += g.weight(i) * (w * o.mat() * w.adjoint());
  }
  return HermitianOp(o.dims(), (acc + acc.adjoint()) / 2.0);
}

// Canonical key of a unitary modulo global phase: rotate the first entry of
// magnitude >= 1/4 to the positive real axis, then round to a 1e-6 grid.
std::string phase_key(const MatrixXcd& u) {
  MatrixXcd m = u;
  for (int i = 0; i < m.size(); ++i) {
    std::complex<double> z = m(i / m.cols(), i % m.cols());
    if (std::abs(z) > 0.25) {
      m *= std::conj(z) / std::abs(z);
      break;
    }
  }
  std::string key;
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.5f,%.5f;", m(i, j).real() + 0.0,
                    m(i, j).imag() + 0.0);
      key += buf;
    }
  }
  return key;
}

std::vector<MatrixXcd> clifford_unitaries() {
  const double s = 1.0 / std::sqrt(2.0);
  MatrixXcd h(2, 2), sg(2, 2);
  h << s, s, s, -s;
  sg << 1.0, 0.0, 0.0, std::complex<double>(0.0, 1.0);
  std::vector<MatrixXcd> gens{h, sg};
  std::vector<MatrixXcd> out;
  std::map<std::string, bool> seen;
  std::deque<MatrixXcd> queue{MatrixXcd::Identity(2, 2)};
  seen[phase_key(queue.front())] = true;
  while (!queue.empty()) {
    MatrixXcd cur = queue.front();
    queue.pop_front();
    out.push_back(cur);
    for (const auto& gen : gens) {
      MatrixXcd nxt = gen * cur;
      std::string key = phase_key(nxt);
      if (!seen[key]) {
        seen[key] = true;
        queue.push_back(nxt);
      }
    }
  }
  if (out.size() != 24) {
    throw numerical_error("clifford closure produced an unexpected element count");
  }
  return out;
}

}  // namespace

int GroupRep::dim_a() const {
  return elements.empty() ? 0 : static_cast<int>(elements.front().u.rows());
}

int GroupRep::dim_b() const {
  return elements.empty() ? 0 : static_cast<int>(elements.front().v.rows());
}

double GroupRep::weight(std::size_t i) const {
  if (weights.empty()) return 1.0 / static_cast<double>(elements.size());
  return weights[i];
}

void GroupRep::validate() const {
  if (elements.empty()) {
    throw std::invalid_argument("group: needs at least one element");
  }
  if (!weights.empty()) {
    if (weights.size() != elements.size()) {
      throw std::invalid_argument("group: weight count does not match elements");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("group: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("group: weights must sum to 1");
    }
  }
  for (const auto& e : elements) {
    if (static_cast<int>(e.u.rows()) != dim_a() ||
        static_cast<int>(e.v.rows()) != dim_b() || !is_unitary(e.u, 1e-10) ||
        !is_unitary(e.v, 1e-10)) {
      throw std::invalid_argument("group: elements must be unitaries of equal dims");
    }
  }
}

HermitianOp twirl(const HermitianOp& o, const GroupRep& g) {
  return average(o, g, false);
}

HermitianOp twirl_alternate(const HermitianOp& o, const GroupRep& g) {
  return average(o, g, true);
}

bool is_covariant(const Channel& ch, const GroupRep& g, double tol) {
  g.validate();
  if (g.dim_a() != ch.in_dim || g.dim_b() != ch.out_dim) {
    throw std::invalid_argument("is_covariant: group dims do not match the channel");
  }
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    const auto& e = g.elements[i];
    MatrixXcd w = kron(e.u.transpose(), e.v.adjoint());
    if ((w * ch.choi.mat() * w.adjoint() - ch.choi.mat()).cwiseAbs().maxCoeff() >
        tol) {
      return false;
    }
  }
  return true;
}

bool check_prop3(const HermitianOp& phi, const HermitianOp& lambda,
                 const HermitianOp& m_op, const Channel& ch, const GroupRep& g,
                 double eps, double tol) {
  if (!is_covariant(ch, g, 1e-8)) {
    throw std::invalid_argument("check_prop3: channel is not covariant for the group");
  }
  const int da = ch.in_dim, db = ch.out_dim;
  if (phi.side() != da || lambda.side() != da * db || m_op.side() != da * db) {
    throw std::invalid_argument("check_prop3: operand dims do not match the channel");
  }
  auto feasible = [&](const HermitianOp& f, const HermitianOp& l,
                      const HermitianOp& m) {
    HermitianOp cap = tensor(transpose(f), HermitianOp::identity({db})) - l;
    HermitianOp marg_gap =
        HermitianOp::identity({da}) - partial_trace(m, {0});
    return is_psd(f, tol) && trace_of(f) <= 1.0 + tol && is_psd(l, tol) &&
           is_psd(cap, tol) &&
           trace_inner(l, ch.choi) >= 1.0 - eps - tol && is_psd(m, tol) &&
           is_psd(partial_transpose(m, 0), tol) && is_psd(marg_gap, tol);
  };
  if (!feasible(phi, lambda, m_op)) {
    throw std::invalid_argument("check_prop3: inputs rejected as infeasible before averaging");
  }
  GroupRep ga;
  ga.weights = g.weights;
  for (const auto& e : g.elements) {
    ga.elements.push_back({e.u, MatrixXcd::Identity(1, 1)});
  }
  HermitianOp phi_bar = twirl(phi, ga);
  HermitianOp lambda_bar = twirl(lambda, g);
  HermitianOp m_bar = twirl(m_op, g);
  return feasible(phi_bar, lambda_bar, m_bar) &&
         std::abs(trace_inner(lambda_bar, ch.choi) -
                  trace_inner(lambda, ch.choi)) <= tol;
}

InvariantBasis invariant_basis(const GroupRep& g, const std::vector<int>& dims) {
  g.validate();
  const int side = dims_product(dims);
  if (side != g.dim_a() * g.dim_b()) {
    throw std::invalid_argument("invariant_basis: dims do not match the group");
  }
  const int dim = csvec_dim(side);
  MatrixXd t(dim, dim);
  for (int v = 0; v < dim; ++v) {
    VectorXd e = VectorXd::Zero(dim);
    e(v) = 1.0;
    HermitianOp basis_op(dims, csmat(e, side));
    t.col(v) = csvec(twirl(basis_op, g).mat());
  }
  Eigen::BDCSVD<MatrixXd> svd(t, Eigen::ComputeThinU);
  InvariantBasis out;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) <= 1e-9) break;
    out.ops.push_back(HermitianOp(dims, csmat(svd.matrixU().col(k), side)));
  }
  const int r = static_cast<int>(out.ops.size());
  out.gram = MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      out.gram(i, j) = trace_inner(out.ops[i], out.ops[j]);
    }
  }
  return out;
}

GroupRep pauli_group() {
  GroupRep g;
  for (int k = 0; k < 4; ++k) g.elements.push_back({pauli(k), pauli(k)});
  return g;
}

GroupRep pauli_group_input() {
  GroupRep g;
  for (int k = 0; k < 4; ++k) {
    g.elements.push_back({pauli(k), MatrixXcd::Identity(1, 1)});
  }
  return g;
}

GroupRep clifford_group() {
  GroupRep g;
  for (const auto& c : clifford_unitaries()) g.elements.push_back({c, c});
  return g;
}

GroupRep erasure_group() {
  GroupRep g;
  for (const auto& c : clifford_unitaries()) {
    MatrixXcd v = MatrixXcd::Identity(3, 3);
    v.topLeftCorner(2, 2) = c;
    g.elements.push_back({c, v});
  }
  return g;
}

GroupRep trivial_group(int dim_a, int dim_b) {
  GroupRep g;
  g.elements.push_back(
      {MatrixXcd::Identity(dim_a, dim_a), MatrixXcd::Identity(dim_b, dim_b)});
  return g;
}

BoundResult reduced_bound(const ChannelSpec& spec, int n, double eps) {
  if (n < 1) throw std::invalid_argument("reduced_bound: need n >= 1");
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("reduced_bound: need eps in [0, 1]");
  }
  const double ln2 = std::log(2.0);
  BoundResult res;
  res.channel = to_string(spec.kind);
  res.n = n;
  res.p = spec.kind == ChannelKind::Identity ? 0.0 : spec.p;
  res.eps = eps;
  res.method = "reduced";
  double value = 0.0, log_value = -kInf;
  switch (spec.kind) {
    case ChannelKind::Identity:
    case ChannelKind::Dephasing:
    case ChannelKind::Depolarizing: {
      double p = res.p;
      if (!(p >= 0.0 && p <= 0.5)) {
        throw std::invalid_argument("reduced_bound: need p in [0, 1/2] for this channel");
      }
      double alpha = 1.0 - eps;
      if (p == 0.0) {
        // single likelihood class at ratio 2^n
        value = alpha <= 0.0 ? 0.0 : alpha * std::exp(-n * ln2);
        log_value = alpha <= 0.0 ? -kInf : std::log(alpha) - n * ln2;
      } else {
        NPTest t = bsc_beta(n, p, alpha);
        value = t.beta;
        log_value = t.log_beta;
      }
      break;
    }
    case ChannelKind::Erasure: {
      ErasureBound eb = bec_bound(n, spec.p, eps);
      value = eb.value;
      log_value = eb.log_value;
      break;
    }
    case ChannelKind::Custom:
      throw std::invalid_argument("reduced_bound: no reduction for custom channels");
  }
  res.value = value;
  res.min_value = value;
  res.max_value = value;
  res.log2_M_upper = log_value == -kInf ? kInf : -log_value / ln2;
  res.degenerate = value == 0.0;
  return res;
}

}  // namespace pptmc
