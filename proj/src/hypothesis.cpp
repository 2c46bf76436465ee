#include "pptmc/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pptmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier compensated accumulator.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
      c += (s - t) + v;
    } else {
      c += (v - t) + s;
    }
    s = t;
  }
  double value() const { return s + c; }
};

double logsumexp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (m == -kInf) return -kInf;
  KahanSum acc;
  for (double t : terms) {
    if (t != -kInf) acc.add(std::exp(t - m));
  }
  return m + std::log(acc.value());
}

// k * log(v) with the convention 0 * log(0) = 0.
double xlog(int k, double v) {
  if (k == 0) return 0.0;
  return k * std::log(v);
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
}

NPTest empty_test() {
  NPTest t;
  t.beta = 0.0;
  t.log_beta = -kInf;
  t.achieved_alpha = 0.0;
  t.threshold = kInf;
  t.tie_gamma = 0.0;
  return t;
}

}  // namespace

double log_binom(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("log_binom: need 0 <= k <= n");
  }
  k = std::min(k, n - k);
  if (n <= 60) {
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
      c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return std::log(static_cast<double>(c));
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

NPTest beta_classical(const std::vector<double>& p, const std::vector<double>& q,
                      double alpha) {
  if (p.size() != q.size() || p.empty()) {
    throw std::invalid_argument("beta_classical: p and q need equal nonzero size");
  }
  check_alpha(alpha);
  KahanSum psum, qsum;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12 || q[i] < -1e-12) {
      throw std::invalid_argument("beta_classical: negative probability entry");
    }
    psum.add(std::max(p[i], 0.0));
    qsum.add(std::max(q[i], 0.0));
  }
  if (std::abs(psum.value() - 1.0) > 1e-9 || std::abs(qsum.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("beta_classical: distributions must sum to 1");
  }
  if (alpha == 0.0) return empty_test();
  if (alpha == 1.0) {
    // full acceptance pins the test to the support of p; evaluating that
    // test directly avoids dividing the roundoff of a near-one cumulative
    // sum by the mass of the least likely outcome
    NPTest out;
    KahanSum qs;
    std::vector<double> log_terms;
    double thr = kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      double qi = std::max(q[i], 0.0);
      qs.add(qi);
      if (qi > 0.0) {
        log_terms.push_back(std::log(qi));
        thr = std::min(thr, std::log(p[i]) - std::log(qi));
      }
    }
    out.beta = qs.value();
    out.log_beta = logsumexp(log_terms);
    out.achieved_alpha = psum.value();
    out.threshold = thr;
    out.tie_gamma = 1.0;
    return out;
  }

  struct Item {
    double ratio, pm, qm;
    std::size_t idx;
  };
  std::vector<Item> items;
  items.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = std::max(p[i], 0.0), qi = std::max(q[i], 0.0);
    if (pi == 0.0 && qi == 0.0) continue;
    double r;
    if (qi == 0.0) {
      r = kInf;
    } else if (pi == 0.0) {
      r = -kInf;
    } else {
      r = std::log(pi) - std::log(qi);
    }
    items.push_back({r, pi, qi, i});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    return a.idx < b.idx;
  });

  // suffix_p[k] marks remaining p-mass at or beyond item k
  std::vector<char> suffix_p(items.size() + 1, 0);
  for (std::size_t k = items.size(); k-- > 0;) {
    suffix_p[k] = suffix_p[k + 1] || items[k].pm > 0.0;
  }
  NPTest out;
  KahanSum pacc, qacc;
  std::vector<double> log_terms;
  std::size_t i = 0;
  bool done = false;
  while (i < items.size() && !done) {
    std::size_t j = i;
    KahanSum pg, qg;
    while (j < items.size() && items[j].ratio == items[i].ratio) {
      pg.add(items[j].pm);
      qg.add(items[j].qm);
      ++j;
    }
    double pgroup = pg.value(), qgroup = qg.value();
    bool last_positive = !suffix_p[j];
    if (pacc.value() + pgroup >= alpha || (last_positive && alpha - (pacc.value() + pgroup) <= 2e-9)) {
      double gamma = pgroup > 0.0 ? (alpha - pacc.value()) / pgroup : 0.0;
      gamma = std::min(std::max(gamma, 0.0), 1.0);
      out.threshold = items[i].ratio;
      out.tie_gamma = gamma;
      out.achieved_alpha = pacc.value() + gamma * pgroup;
      qacc.add(gamma * qgroup);
      if (gamma > 0.0) {
        for (std::size_t k = i; k < j; ++k) {
          if (items[k].qm > 0.0) {
            log_terms.push_back(std::log(gamma) + std::log(items[k].qm));
          }
        }
      }
      done = true;
    } else {
      for (std::size_t k = i; k < j; ++k) {
        pacc.add(items[k].pm);
        qacc.add(items[k].qm);
        if (items[k].qm > 0.0) log_terms.push_back(std::log(items[k].qm));
      }
    }
    i = j;
  }
  if (!done) {
    throw numerical_error("beta_classical: acceptance level unreachable");
  }
  out.beta = qacc.value();
  out.log_beta = logsumexp(log_terms);
  return out;
}

std::vector<DistanceClass> bsc_classes(int n, double p) {
  if (n < 1 || n > 100000) {
    throw std::invalid_argument("bsc_classes: need 1 <= n <= 100000");
  }
  if (!(p > 0.0 && p <= 0.5)) {
    throw std::invalid_argument("bsc_classes: need p in (0, 1/2]");
  }
  const double ln2 = std::log(2.0);
  const double lp = std::log(p), l1p = std::log1p(-p);
  std::vector<DistanceClass> cls(n + 1);
  for (int d = 0; d <= n; ++d) {
    double lc = log_binom(n, d);
    cls[d].d = d;
    cls[d].log_p = lc + d * lp + (n - d) * l1p;
    cls[d].log_q = lc - n * ln2;
    cls[d].log_ratio = n * ln2 + d * lp + (n - d) * l1p;
  }
  return cls;
}

std::vector<DistanceClass> bec_classes(int n, double p,
                                       const std::vector<double>& class_weights) {
  if (n < 1 || n > 100000) {
    throw std::invalid_argument("bec_classes: need 1 <= n <= 100000");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bec_classes: need p in [0, 1]");
  }
  if (static_cast<int>(class_weights.size()) != n + 1) {
    throw std::invalid_argument("bec_classes: need n + 1 class weights");
  }
  KahanSum wsum;
  for (double w : class_weights) {
    if (w < -1e-12) {
      throw std::invalid_argument("bec_classes: negative class weight");
    }
    wsum.add(std::max(w, 0.0));
  }
  if (std::abs(wsum.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("bec_classes: class weights must sum to 1");
  }
  const double ln2 = std::log(2.0);
  std::vector<DistanceClass> cls;
  cls.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    double w = std::max(class_weights[k], 0.0);
    DistanceClass c;
    c.d = k;
    c.log_p = log_binom(n, k) + xlog(k, p) + xlog(n - k, 1.0 - p);
    c.log_q = w > 0.0 ? std::log(w) + (k - n) * ln2 : -kInf;
    if (c.log_p == -kInf && c.log_q == -kInf) continue;  // zero-mass class
    if (c.log_q == -kInf) {
      c.log_ratio = kInf;
    } else if (c.log_p == -kInf) {
      c.log_ratio = -kInf;
    } else {
      c.log_ratio = c.log_p - c.log_q;
    }
    cls.push_back(c);
  }
  return cls;
}

NPTest class_np(std::vector<DistanceClass> classes, double alpha) {
  check_alpha(alpha);
  if (alpha == 0.0) return empty_test();
  if (alpha == 1.0) {
    // same closed form as the per-outcome tester: accept every class that
    // carries p-mass, so no cumulative-sum cancellation enters gamma
    NPTest out;
    KahanSum pacc;
    std::vector<double> log_terms;
    double thr = kInf;
    for (const DistanceClass& c : classes) {
      if (c.log_p == -kInf) continue;
      pacc.add(std::exp(c.log_p));
      if (c.log_q != -kInf) {
        log_terms.push_back(c.log_q);
        thr = std::min(thr, c.log_ratio);
      }
    }
    out.log_beta = logsumexp(log_terms);
    KahanSum qs;
    for (double lq : log_terms) qs.add(std::exp(lq));
    out.beta = qs.value();
    out.achieved_alpha = pacc.value();
    out.threshold = thr;
    out.tie_gamma = 1.0;
    return out;
  }
  std::sort(classes.begin(), classes.end(),
            [](const DistanceClass& a, const DistanceClass& b) {
              if (a.log_ratio != b.log_ratio) return a.log_ratio > b.log_ratio;
              return a.d < b.d;
            });
  std::vector<char> suffix_p(classes.size() + 1, 0);
  for (std::size_t k = classes.size(); k-- > 0;) {
    suffix_p[k] = suffix_p[k + 1] || classes[k].log_p != -kInf;
  }
  NPTest out;
  KahanSum pacc, qacc;
  std::vector<double> log_terms;
  std::size_t i = 0;
  bool done = false;
  while (i < classes.size() && !done) {
    std::size_t j = i;
    KahanSum pg;
    std::vector<double> qg_logs;
    while (j < classes.size() && classes[j].log_ratio == classes[i].log_ratio) {
      pg.add(std::exp(classes[j].log_p));
      if (classes[j].log_q != -kInf) qg_logs.push_back(classes[j].log_q);
      ++j;
    }
    double pgroup = pg.value();
    bool last_positive = !suffix_p[j];
    if (pacc.value() + pgroup >= alpha || (last_positive && alpha - (pacc.value() + pgroup) <= 2e-9)) {
      double gamma = pgroup > 0.0 ? (alpha - pacc.value()) / pgroup : 0.0;
      gamma = std::min(std::max(gamma, 0.0), 1.0);
      out.threshold = classes[i].log_ratio;
      out.tie_gamma = gamma;
      out.achieved_alpha = pacc.value() + gamma * pgroup;
      if (gamma > 0.0) {
        double lg = std::log(gamma);
        for (double lq : qg_logs) log_terms.push_back(lg + lq);
      }
      done = true;
    } else {
      for (std::size_t k = i; k < j; ++k) {
        pacc.add(std::exp(classes[k].log_p));
      }
      for (double lq : qg_logs) log_terms.push_back(lq);
    }
    i = j;
  }
  if (!done) {
    throw numerical_error("class_np: acceptance level unreachable");
  }
  out.log_beta = logsumexp(log_terms);
  for (double lq : log_terms) qacc.add(std::exp(lq));
  out.beta = qacc.value();
  return out;
}

NPTest bsc_beta(int n, double p, double alpha) {
  return class_np(bsc_classes(n, p), alpha);
}

ErasureBound bec_bound(int n, double p, double eps, QFamily family) {
  if (family != QFamily::PermutationInvariant) {
    throw std::invalid_argument("bec_bound: unsupported alternative family");
  }
  if (n < 1 || n > 100000) {
    throw std::invalid_argument("bec_bound: need 1 <= n <= 100000");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bec_bound: need p in [0, 1]");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("bec_bound: need eps in [0, 1]");
  }
  const double alpha = 1.0 - eps;
  ErasureBound out;
  if (alpha <= 0.0) {
    out.value = 0.0;
    out.log_value = -kInf;
    out.boundary_class = -1;
    return out;
  }
  const double ln2 = std::log(2.0);
  std::vector<double> log_pk(n + 1);
  for (int k = 0; k <= n; ++k) {
    log_pk[k] = log_binom(n, k) + xlog(k, p) + xlog(n - k, 1.0 - p);
  }
  // log_s[j] = log sum_{k > j} P_k 2^(n-k); suffix logsumexp, index shifted
  // so log_s[j + 1] covers classes beyond j.
  std::vector<double> log_s(n + 2);
  log_s[n + 1] = -kInf;
  for (int k = n; k >= 0; --k) {
    double term = log_pk[k] + (n - k) * ln2;
    double m = std::max(log_s[k + 1], term);
    log_s[k] = m == -kInf ? -kInf
                          : m + std::log(std::exp(log_s[k + 1] - m) +
                                         std::exp(term - m));
  }
  KahanSum cum;  // C_j, linear prefix mass of the clipped classes
  int j = -1;
  while (j < n - 1) {
    double mass_at_break =
        cum.value() + std::exp((j + 1 - n) * ln2 + log_s[j + 1]);
    if (mass_at_break >= alpha) break;
    cum.add(std::exp(log_pk[j + 1]));
    ++j;
  }
  double ls = log_s[j + 1];
  double deficit = std::max(alpha - cum.value(), 0.0);
  out.boundary_class = j;
  if (deficit == 0.0) {
    out.value = 0.0;
    out.log_value = -kInf;
    return out;
  }
  out.log_value = std::min(std::log(deficit) - ls, 0.0);
  if (std::abs(ls) < 700.0) {
    out.value = std::min(deficit * std::exp(-ls), 1.0);
  } else {
    out.value = std::exp(out.log_value);
  }
  return out;
}

QuantumNP beta_quantum(const HermitianOp& rho, const HermitianOp& sigma,
                       double alpha, const SdpOptions& opt) {
  if (rho.side() != sigma.side() || rho.side() < 1) {
    throw std::invalid_argument("beta_quantum: states need equal side");
  }
  check_alpha(alpha);
  if (!is_psd(rho, 1e-9) || !is_psd(sigma, 1e-9)) {
    throw std::invalid_argument("beta_quantum: states must be positive semidefinite");
  }
  if (std::abs(trace_of(rho) - 1.0) > 1e-9) {
    throw std::invalid_argument("beta_quantum: rho must have unit trace");
  }
  const int d = rho.side();
  QuantumNP out;
  if (alpha == 0.0) {
    out.beta = 0.0;
    out.test = HermitianOp::zero(rho.dims());
    out.status = SdpStatus::Optimal;
    out.gap = 0.0;
    return out;
  }
  if (alpha == 1.0) {
    // full acceptance pins the test to the support projector of rho, where
    // the feasible set has no interior; evaluate that optimizer directly
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.mat());
    MatrixXcd proj = MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      if (es.eigenvalues()(i) > 1e-12) {
        proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      }
    }
    out.test = HermitianOp(rho.dims(), proj);
    out.beta = std::max(trace_inner(out.test, sigma), 0.0);
    out.status = SdpStatus::Optimal;
    out.gap = 0.0;
    return out;
  }
  SdpProblem prob;
  int t = prob.add_block("test", d, Cone::Psd);
  prob.set_objective(t, sigma.mat());
  SdpConstraint accept;
  accept.name = "accept";
  accept.space_side = 1;
  accept.sense = Sense::Le;
  accept.bound = MatrixXcd::Constant(1, 1, -alpha);
  accept.terms.push_back({t, LinMap::inner_map(rho.mat()).scaled(-1.0)});
  prob.add_constraint(std::move(accept));
  SdpConstraint cap;
  cap.name = "cap";
  cap.space_side = d;
  cap.sense = Sense::Le;
  cap.bound = MatrixXcd::Identity(d, d);
  cap.terms.push_back({t, LinMap::identity(d)});
  prob.add_constraint(std::move(cap));

  SdpSolution sol = solve(prob, opt);
  out.status = sol.status;
  if (sol.status != SdpStatus::Optimal) {
    throw numerical_error(std::string("beta_quantum: solver returned ") +
                          to_string(sol.status));
  }
  out.beta = sol.primal_value;
  out.gap = sol.gap;
  out.test = HermitianOp(rho.dims(), sol.block(prob, "test"));
  return out;
}

std::pair<double, double> quantum_classical_equivalence(
    const HermitianOp& omega, const HermitianOp& sigma, const MatrixXcd& basis,
    double alpha, const SdpOptions& opt) {
  const int d = omega.side();
  if (sigma.side() != d || basis.rows() != d || basis.cols() != d) {
    throw std::invalid_argument("quantum_classical_equivalence: size mismatch");
  }
  check_alpha(alpha);
  if ((basis.adjoint() * basis - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() >
      1e-9) {
    throw std::invalid_argument("quantum_classical_equivalence: basis is not unitary");
  }
  MatrixXcd dw = basis.adjoint() * omega.mat() * basis;
  MatrixXcd ds = basis.adjoint() * sigma.mat() * basis;
  double off = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) off = std::max(off, std::max(std::abs(dw(i, j)), std::abs(ds(i, j))));
    }
  }
  if (off > 1e-9) {
    MatrixXcd comm = omega.mat() * sigma.mat() - sigma.mat() * omega.mat();
    std::ostringstream msg;
    msg << "quantum_classical_equivalence: basis fails to diagonalize the pair "
        << "(max off-diagonal " << off << ", commutator max entry "
        << comm.cwiseAbs().maxCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> pd(d), qd(d);
  for (int i = 0; i < d; ++i) {
    pd[i] = std::max(dw(i, i).real(), 0.0);
    qd[i] = std::max(ds(i, i).real(), 0.0);
  }
  double bq = beta_quantum(omega, sigma, alpha, opt).beta;
  double bc = beta_classical(pd, qd, alpha).beta;
  return {bq, bc};
}

}  // namespace pptmc
