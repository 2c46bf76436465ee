#include "pptmc/converse.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pptmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("eps must lie in [0, 1]");
  }
}

void require_optimal(const SdpSolution& sol, const char* what) {
  if (sol.status != SdpStatus::Optimal) {
    std::ostringstream msg;
    msg << what << ": solver returned " << to_string(sol.status);
    throw numerical_error(msg.str());
  }
}

double opnorm(const HermitianOp& o) { return spectral(o).max_abs_eigenvalue; }

// max-entry residual of A = B, scaled by 1 + (left factor norm) * (right
// factor norm) so it is dimensionless.
double product_residual(const MatrixXcd& lhs, const MatrixXcd& rhs,
                        double left_norm, double right_norm) {
  return (lhs - rhs).cwiseAbs().maxCoeff() / (1.0 + left_norm * right_norm);
}

// The PPT payoff program shared by f0 and max_form: M PSD, M^TA PSD,
// Tr_B M <= 1.
void add_ppt_rows(SdpProblem& prob, int m_block, int da, int db) {
  const std::vector<int> dims{da, db};
  SdpConstraint tpsd;
  tpsd.name = "transpose_psd";
  tpsd.space_side = da * db;
  tpsd.sense = Sense::Le;
  tpsd.bound = MatrixXcd::Zero(da * db, da * db);
  tpsd.terms.push_back({m_block, LinMap::partial_transpose_map(dims, 0).scaled(-1.0)});
  prob.add_constraint(std::move(tpsd));
  SdpConstraint cap;
  cap.name = "marginal_cap";
  cap.space_side = da;
  cap.sense = Sense::Le;
  cap.bound = MatrixXcd::Identity(da, da);
  cap.terms.push_back({m_block, LinMap::ptrace_map(dims, {0})});
  prob.add_constraint(std::move(cap));
}

}  // namespace

double f0(const HermitianOp& o, const SdpOptions& opt) {
  if (o.num_subsystems() != 2) {
    throw std::invalid_argument("f0: operator needs dims {dA, dB}");
  }
  const int da = o.dims()[0], db = o.dims()[1];
  if (!is_psd(o, 1e-7) || !is_psd(HermitianOp::identity(o.dims()) - o, 1e-7)) {
    throw std::invalid_argument("f0: operator must satisfy 0 <= o <= 1");
  }
  SdpProblem prob;
  prob.direction = Direction::Maximize;
  int m = prob.add_block("m_op", da * db, Cone::Psd);
  prob.set_objective(m, o.mat());
  add_ppt_rows(prob, m, da, db);
  SdpSolution sol = solve(prob, opt);
  require_optimal(sol, "f0");
  return sol.primal_value;
}

SdpProblem min_form(const Channel& ch, double eps) {
  check_eps(eps);
  const int da = ch.in_dim, db = ch.out_dim, dab = da * db;
  const std::vector<int> dims{da, db};
  SdpProblem prob;
  prob.direction = Direction::Minimize;
  int phi = prob.add_block("phi", da, Cone::Psd);
  int lambda = prob.add_block("lambda", dab, Cone::Psd);
  int gamma = prob.add_block("gamma", dab, Cone::Psd);
  int xi = prob.add_block("xi", da, Cone::Psd);
  prob.set_objective(xi, MatrixXcd::Identity(da, da));

  // the prior is a normalized state; an equality keeps it on the simplex
  // even where the maximizer's refund price vanishes and a <= row would
  // leave the normalization as a flat direction
  SdpConstraint prior;
  prior.name = "prior_norm";
  prior.space_side = 1;
  prior.sense = Sense::Eq;
  prior.bound = MatrixXcd::Constant(1, 1, 1.0);
  prior.terms.push_back({phi, LinMap::inner_map(MatrixXcd::Identity(da, da))});
  prob.add_constraint(std::move(prior));

  SdpConstraint accept;
  accept.name = "acceptance";
  accept.space_side = 1;
  accept.sense = Sense::Le;
  accept.bound = MatrixXcd::Constant(1, 1, -(1.0 - eps));
  accept.terms.push_back({lambda, LinMap::inner_map(ch.choi.mat()).scaled(-1.0)});
  prob.add_constraint(std::move(accept));

  SdpConstraint cap;
  cap.name = "test_cap";
  cap.space_side = dab;
  cap.sense = Sense::Le;
  cap.bound = MatrixXcd::Zero(dab, dab);
  cap.terms.push_back({lambda, LinMap::identity(dab)});
  cap.terms.push_back(
      {phi, compose(LinMap::tensor_id_right(da, db), LinMap::transpose_map(da))
                .scaled(-1.0)});
  prob.add_constraint(std::move(cap));

  SdpConstraint payoff;
  payoff.name = "payoff_cap";
  payoff.space_side = dab;
  payoff.sense = Sense::Le;
  payoff.bound = MatrixXcd::Zero(dab, dab);
  payoff.terms.push_back({lambda, LinMap::identity(dab)});
  payoff.terms.push_back({gamma, LinMap::partial_transpose_map(dims, 0)});
  payoff.terms.push_back({xi, LinMap::tensor_id_right(da, db).scaled(-1.0)});
  prob.add_constraint(std::move(payoff));
  return prob;
}

SdpProblem max_form(const Channel& ch, double eps) {
  check_eps(eps);
  const int da = ch.in_dim, db = ch.out_dim, dab = da * db;
  const std::vector<int> dims{da, db};
  SdpProblem prob;
  prob.direction = Direction::Maximize;
  int m = prob.add_block("m", 1, Cone::NonnegDiag);
  int nd = prob.add_block("n", 1, Cone::NonnegDiag);
  int r = prob.add_block("r", dab, Cone::Psd);
  int mop = prob.add_block("m_op", dab, Cone::Psd);
  prob.set_objective(m, MatrixXcd::Constant(1, 1, 1.0 - eps));
  prob.set_objective(nd, MatrixXcd::Constant(1, 1, -1.0));

  SdpConstraint dom;
  dom.name = "dominance";
  dom.space_side = dab;
  dom.sense = Sense::Le;
  dom.bound = MatrixXcd::Zero(dab, dab);
  dom.terms.push_back({m, LinMap::times_op_map(ch.choi.mat())});
  dom.terms.push_back({mop, LinMap::identity(dab).scaled(-1.0)});
  dom.terms.push_back({r, LinMap::identity(dab).scaled(-1.0)});
  prob.add_constraint(std::move(dom));

  SdpConstraint refund;
  refund.name = "refund_marginal";
  refund.space_side = da;
  refund.sense = Sense::Le;
  refund.bound = MatrixXcd::Zero(da, da);
  refund.terms.push_back({r, LinMap::ptrace_map(dims, {0})});
  refund.terms.push_back(
      {nd, LinMap::times_op_map(MatrixXcd::Identity(da, da)).scaled(-1.0)});
  prob.add_constraint(std::move(refund));

  add_ppt_rows(prob, mop, da, db);
  return prob;
}

BoundResult bound(const Channel& ch, double eps, const BoundOptions& opt) {
  check_eps(eps);
  const int da = ch.in_dim, db = ch.out_dim;
  BoundResult res;
  res.channel = ch.label();
  res.p = ch.p;
  res.eps = eps;
  if (eps >= 1.0) {
    // The empty test is optimal: every payoff row is slack at zero.
    res.value = 0.0;
    res.log2_M_upper = kInf;
    res.degenerate = true;
    res.phi = maximally_mixed(da);
    res.lambda = HermitianOp::zero({da, db});
    res.gamma = HermitianOp::zero({da, db});
    res.xi = HermitianOp::zero({da});
    res.r = HermitianOp::zero({da, db});
    res.m_op = HermitianOp::zero({da, db});
    return res;
  }
  SdpProblem pmin = min_form(ch, eps);
  SdpProblem pmax = max_form(ch, eps);
  SdpSolution smin = solve(pmin, opt.sdp);
  SdpSolution smax = solve(pmax, opt.sdp);
  require_optimal(smin, "bound (minimizing form)");
  require_optimal(smax, "bound (maximizing form)");
  res.min_value = smin.primal_value;
  res.max_value = smax.primal_value;
  res.saddle_gap = std::abs(res.min_value - res.max_value);
  if (res.saddle_gap > opt.saddle_tol) {
    std::ostringstream msg;
    msg << "bound: the two forms disagree by " << res.saddle_gap
        << " (min " << res.min_value << ", max " << res.max_value << ")";
    throw numerical_error(msg.str());
  }
  res.value = std::max(res.min_value, 0.0);
  res.log2_M_upper = res.value > 0.0 ? -std::log2(res.value) : kInf;
  res.min_status = smin.status;
  res.max_status = smax.status;
  res.iterations_min = smin.iterations;
  res.iterations_max = smax.iterations;
  res.phi = HermitianOp({da}, smin.block(pmin, "phi"));
  res.lambda = HermitianOp({da, db}, smin.block(pmin, "lambda"));
  res.gamma = HermitianOp({da, db}, smin.block(pmin, "gamma"));
  res.xi = HermitianOp({da}, smin.block(pmin, "xi"));
  res.m = smax.block(pmax, "m")(0, 0).real();
  res.n_dual = smax.block(pmax, "n")(0, 0).real();
  res.r = HermitianOp({da, db}, smax.block(pmax, "r"));
  res.m_op = HermitianOp({da, db}, smax.block(pmax, "m_op"));
  return res;
}

SlacknessReport slackness_audit(const Channel& ch, double eps,
                                const BoundResult& r) {
  check_eps(eps);
  const int da = ch.in_dim, db = ch.out_dim;
  if (r.phi.side() != da || r.lambda.side() != da * db ||
      r.m_op.side() != da * db) {
    throw std::invalid_argument("slackness_audit: result does not match channel dims");
  }
  const HermitianOp& nop = ch.choi;
  HermitianOp phi_t = tensor(transpose(r.phi), HermitianOp::identity({db}));
  HermitianOp gamma_ta = partial_transpose(r.gamma, 0);
  HermitianOp xi_t = tensor(r.xi, HermitianOp::identity({db}));
  HermitianOp m_ta = partial_transpose(r.m_op, 0);
  HermitianOp r_ta_marg = partial_trace(partial_transpose(r.r, 0), {0});
  HermitianOp m_marg = partial_trace(r.m_op, {0});
  HermitianOp payoff = r.lambda + gamma_ta;
  HermitianOp dom = r.m_op + r.r;

  SlacknessReport rep;
  rep.prior_normalized = std::abs(trace_of(r.phi) - 1.0);
  rep.acceptance_tight =
      std::abs(trace_inner(r.lambda, nop) - (1.0 - eps)) / (1.0 + (1.0 - eps));
  rep.refund_saturates = product_residual(
      phi_t.mat() * r.r.mat(), r.lambda.mat() * r.r.mat(),
      std::max(opnorm(phi_t), opnorm(r.lambda)), opnorm(r.r));
  rep.payoff_saturates = product_residual(
      xi_t.mat() * r.m_op.mat(), payoff.mat() * r.m_op.mat(),
      std::max(opnorm(xi_t), opnorm(payoff)), opnorm(r.m_op));
  rep.refund_price = product_residual(
      r.n_dual * r.phi.mat(), r_ta_marg.mat() * r.phi.mat(),
      std::max(r.n_dual, opnorm(r_ta_marg)), opnorm(r.phi));
  rep.ppt_boundary =
      product_residual(m_ta.mat() * r.gamma.mat(),
                       MatrixXcd::Zero(da * db, da * db), opnorm(m_ta),
                       opnorm(r.gamma));
  rep.marginal_tight = product_residual(
      m_marg.mat() * r.xi.mat(), r.xi.mat(),
      std::max(opnorm(m_marg), 1.0), opnorm(r.xi));
  rep.dominance_tight = product_residual(
      r.m * nop.mat() * r.lambda.mat(), dom.mat() * r.lambda.mat(),
      std::max(r.m * opnorm(nop), opnorm(dom)), opnorm(r.lambda));
  rep.worst = std::max({rep.prior_normalized, rep.acceptance_tight,
                        rep.refund_saturates, rep.payoff_saturates,
                        rep.refund_price, rep.ppt_boundary, rep.marginal_tight,
                        rep.dominance_tight});
  return rep;
}

std::pair<double, double> f0_lipschitz_check(const HermitianOp& o1,
                                             const HermitianOp& o2,
                                             const SdpOptions& opt) {
  if (o1.dims() != o2.dims() || o1.num_subsystems() != 2) {
    throw std::invalid_argument("f0_lipschitz_check: operators need equal dims {dA, dB}");
  }
  double lhs = std::abs(f0(o1, opt) - f0(o2, opt));
  double rhs = o1.dims()[0] * spectral(o1 - o2).trace_norm;
  return {lhs, rhs};
}

double maximin_fixed_value(const Channel& ch, double eps,
                           const HermitianOp& m_op, const SdpOptions& opt) {
  check_eps(eps);
  const int da = ch.in_dim, db = ch.out_dim, dab = da * db;
  if (m_op.side() != dab) {
    throw std::invalid_argument("maximin_fixed_value: operator side mismatch");
  }
  SdpProblem prob;
  prob.direction = Direction::Minimize;
  int phi = prob.add_block("phi", da, Cone::Psd);
  int lambda = prob.add_block("lambda", dab, Cone::Psd);
  prob.set_objective(lambda, m_op.mat());

  // the prior is a normalized state; an equality keeps it on the simplex
  // even where the maximizer's refund price vanishes and a <= row would
  // leave the normalization as a flat direction
  SdpConstraint prior;
  prior.name = "prior_norm";
  prior.space_side = 1;
  prior.sense = Sense::Eq;
  prior.bound = MatrixXcd::Constant(1, 1, 1.0);
  prior.terms.push_back({phi, LinMap::inner_map(MatrixXcd::Identity(da, da))});
  prob.add_constraint(std::move(prior));

  SdpConstraint accept;
  accept.name = "acceptance";
  accept.space_side = 1;
  accept.sense = Sense::Le;
  accept.bound = MatrixXcd::Constant(1, 1, -(1.0 - eps));
  accept.terms.push_back({lambda, LinMap::inner_map(ch.choi.mat()).scaled(-1.0)});
  prob.add_constraint(std::move(accept));

  SdpConstraint cap;
  cap.name = "test_cap";
  cap.space_side = dab;
  cap.sense = Sense::Le;
  cap.bound = MatrixXcd::Zero(dab, dab);
  cap.terms.push_back({lambda, LinMap::identity(dab)});
  cap.terms.push_back(
      {phi, compose(LinMap::tensor_id_right(da, db), LinMap::transpose_map(da))
                .scaled(-1.0)});
  prob.add_constraint(std::move(cap));

  SdpSolution sol = solve(prob, opt);
  require_optimal(sol, "maximin_fixed_value");
  return sol.primal_value;
}

HermitianOp sample_ppt_state(int dm, std::mt19937_64& rng) {
  if (dm < 2 || dm > 8) {
    throw std::invalid_argument("sample_ppt_state: need 2 <= dm <= 8");
  }
  const int side = dm * dm;
  const int df = 4 * side;
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.5, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    MatrixXcd g(side, df);
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < df; ++j) {
        double re = nd(rng), im = nd(rng);
        g(i, j) = std::complex<double>(re, im);
      }
    }
    MatrixXcd w = g * g.adjoint();
    w /= w.trace().real();
    HermitianOp state({dm, dm}, (w + w.adjoint()) / 2.0);
    if (spectral(partial_transpose(state, 0)).min_eigenvalue >= 1e-12) {
      return state * ud(rng);
    }
  }
  throw numerical_error("sample_ppt_state: rejection sampling failed to converge");
}

}  // namespace pptmc
