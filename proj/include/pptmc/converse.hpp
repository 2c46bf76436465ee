#pragma once

#include <random>
#include <utility>

#include "pptmc/channels.hpp"
#include "pptmc/operators.hpp"
#include "pptmc/sdp.hpp"

namespace pptmc {

struct BoundOptions {
  SdpOptions sdp;
  // Inconsistency threshold for the two independent solves of the same value.
  double saddle_tol = 1e-5;
};

// Complementary-slackness residuals between the minimizing and maximizing
// optimizers. Each is a max-entry norm scaled by 1 / (1 + operator norms of
// the factors), so a residual of 1e-6 means the identity holds to six digits
// at the scale of the operators involved.
struct SlacknessReport {
  double prior_normalized = 0.0;    // Tr[phi] = 1
  double acceptance_tight = 0.0;    // Tr[Lambda J] = 1 - eps
  double refund_saturates = 0.0;    // (phi^T (x) 1) R = Lambda R
  double payoff_saturates = 0.0;    // (xi (x) 1) M = (Lambda + Gamma^TA) M
  double refund_price = 0.0;        // n phi = Tr_B[R^TA] phi
  double ppt_boundary = 0.0;        // M^TA Gamma = 0
  double marginal_tight = 0.0;      // Tr_B[M] xi = xi
  double dominance_tight = 0.0;     // m J Lambda = (M + R) Lambda
  double worst = 0.0;
};

// Joint result of the minimizing and maximizing programs for one channel and
// one error budget.
struct BoundResult {
  std::string channel;
  int n = 1;                  // number of channel uses the Choi describes
  double p = 0.0;
  double eps = 0.0;
  std::string method = "sdp";
  double value = 0.0;         // the bound f; min-form optimum
  double log2_M_upper = 0.0;  // -log2(value); +inf when value is 0
  double min_value = 0.0, max_value = 0.0;
  double saddle_gap = 0.0;    // |min_value - max_value|
  bool degenerate = false;    // eps = 1 corner, resolved without solving
  SdpStatus min_status = SdpStatus::Optimal;
  SdpStatus max_status = SdpStatus::Optimal;
  int iterations_min = 0, iterations_max = 0;
  // Minimizing optimizer (prior, test, PPT price, payoff density).
  HermitianOp phi, lambda, gamma, xi;
  // Maximizing optimizer (code value m, refund price n_dual, refund R,
  // operator M).
  double m = 0.0, n_dual = 0.0;
  HermitianOp r, m_op;
};

// Largest payoff Tr[O M] over operators M that are PSD with PSD partial
// transpose and Tr_B M <= 1. o must carry two subsystem dims {dA, dB} and
// satisfy 0 <= o <= 1 within tolerance. Bounded above by dA.
double f0(const HermitianOp& o, const SdpOptions& opt = SdpOptions{});

// The two sides of the saddle point as explicit programs over the channel's
// Choi operator (dims {in, out}).
SdpProblem min_form(const Channel& ch, double eps);
SdpProblem max_form(const Channel& ch, double eps);

// Solve both forms, check they agree within opt.saddle_tol, and package the
// optimizers. eps = 1 short-circuits to the exact zero solution. Throws
// numerical_error on solver failure or saddle disagreement.
BoundResult bound(const Channel& ch, double eps, const BoundOptions& opt = {});

// Evaluate the eight complementary-slackness identities on the optimizers of
// a previously computed bound. Valid for any optimal pair, including the
// cross pairing of two independent solves.
SlacknessReport slackness_audit(const Channel& ch, double eps,
                                const BoundResult& r);

// (|f0(o1) - f0(o2)|, dA * trace_norm(o1 - o2)): the first never exceeds the
// second.
std::pair<double, double> f0_lipschitz_check(const HermitianOp& o1,
                                             const HermitianOp& o2,
                                             const SdpOptions& opt = SdpOptions{});

// Value of the inner minimization at a fixed operator M: min Tr[Lambda M]
// over feasible (phi, Lambda) at error budget eps.
double maximin_fixed_value(const Channel& ch, double eps,
                           const HermitianOp& m_op,
                           const SdpOptions& opt = SdpOptions{});

// Subnormalized bipartite state on dm (x) dm whose partial transpose is PSD:
// Wishart draw, trace-normalized, rejected until the transpose test passes,
// then scaled by a uniform factor in [1/2, 1]. Degrees of freedom are set
// high enough that rejection stays rare as dm grows.
HermitianOp sample_ppt_state(int dm, std::mt19937_64& rng);

}  // namespace pptmc
