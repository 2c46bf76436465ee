#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pptmc/converse.hpp"

using namespace pptmc;
namespace tt = pptmc::testing;

namespace {

double worst_residual(const SlacknessReport& s) { return s.worst; }

}  // namespace

TEST_CASE("payoff optimization anchors") {
  // the maximally entangled state cannot beat payoff 1, and the witness
  // phi+ + phi- attains it
  double v = f0(bell_phi_plus());
  CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  HermitianOp witness = bell_phi_plus() + bell_phi_minus();
  CHECK(is_psd(witness));
  CHECK(is_psd(partial_transpose(witness, 0)));
  CHECK(max_abs_diff(partial_trace(witness, {0}), HermitianOp::identity({2})) <
        1e-12);
  CHECK(trace_inner(bell_phi_plus(), witness) == doctest::Approx(1.0));
  // the identity payoff measures the largest admissible trace, which is dA
  CHECK(f0(HermitianOp::identity({2, 2})) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f0(HermitianOp::zero({2, 2})) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(f0(HermitianOp::identity({4})), std::invalid_argument);
  CHECK_THROWS_AS(f0(HermitianOp::identity({2, 2}) * 1.5),
                  std::invalid_argument);
}

TEST_CASE("payoff is lipschitz in the observable") {
  auto g = tt::rng(91);
  for (int rep = 0; rep < 6; ++rep) {
    std::vector<int> dims = rep % 2 == 0 ? std::vector<int>{2, 2}
                                         : std::vector<int>{2, 3};
    HermitianOp o1 = tt::random_contraction(g, dims);
    HermitianOp o2 = tt::random_contraction(g, dims);
    auto [diff, cap] = f0_lipschitz_check(o1, o2);
    CHECK(diff <= cap + 1e-7);
  }
}

TEST_CASE("bound anchors for one channel use") {
  BoundResult deph = bound(dephasing_channel(0.1), 0.1);
  CHECK(deph.value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(deph.log2_M_upper == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(deph.saddle_gap < 1e-6);
  CHECK(deph.min_status == SdpStatus::Optimal);
  CHECK(deph.max_status == SdpStatus::Optimal);

  BoundResult depo = bound(depolarizing_channel(0.1), 0.1);
  CHECK(depo.value == doctest::Approx(0.5).epsilon(1e-7));

  BoundResult eras = bound(erasure_channel(0.25), 0.1);
  CHECK(eras.value == doctest::Approx(0.6).epsilon(1e-7));

  // the noiseless qubit at eps = 0 carries exactly one qubit
  BoundResult id = bound(identity_channel(2), 0.0);
  CHECK(id.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(id.log2_M_upper == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("custom channels reproduce builtin bounds") {
  Channel deph = dephasing_channel(0.1);
  Channel cust = custom_channel(deph.choi, 2, 2);
  BoundResult a = bound(deph, 0.1);
  BoundResult b = bound(cust, 0.1);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}

TEST_CASE("eps = 1 is resolved without solving") {
  BoundResult r = bound(dephasing_channel(0.1), 1.0);
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);
  CHECK(std::isinf(r.log2_M_upper));
  CHECK(r.log2_M_upper > 0.0);
  CHECK(r.iterations_min == 0);
  CHECK(r.iterations_max == 0);
  // the degenerate optimizers still satisfy every slackness identity
  SlacknessReport s = slackness_audit(dephasing_channel(0.1), 1.0, r);
  CHECK(worst_residual(s) < 1e-12);
}

TEST_CASE("bound shrinks as the error budget grows") {
  Channel ch = depolarizing_channel(0.2);
  double prev = 2.0;
  for (double eps : {0.0, 0.1, 0.3, 0.6, 0.9}) {
    double v = bound(ch, eps).value;
    CHECK(v <= prev + 1e-8);
    prev = v;
  }
}

TEST_CASE("slackness residuals vanish at optimal pairs") {
  for (double eps : {0.01, 0.3}) {
    BoundResult r = bound(erasure_channel(0.25), eps);
    SlacknessReport s = slackness_audit(erasure_channel(0.25), eps, r);
    CHECK(s.prior_normalized < 1e-5);
    CHECK(s.acceptance_tight < 1e-5);
    CHECK(s.refund_saturates < 1e-5);
    CHECK(s.payoff_saturates < 1e-5);
    CHECK(s.refund_price < 1e-5);
    CHECK(s.ppt_boundary < 1e-5);
    CHECK(s.marginal_tight < 1e-5);
    CHECK(s.dominance_tight < 1e-5);
    CHECK(s.worst < 1e-5);
  }
}

TEST_CASE("sampled operators never beat the entangled-state payoff cap") {
  auto g = tt::rng(92);
  for (int dm : {2, 3}) {
    HermitianOp target = max_entangled_state(dm);
    for (int rep = 0; rep < 50; ++rep) {
      HermitianOp s = sample_ppt_state(dm, g);
      CHECK(is_psd(s, 1e-9));
      CHECK(is_psd(partial_transpose(s, 0), 1e-9));
      CHECK(trace_of(s) <= 1.0 + 1e-9);
      CHECK(trace_inner(target, s) <= 1.0 / dm + 1e-9);
    }
  }
  CHECK_THROWS_AS(sample_ppt_state(1, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_ppt_state(9, g), std::invalid_argument);
}

TEST_CASE("the maximizing operator certifies its own value") {
  Channel ch = dephasing_channel(0.25);
  double eps = 0.2;
  BoundResult r = bound(ch, eps);
  double inner = maximin_fixed_value(ch, eps, r.m_op);
  // evaluating the inner minimization at the maximizer recovers the saddle
  CHECK(inner == doctest::Approx(r.max_value).epsilon(1e-6));
}

TEST_CASE("slater geometry of the two forms") {
  Channel ch = dephasing_channel(0.1);
  SlaterReport min_in = slater_check(min_form(ch, 0.1));
  CHECK(min_in.verdict == SlaterVerdict::StrictlyFeasible);
  SlaterReport max_in = slater_check(max_form(ch, 0.1));
  CHECK(max_in.verdict == SlaterVerdict::StrictlyFeasible);
  // at eps = 0 the acceptance row pins Tr[Lambda J] to its ceiling
  SlaterReport min_edge = slater_check(min_form(ch, 0.0));
  CHECK(min_edge.verdict == SlaterVerdict::BoundaryOnly);
}

TEST_CASE("input contracts") {
  CHECK_THROWS_AS(bound(dephasing_channel(0.1), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(bound(dephasing_channel(0.1), 1.5), std::invalid_argument);
  BoundOptions strict;
  strict.saddle_tol = 1e-18;  // unattainable agreement must be reported
  CHECK_THROWS_AS(bound(dephasing_channel(0.1), 0.1, strict), numerical_error);
}
