#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pptmc/channels.hpp"
#include "pptmc/symmetry.hpp"

using namespace pptmc;
namespace tt = pptmc::testing;

namespace {

std::vector<MatrixXcd> dephasing_kraus(double p) {
  return {std::sqrt(1.0 - p) * pauli(0), std::sqrt(p) * pauli(3)};
}

std::vector<MatrixXcd> depolarizing_kraus(double p) {
  std::vector<MatrixXcd> ks = {std::sqrt(1.0 - p) * pauli(0)};
  for (int k = 1; k <= 3; ++k) ks.push_back(std::sqrt(p / 3.0) * pauli(k));
  return ks;
}

std::vector<MatrixXcd> erasure_kraus(double p) {
  MatrixXcd keep = MatrixXcd::Zero(3, 2);
  keep(0, 0) = keep(1, 1) = std::sqrt(1.0 - p);
  MatrixXcd e0 = MatrixXcd::Zero(3, 2), e1 = MatrixXcd::Zero(3, 2);
  e0(2, 0) = std::sqrt(p);
  e1(2, 1) = std::sqrt(p);
  return {keep, e0, e1};
}

double action_gap(const Channel& ch, const std::vector<MatrixXcd>& kraus,
                  int seed) {
  auto g = tt::rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 6; ++rep) {
    HermitianOp rho = tt::random_density(g, {ch.in_dim});
    worst = std::max(worst, max_abs_diff(apply(ch, rho),
                                         tt::apply_kraus(kraus, rho)));
  }
  return worst;
}

}  // namespace

TEST_CASE("builders produce trace-preserving Choi operators") {
  for (const Channel& ch :
       {identity_channel(2), identity_channel(3), dephasing_channel(0.1),
        depolarizing_channel(0.25), erasure_channel(0.4)}) {
    CHECK(ch.trace_preserving);
    CHECK(is_psd(ch.choi));
    CHECK(max_abs_diff(partial_trace(ch.choi, {0}),
                       HermitianOp::identity({ch.in_dim})) < 1e-12);
    CHECK(ch.choi.dims() == std::vector<int>{ch.in_dim, ch.out_dim});
  }
}

TEST_CASE("apply agrees with the Kraus form of each builder") {
  CHECK(action_gap(identity_channel(2), {MatrixXcd::Identity(2, 2)}, 61) <
        1e-13);
  CHECK(action_gap(identity_channel(3), {MatrixXcd::Identity(3, 3)}, 62) <
        1e-13);
  CHECK(action_gap(dephasing_channel(0.1), dephasing_kraus(0.1), 63) < 1e-13);
  CHECK(action_gap(dephasing_channel(0.37), dephasing_kraus(0.37), 64) < 1e-13);
  CHECK(action_gap(depolarizing_channel(0.25), depolarizing_kraus(0.25), 65) <
        1e-13);
  CHECK(action_gap(erasure_channel(0.3), erasure_kraus(0.3), 66) < 1e-13);
}

TEST_CASE("dephasing damps coherences by 1-2p") {
  VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  HermitianOp out = apply(dephasing_channel(0.1), outer(plus, {2}));
  MatrixXcd want(2, 2);
  want << 0.5, 0.4, 0.4, 0.5;
  CHECK((out.mat() - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("depolarizing mixes toward the maximally mixed state") {
  auto g = tt::rng(67);
  double p = 0.3;
  Channel ch = depolarizing_channel(p);
  HermitianOp rho = tt::random_density(g, {2});
  HermitianOp want = rho * (1.0 - 4.0 * p / 3.0) +
                     HermitianOp::identity({2}) * (2.0 * p / 3.0);
  CHECK(max_abs_diff(apply(ch, rho), want) < 1e-12);
}

TEST_CASE("erasure routes trace p to the flag state") {
  auto g = tt::rng(68);
  Channel ch = erasure_channel(0.25);
  HermitianOp rho = tt::random_density(g, {2});
  HermitianOp out = apply(ch, rho);
  CHECK(out.side() == 3);
  CHECK(out.mat()(2, 2).real() == doctest::Approx(0.25));
  CHECK(std::abs(out.mat()(2, 0)) < 1e-13);
  CHECK(out.mat().topLeftCorner(2, 2).isApprox(0.75 * rho.mat(), 1e-12));
}

TEST_CASE("jamiolkowski form is the partial transpose of the Choi form") {
  Channel ch = dephasing_channel(0.2);
  HermitianOp j = jamiolkowski(ch);
  CHECK(max_abs_diff(partial_transpose(j, 0), ch.choi) < 1e-13);
  // contraction with rho (x) 1 recovers the action without the transpose
  auto g = tt::rng(69);
  HermitianOp rho = tt::random_density(g, {2});
  HermitianOp lifted = tensor(rho, HermitianOp::identity({2}));
  MatrixXcd prod = j.mat() * lifted.mat();
  MatrixXcd act = MatrixXcd::Zero(2, 2);  // trace out the input factor
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) act(a, b) += prod(i * 2 + a, i * 2 + b);
  CHECK((act - apply(ch, rho).mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor powers act factor-wise") {
  Channel ch = dephasing_channel(0.1);
  Channel ch2 = tensor_power(ch, 2);
  CHECK(ch2.in_dim == 4);
  CHECK(ch2.out_dim == 4);
  CHECK(ch2.trace_preserving);
  CHECK(max_abs_diff(tensor_power(ch, 1).choi, ch.choi) < 1e-13);
  auto g = tt::rng(70);
  HermitianOp a = tt::random_density(g, {2});
  HermitianOp b = tt::random_density(g, {2});
  HermitianOp joint = tensor(a, b).with_dims({4});
  HermitianOp got = apply(ch2, joint);
  HermitianOp want = tensor(apply(ch, a), apply(ch, b)).with_dims({4});
  CHECK(max_abs_diff(got, want) < 1e-12);
  CHECK_THROWS_AS(tensor_power(erasure_channel(0.1), 5), budget_error);
  CHECK_THROWS_AS(tensor_power(ch, 0), std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
  for (ChannelKind k : {ChannelKind::Identity, ChannelKind::Dephasing,
                        ChannelKind::Depolarizing, ChannelKind::Erasure,
                        ChannelKind::Custom}) {
    CHECK(kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(kind_from_string("bogus"), std::invalid_argument);
  CHECK(dephasing_channel(0.25).label() == "dephasing(p=0.250000)");
}

TEST_CASE("covariance detection") {
  CHECK(is_covariant(dephasing_channel(0.1), pauli_group()));
  CHECK(is_covariant(depolarizing_channel(0.25), pauli_group()));
  CHECK(is_covariant(depolarizing_channel(0.25), clifford_group()));
  CHECK(is_covariant(identity_channel(2), clifford_group()));
  // dephasing singles out the z axis, so Hadamard conjugation moves it
  CHECK_FALSE(is_covariant(dephasing_channel(0.1), clifford_group()));
  CHECK(is_covariant(erasure_channel(0.3), erasure_group()));
  // dimension mismatch is a contract violation, not "not covariant"
  CHECK_THROWS_AS(is_covariant(erasure_channel(0.3), pauli_group()),
                  std::invalid_argument);
}

TEST_CASE("custom channels replicate builtin behavior") {
  Channel deph = dephasing_channel(0.15);
  Channel cust = custom_channel(deph.choi, 2, 2);
  CHECK(cust.kind == ChannelKind::Custom);
  CHECK(cust.trace_preserving);
  auto g = tt::rng(71);
  HermitianOp rho = tt::random_density(g, {2});
  CHECK(max_abs_diff(apply(cust, rho), apply(deph, rho)) < 1e-13);

  ChannelSpec spec;
  spec.kind = ChannelKind::Custom;
  spec.custom_choi = deph.choi;
  spec.has_custom = true;
  CHECK(max_abs_diff(build(spec).choi, deph.choi) < 1e-13);
}

TEST_CASE("invalid constructions are rejected") {
  // incomplete Kraus set
  CHECK_THROWS_AS(choi_from_kraus({0.5 * pauli(0)}), std::invalid_argument);
  // non-PSD Choi operator
  MatrixXcd neg = -MatrixXcd::Identity(4, 4);
  CHECK_THROWS_AS(custom_channel(HermitianOp({2, 2}, neg), 2, 2),
                  std::invalid_argument);
  // marginal above the identity (trace increasing)
  CHECK_THROWS_AS(custom_channel(omega(2) * 1.5, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(dephasing_channel(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(dephasing_channel(1.5), std::invalid_argument);
  ChannelSpec spec;
  spec.kind = ChannelKind::Custom;
  CHECK_THROWS_AS(build(spec), std::invalid_argument);
  // trace-decreasing Choi is accepted but flagged
  Channel sub = custom_channel(omega(2) * 0.5, 2, 2);
  CHECK_FALSE(sub.trace_preserving);
}
