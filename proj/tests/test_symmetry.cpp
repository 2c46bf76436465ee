#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "oracles.hpp"
#include "pptmc/symmetry.hpp"

using namespace pptmc;
namespace tt = pptmc::testing;

TEST_CASE("group constructors validate") {
  GroupRep pauli = pauli_group();
  CHECK(pauli.elements.size() == 4);
  CHECK(pauli.dim_a() == 2);
  CHECK(pauli.dim_b() == 2);
  pauli.validate();
  GroupRep cliff = clifford_group();
  CHECK(cliff.elements.size() == 24);
  cliff.validate();
  GroupRep eras = erasure_group();
  CHECK(eras.dim_a() == 2);
  CHECK(eras.dim_b() == 3);
  eras.validate();
  for (const GroupElement& e : eras.elements) {
    // the flag row and column stay untouched
    CHECK(std::abs(e.v(2, 2) - 1.0) < 1e-12);
    CHECK(std::abs(e.v(0, 2)) < 1e-12);
    CHECK(std::abs(e.v(2, 0)) < 1e-12);
  }

  GroupRep bad;
  bad.elements.push_back({2.0 * pauli_group().elements[0].u, MatrixXcd::Identity(2, 2)});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  GroupRep bad_w = pauli_group();
  bad_w.weights = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(bad_w.validate(), std::invalid_argument);
}

TEST_CASE("input-side twirl flattens qubit states") {
  auto g = tt::rng(101);
  HermitianOp rho = tt::random_density(g, {2});
  HermitianOp t = twirl(rho, pauli_group_input());
  CHECK(max_abs_diff(t, maximally_mixed(2)) < 1e-12);
}

TEST_CASE("twirl is an idempotent self-adjoint trace-preserving projector") {
  auto g = tt::rng(102);
  GroupRep rep = pauli_group();
  HermitianOp a = tt::random_hermitian(g, {2, 2});
  HermitianOp b = tt::random_hermitian(g, {2, 2});
  HermitianOp ta = twirl(a, rep);
  CHECK(max_abs_diff(twirl(ta, rep), ta) < 1e-12);
  CHECK(trace_of(ta) == doctest::Approx(trace_of(a)).epsilon(1e-12));
  CHECK(trace_inner(ta, b) ==
        doctest::Approx(trace_inner(a, twirl(b, rep))).epsilon(1e-10));
  // positivity is preserved
  HermitianOp d = tt::random_density(g, {2, 2});
  CHECK(is_psd(twirl(d, rep), 1e-10));
  // the identity channel's state is a fixed point
  CHECK(max_abs_diff(twirl(max_entangled_state(2), rep),
                     max_entangled_state(2)) < 1e-12);
  CHECK_THROWS_AS(twirl(tt::random_hermitian(g, {2, 3}), rep),
                  std::invalid_argument);
}

TEST_CASE("partial transposition exchanges the two twirls") {
  auto g = tt::rng(103);
  for (const GroupRep& rep : {pauli_group(), clifford_group()}) {
    HermitianOp o = tt::random_hermitian(g, {2, 2});
    HermitianOp lhs = partial_transpose(twirl(o, rep), 0);
    HermitianOp rhs = twirl_alternate(partial_transpose(o, 0), rep);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("invariant basis of the pauli twirl is the bell-diagonal space") {
  InvariantBasis basis = invariant_basis(pauli_group(), {2, 2});
  REQUIRE(basis.ops.size() == 4);
  CHECK((basis.gram - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
  for (const HermitianOp& op : basis.ops) {
    CHECK(max_abs_diff(twirl(op, pauli_group()), op) < 1e-9);
  }
  // every bell projector lies in the span
  for (const HermitianOp& bell :
       {bell_phi_plus(), bell_phi_minus(), bell_psi_plus(), bell_psi_minus()}) {
    HermitianOp recon = HermitianOp::zero({2, 2});
    for (const HermitianOp& op : basis.ops) {
      recon = recon + op * trace_inner(op, bell);
    }
    CHECK(max_abs_diff(recon, bell) < 1e-9);
  }
}

TEST_CASE("invariant basis of the clifford twirl is the isotropic space") {
  InvariantBasis basis = invariant_basis(clifford_group(), {2, 2});
  REQUIRE(basis.ops.size() == 2);
  CHECK((basis.gram - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
  auto g = tt::rng(104);
  HermitianOp t = twirl(tt::random_hermitian(g, {2, 2}), clifford_group());
  HermitianOp recon = HermitianOp::zero({2, 2});
  for (const HermitianOp& op : basis.ops) {
    recon = recon + op * trace_inner(op, t);
  }
  CHECK(max_abs_diff(recon, t) < 1e-9);
}

TEST_CASE("payoff value is constant on local unitary orbits") {
  auto g = tt::rng(105);
  HermitianOp o = tt::random_contraction(g, {2, 2});
  double base = f0(o);
  GroupRep cliff = clifford_group();
  for (int rep = 0; rep < 3; ++rep) {
    const GroupElement& e = cliff.elements[(rep * 7 + 3) % cliff.elements.size()];
    MatrixXcd w = Eigen::kroneckerProduct(e.u.transpose(), e.v.adjoint()).eval();
    HermitianOp moved({2, 2}, w * o.mat() * w.adjoint());
    CHECK(f0(moved) == doctest::Approx(base).epsilon(1e-6));
  }
  MatrixXcd loc = Eigen::kroneckerProduct(tt::random_unitary(g, 2),
                                          tt::random_unitary(g, 2))
                      .eval();
  HermitianOp moved({2, 2}, loc * o.mat() * loc.adjoint());
  CHECK(f0(moved) == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("feasible triples stay feasible under averaging") {
  auto g = tt::rng(106);
  Channel ch = dephasing_channel(0.1);
  double eps = 0.1;
  HermitianOp phi = tt::random_density(g, {2});
  HermitianOp lifted = tensor(transpose(phi), HermitianOp::identity({2}));
  HermitianOp lambda = lifted * (1.0 - eps / 2.0);
  HermitianOp m_op = HermitianOp::identity({2, 2}) * 0.5;
  CHECK(check_prop3(phi, lambda, m_op, ch, pauli_group(), eps));

  // acceptance below the budget is rejected before averaging
  CHECK_THROWS_AS(check_prop3(phi, lifted * 0.5, m_op, ch, pauli_group(), eps),
                  std::invalid_argument);
  // a test above its cap is rejected
  CHECK_THROWS_AS(
      check_prop3(phi, lifted * 1.5, m_op, ch, pauli_group(), eps),
      std::invalid_argument);
  // non-covariant pairs are a contract violation
  CHECK_THROWS_AS(
      check_prop3(phi, lambda, m_op, ch, clifford_group(), eps),
      std::invalid_argument);
}

TEST_CASE("reduced bounds agree with the full programs at one use") {
  struct Case {
    ChannelKind kind;
    double p, eps;
  };
  for (const Case& c : {Case{ChannelKind::Dephasing, 0.1, 0.1},
                        Case{ChannelKind::Depolarizing, 0.25, 0.3},
                        Case{ChannelKind::Erasure, 0.25, 0.1},
                        Case{ChannelKind::Identity, 0.0, 0.2}}) {
    ChannelSpec spec;
    spec.kind = c.kind;
    spec.p = c.p;
    BoundResult red = reduced_bound(spec, 1, c.eps);
    BoundResult full = bound(build(spec), c.eps);
    CHECK(red.value == doctest::Approx(full.value).epsilon(1e-7));
    CHECK(red.method == "reduced");
    CHECK(red.min_value == red.value);
    CHECK(red.max_value == red.value);
  }
  ChannelSpec deph;
  deph.kind = ChannelKind::Dephasing;
  deph.p = 0.1;
  BoundResult red2 = reduced_bound(deph, 2, 0.1);
  BoundResult full2 = bound(tensor_power(dephasing_channel(0.1), 2), 0.1);
  CHECK(red2.value == doctest::Approx(full2.value).epsilon(1e-7));
}

TEST_CASE("reduced bound anchors and contracts") {
  ChannelSpec id;
  id.kind = ChannelKind::Identity;
  CHECK(reduced_bound(id, 3, 0.2).value ==
        doctest::Approx(0.8 / 8.0).epsilon(1e-12));
  ChannelSpec eras;
  eras.kind = ChannelKind::Erasure;
  eras.p = 0.25;
  CHECK(reduced_bound(eras, 1, 0.1).value == doctest::Approx(0.6).epsilon(1e-12));
  BoundResult zero = reduced_bound(eras, 2, 1.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.degenerate);
  CHECK(std::isinf(zero.log2_M_upper));

  ChannelSpec deph;
  deph.kind = ChannelKind::Dephasing;
  deph.p = 0.7;  // beyond the symmetric crossover the reduction is undefined
  CHECK_THROWS_AS(reduced_bound(deph, 2, 0.1), std::invalid_argument);
  deph.p = 0.1;
  CHECK_THROWS_AS(reduced_bound(deph, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(reduced_bound(deph, 2, -0.1), std::invalid_argument);
  ChannelSpec cust;
  cust.kind = ChannelKind::Custom;
  CHECK_THROWS_AS(reduced_bound(cust, 1, 0.1), std::invalid_argument);
}
