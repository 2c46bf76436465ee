#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pptmc/sdp.hpp"

using namespace pptmc;
namespace tt = pptmc::testing;

namespace {

MatrixXcd scalar(double v) {
  MatrixXcd m(1, 1);
  m(0, 0) = v;
  return m;
}

// LinMap picking out sum_k c_k X_kk of a diagonal block into a scalar row
LinMap diag_row(const VectorXd& c) {
  LinMap m(static_cast<int>(c.size()), 1);
  for (int k = 0; k < c.size(); ++k) m.add_entry(0, k, c[k]);
  return m;
}

// Random bounded LP over one nonnegative diagonal block. x = 0 is feasible
// and a simplex cap keeps the optimum finite.
SdpProblem random_lp(std::mt19937_64& g, int nv, int extra_rows) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> rhs(0.5, 1.5);
  SdpProblem p;
  p.direction = Direction::Maximize;
  int x = p.add_block("x", nv, Cone::NonnegDiag);
  MatrixXcd obj = MatrixXcd::Zero(nv, nv);
  for (int k = 0; k < nv; ++k) obj(k, k) = coef(g);
  p.set_objective(x, obj);
  for (int r = 0; r < extra_rows; ++r) {
    VectorXd c(nv);
    for (int k = 0; k < nv; ++k) c[k] = coef(g);
    p.add_constraint({"row" + std::to_string(r), 1, Sense::Le, scalar(rhs(g)),
                      {{x, diag_row(c)}}});
  }
  p.add_constraint(
      {"cap", 1, Sense::Le, scalar(2.0), {{x, diag_row(VectorXd::Ones(nv))}}});
  return p;
}

double slack_trace(const SdpProblem& p, const SdpSolution& s, int j) {
  const SdpConstraint& con = p.constraints[j];
  MatrixXcd img = MatrixXcd::Zero(con.space_side, con.space_side);
  for (const auto& t : con.terms) img += t.map.apply_op(s.block_values[t.block]);
  MatrixXcd slack = con.bound - img;
  return (s.duals[j] * slack).trace().real();
}

}  // namespace

TEST_CASE("random LPs match vertex enumeration") {
  auto g = tt::rng(51);
  for (int rep = 0; rep < 30; ++rep) {
    int nv = 2 + static_cast<int>(rep % 3);
    SdpProblem p = random_lp(g, nv, 1 + static_cast<int>(rep % 3));
    SdpSolution s = solve(p);
    REQUIRE(s.status == SdpStatus::Optimal);
    double want = tt::lp_vertex_oracle(p);
    CHECK(s.primal_value == doctest::Approx(want).epsilon(1e-6));
    CHECK(std::abs(s.primal_value - s.dual_value) < 1e-6 * (1 + std::abs(want)));
  }
}

TEST_CASE("optimal solutions satisfy complementary slackness") {
  auto g = tt::rng(52);
  SdpProblem p = random_lp(g, 4, 3);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  for (size_t j = 0; j < p.constraints.size(); ++j) {
    CHECK(std::abs(slack_trace(p, s, j)) < 1e-6);
    // Le multipliers stay in the cone
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s.duals[j],
                                                Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) > -1e-7);
  }
}

TEST_CASE("solves are deterministic") {
  auto g = tt::rng(53);
  SdpProblem p = random_lp(g, 3, 2);
  SdpSolution a = solve(p);
  SdpSolution b = solve(p);
  CHECK(a.primal_value == b.primal_value);
  CHECK(a.iterations == b.iterations);
  for (size_t i = 0; i < a.block_values.size(); ++i) {
    CHECK((a.block_values[i] - b.block_values[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("smallest eigenvalue as an equality-constrained SDP") {
  auto g = tt::rng(54);
  HermitianOp c = tt::random_hermitian(g, {3});
  SdpProblem p;
  p.direction = Direction::Minimize;
  int x = p.add_block("x", 3, Cone::Psd);
  p.set_objective(x, c.mat());
  p.add_constraint({"norm", 1, Sense::Eq, scalar(1.0),
                    {{x, LinMap::inner_map(MatrixXcd::Identity(3, 3))}}});
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.primal_value ==
        doctest::Approx(spectral(c).eigenvalues(0)).epsilon(1e-7));
  const MatrixXcd& xv = s.block(p, "x");
  CHECK(std::abs(xv.trace().real() - 1.0) < 1e-7);
}

TEST_CASE("complex objective data routes through the embedding") {
  SdpProblem p;
  p.direction = Direction::Maximize;
  int x = p.add_block("x", 2, Cone::Psd);
  p.set_objective(x, pauli(2));  // purely imaginary off-diagonal entries
  p.add_constraint({"norm", 1, Sense::Le, scalar(1.0),
                    {{x, LinMap::inner_map(MatrixXcd::Identity(2, 2))}}});
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-7));
  // optimizer is the +1 eigenprojector of the objective
  const MatrixXcd& xv = s.block(p, "x");
  CHECK((pauli(2) * xv - xv).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("infeasible primal yields a Farkas certificate") {
  SdpProblem p;
  p.direction = Direction::Minimize;
  int x = p.add_block("x", 2, Cone::Psd);
  p.set_objective(x, MatrixXcd::Zero(2, 2));
  p.add_constraint({"impossible", 1, Sense::Le, scalar(-1.0),
                    {{x, LinMap::inner_map(MatrixXcd::Identity(2, 2))}}});
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::PrimalInfeasible);
  REQUIRE(s.cert_duals.size() == 1);
  CHECK(s.cert_quality < 1e-5);
  // multiplier is a strictly positive scalar: y*Tr[X] <= -y is impossible
  CHECK(s.cert_duals[0](0, 0).real() > 1e-12);
  CHECK(std::abs(s.cert_duals[0](0, 0).imag()) < 1e-12);
}

TEST_CASE("unbounded objective yields an improving ray") {
  SdpProblem p;
  p.direction = Direction::Maximize;
  int x = p.add_block("x", 2, Cone::Psd);
  p.set_objective(x, MatrixXcd::Identity(2, 2));
  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  p.add_constraint({"skew", 1, Sense::Le, scalar(1.0),
                    {{x, LinMap::inner_map(d)}}});
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::DualInfeasible);
  REQUIRE(s.cert_blocks.size() == 1);
  CHECK(s.cert_quality < 1e-5);
  const MatrixXcd& ray = s.cert_blocks[0];
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(ray, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) > -1e-6);            // ray stays in the cone
  CHECK(ray.trace().real() > 1e-8);              // objective improves along it
  CHECK((d * ray).trace().real() < 1e-6);        // constraint image does not grow
}

TEST_CASE("dualize preserves the optimal value") {
  auto g = tt::rng(55);
  HermitianOp c = tt::random_hermitian(g, {3});
  SdpProblem p;
  p.direction = Direction::Minimize;
  int x = p.add_block("x", 3, Cone::Psd);
  p.set_objective(x, c.mat());
  p.add_constraint({"norm", 1, Sense::Eq, scalar(1.0),
                    {{x, LinMap::inner_map(MatrixXcd::Identity(3, 3))}}});
  double want = spectral(c).eigenvalues(0);

  SdpProblem d = dualize(p);
  SdpSolution sd = solve(d);
  REQUIRE(sd.status == SdpStatus::Optimal);
  CHECK(sd.primal_value == doctest::Approx(want).epsilon(1e-6));

  SdpProblem dd = dualize(d);
  SdpSolution sdd = solve(dd);
  REQUIRE(sdd.status == SdpStatus::Optimal);
  CHECK(sdd.primal_value == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("slater probe separates strict interiors from boundaries") {
  SdpProblem strict;
  strict.direction = Direction::Maximize;
  int x = strict.add_block("x", 2, Cone::Psd);
  strict.set_objective(x, MatrixXcd::Identity(2, 2));
  strict.add_constraint({"cap", 2, Sense::Le, MatrixXcd::Identity(2, 2),
                         {{x, LinMap::identity(2)}}});
  SlaterReport r1 = slater_check(strict);
  CHECK(r1.verdict == SlaterVerdict::StrictlyFeasible);
  CHECK(r1.margin > 0.1);

  SdpProblem boundary;
  boundary.direction = Direction::Maximize;
  int y = boundary.add_block("x", 2, Cone::Psd);
  boundary.set_objective(y, MatrixXcd::Identity(2, 2));
  boundary.add_constraint({"pin", 2, Sense::Le, MatrixXcd::Zero(2, 2),
                           {{y, LinMap::identity(2)}}});
  SlaterReport r2 = slater_check(boundary);
  CHECK(r2.verdict == SlaterVerdict::BoundaryOnly);
  CHECK(std::abs(r2.margin) < 1e-6);
}

TEST_CASE("resource budgets are enforced up front") {
  SdpProblem p;
  p.direction = Direction::Minimize;
  int x = p.add_block("x", 6, Cone::Psd);
  p.set_objective(x, MatrixXcd::Identity(6, 6));
  p.add_constraint({"norm", 1, Sense::Eq, scalar(1.0),
                    {{x, LinMap::inner_map(MatrixXcd::Identity(6, 6))}}});
  SdpOptions tiny_side;
  tiny_side.max_block_side = 4;
  CHECK_THROWS_AS(solve(p, tiny_side), budget_error);
  SdpOptions tiny_rows;
  tiny_rows.max_rows = 0;
  CHECK_THROWS_AS(solve(p, tiny_rows), budget_error);
}

TEST_CASE("validate rejects malformed problems") {
  SdpProblem p;
  int x = p.add_block("x", 2, Cone::Psd);
  p.set_objective(x, MatrixXcd::Identity(2, 2));
  SdpConstraint con{"bad", 2, Sense::Le, MatrixXcd::Identity(3, 3),
                    {{x, LinMap::identity(2)}}};
  p.add_constraint(con);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(p.block_index("nope"), std::invalid_argument);
}
