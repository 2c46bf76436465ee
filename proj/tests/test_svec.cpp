#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pptmc/svec.hpp"

using namespace pptmc;
namespace tt = pptmc::testing;

namespace {

// |csvec coordinates of op(X)  minus  map.apply(csvec X)|, maximized over a
// few random Hermitian inputs
double builder_gap(const LinMap& map,
                   const std::function<MatrixXcd(const MatrixXcd&)>& op,
                   int seed) {
  auto g = tt::rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    MatrixXcd x =
        tt::random_hermitian(g, {map.in_side()}).mat();
    VectorXd got = map.apply(csvec(x));
    VectorXd want = csvec(op(x));
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    // apply_op must agree with apply up to coordinates
    worst = std::max(worst, (csvec(map.apply_op(x)) - got).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("csvec is an isometry onto R^(n^2)") {
  auto g = tt::rng(21);
  for (int n : {1, 2, 3, 4}) {
    CHECK(csvec_dim(n) == n * n);
    MatrixXcd a = tt::random_hermitian(g, {n}).mat();
    MatrixXcd b = tt::random_hermitian(g, {n}).mat();
    double dot = csvec(a).dot(csvec(b));
    double tr = (a * b).trace().real();
    CHECK(dot == doctest::Approx(tr).epsilon(1e-12));
    CHECK((csmat(csvec(a), n) - a).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("pair_index enumerates the strict upper triangle") {
  int n = 4;
  std::vector<int> seen;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) seen.push_back(pair_index(i, j, n));
  }
  for (size_t k = 0; k < seen.size(); ++k) CHECK(seen[k] == static_cast<int>(k));
}

TEST_CASE("rsvec is an isometry for real symmetric matrices") {
  auto g = tt::rng(22);
  for (int n : {1, 2, 3}) {
    CHECK(rsvec_dim(n) == n * (n + 1) / 2);
    MatrixXd a = tt::random_hermitian(g, {n}).mat().real();
    a = ((a + a.transpose()) * 0.5).eval();
    MatrixXd b = tt::random_hermitian(g, {n}).mat().real();
    b = ((b + b.transpose()) * 0.5).eval();
    CHECK(rsvec(a).dot(rsvec(b)) ==
          doctest::Approx((a * b).trace()).epsilon(1e-12));
    CHECK((rsmat(rsvec(a), n) - a).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("builders agree with the dense operations they encode") {
  CHECK(builder_gap(LinMap::identity(3),
                    [](const MatrixXcd& x) { return x; }, 31) < 1e-13);
  CHECK(builder_gap(LinMap::transpose_map(3),
                    [](const MatrixXcd& x) { return x.transpose().eval(); },
                    32) < 1e-13);
  CHECK(builder_gap(LinMap::partial_transpose_map({2, 3}, 0),
                    [](const MatrixXcd& x) {
                      return partial_transpose(HermitianOp({2, 3}, x), 0).mat();
                    },
                    33) < 1e-13);
  CHECK(builder_gap(LinMap::partial_transpose_map({2, 3}, 1),
                    [](const MatrixXcd& x) {
                      return partial_transpose(HermitianOp({2, 3}, x), 1).mat();
                    },
                    34) < 1e-13);
  CHECK(builder_gap(LinMap::tensor_id_right(2, 3),
                    [](const MatrixXcd& x) {
                      return tensor(HermitianOp({2}, x),
                                    HermitianOp::identity({3}))
                          .mat();
                    },
                    35) < 1e-13);
  CHECK(builder_gap(LinMap::tensor_id_left(3, 2),
                    [](const MatrixXcd& x) {
                      return tensor(HermitianOp::identity({3}),
                                    HermitianOp({2}, x))
                          .mat();
                    },
                    36) < 1e-13);
  CHECK(builder_gap(LinMap::ptrace_map({2, 3}, {0}),
                    [](const MatrixXcd& x) {
                      return partial_trace(HermitianOp({2, 3}, x), {0}).mat();
                    },
                    37) < 1e-13);
  CHECK(builder_gap(LinMap::ptrace_map({2, 3}, {1}),
                    [](const MatrixXcd& x) {
                      return partial_trace(HermitianOp({2, 3}, x), {1}).mat();
                    },
                    38) < 1e-13);
}

TEST_CASE("inner_map contracts against a fixed operator") {
  auto g = tt::rng(39);
  MatrixXcd f = tt::random_hermitian(g, {3}).mat();
  LinMap im = LinMap::inner_map(f);
  CHECK(im.out_side() == 1);
  MatrixXcd x = tt::random_hermitian(g, {3}).mat();
  VectorXd y = im.apply(csvec(x));
  CHECK(y.size() == 1);
  CHECK(y(0) == doctest::Approx((f * x).trace().real()).epsilon(1e-12));
}

TEST_CASE("times_op_map is the adjoint of inner_map") {
  auto g = tt::rng(40);
  MatrixXcd f = tt::random_hermitian(g, {3}).mat();
  MatrixXd a = LinMap::times_op_map(f).to_matrix();
  MatrixXd b = LinMap::inner_map(f).adjoint().to_matrix();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  VectorXd t(1);
  t << 2.5;
  MatrixXcd scaled = csmat(LinMap::times_op_map(f).apply(t), 3);
  CHECK((scaled - 2.5 * f).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("adjoint satisfies the inner-product identity") {
  auto g = tt::rng(41);
  LinMap m = LinMap::ptrace_map({2, 2}, {1});
  MatrixXcd x = tt::random_hermitian(g, {2, 2}).mat();
  MatrixXcd y = tt::random_hermitian(g, {2}).mat();
  double lhs = m.apply(csvec(x)).dot(csvec(y));
  double rhs = csvec(x).dot(m.adjoint().apply(csvec(y)));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("compose, add, and scaled act like their dense counterparts") {
  LinMap pt = LinMap::partial_transpose_map({2, 2}, 0);
  LinMap tr = LinMap::ptrace_map({2, 2}, {0});
  LinMap both = compose(tr, pt);
  MatrixXd dense = tr.to_matrix() * pt.to_matrix();
  CHECK((both.to_matrix() - dense).cwiseAbs().maxCoeff() < 1e-13);

  LinMap s = add(pt, LinMap::identity(4).scaled(-2.0));
  MatrixXd dense2 = pt.to_matrix() - 2.0 * MatrixXd::Identity(16, 16);
  CHECK((s.to_matrix() - dense2).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("shape mismatches are rejected") {
  CHECK_THROWS_AS(compose(LinMap::identity(2), LinMap::identity(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(add(LinMap::identity(2), LinMap::identity(3)),
                  std::invalid_argument);
  VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(LinMap::identity(2).apply(wrong), std::invalid_argument);
}
