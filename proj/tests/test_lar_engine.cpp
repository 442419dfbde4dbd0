#include <doctest.h>

#include "larinf/lar_engine.hpp"
#include "test_support.hpp"

using namespace larinf;
using namespace larinf::testing;

namespace {

CorrelationState make_state(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return build_correlation_state(DesignMatrix(X), ResponseVector(y));
}

using PathFn = LarPath (*)(const CorrelationState&, int);
constexpr PathFn kFormulations[] = {lar_path_standard, lar_path_projected,
                                    lar_path_recursive};

}  // namespace

TEST_SUITE("lar_engine") {

TEST_CASE("identity design recovers sorted coefficients") {
  Eigen::VectorXd y(3);
  y << 3, 2, 1;
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(3, 3), y);
  for (PathFn fn : kFormulations) {
    const LarPath path = fn(state, 2);
    REQUIRE(path.size() == 3);
    CHECK(path.status == PathStatus::complete);
    for (int k = 0; k < 3; ++k) {
      CHECK(path.knots[k] == doctest::Approx(3.0 - k));
      CHECK(path.entered[k].plain == k);
      CHECK(path.entered[k].sign == +1);
    }
    CHECK(path.irrepresentable_upto == 3);  // all theta vanish along every prefix
    CHECK_FALSE(path.tie_flag);
  }
}

TEST_CASE("signs are picked from the correlation direction") {
  Eigen::VectorXd y(2);
  y << -2, 1;
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(2, 2), y);
  for (PathFn fn : kFormulations) {
    const LarPath path = fn(state, 1);
    REQUIRE(path.size() == 2);
    CHECK(path.knots[0] == doctest::Approx(2.0));
    CHECK(path.entered[0].plain == 0);
    CHECK(path.entered[0].sign == -1);
    CHECK(path.knots[1] == doctest::Approx(1.0));
    CHECK(path.entered[1].plain == 1);
    CHECK(path.entered[1].sign == +1);
  }
}

TEST_CASE("orthogonal knots are the order statistics of |Z|") {
  RngStream rng(31, 0);
  const Eigen::VectorXd y = random_vector(8, rng);
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(8, 8), y);
  std::vector<double> sorted(8);
  for (int j = 0; j < 8; ++j) sorted[j] = std::fabs(y[j]);
  std::sort(sorted.rbegin(), sorted.rend());
  const LarPath path = lar_path_projected(state, 5);
  REQUIRE(path.size() == 6);
  for (int k = 0; k < 6; ++k)
    CHECK(path.knots[k] == doctest::Approx(sorted[k]).epsilon(1e-12));
}

TEST_CASE("all formulations match the from-scratch dense oracle") {
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng(500 + trial, 0);
    const int n = 20, p = 30, steps = 6;
    const Eigen::MatrixXd X = random_matrix(n, p, rng);
    const Eigen::VectorXd y = random_vector(n, rng);
    const CorrelationState state = make_state(X, y);
    const NaivePath oracle = naive_lar(X.transpose() * X, X.transpose() * y, steps);
    REQUIRE(oracle.knots.size() == static_cast<std::size_t>(steps + 1));
    for (PathFn fn : kFormulations) {
      const LarPath path = fn(state, steps);
      REQUIRE(path.size() == steps + 1);
      for (int k = 0; k <= steps; ++k) {
        CHECK(path.entered[k].raw(p) == oracle.raw[k]);
        CHECK(path.knots[k] ==
              doctest::Approx(oracle.knots[k]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("knots are nonincreasing") {
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng(900 + trial, 0);
    const Eigen::MatrixXd X = random_matrix(15, 25, rng);
    const Eigen::VectorXd y = random_vector(15, rng);
    const CorrelationState state = make_state(X, y);
    const LarPath path = lar_path_recursive(state, 8);
    for (int k = 1; k < path.size(); ++k)
      CHECK(path.knots[k] <= path.knots[k - 1] + 1e-12);
  }
}

TEST_CASE("exact ties resolve to the lowest raw signed index") {
  Eigen::VectorXd y(2);
  y << 2, 2;
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(2, 2), y);
  for (PathFn fn : kFormulations) {
    const LarPath path = fn(state, 1);
    CHECK(path.tie_flag);
    CHECK(path.entered[0].plain == 0);
    CHECK(path.entered[0].sign == +1);
  }
}

TEST_CASE("rank-deficient designs truncate with a status") {
  RngStream rng(41, 0);
  const Eigen::MatrixXd X = random_matrix(3, 6, rng);  // rank 3
  const Eigen::VectorXd y = random_vector(3, rng);
  const CorrelationState state = make_state(X, y);
  for (PathFn fn : kFormulations) {
    const LarPath path = fn(state, 5);
    CHECK(path.size() < 6);
    CHECK(path.status != PathStatus::complete);
  }
}

TEST_CASE("theta diagnostics agree across formulations") {
  RngStream rng(43, 0);
  const Eigen::MatrixXd X = random_matrix(25, 12, rng);
  const Eigen::VectorXd y = random_vector(25, rng);
  const CorrelationState state = make_state(X, y);
  const LarPath a = lar_path_projected(state, 6);
  const LarPath b = lar_path_recursive(state, 6);
  const LarPath c = lar_path_standard(state, 6);
  REQUIRE(a.theta_max.size() == b.theta_max.size());
  REQUIRE(a.theta_max.size() == c.theta_max.size());
  // Recursive T vector against the factorization-based theta, via the shared
  // max-over-inactive diagnostic per prefix.
  for (std::size_t k = 0; k < a.theta_max.size(); ++k) {
    CHECK(b.theta_max[k] == doctest::Approx(a.theta_max[k]).epsilon(1e-10));
    CHECK(c.theta_max[k] == doctest::Approx(a.theta_max[k]).epsilon(1e-10));
  }
  CHECK(a.irrepresentable_upto == b.irrepresentable_upto);
  CHECK(irrepresentable_check(state, a, a.K()) == a.irrepresentable_upto);
}

TEST_CASE("irrepresentable check passes fully on orthogonal designs") {
  RngStream rng(47, 0);
  const Eigen::VectorXd y = random_vector(10, rng);
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(10, 10), y);
  const LarPath path = lar_path_recursive(state, 7);
  CHECK(irrepresentable_check(state, path, 7) == 7);
  CHECK(path.irrepresentable_upto >= 7);
}

TEST_CASE("a dominated collinear twin fails the check where it is inactive") {
  // x2 = 2 * (0.999 x1 + eps u): theta_{x2}(x1) ~ 2 * 0.999 > 1, so the check
  // fails already at the first step while LAR still selects x1 first.
  const int n = 30, p = 4;
  RngStream rng(53, 0);
  Eigen::MatrixXd U = random_matrix(n, p, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::MatrixXd X(n, p);
  X.col(0) = Q.col(0);
  X.col(1) = 2.0 * (0.999 * Q.col(0) + std::sqrt(1.0 - 0.999 * 0.999) * Q.col(1));
  X.col(2) = Q.col(2);
  X.col(3) = Q.col(3);
  // Anti-correlate the response with the twin's orthogonal component so that
  // x1 still enters first despite the twin's larger norm.
  Eigen::VectorXd y = 5.0 * Q.col(0) - 60.0 * Q.col(1) + 0.01 * Q.col(3);

  const CorrelationState state = make_state(X, y);
  const LarPath path = lar_path_recursive(state, 2);
  REQUIRE(path.entered[0].plain == 0);

  // X-space oracle: X_j^T X_T (X_T^T X_T)^{-1} s for T = {x1}, s = +1.
  const double xspace =
      X.col(1).dot(X.col(0)) / X.col(0).squaredNorm() * path.entered[0].sign;
  CHECK(xspace > 1.0);
  ActiveSequence active(state);
  active.extend(state, path.entered[0]);
  CHECK(theta(state, active, SignedIndex{1, +1}) ==
        doctest::Approx(xspace).epsilon(1e-10));
  CHECK(irrepresentable_check(state, path, 1) == 0);
  CHECK(path.irrepresentable_upto == 0);
}

TEST_CASE("check arguments are validated") {
  RngStream rng(59, 0);
  const Eigen::VectorXd y = random_vector(4, rng);
  const CorrelationState state = make_state(Eigen::MatrixXd::Identity(4, 4), y);
  const LarPath path = lar_path_recursive(state, 2);
  CHECK_THROWS_AS(irrepresentable_check(state, path, 10), std::invalid_argument);
  CHECK_THROWS_AS(lar_path_recursive(state, -1), std::invalid_argument);
}

}  // TEST_SUITE
