#include <doctest.h>

#include "larinf/model_core.hpp"
#include "test_support.hpp"

using namespace larinf;
using namespace larinf::testing;

TEST_SUITE("model_core") {

TEST_CASE("identity design doubles the correlation vector") {
  DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd y(3);
  y << 3, -2, 1;
  const CorrelationState state = build_correlation_state(X, ResponseVector(y));
  CHECK(state.p() == 3);
  const double zexp[6] = {3, -2, 1, -3, 2, -1};
  for (int raw = 0; raw < 6; ++raw)
    CHECK(state.z(SignedIndex::from_raw(raw, 3)) == doctest::Approx(zexp[raw]));
  CHECK(state.gram().isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("single predictor") {
  Eigen::MatrixXd c(4, 1);
  c << 1, 2, -1, 0.5;
  const CorrelationState state =
      build_correlation_state(DesignMatrix(c), ResponseVector(c.col(0)));
  CHECK(state.zbar(0) == doctest::Approx(c.col(0).squaredNorm()).epsilon(1e-15));
  CHECK(state.gram()(0, 0) == doctest::Approx(c.col(0).squaredNorm()).epsilon(1e-15));
}

TEST_CASE("random instance matches a direct matrix-product oracle") {
  RngStream rng(7, 0);
  const Eigen::MatrixXd X = random_matrix(5, 4, rng);
  const Eigen::VectorXd y = random_vector(5, rng);
  const CorrelationState state =
      build_correlation_state(DesignMatrix(X), ResponseVector(y));
  for (int j = 0; j < 4; ++j) {
    double zj = 0.0;
    for (int i = 0; i < 5; ++i) zj += X(i, j) * y[i];
    CHECK(state.zbar(j) == doctest::Approx(zj).epsilon(1e-12));
    for (int l = 0; l < 4; ++l) {
      double g = 0.0;
      for (int i = 0; i < 5; ++i) g += X(i, j) * X(i, l);
      CHECK(state.gram()(j, l) == doctest::Approx(g).epsilon(1e-12));
    }
  }
}

TEST_CASE("rejected inputs") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(2);
  y << 1, 2;
  CHECK_THROWS_AS(build_correlation_state(DesignMatrix(X), ResponseVector(y)),
                  std::invalid_argument);

  Eigen::MatrixXd Xz = Eigen::MatrixXd::Identity(3, 3);
  Xz.col(1).setZero();
  Eigen::VectorXd y3 = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(build_correlation_state(DesignMatrix(Xz), ResponseVector(y3)),
                  std::invalid_argument);

  const Eigen::VectorXd bad_truth = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(
      build_correlation_state(DesignMatrix(X), ResponseVector(y3), bad_truth),
      std::invalid_argument);
}

TEST_CASE("theta vanishes for orthogonal designs") {
  RngStream rng(11, 0);
  const CorrelationState state = build_correlation_state(
      DesignMatrix(Eigen::MatrixXd::Identity(5, 5)),
      ResponseVector(random_vector(5, rng)));
  ActiveSequence active(state);
  active.extend(state, SignedIndex{2, +1});
  active.extend(state, SignedIndex{4, -1});
  for (int j : {0, 1, 3}) {
    CHECK(theta(state, active, SignedIndex{j, +1}) == doctest::Approx(0.0));
    CHECK(pi_projection(state, active, SignedIndex{j, -1}) == doctest::Approx(0.0));
  }
}

TEST_CASE("single-element active set reduces to a ratio") {
  RngStream rng(13, 0);
  const Eigen::MatrixXd X = random_matrix(8, 3, rng);
  const CorrelationState state =
      build_correlation_state(DesignMatrix(X), ResponseVector(random_vector(8, rng)));
  const SignedIndex i1{1, -1};
  ActiveSequence active(state);
  active.extend(state, i1);
  for (int j : {0, 2}) {
    for (int s : {+1, -1}) {
      const SignedIndex sj{j, s};
      const double expect_theta = state.r(sj, i1) / state.r(i1, i1);
      CHECK(theta(state, active, sj) == doctest::Approx(expect_theta).epsilon(1e-14));
      const double expect_pi = state.z(i1) * state.r(sj, i1) / state.r(i1, i1);
      CHECK(pi_projection(state, active, sj) ==
            doctest::Approx(expect_pi).epsilon(1e-14));
    }
  }
}

TEST_CASE("two-element active set matches an explicit 2x2 inversion") {
  RngStream rng(17, 0);
  const Eigen::MatrixXd X = random_matrix(10, 3, rng);
  const CorrelationState state =
      build_correlation_state(DesignMatrix(X), ResponseVector(random_vector(10, rng)));
  const SignedIndex i1{0, +1}, i2{2, -1};
  ActiveSequence active(state);
  active.extend(state, i1);
  active.extend(state, i2);

  const double m11 = state.r(i1, i1), m12 = state.r(i1, i2), m22 = state.r(i2, i2);
  const double det = m11 * m22 - m12 * m12;
  const SignedIndex j{1, +1};
  const double r1 = state.r(j, i1), r2 = state.r(j, i2);
  // (r1 r2) M^{-1} (1 1)^T by the adjugate formula.
  const double expect =
      (r1 * (m22 - m12) + r2 * (m11 - m12)) / det;
  CHECK(theta(state, active, j) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("errors: active index and singular extension") {
  RngStream rng(19, 0);
  Eigen::MatrixXd X = random_matrix(6, 3, rng);
  X.col(2) = 2.0 * X.col(0);  // exactly collinear pair
  const CorrelationState state =
      build_correlation_state(DesignMatrix(X), ResponseVector(random_vector(6, rng)));
  ActiveSequence active(state);
  active.extend(state, SignedIndex{0, +1});
  CHECK_THROWS_AS(theta(state, active, SignedIndex{0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(active.extend(state, SignedIndex{2, +1}), SingularMatrixError);
}

TEST_CASE("signed-index encoding is self-consistent") {
  const int p = 7;
  for (int raw = 0; raw < 2 * p; ++raw) {
    const SignedIndex i = SignedIndex::from_raw(raw, p);
    CHECK(i.raw(p) == raw);
    CHECK((i.sign == 1 || i.sign == -1));
    CHECK(i.partner(p).raw(p) == (raw + p) % (2 * p));
  }
  CHECK_THROWS_AS(SignedIndex::from_raw(2 * p, p), std::invalid_argument);
}

TEST_CASE("agrees with dense doubled-system inversion for p <= 8") {
  for (int p = 2; p <= 8; ++p) {
    RngStream rng(100 + p, 0);
    const Eigen::MatrixXd X = random_matrix(p + 4, p, rng);
    const Eigen::VectorXd y = random_vector(p + 4, rng);
    const CorrelationState state =
        build_correlation_state(DesignMatrix(X), ResponseVector(y));
    const DoubledSystem d = doubled_system(state.gram(),
                                           X.transpose() * y);

    for (int trial = 0; trial < 4; ++trial) {
      // Random active sequence with distinct plain indices and random signs.
      std::vector<int> order(p);
      for (int j = 0; j < p; ++j) order[j] = j;
      for (int j = 0; j < p; ++j)
        std::swap(order[j], order[j + rng.next_u64() % (p - j)]);
      const int k = 1 + static_cast<int>(rng.next_u64() % (p - 1));

      ActiveSequence active(state);
      std::vector<int> active_raw;
      for (int t = 0; t < k; ++t) {
        const int sign = (rng.next_u64() & 1) ? +1 : -1;
        const SignedIndex idx{order[t], sign};
        active.extend(state, idx);
        active_raw.push_back(idx.raw(p));
      }
      for (int t = k; t < p; ++t) {
        for (int s : {+1, -1}) {
          const SignedIndex j{order[t], s};
          const double th = theta(state, active, j);
          const double pi = pi_projection(state, active, j);
          CHECK(th == doctest::Approx(dense_theta(d, active_raw, j.raw(p)))
                          .epsilon(1e-9));
          CHECK(pi == doctest::Approx(dense_pi(d, active_raw, j.raw(p)))
                          .epsilon(1e-9));
          // Antisymmetry under the signed-index pairing.
          CHECK(theta(state, active, j.partner(p)) == doctest::Approx(-th));
          CHECK(pi_projection(state, active, j.partner(p)) == doctest::Approx(-pi));
        }
      }
    }
  }
}

TEST_CASE("incremental extension equals recomputation from scratch") {
  RngStream rng(23, 0);
  const Eigen::MatrixXd X = random_matrix(12, 6, rng);
  const CorrelationState state =
      build_correlation_state(DesignMatrix(X), ResponseVector(random_vector(12, rng)));

  ActiveSequence incremental(state);
  std::vector<SignedIndex> chosen = {{0, +1}, {3, -1}, {1, +1}, {5, -1}};
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    incremental.extend(state, chosen[k]);
    ActiveSequence scratch(state);
    for (std::size_t t = 0; t <= k; ++t) scratch.extend(state, chosen[t]);
    for (int j : {2, 4}) {
      const SignedIndex sj{j, +1};
      CHECK(theta(state, incremental, sj) ==
            doctest::Approx(theta(state, scratch, sj)).epsilon(1e-12));
      CHECK(pi_projection(state, incremental, sj) ==
            doctest::Approx(pi_projection(state, scratch, sj)).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
