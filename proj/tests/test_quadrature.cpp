#include <doctest.h>

#include <cmath>

#include "larinf/quadrature.hpp"
#include "larinf/special.hpp"
#include "test_support.hpp"

using namespace larinf;
using namespace larinf::testing;

TEST_SUITE("quadrature") {

TEST_CASE("normal cdf/quantile primitives") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {-5.0, -1.3, -0.2, 0.0, 0.7, 2.4, 6.0}) {
    const double viaerf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
    CHECK(norm_cdf(x) == doctest::Approx(viaerf).epsilon(1e-14));
    CHECK(norm_cdf(x) + norm_sf(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Roundtrip through the CDF saturates near x ~ 6 (ulp(1)/phi(x) dominates),
  // so the check stays below 5; the p-space loop below covers the far tails.
  for (double x : {-5.0, -1.3, -0.2, 0.0, 0.7, 2.4, 4.9})
    CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  for (double pr : {1e-300, 1e-30, 1e-12, 0.3, 0.97, 1.0 - 1e-12}) {
    CHECK(norm_cdf(norm_quantile(pr)) == doctest::Approx(pr).epsilon(1e-10));
  }
  CHECK(std::isinf(norm_quantile(0.0)));
  CHECK(std::isinf(norm_quantile(1.0)));
  CHECK_THROWS_AS(norm_quantile(-0.1), std::invalid_argument);
}

TEST_CASE("incomplete beta and student cdf") {
  for (double x : {0.05, 0.3, 0.77}) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 5.0}, {0.5, 7.5}}) {
      CHECK(incomplete_beta(a, b, x) ==
            doctest::Approx(1.0 - incomplete_beta(b, a, 1.0 - x)).epsilon(1e-12));
    }
    CHECK(beta_cdf(x, 1.0, 1.0) == doctest::Approx(x).epsilon(1e-13));
    CHECK(beta_cdf(x, 2.0, 1.0) == doctest::Approx(x * x).epsilon(1e-13));
  }
  // nu = 1 is Cauchy.
  for (double t : {-3.0, -0.4, 0.0, 1.1, 8.0}) {
    const double cauchy = 0.5 + std::atan(t) / 3.14159265358979323846;
    CHECK(student_cdf(t, 1.0) == doctest::Approx(cauchy).epsilon(1e-12));
    CHECK(student_cdf(t, 1.0) + student_sf(t, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
  // Large nu approaches the normal law.
  for (double t : {-2.0, 0.3, 1.7})
    CHECK(std::fabs(student_cdf(t, 1e6) - norm_cdf(t)) < 2e-6);
}

TEST_CASE("lattice rule validation") {
  CHECK_THROWS_AS(LatticeRule::korobov(0, 4093), std::invalid_argument);
  CHECK_THROWS_AS(LatticeRule::korobov(3, 1000), std::invalid_argument);
  LatticeRule bad = LatticeRule::korobov(3, 1021);
  bad.generating_vector[1] = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(LatticeRule::supported_points(16381));
  CHECK_FALSE(LatticeRule::supported_points(16384));
}

TEST_CASE("constant integrands are exact") {
  const LatticeRule rule = LatticeRule::korobov(4, 1021, 8, 42);
  const QmcEstimate est = lattice_integrate([](const double*) { return 1.0; }, rule);
  CHECK(est.value == 1.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("linear and product moments") {
  {
    const LatticeRule rule = LatticeRule::korobov(3, 4093, 16, 7);
    const QmcEstimate est =
        lattice_integrate([](const double* u) { return u[0]; }, rule);
    CHECK(std::fabs(est.value - 0.5) <= 3.0 * est.std_error + 1e-12);
  }
  {
    const LatticeRule rule = LatticeRule::korobov(5, 4093, 16, 8);
    const QmcEstimate est = lattice_integrate(
        [](const double* u) {
          double prod = 1.0;
          for (int d = 0; d < 5; ++d) prod *= u[d];
          return prod;
        },
        rule);
    CHECK(std::fabs(est.value - 0.03125) <= 3.0 * est.std_error + 1e-12);
  }
}

TEST_CASE("randomized estimator is unbiased across seeds") {
  const double truth = 1.0 / 8.0;  // product of three coordinates
  std::vector<double> values;
  for (int seed = 0; seed < 100; ++seed) {
    const LatticeRule rule = LatticeRule::korobov(3, 1021, 4, 1000 + seed);
    values.push_back(lattice_integrate(
                         [](const double* u) { return u[0] * u[1] * u[2]; }, rule)
                         .value);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double sd = 0.0;
  for (double v : values) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / (values.size() - 1));
  // t-test at the 1% level, 99 degrees of freedom.
  CHECK(std::fabs(mean - truth) <= 2.626 * sd / std::sqrt(100.0));
}

TEST_CASE("determinism is bit-exact given the seed") {
  const LatticeRule rule = LatticeRule::korobov(4, 4093, 16, 12345);
  const auto f = [](const double* u) { return std::exp(u[0] - u[2]) * u[3]; };
  const QmcEstimate a = lattice_integrate(f, rule);
  const QmcEstimate b = lattice_integrate(f, rule);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  LatticeRule other = rule;
  other.seed = 54321;
  CHECK(lattice_integrate(f, other).value != a.value);
}

TEST_CASE("non-finite integrand values are reported with the point") {
  const LatticeRule rule = LatticeRule::korobov(2, 1021, 2, 3);
  CHECK_THROWS_AS(lattice_integrate(
                      [](const double* u) {
                        return u[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                          : 0.0;
                      },
                      rule),
                  EstimateFailure);
}

TEST_CASE("nested_I conventions") {
  const std::vector<double> rho = {1.0, 1.0, 1.0, 1.0, 1.0};
  const LatticeRule rule = LatticeRule::korobov(1, 1021, 8, 5);
  const QmcEstimate one = nested_I(rho, 1.0, 2, 3, 0.8, 0.2, rule);
  CHECK(one.value == 1.0);
  CHECK(one.exact);
  // Empty region short-circuits to exact zero.
  const QmcEstimate zero = nested_I(rho, 1.0, 1, 3, 0.2, 0.8, rule);
  CHECK(zero.value == 0.0);
  CHECK(zero.exact);
}

TEST_CASE("nested_I equal-scale volume is a simplex volume") {
  // All scales equal: I_ab(s, t) = (s - t)^(b-a-1) / (b-a-1)!.
  const std::vector<double> rho = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const LatticeRule rule = LatticeRule::korobov(3, 4093, 16, 11);
  const QmcEstimate est = nested_I(rho, 1.0, 1, 5, 0.9, 0.1, rule);
  const double expect = std::pow(0.8, 3) / 6.0;
  CHECK(std::fabs(est.value - expect) <= 3.0 * est.std_error + 1e-9);
}

TEST_CASE("nested_I two-fold case matches dense 2-D quadrature") {
  const std::vector<double> rho = {1.0, 1.0, 1.3, 0.8, 1.1};
  const int a = 1, b = 4;
  const double s = 0.85, t = 0.2;
  const LatticeRule rule = LatticeRule::korobov(2, 4093, 16, 13);
  const QmcEstimate est = nested_I(rho, 1.0, a, b, s, t, rule);

  const auto pmap = [&](int i, int j, double f) {
    return norm_cdf(rho[j] / rho[i] * norm_quantile(f));
  };
  const double f2_hi = pmap(2, 1, s), f2_lo = pmap(2, 4, t);
  const double oracle = adaptive_simpson(
      [&](double f2) {
        const double hi = pmap(3, 2, f2), lo = pmap(3, 4, t);
        return hi > lo ? hi - lo : 0.0;
      },
      f2_lo, f2_hi, 1e-12);
  CHECK(std::fabs(est.value - oracle) <= 3.0 * est.std_error + 1e-4);
}

TEST_CASE("F_abc honors its indicator and degenerate cases") {
  const std::vector<double> rho = {1.0, 1.0, 1.2, 0.9};
  const LatticeRule rule = LatticeRule::korobov(2, 1021, 4, 17);
  CHECK(F_abc(rho, 1.0, 2.0, 0.5, 0.5, 0, 1, 3, rule).value == 0.0);  // t = lambda_c
  CHECK(F_abc(rho, 1.0, 2.0, 0.5, 2.5, 1, 2, 3,
              LatticeRule::korobov(1, 1021, 4, 17))
            .value == 0.0);  // t above lambda_a
  CHECK(F_abc(rho, 1.0, 2.0, 0.5, 0.2, 1, 2, 3,
              LatticeRule::korobov(1, 1021, 4, 17))
            .value == 0.0);  // t below lambda_c
}

TEST_CASE("consecutive F_abc is the plain Gaussian interval") {
  const std::vector<double> rho = {1.0, 1.1, 0.8, 1.4};
  const LatticeRule rule = LatticeRule::korobov(1, 4093, 16, 19);
  const double la = 2.1, lc = 0.4, t = 1.3, sigma = 0.9;
  const QmcEstimate est = F_abc(rho, sigma, la, lc, t, 1, 2, 3, rule);
  const double expect =
      norm_cdf(t / (sigma * rho[2])) - norm_cdf(lc / (sigma * rho[2]));
  CHECK(est.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("F_abc is nondecreasing in t up to QMC noise") {
  const std::vector<double> rho = {1.0, 1.3, 0.7, 1.1, 0.9, 1.2};
  const LatticeRule rule = LatticeRule::korobov(3, 4093, 16, 23);
  const double la = 2.2, lc = 0.1;
  double prev = -1.0, prev_se = 0.0;
  for (double t = 0.3; t <= 2.1; t += 0.3) {
    const QmcEstimate est = F_abc(rho, 1.0, la, lc, t, 1, 3, 5, rule);
    CHECK(est.value >= prev - 3.0 * (est.std_error + prev_se));
    prev = est.value;
    prev_se = est.std_error;
  }
}

TEST_CASE("orthogonal F_abc ratio matches the Beta law") {
  const std::vector<double> rho = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  for (int trial = 0; trial < 5; ++trial) {
    RngStream rng(200 + trial, 0);
    double la = 1.0 + rng.next_double(), lc = rng.next_double() * 0.5;
    double lb = lc + (la - lc) * rng.next_double();
    const int a = 1, b = 2 + static_cast<int>(rng.next_u64() % 2), c = 5;
    const LatticeRule rule = LatticeRule::korobov(c - a - 1, 4093, 16, 300 + trial);
    const QmcEstimate num = F_abc(rho, 1.0, la, lc, lb, a, b, c, rule);
    const QmcEstimate den = F_abc(rho, 1.0, la, lc, la, a, b, c, rule);
    const double ratio = num.value / den.value;
    const double se = num.std_error / den.value +
                      den.std_error * num.value / (den.value * den.value);
    const double Fa = norm_cdf(la), Fb = norm_cdf(lb), Fc = norm_cdf(lc);
    const double expect = beta_cdf((Fb - Fc) / (Fa - Fc), c - b, b - a);
    CHECK(std::fabs(ratio - expect) <= 3.0 * se + 1e-3);
    // And the shortcut agrees by construction.
    CHECK(ortho_pvalue_shortcut(Fa, Fb, Fc, a, b, c) ==
          doctest::Approx(1.0 - expect).epsilon(1e-12));
  }
}

TEST_CASE("tilde_F_abc conventions and consecutive 1-D reduction") {
  const std::vector<double> rho = {1.0, 1.2, 0.9, 1.05};
  const int nu = 11;
  const LatticeRule rule1 = LatticeRule::korobov(1, 4093, 16, 29);
  CHECK(tilde_F_abc(rho, nu, 2.0, 0.3, 0.3, 1, 2, 3, rule1).value == 0.0);

  const double La = 2.0, Lc = 0.3, t = 1.1;
  const QmcEstimate est = tilde_F_abc(rho, nu, La, Lc, t, 1, 2, 3, rule1);
  const double oracle = adaptive_simpson(
      [&](double x) {
        const double r = x / rho[2];
        return std::exp(-0.5 * (nu + 1) * std::log1p(r * r / nu));
      },
      Lc, t, 1e-14);
  CHECK(std::fabs(est.value - oracle) <= 1e-5 * oracle);
}

TEST_CASE("tilde_F_abc at huge nu approaches the Gaussian ratio") {
  const std::vector<double> rho = {1.0, 1.15, 0.85, 1.0, 1.3};
  const int nu = 1000000;
  const int a = 1, b = 2, c = 4;
  const double La = 2.4, Lc = 0.2, t = 1.5;
  const LatticeRule rule = LatticeRule::korobov(c - a - 1, 4093, 16, 31);
  const QmcEstimate tn = tilde_F_abc(rho, nu, La, Lc, t, a, b, c, rule);
  const QmcEstimate td = tilde_F_abc(rho, nu, La, Lc, La, a, b, c, rule);
  const QmcEstimate gn = F_abc(rho, 1.0, La, Lc, t, a, b, c, rule);
  const QmcEstimate gd = F_abc(rho, 1.0, La, Lc, La, a, b, c, rule);
  const double tr = tn.value / td.value;
  const double gr = gn.value / gd.value;
  const double se = (tn.std_error + gn.std_error) / gd.value +
                    (td.std_error + gd.std_error) * gr / gd.value;
  CHECK(std::fabs(tr - gr) <= 1e-3 + 3.0 * se);
}

TEST_CASE("shortcut closed forms") {
  CHECK(ortho_pvalue_shortcut(1.0, 0.5, 0.0, 0, 1, 2) == doctest::Approx(0.5));
  // Beta(1,1) is uniform: p = 1 - (F_b - F_c) / (F_a - F_c).
  CHECK(ortho_pvalue_shortcut(0.9, 0.7, 0.1, 2, 3, 4) ==
        doctest::Approx(1.0 - 0.6 / 0.8).epsilon(1e-13));
  CHECK_THROWS_AS(ortho_pvalue_shortcut(0.5, 0.7, 0.1, 0, 1, 2),
                  std::invalid_argument);
}

TEST_CASE("shortcut matches an order-statistics Monte Carlo oracle") {
  // (b - a, c - b) = (2, 3): the normalized middle value is the 2nd largest
  // of 4 ordered uniforms.
  const int a = 1, b = 3, c = 6;
  const double x0 = 0.55;
  RngStream rng(401, 0);
  const int draws = 1000000;
  int count = 0;
  for (int r = 0; r < draws; ++r) {
    double u[4];
    for (double& v : u) v = rng.next_double();
    std::sort(u, u + 4);
    if (u[2] <= x0) ++count;  // 2nd largest = 3rd smallest of 4
  }
  const double mc = static_cast<double>(count) / draws;
  const double se = std::sqrt(mc * (1.0 - mc) / draws);
  const double Fc = 0.1, Fa = 0.9;
  const double Fb = Fc + x0 * (Fa - Fc);
  const double p = ortho_pvalue_shortcut(Fa, Fb, Fc, a, b, c);
  CHECK(std::fabs((1.0 - p) - mc) <= 3.0 * se);
}

}  // TEST_SUITE
