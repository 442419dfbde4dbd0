#ifndef LARINF_QUADRATURE_HPP
#define LARINF_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "larinf/rng.hpp"

namespace larinf {

// Non-finite integrand value; carries the offending cube point.
class EstimateFailure : public std::runtime_error {
 public:
  EstimateFailure(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point(std::move(point)) {}
  std::vector<double> point;
};

// Randomized rank-1 lattice rule: points {i * x1 + U_m} for i = 1..n_points,
// with one independent uniform shift U_m per replicate.
struct LatticeRule {
  int dim = 1;
  std::uint32_t n_points = 4093;  // prime
  std::vector<std::uint32_t> generating_vector;  // length dim, entries in [1, n-1]
  int n_shifts = 16;
  std::uint64_t seed = 0;

  // Korobov vector (1, g, g^2, ...) mod n for a fixed tabulated g per prime
  // (supported primes: 1021, 4093, 16381).
  static LatticeRule korobov(int dim, std::uint32_t n_points = 4093,
                             int n_shifts = 16, std::uint64_t seed = 0);

  static bool supported_points(std::uint32_t n);

  void validate() const;
};

struct QmcEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint32_t n_points = 0;
  int n_shifts = 0;
  std::uint64_t seed = 0;
  // Set when the result required no sampling (conventions, empty regions).
  bool exact = false;

  static QmcEstimate exactly(double v) {
    QmcEstimate e;
    e.value = v;
    e.exact = true;
    return e;
  }
};

// Averages f over the shifted lattice; value is the mean over shifts and
// std_error the sample sd over shifts divided by sqrt(n_shifts). Results are
// deterministic given (seed, n_points, n_shifts, generating vector): shift m
// draws from RngStream(seed, m).
QmcEstimate lattice_integrate(const std::function<double(const double*)>& f,
                              const LatticeRule& rule);

// Nested ordered-region integral I_ab(s, t): the (b-a-1)-fold iterated
// integral over f_{a+1} > ... > f_{b-1} with limits given by the maps
// P_{i,j} = Phi_i o Phi_j^{-1}; equals 1 exactly when b = a+1. s lives on the
// Phi_a scale, t on the Phi_b scale. rho[k] must hold the scale of knot k.
QmcEstimate nested_I(const std::vector<double>& rho, double sigma, int a, int b,
                     double s, double t, const LatticeRule& rule);

// F_abc(t) = 1{lambda_c <= t <= lambda_a} *
//            Int_{Phi_b(lambda_c)}^{Phi_b(t)} I_ab(F_a, f_b) I_bc(f_b, F_c) df_b,
// flattened into one (c-a-1)-dimensional cube integral. a = 0 uses the
// lambda_0 = +infinity convention (F_0 = 1).
QmcEstimate F_abc(const std::vector<double>& rho, double sigma, double lambda_a,
                  double lambda_c, double t, int a, int b, int c,
                  const LatticeRule& rule);

// Studentized analogue on the Lambda = lambda / sigma_hat scale: the ordered
// region is integrated directly in ell-coordinates against the joint t-type
// kernel with nu degrees of freedom. a = 0 makes Lambda_a = +infinity; the
// unbounded directions use a rational substitution.
QmcEstimate tilde_F_abc(const std::vector<double>& rho, int nu, double Lambda_a,
                        double Lambda_c, double t, int a, int b, int c,
                        const LatticeRule& rule);

// Orthogonal-design shortcut: with all scales equal the conditional CDF ratio
// collapses to a Beta law, so the p-value needs no cubature. The middle value
// normalized to (F_b - F_c)/(F_a - F_c) is the (b-a)-th largest of c-a-1
// ordered uniforms, i.e. Beta(c-b, b-a).
double ortho_pvalue_shortcut(double F_a, double F_b, double F_c, int a, int b,
                             int c);

}  // namespace larinf

#endif
