#include "larinf/quadrature.hpp"

#include <cmath>
#include <limits>

#include "larinf/special.hpp"

namespace larinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Korobov parameters fixed per prime; selected offline by a weighted P2
// spectral search over dimensions up to 24.
std::uint32_t korobov_parameter(std::uint32_t n) {
  switch (n) {
    case 1021: return 474;
    case 4093: return 49;
    case 16381: return 3068;
    default:
      throw std::invalid_argument(
          "LatticeRule: no generator tabulated for this point count "
          "(supported primes: 1021, 4093, 16381)");
  }
}

}  // namespace

bool LatticeRule::supported_points(std::uint32_t n) {
  return n == 1021 || n == 4093 || n == 16381;
}

LatticeRule LatticeRule::korobov(int dim, std::uint32_t n_points, int n_shifts,
                                 std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("LatticeRule: dim must be >= 1");
  const std::uint32_t g = korobov_parameter(n_points);
  LatticeRule rule;
  rule.dim = dim;
  rule.n_points = n_points;
  rule.n_shifts = n_shifts;
  rule.seed = seed;
  rule.generating_vector.resize(dim);
  std::uint64_t acc = 1;
  for (int d = 0; d < dim; ++d) {
    rule.generating_vector[d] = static_cast<std::uint32_t>(acc);
    acc = (acc * g) % n_points;
  }
  rule.validate();
  return rule;
}

void LatticeRule::validate() const {
  if (dim < 1) throw std::invalid_argument("LatticeRule: dim must be >= 1");
  if (n_shifts < 1) throw std::invalid_argument("LatticeRule: n_shifts must be >= 1");
  if (!is_prime(n_points))
    throw std::invalid_argument("LatticeRule: n_points must be prime");
  if (generating_vector.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("LatticeRule: generating vector length != dim");
  for (std::uint32_t z : generating_vector) {
    if (z < 1 || z >= n_points)
      throw std::invalid_argument("LatticeRule: generator entry outside [1, n-1]");
  }
}

QmcEstimate lattice_integrate(const std::function<double(const double*)>& f,
                              const LatticeRule& rule) {
  rule.validate();
  const int dim = rule.dim;
  const std::uint32_t n = rule.n_points;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> shift(dim), point(dim);
  std::vector<std::uint32_t> acc(dim);
  std::vector<double> shift_means(rule.n_shifts);

  for (int m = 0; m < rule.n_shifts; ++m) {
    RngStream rng(rule.seed, static_cast<std::uint64_t>(m));
    for (int d = 0; d < dim; ++d) shift[d] = rng.next_double();
    std::fill(acc.begin(), acc.end(), 0u);
    double sum = 0.0;
    for (std::uint32_t i = 1; i <= n; ++i) {
      for (int d = 0; d < dim; ++d) {
        acc[d] += rule.generating_vector[d];
        if (acc[d] >= n) acc[d] -= n;
        double x = static_cast<double>(acc[d]) * inv_n + shift[d];
        if (x >= 1.0) x -= 1.0;
        point[d] = x;
      }
      const double fv = f(point.data());
      if (!std::isfinite(fv))
        throw EstimateFailure("lattice_integrate: non-finite integrand value", point);
      sum += fv;
    }
    shift_means[m] = sum * inv_n;
  }

  QmcEstimate est;
  est.n_points = n;
  est.n_shifts = rule.n_shifts;
  est.seed = rule.seed;
  double mean = 0.0;
  for (double v : shift_means) mean += v;
  mean /= rule.n_shifts;
  est.value = mean;
  if (rule.n_shifts > 1) {
    double ss = 0.0;
    for (double v : shift_means) ss += (v - mean) * (v - mean);
    est.std_error = std::sqrt(ss / (rule.n_shifts - 1)) /
                    std::sqrt(static_cast<double>(rule.n_shifts));
  }
  return est;
}

namespace {

// P_{i,j}(f) = Phi_i(Phi_j^{-1}(f)) = Phi((rho_j / rho_i) Phi^{-1}(f)).
// Index j = 0 stands for the lambda_0 = +infinity convention, where the
// argument is F_0 = 1 and the map returns 1.
double p_map(const std::vector<double>& rho, int i, int j, double f) {
  if (j == 0 || f >= 1.0) return 1.0;
  if (f <= 0.0) return 0.0;
  return norm_cdf(rho[j] / rho[i] * norm_quantile(f));
}

// Jacobian product for the chain f_{lo+1} > ... > f_{hi-1} inside
// I_{lo,hi}(s_val, t_val); consumes hi-lo-1 cube coordinates.
double gauss_chain(const std::vector<double>& rho, int lo, int hi, double s_val,
                   double t_val, const double* u) {
  double jac = 1.0;
  double prev = s_val;
  int prev_idx = lo;
  for (int k = lo + 1; k <= hi - 1; ++k) {
    const double upper = p_map(rho, k, prev_idx, prev);
    const double lower = p_map(rho, k, hi, t_val);
    if (upper <= lower) return 0.0;
    const double f = lower + u[k - lo - 1] * (upper - lower);
    jac *= upper - lower;
    prev = f;
    prev_idx = k;
  }
  return jac;
}

void check_rho_cover(const std::vector<double>& rho, int hi) {
  if (rho.size() <= static_cast<std::size_t>(hi))
    throw std::invalid_argument("quadrature: rho vector does not cover index range");
  for (int k = 1; k <= hi; ++k)
    if (!(rho[k] > 0.0))
      throw std::invalid_argument("quadrature: rho entries must be positive");
}

// [1 + S/nu]^{-(nu+m)/2}, stable for large nu.
double t_kernel(double sumsq, double nu, double m) {
  return std::exp(-0.5 * (nu + m) * std::log1p(sumsq / nu));
}

struct TChain {
  double jac = 1.0;
  double sumsq = 0.0;
};

// Ordered chain s >= t_{lo+1} >= ... >= t_{hi-1} >= t in ell-coordinates;
// an infinite upper end is handled with the rational map w -> t + w/(1-w).
TChain t_chain(const std::vector<double>& rho, int lo, int hi, double s_val,
               double t_val, const double* u) {
  TChain out;
  double prev = s_val;
  for (int k = lo + 1; k <= hi - 1; ++k) {
    double tk;
    if (std::isinf(prev)) {
      const double w = u[k - lo - 1];
      const double om = 1.0 - w;
      if (om <= 0.0) {
        out.jac = 0.0;
        return out;
      }
      tk = t_val + w / om;
      out.jac *= 1.0 / (om * om);
    } else {
      if (prev <= t_val) {
        out.jac = 0.0;
        return out;
      }
      tk = t_val + u[k - lo - 1] * (prev - t_val);
      out.jac *= prev - t_val;
    }
    const double r = tk / rho[k];
    out.sumsq += r * r;
    prev = tk;
  }
  return out;
}

}  // namespace

QmcEstimate nested_I(const std::vector<double>& rho, double sigma, int a, int b,
                     double s, double t, const LatticeRule& rule) {
  if (!(a >= 0 && a < b)) throw std::invalid_argument("nested_I: need 0 <= a < b");
  if (!(sigma > 0.0)) throw std::invalid_argument("nested_I: sigma must be > 0");
  if (!std::isfinite(s) || !std::isfinite(t))
    throw std::invalid_argument("nested_I: s, t must be finite");
  if (b == a + 1) return QmcEstimate::exactly(1.0);
  check_rho_cover(rho, b);

  const double upper1 = p_map(rho, a + 1, a, s);
  const double lower1 = p_map(rho, a + 1, b, t);
  if (upper1 <= lower1) return QmcEstimate::exactly(0.0);

  const int dim = b - a - 1;
  if (rule.dim != dim)
    throw std::invalid_argument("nested_I: rule dimension must equal b - a - 1");
  return lattice_integrate(
      [&](const double* u) { return gauss_chain(rho, a, b, s, t, u); }, rule);
}

QmcEstimate F_abc(const std::vector<double>& rho, double sigma, double lambda_a,
                  double lambda_c, double t, int a, int b, int c,
                  const LatticeRule& rule) {
  if (!(a >= 0 && a < b && b < c))
    throw std::invalid_argument("F_abc: need 0 <= a < b < c");
  if (!(sigma > 0.0)) throw std::invalid_argument("F_abc: sigma must be > 0");
  check_rho_cover(rho, c);

  const double la = (a == 0) ? kInf : lambda_a;
  if (!(lambda_c <= t && t <= la)) return QmcEstimate::exactly(0.0);
  if (lambda_c == la) return QmcEstimate::exactly(0.0);

  const double F_a = (a == 0) ? 1.0 : norm_cdf(la / (sigma * rho[a]));
  const double F_c = norm_cdf(lambda_c / (sigma * rho[c]));
  const double lb = norm_cdf(lambda_c / (sigma * rho[b]));
  const double ub = norm_cdf(t / (sigma * rho[b]));
  if (ub <= lb) return QmcEstimate::exactly(0.0);

  const int dim = c - a - 1;
  if (rule.dim != dim)
    throw std::invalid_argument("F_abc: rule dimension must equal c - a - 1");

  const int d_ab = b - a - 1;
  return lattice_integrate(
      [&](const double* u) {
        const double f_b = lb + u[0] * (ub - lb);
        double val = ub - lb;
        if (d_ab > 0) {
          val *= gauss_chain(rho, a, b, F_a, f_b, u + 1);
          if (val == 0.0) return 0.0;
        }
        if (c - b - 1 > 0) val *= gauss_chain(rho, b, c, f_b, F_c, u + 1 + d_ab);
        return val;
      },
      rule);
}

QmcEstimate tilde_F_abc(const std::vector<double>& rho, int nu, double Lambda_a,
                        double Lambda_c, double t, int a, int b, int c,
                        const LatticeRule& rule) {
  if (!(a >= 0 && a < b && b < c))
    throw std::invalid_argument("tilde_F_abc: need 0 <= a < b < c");
  if (nu < 1) throw std::invalid_argument("tilde_F_abc: nu must be >= 1");
  check_rho_cover(rho, c);

  const double La = (a == 0) ? kInf : Lambda_a;
  if (!(Lambda_c <= t && t <= La)) return QmcEstimate::exactly(0.0);
  if (t == Lambda_c) return QmcEstimate::exactly(0.0);

  const int dim = c - a - 1;
  if (rule.dim != dim)
    throw std::invalid_argument("tilde_F_abc: rule dimension must equal c - a - 1");

  const int d_ab = b - a - 1;
  const int d_bc = c - b - 1;
  const double dnu = static_cast<double>(nu);
  const bool outer_open = std::isinf(t);

  return lattice_integrate(
      [&](const double* u) {
        double ell_b, jac0;
        if (outer_open) {
          const double om = 1.0 - u[0];
          if (om <= 0.0) return 0.0;
          ell_b = Lambda_c + u[0] / om;
          jac0 = 1.0 / (om * om);
        } else {
          ell_b = Lambda_c + u[0] * (t - Lambda_c);
          jac0 = t - Lambda_c;
        }
        const double rb = ell_b / rho[b];
        double val = jac0 * t_kernel(rb * rb, dnu, 1.0);
        if (d_ab > 0) {
          const TChain ca = t_chain(rho, a, b, La, ell_b, u + 1);
          if (ca.jac == 0.0) return 0.0;
          val *= ca.jac * t_kernel(ca.sumsq, dnu, static_cast<double>(b - a));
        }
        if (d_bc > 0) {
          const TChain cb = t_chain(rho, b, c, ell_b, Lambda_c, u + 1 + d_ab);
          if (cb.jac == 0.0) return 0.0;
          val *= cb.jac * t_kernel(cb.sumsq, dnu, static_cast<double>(c - b));
        }
        return val;
      },
      rule);
}

double ortho_pvalue_shortcut(double F_a, double F_b, double F_c, int a, int b,
                             int c) {
  if (!(a >= 0 && a < b && b < c))
    throw std::invalid_argument("ortho_pvalue_shortcut: need 0 <= a < b < c");
  if (!(F_a > F_b && F_b > F_c))
    throw std::invalid_argument("ortho_pvalue_shortcut: requires F_a > F_b > F_c");
  const double x = (F_b - F_c) / (F_a - F_c);
  return 1.0 - beta_cdf(x, static_cast<double>(c - b), static_cast<double>(b - a));
}

}  // namespace larinf
