#ifndef LARINF_SPECIAL_HPP
#define LARINF_SPECIAL_HPP

namespace larinf {

// Standard normal CDF and survival function. Both go through erfc so the tails
// keep full relative accuracy.
double norm_cdf(double x);
double norm_sf(double x);

// Inverse standard normal CDF: Acklam's rational approximation polished by one
// Halley step, giving ~1e-15 relative accuracy away from the endpoints.
// Returns -inf / +inf at p = 0 / 1.
double norm_quantile(double p);

// Regularized incomplete beta I_x(a, b), continued-fraction (modified Lentz)
// evaluation, absolute accuracy ~1e-14.
double incomplete_beta(double a, double b, double x);

// CDF of the Beta(a, b) distribution.
double beta_cdf(double x, double a, double b);

// CDF / survival function of Student's t with nu degrees of freedom,
// computed through the incomplete beta function.
double student_cdf(double t, double nu);
double student_sf(double t, double nu);

}  // namespace larinf

#endif
