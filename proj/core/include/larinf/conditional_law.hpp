#ifndef LARINF_CONDITIONAL_LAW_HPP
#define LARINF_CONDITIONAL_LAW_HPP

#include "larinf/lar_engine.hpp"

namespace larinf {

// Raised when a frozen value is requested at theta >= 1 - tolerance.
class FrozenValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Absolute slack used when checking the ordering chain of the selection event.
inline constexpr double kOrderingSlack = 1e-9;

// Conditional means and scales of the frozen knots along a path. Entry k
// (0-based) describes the (k+1)-th knot: mean m_{k+1}, unitless scale
// rho_{k+1} with sd(lambda^f_{k+1}) = sigma * rho_{k+1}, and
// theta_{i_{k+1}}(i_1..i_k). The first theta entry is 0 by convention (the
// step-1 denominator is taken as 1, consistent with rho_1 = sqrt(R_{i1,i1})).
struct FrozenGeometry {
  std::vector<double> m;
  std::vector<double> rho;
  std::vector<double> theta_k;
  double sigma = 1.0;

  int size() const { return static_cast<int>(rho.size()); }
};

// Z_j^{(i_1..i_k)} = (Z_j - Pi(Z_j)) / (1 - theta_j); with an empty active set
// this is just Z_j.
double frozen_value(const CorrelationState& state, const ActiveSequence& active,
                    SignedIndex j);

// Means and scales for every step of the path. m is exactly zero when no
// truth is available (the null); when a truth vector is given (or the state
// carries one) m_k = (mu0_{i_k} - Pi(mu0_{i_k})) / (1 - theta).
FrozenGeometry frozen_geometry(const CorrelationState& state, const LarPath& path,
                               double sigma,
                               const std::optional<Eigen::VectorXd>& truth = std::nullopt);

// Checks the selection-event characterization: along the path, each entered
// variable attains the maximal frozen value among admissible candidates and
// the frozen values are nonincreasing (within kOrderingSlack).
bool verify_selection_event(const CorrelationState& state, const LarPath& path);

// rho re-indexed so that rho[k] is the scale of knot k (k >= 1); index 0 is a
// placeholder for the lambda_0 = +infinity convention.
std::vector<double> rho_with_origin(const FrozenGeometry& geometry);

}  // namespace larinf

#endif
