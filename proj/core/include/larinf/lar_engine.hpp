#ifndef LARINF_LAR_ENGINE_HPP
#define LARINF_LAR_ENGINE_HPP

#include "larinf/model_core.hpp"

namespace larinf {

// Strictness tolerance for "theta < 1": candidates require theta <= 1 - 1e-10,
// which also guards the division by 1 - theta.
inline constexpr double kThetaStrictTol = 1e-10;

// Two argmax candidates within this relative window count as a tie; the lowest
// raw signed index wins and the tie flag is set.
inline constexpr double kTieTol = 1e-12;

enum class PathStatus {
  complete,
  truncated_no_candidate,  // no admissible variable left
  truncated_rank,          // active correlation matrix became singular
  truncated_zero_knot,     // knot reached zero (or below); path stops there
};

const char* to_string(PathStatus s);

struct LarPath {
  std::vector<double> knots;          // lambda_1 >= lambda_2 >= ...
  std::vector<SignedIndex> entered;   // signed variables, same length as knots
  std::vector<double> theta_max;      // max_{inactive j} |theta_j| after k entries
  int irrepresentable_upto = 0;       // largest prefix passing the check
  PathStatus status = PathStatus::complete;
  bool tie_flag = false;

  int size() const { return static_cast<int>(knots.size()); }
  // K such that the path carries knots lambda_1..lambda_{K+1}.
  int K() const { return size() - 1; }
};

// All three formulations compute steps+1 knots (lambda_1..lambda_{steps+1})
// and agree on indices exactly and on knots up to roundoff.

// Residual-recursion formulation: keeps a p-vector of residual correlations
// N and the per-step least-squares fit, solving |N_j(beta)| = beta for the
// next crossing.
LarPath lar_path_standard(const CorrelationState& state, int steps);

// Projection formulation: each knot is max over {j : theta_j < 1} of
// (Z_j - Pi(Z_j)) / (1 - theta_j), using the incrementally extended
// active-set factorization.
LarPath lar_path_projected(const CorrelationState& state, int steps);

// Recursive formulation: maintains the triple (R, Z, T) under the rank-1
// updates x = R_i / R_ii; R -= x R_i^T; Z -= x Z_i; T += x (1 - T_i), and
// takes lambda = max over {j : T_j < 1} of Z_j / (1 - T_j). Cheapest per
// step for large p; R is kept as its p x p block with sign bookkeeping.
LarPath lar_path_recursive(const CorrelationState& state, int steps);

// Largest k <= upto such that for every l <= k and every inactive j,
// theta_j(i_1..i_l) <= 1 - 1e-10. Recomputes from the state (independent of
// the diagnostics cached on the path). Returns 0 when the first step fails.
int irrepresentable_check(const CorrelationState& state, const LarPath& path,
                          int upto);

}  // namespace larinf

#endif
