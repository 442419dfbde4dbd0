#ifndef LARINF_MULTIPLE_TESTING_HPP
#define LARINF_MULTIPLE_TESTING_HPP

#include <set>

#include "larinf/inference.hpp"

namespace larinf {

// Consecutive spacing p-values p_k = alpha_hat_{k-1,k,k+1}, k = 1..K.
struct PValueSequence {
  std::vector<double> values;
  std::vector<PValueMethod> provenance;

  int K() const { return static_cast<int>(values.size()); }
};

// Benjamini-Hochberg output. threshold_index is the largest rank k with
// p_(k) <= alpha k / K (0 when no rank qualifies, in which case rejected is
// empty). Step indices are 1-based.
struct RejectionSet {
  std::set<int> rejected;
  int threshold_index = 0;
  double alpha = 0.0;
};

// p_k = alpha_hat_{k-1,k,k+1} through the closed-form consecutive route.
PValueSequence spacing_pvalue_sequence(const LarPath& path,
                                       const FrozenGeometry& geometry,
                                       double sigma);

RejectionSet bh_reject(const PValueSequence& pvalues, double alpha);

// False discovery proportion FP / (FP + TP), zero when nothing is rejected.
// null_steps holds the step indices whose hypotheses are true.
double fdp(const RejectionSet& rejected, const std::set<int>& null_steps);

// Steps k whose tested hypothesis "m_k = 0" is true for the given truth
// vector: the projected mean of the entering variable vanishes (threshold
// 1e-8 on the numerator). For orthogonal designs this is exactly the set of
// steps entering a null coordinate of the truth.
std::set<int> null_step_set(const CorrelationState& state, const LarPath& path,
                            const Eigen::VectorXd& truth, int K);

}  // namespace larinf

#endif
