#include "larinf/multiple_testing.hpp"

#include <algorithm>
#include <cmath>

namespace larinf {

PValueSequence spacing_pvalue_sequence(const LarPath& path,
                                       const FrozenGeometry& geometry,
                                       double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("spacing_pvalue_sequence: sigma must be > 0");
  const int K = path.K();
  if (K < 1)
    throw std::invalid_argument("spacing_pvalue_sequence: path needs K+1 knots");

  PValueSequence seq;
  seq.values.reserve(K);
  seq.provenance.reserve(K);
  LatticeRule unused;  // consecutive triples never sample
  for (int k = 1; k <= K; ++k) {
    const TestOutcome out =
        gst_pvalue(path, geometry, sigma, k - 1, k, k + 1, unused);
    if (refused(out))
      throw std::runtime_error("spacing_pvalue_sequence: " +
                               std::get<Refusal>(out).reason);
    const PValueReport& rep = std::get<PValueReport>(out);
    seq.values.push_back(rep.p_value);
    seq.provenance.push_back(rep.method);
  }
  return seq;
}

RejectionSet bh_reject(const PValueSequence& pvalues, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("bh_reject: alpha outside (0,1)");
  const int K = pvalues.K();
  RejectionSet out;
  out.alpha = alpha;

  std::vector<double> sorted = pvalues.values;
  std::stable_sort(sorted.begin(), sorted.end());
  int k_hat = 0;
  for (int k = 1; k <= K; ++k) {
    if (sorted[k - 1] <= alpha * k / K) k_hat = k;
  }
  out.threshold_index = k_hat;
  if (k_hat == 0) return out;
  const double cutoff = alpha * k_hat / K;
  for (int k = 1; k <= K; ++k) {
    if (pvalues.values[k - 1] <= cutoff) out.rejected.insert(k);
  }
  return out;
}

double fdp(const RejectionSet& rejected, const std::set<int>& null_steps) {
  if (rejected.rejected.empty()) return 0.0;
  int fp = 0;
  for (int k : rejected.rejected)
    if (null_steps.count(k)) ++fp;
  return static_cast<double>(fp) / static_cast<double>(rejected.rejected.size());
}

std::set<int> null_step_set(const CorrelationState& state, const LarPath& path,
                            const Eigen::VectorXd& truth, int K) {
  if (K > path.size())
    throw std::invalid_argument("null_step_set: K exceeds path length");
  if (truth.size() != state.p())
    throw std::invalid_argument("null_step_set: truth length != p");

  const Eigen::VectorXd mu0bar = state.gram() * truth;
  const auto mu0 = [&](SignedIndex i) { return i.sign * mu0bar[i.plain]; };

  std::set<int> nulls;
  ActiveSequence active(state);
  for (int k = 1; k <= K; ++k) {
    const SignedIndex ik = path.entered[k - 1];
    double numerator;
    if (k == 1) {
      numerator = mu0(ik);
    } else {
      const Eigen::VectorXd row = active.r_row(state, ik);
      Eigen::VectorXd mu_active(k - 1);
      for (int t = 0; t < k - 1; ++t) mu_active[t] = mu0(path.entered[t]);
      numerator = mu0(ik) - row.dot(active.solve(mu_active));
    }
    if (std::fabs(numerator) <= 1e-8) nulls.insert(k);
    if (k < K) active.extend(state, ik);
  }
  return nulls;
}

}  // namespace larinf
