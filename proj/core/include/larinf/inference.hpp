#ifndef LARINF_INFERENCE_HPP
#define LARINF_INFERENCE_HPP

#include <optional>
#include <variant>

#include "larinf/conditional_law.hpp"
#include "larinf/quadrature.hpp"

namespace larinf {

// QMC denominator indistinguishable from zero; no reliable p-value exists.
class UnreliableDenominatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent noise-level estimates on an equitable split of the
// n - (K+1) residual degrees of freedom: sigma_select drives model-size
// selection, sigma_test drives post-selection tests. Mixing them is forbidden
// by the API (selection-stage tests take nu = n1, post-selection nu = n2).
struct VarianceSplit {
  double sigma_select = 0.0;
  double sigma_test = 0.0;
  int n1 = 0;
  int n2 = 0;
  int dim_active = 0;            // K + 1
  Eigen::MatrixXd active_basis;  // orthonormal basis of span(X_active), n x (K+1)
  Eigen::MatrixXd e1_basis;      // orthonormal basis of E1, n x n1
};

VarianceSplit split_variance(const DesignMatrix& design,
                             const ResponseVector& response,
                             const std::vector<int>& active_plain_indices, int K);

// Orthonormal basis of E2 = (span(X_active) + E1)^perp, built on demand
// (dimension n2); used by the orthogonality checks.
Eigen::MatrixXd e2_basis(const VarianceSplit& split);

enum class PValueMethod { closed_form, qmc, beta_shortcut, studentized_qmc };

const char* to_string(PValueMethod m);

struct QmcDiagnostics {
  QmcEstimate numerator;
  QmcEstimate denominator;
};

struct PValueReport {
  int a = 0, b = 0, c = 0;
  double p_value = 1.0;
  PValueMethod method = PValueMethod::closed_form;
  std::optional<QmcDiagnostics> qmc;
  std::optional<int> nu;  // studentization degrees of freedom
};

// Irrepresentable Check failed along the path: tests refuse rather than
// report a p-value.
struct Refusal {
  int k_max = 0;
  std::string reason;
};

using TestOutcome = std::variant<PValueReport, Refusal>;

inline bool refused(const TestOutcome& o) {
  return std::holds_alternative<Refusal>(o);
}

// Generalized Spacing Test p-value (known sigma):
// alpha_hat = 1 - F_abc(lambda_b) / F_abc(lambda_a). Consecutive triples use
// the closed-form spacing expression; equal-scale (orthogonal) geometries use
// the Beta shortcut; everything else runs QMC with diagnostics attached.
TestOutcome gst_pvalue(const LarPath& path, const FrozenGeometry& geometry,
                       double sigma, int a, int b, int c, const LatticeRule& rule);

// Generalized t-Spacing Test p-value (sigma unknown):
// beta_hat = 1 - tilde_F_abc(Lambda_b) / tilde_F_abc(Lambda_a) with
// Lambda_k = lambda_k / sigma_test and nu = n2.
TestOutcome gtst_pvalue(const LarPath& path, const FrozenGeometry& geometry,
                        const VarianceSplit& split, int a, int b, int c,
                        const LatticeRule& rule);

struct SelectionRuleSpec {
  enum class Kind { fixed, sequential } kind = Kind::sequential;
  int fixed_m = 1;          // kind == fixed
  double alpha_prime = 0.1; // kind == sequential
  int gamma_fp = 1;
};

struct SelectionDecision {
  int m_hat = 1;
  SelectionRuleSpec rule;
  std::vector<double> step_pvalues;  // audit trail of the sequential tests
};

// Sequential consecutive t-spacing scan at level alpha_prime using
// sigma_select (nu = n1): a run of gamma_fp non-significant tests starting at
// a0 stops the scan with m_hat = a0 + gamma_fp + 1, capped at K - 1. The scan
// reads only the knot prefix each decision is allowed to see, plus the
// entered indices (through their scales) and sigma_select, so the
// stopping-rule property holds structurally.
SelectionDecision select_model_sequential(const LarPath& path,
                                          const FrozenGeometry& geometry,
                                          const VarianceSplit& split,
                                          double alpha_prime, int gamma_fp);

// Exact false-negative test after model selection: computes the path, checks
// the Irrepresentable Check up to K (refusing on failure), selects m_hat by
// the given admissible rule, and returns the (m_hat, m_hat+1, K+1) spacing
// p-value -- Gaussian when sigma is known, studentized with sigma_test
// otherwise. Path truncation before K+1 knots also refuses.
TestOutcome false_negative_test(const DesignMatrix& design,
                                const ResponseVector& response, int K,
                                const SelectionRuleSpec& rule_spec,
                                std::optional<double> sigma,
                                const LatticeRule& rule,
                                SelectionDecision* decision_out = nullptr);

}  // namespace larinf

#endif
