#include "larinf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "larinf/special.hpp"

namespace larinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDependentTol = 1e-10;

// lambda_k with the lambda_0 = +infinity convention (k is 1-based).
double knot_at(const LarPath& path, int k) {
  return k == 0 ? kInf : path.knots[k - 1];
}

double rho_at(const FrozenGeometry& geom, int k) { return geom.rho[k - 1]; }

bool equal_scales(const FrozenGeometry& geom, int a, int c) {
  const int lo = std::max(a, 1);
  double rmin = kInf, rmax = 0.0;
  for (int k = lo; k <= c; ++k) {
    rmin = std::min(rmin, rho_at(geom, k));
    rmax = std::max(rmax, rho_at(geom, k));
  }
  return rmax - rmin <= 1e-12 * rmax;
}

void check_triple(const LarPath& path, int a, int b, int c) {
  if (!(a >= 0 && a < b && b < c))
    throw std::invalid_argument("spacing test: need 0 <= a < b < c");
  if (c > path.size())
    throw std::invalid_argument("spacing test: c exceeds the number of knots");
}

// Spacing ratio from survival-function values: (sf_b - sf_a) / (sf_c - sf_a),
// computed in the tail for precision. Degenerate spacings fall back to the
// boundary value 1.
double survival_ratio(double sf_a, double sf_b, double sf_c) {
  const double den = sf_c - sf_a;
  if (den <= 0.0) return 1.0;
  return std::clamp((sf_b - sf_a) / den, 0.0, 1.0);
}

}  // namespace

const char* to_string(PValueMethod m) {
  switch (m) {
    case PValueMethod::closed_form: return "closed-form";
    case PValueMethod::qmc: return "qmc";
    case PValueMethod::beta_shortcut: return "beta-shortcut";
    case PValueMethod::studentized_qmc: return "studentized-qmc";
  }
  return "unknown";
}

VarianceSplit split_variance(const DesignMatrix& design,
                             const ResponseVector& response,
                             const std::vector<int>& active_plain_indices, int K) {
  const int n = static_cast<int>(design.n());
  if (static_cast<int>(active_plain_indices.size()) != K + 1)
    throw std::invalid_argument("split_variance: expected K + 1 active indices");
  if (n <= K + 3)
    throw std::invalid_argument("split_variance: needs n > K + 3");
  if (response.values.size() != n)
    throw std::invalid_argument("split_variance: response length != design rows");
  {
    std::vector<int> sorted = active_plain_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("split_variance: active indices must be distinct");
    if (sorted.front() < 0 || sorted.back() >= design.p())
      throw std::invalid_argument("split_variance: active index out of range");
  }

  Eigen::MatrixXd Xact(n, K + 1);
  for (int t = 0; t <= K; ++t) Xact.col(t) = design.matrix().col(active_plain_indices[t]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xact);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, K + 1);
  {
    // Rank check on the triangular factor.
    Eigen::MatrixXd Rfac = qr.matrixQR().topLeftCorner(K + 1, K + 1);
    double dmax = 0.0;
    for (int t = 0; t <= K; ++t) dmax = std::max(dmax, std::fabs(Rfac(t, t)));
    for (int t = 0; t <= K; ++t) {
      if (std::fabs(Rfac(t, t)) <= 1e-12 * dmax)
        throw std::runtime_error("split_variance: active design columns are rank-deficient");
    }
  }

  const int budget = n - (K + 1);
  const int n1 = (budget + 1) / 2;
  const int n2 = budget - n1;

  // E1 = P_perp(V_l) for the smallest l reaching dimension n1: canonical
  // basis vectors are projected off span(X_active) and orthonormalized,
  // dropping dependent ones.
  Eigen::MatrixXd E1(n, n1);
  int found = 0;
  for (int l = 0; l < n && found < n1; ++l) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[l] = 1.0;
    v -= Q * (Q.transpose() * v);
    v -= E1.leftCols(found) * (E1.leftCols(found).transpose() * v);
    const double nrm = v.norm();
    if (nrm > kDependentTol) E1.col(found++) = v / nrm;
  }
  if (found < n1)
    throw std::runtime_error("split_variance: could not span E1 (rank deficiency)");

  VarianceSplit split;
  split.n1 = n1;
  split.n2 = n2;
  split.dim_active = K + 1;
  split.active_basis = std::move(Q);
  split.e1_basis = std::move(E1);

  const Eigen::VectorXd& y = response.values;
  const double e1_norm2 = (split.e1_basis.transpose() * y).squaredNorm();
  const double act_norm2 = (split.active_basis.transpose() * y).squaredNorm();
  const double e2_norm2 = std::max(0.0, y.squaredNorm() - act_norm2 - e1_norm2);
  split.sigma_select = std::sqrt(e1_norm2 / n1);
  split.sigma_test = std::sqrt(e2_norm2 / n2);
  return split;
}

Eigen::MatrixXd e2_basis(const VarianceSplit& split) {
  const int n = static_cast<int>(split.active_basis.rows());
  const int n2 = split.n2;
  Eigen::MatrixXd E2(n, n2);
  int found = 0;
  for (int l = 0; l < n && found < n2; ++l) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[l] = 1.0;
    v -= split.active_basis * (split.active_basis.transpose() * v);
    v -= split.e1_basis * (split.e1_basis.transpose() * v);
    v -= E2.leftCols(found) * (E2.leftCols(found).transpose() * v);
    // Re-orthogonalize once; plain Gram-Schmidt drifts for near-dependent v.
    v -= split.active_basis * (split.active_basis.transpose() * v);
    v -= split.e1_basis * (split.e1_basis.transpose() * v);
    v -= E2.leftCols(found) * (E2.leftCols(found).transpose() * v);
    const double nrm = v.norm();
    if (nrm > kDependentTol) E2.col(found++) = v / nrm;
  }
  if (found < n2) throw std::runtime_error("e2_basis: could not span E2");
  return E2;
}

TestOutcome gst_pvalue(const LarPath& path, const FrozenGeometry& geometry,
                       double sigma, int a, int b, int c, const LatticeRule& rule) {
  check_triple(path, a, b, c);
  if (!(sigma > 0.0)) throw std::invalid_argument("gst_pvalue: sigma must be > 0");
  if (geometry.size() < path.size())
    throw std::invalid_argument("gst_pvalue: geometry shorter than path");

  const int K = path.K();
  if (path.irrepresentable_upto < K)
    return Refusal{path.irrepresentable_upto,
                   "irrepresentable check failed before step K"};

  PValueReport rep;
  rep.a = a;
  rep.b = b;
  rep.c = c;

  const double la = knot_at(path, a);
  const double lb = knot_at(path, b);
  const double lc = knot_at(path, c);

  if (b == a + 1 && c == b + 1) {
    const double scale = sigma * rho_at(geometry, b);
    const double sf_a = (a == 0) ? 0.0 : norm_sf(la / scale);
    rep.p_value = survival_ratio(sf_a, norm_sf(lb / scale), norm_sf(lc / scale));
    rep.method = PValueMethod::closed_form;
    return rep;
  }

  if (equal_scales(geometry, a, c)) {
    const double scale = sigma * rho_at(geometry, b);
    const double sf_a = (a == 0) ? 0.0 : norm_sf(la / scale);
    const double sf_b = norm_sf(lb / scale);
    const double sf_c = norm_sf(lc / scale);
    // F_k = 1 - sf_k; all differences taken in the tail.
    const double den = sf_c - sf_a;
    if (den <= 0.0) {
      rep.p_value = 1.0;
    } else {
      const double x = std::clamp((sf_c - sf_b) / den, 0.0, 1.0);
      rep.p_value = 1.0 - beta_cdf(x, static_cast<double>(c - b),
                                   static_cast<double>(b - a));
    }
    rep.method = PValueMethod::beta_shortcut;
    return rep;
  }

  const std::vector<double> rho = rho_with_origin(geometry);
  QmcDiagnostics diag;
  diag.numerator = F_abc(rho, sigma, la, lc, lb, a, b, c, rule);
  diag.denominator = F_abc(rho, sigma, la, lc, la, a, b, c, rule);
  if (diag.denominator.value <= 3.0 * diag.denominator.std_error)
    throw UnreliableDenominatorError(
        "gst_pvalue: F_abc(lambda_a) indistinguishable from zero");
  rep.p_value = std::clamp(1.0 - diag.numerator.value / diag.denominator.value, 0.0, 1.0);
  rep.method = PValueMethod::qmc;
  rep.qmc = diag;
  return rep;
}

TestOutcome gtst_pvalue(const LarPath& path, const FrozenGeometry& geometry,
                        const VarianceSplit& split, int a, int b, int c,
                        const LatticeRule& rule) {
  check_triple(path, a, b, c);
  if (!(split.sigma_test > 0.0))
    throw std::invalid_argument("gtst_pvalue: sigma_test is zero");
  if (geometry.size() < path.size())
    throw std::invalid_argument("gtst_pvalue: geometry shorter than path");

  const int K = path.K();
  if (path.irrepresentable_upto < K)
    return Refusal{path.irrepresentable_upto,
                   "irrepresentable check failed before step K"};

  PValueReport rep;
  rep.a = a;
  rep.b = b;
  rep.c = c;
  rep.nu = split.n2;

  const double nu = static_cast<double>(split.n2);
  const double La = knot_at(path, a) / split.sigma_test;  // +inf when a == 0
  const double Lb = knot_at(path, b) / split.sigma_test;
  const double Lc = knot_at(path, c) / split.sigma_test;

  if (b == a + 1 && c == b + 1) {
    const double r = rho_at(geometry, b);
    const double sf_a = (a == 0) ? 0.0 : student_sf(La / r, nu);
    rep.p_value = survival_ratio(sf_a, student_sf(Lb / r, nu), student_sf(Lc / r, nu));
    rep.method = PValueMethod::closed_form;
    return rep;
  }

  const std::vector<double> rho = rho_with_origin(geometry);
  QmcDiagnostics diag;
  diag.numerator = tilde_F_abc(rho, split.n2, La, Lc, Lb, a, b, c, rule);
  diag.denominator = tilde_F_abc(rho, split.n2, La, Lc, La, a, b, c, rule);
  if (diag.denominator.value <= 3.0 * diag.denominator.std_error)
    throw UnreliableDenominatorError(
        "gtst_pvalue: tilde_F_abc(Lambda_a) indistinguishable from zero");
  rep.p_value = std::clamp(1.0 - diag.numerator.value / diag.denominator.value, 0.0, 1.0);
  rep.method = PValueMethod::studentized_qmc;
  rep.qmc = diag;
  return rep;
}

namespace {

// Consecutive t-spacing p-value at start index a (tests lambda_{a+1} against
// its neighbors) on the selection scale: nu = n1, Lambda = lambda / sigma_select.
// Reads knots only through the prefix lambda_1..lambda_{a+2}.
double selection_stage_pvalue(std::span<const double> knot_prefix, int a,
                              double rho_b, double sigma_select, int n1) {
  const double nu = static_cast<double>(n1);
  const double La = (a == 0) ? kInf : knot_prefix[a - 1] / sigma_select;
  const double Lb = knot_prefix[a] / sigma_select;
  const double Lc = knot_prefix[a + 1] / sigma_select;
  const double sf_a = (a == 0) ? 0.0 : student_sf(La / rho_b, nu);
  return survival_ratio(sf_a, student_sf(Lb / rho_b, nu), student_sf(Lc / rho_b, nu));
}

}  // namespace

SelectionDecision select_model_sequential(const LarPath& path,
                                          const FrozenGeometry& geometry,
                                          const VarianceSplit& split,
                                          double alpha_prime, int gamma_fp) {
  if (!(alpha_prime > 0.0 && alpha_prime < 1.0))
    throw std::invalid_argument("select_model_sequential: alpha_prime outside (0,1)");
  if (gamma_fp < 1)
    throw std::invalid_argument("select_model_sequential: gamma_fp must be >= 1");
  const int K = path.K();
  if (K < 2)
    throw std::invalid_argument("select_model_sequential: path too short");
  if (!(split.sigma_select > 0.0))
    throw std::invalid_argument("select_model_sequential: sigma_select is zero");

  SelectionDecision decision;
  decision.rule.kind = SelectionRuleSpec::Kind::sequential;
  decision.rule.alpha_prime = alpha_prime;
  decision.rule.gamma_fp = gamma_fp;

  int m_hat = K - 1;
  int run = 0;
  for (int a = 0; a + 2 <= K + 1; ++a) {
    const std::span<const double> prefix(path.knots.data(),
                                         static_cast<std::size_t>(a) + 2);
    const double pv = selection_stage_pvalue(prefix, a, rho_at(geometry, a + 1),
                                             split.sigma_select, split.n1);
    decision.step_pvalues.push_back(pv);
    if (pv > alpha_prime) {
      if (++run == gamma_fp) {
        m_hat = a + 2;
        break;
      }
    } else {
      run = 0;
    }
  }
  decision.m_hat = std::clamp(m_hat, 1, K - 1);
  return decision;
}

TestOutcome false_negative_test(const DesignMatrix& design,
                                const ResponseVector& response, int K,
                                const SelectionRuleSpec& rule_spec,
                                std::optional<double> sigma,
                                const LatticeRule& rule,
                                SelectionDecision* decision_out) {
  if (K < 2) throw std::invalid_argument("false_negative_test: K must be >= 2");
  if (design.n() <= K + 3)
    throw std::invalid_argument("false_negative_test: needs n > K + 3");

  const CorrelationState state = build_correlation_state(design, response);
  const LarPath path = lar_path_recursive(state, K);
  if (path.size() < K + 1)
    return Refusal{path.irrepresentable_upto,
                   std::string("path truncated before K+1 knots (") +
                       to_string(path.status) + ")"};
  if (path.irrepresentable_upto < K)
    return Refusal{path.irrepresentable_upto,
                   "irrepresentable check failed before step K"};

  const double sigma_for_geom = sigma.value_or(1.0);
  const FrozenGeometry geometry = frozen_geometry(state, path, sigma_for_geom);

  std::vector<int> active(K + 1);
  for (int k = 0; k <= K; ++k) active[k] = path.entered[k].plain;
  const VarianceSplit split = split_variance(design, response, active, K);

  SelectionDecision decision;
  if (rule_spec.kind == SelectionRuleSpec::Kind::fixed) {
    decision.rule = rule_spec;
    decision.m_hat = std::clamp(rule_spec.fixed_m, 1, K - 1);
  } else {
    decision = select_model_sequential(path, geometry, split,
                                       rule_spec.alpha_prime, rule_spec.gamma_fp);
  }
  if (decision_out) *decision_out = decision;

  const int m = decision.m_hat;
  LatticeRule sized = rule;
  sized.dim = K - m;  // c - a - 1 with (a, b, c) = (m, m+1, K+1)
  if (sized.generating_vector.size() != static_cast<std::size_t>(sized.dim))
    sized = LatticeRule::korobov(sized.dim, rule.n_points, rule.n_shifts, rule.seed);

  if (sigma) return gst_pvalue(path, geometry, *sigma, m, m + 1, K + 1, sized);
  return gtst_pvalue(path, geometry, split, m, m + 1, K + 1, sized);
}

}  // namespace larinf
