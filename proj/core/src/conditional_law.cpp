#include "larinf/conditional_law.hpp"

#include <cmath>
#include <limits>

namespace larinf {

double frozen_value(const CorrelationState& state, const ActiveSequence& active,
                    SignedIndex j) {
  if (active.empty()) return state.z(j);
  const double th = theta(state, active, j);
  if (th > 1.0 - kThetaStrictTol)
    throw FrozenValueError("frozen_value: theta >= 1 - tolerance, value undefined");
  const double pi = pi_projection(state, active, j);
  return (state.z(j) - pi) / (1.0 - th);
}

FrozenGeometry frozen_geometry(const CorrelationState& state, const LarPath& path,
                               double sigma,
                               const std::optional<Eigen::VectorXd>& truth) {
  if (!(sigma > 0.0)) throw std::invalid_argument("frozen_geometry: sigma must be > 0");
  const int len = path.size();
  FrozenGeometry geom;
  geom.sigma = sigma;
  geom.m.resize(len, 0.0);
  geom.rho.resize(len, 0.0);
  geom.theta_k.resize(len, 0.0);

  std::optional<Eigen::VectorXd> mu0bar;
  if (truth) {
    if (truth->size() != state.p())
      throw std::invalid_argument("frozen_geometry: truth length != p");
    mu0bar = state.gram() * (*truth);
  } else if (state.has_truth_mean()) {
    Eigen::VectorXd m(state.p());
    for (int j = 0; j < state.p(); ++j) m[j] = state.mu0bar(j);
    mu0bar = std::move(m);
  }
  const auto mu0 = [&](SignedIndex i) { return i.sign * (*mu0bar)[i.plain]; };

  ActiveSequence active(state);
  for (int k = 0; k < len; ++k) {
    const SignedIndex ik = path.entered[k];
    if (k == 0) {
      geom.theta_k[0] = 0.0;
      geom.rho[0] = std::sqrt(state.r(ik, ik));
      if (mu0bar) geom.m[0] = mu0(ik);
    } else {
      const Eigen::VectorXd row = active.r_row(state, ik);
      const double th = row.dot(active.m_inv_ones());
      const double denom = 1.0 - th;
      if (denom <= kThetaStrictTol)
        throw SingularMatrixError("frozen_geometry: 1 - theta below tolerance");
      const Eigen::VectorXd w = active.solve(row);
      const double resid = state.r(ik, ik) - row.dot(w);
      if (resid <= state.pivot_floor())
        throw SingularMatrixError("frozen_geometry: residual variance below tolerance");
      geom.theta_k[k] = th;
      geom.rho[k] = std::sqrt(resid) / denom;
      if (mu0bar) {
        Eigen::VectorXd mu_active(k);
        for (int t = 0; t < k; ++t) mu_active[t] = mu0(path.entered[t]);
        geom.m[k] = (mu0(ik) - row.dot(active.solve(mu_active))) / denom;
      }
    }
    if (k + 1 < len) active.extend(state, ik);
  }
  return geom;
}

bool verify_selection_event(const CorrelationState& state, const LarPath& path) {
  ActiveSequence active(state);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < path.size(); ++k) {
    const SignedIndex ik = path.entered[k];
    double vmax = -std::numeric_limits<double>::infinity();
    double v_selected = 0.0;
    bool selected_admissible = false;
    for (int j = 0; j < state.p(); ++j) {
      if (active.contains_plain(j)) continue;
      for (int s : {+1, -1}) {
        const SignedIndex cand{j, s};
        double th = 0.0;
        if (!active.empty()) th = theta(state, active, cand);
        if (th > 1.0 - kThetaStrictTol) continue;
        const double v = frozen_value(state, active, cand);
        vmax = std::max(vmax, v);
        if (cand == ik) {
          v_selected = v;
          selected_admissible = true;
        }
      }
    }
    if (!selected_admissible) return false;
    if (v_selected < vmax - kOrderingSlack) return false;
    if (v_selected > prev + kOrderingSlack) return false;
    prev = v_selected;
    if (k + 1 < path.size()) active.extend(state, ik);
  }
  return true;
}

std::vector<double> rho_with_origin(const FrozenGeometry& geometry) {
  std::vector<double> rho(geometry.rho.size() + 1);
  rho[0] = 1.0;  // placeholder; knot 0 is +infinity and never uses a scale
  for (std::size_t k = 0; k < geometry.rho.size(); ++k) rho[k + 1] = geometry.rho[k];
  return rho;
}

}  // namespace larinf
