#include "larinf/lar_engine.hpp"

#include <cmath>
#include <limits>

namespace larinf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Two-pass argmax with deterministic tie-breaking on the raw signed index.
class KnotSelector {
 public:
  explicit KnotSelector(int p) : p_(p) {}

  void consider(double value, SignedIndex idx) {
    if (!any_ || value > best_) {
      best_ = value;
      any_ = true;
    }
    candidates_.push_back({value, idx});
  }

  bool any() const { return any_; }
  double value() const { return best_; }

  SignedIndex pick(bool* tie) const {
    const double tol = kTieTol * std::max(1.0, std::fabs(best_));
    SignedIndex chosen{};
    int chosen_raw = std::numeric_limits<int>::max();
    int hits = 0;
    for (const auto& c : candidates_) {
      if (c.value >= best_ - tol) {
        ++hits;
        const int raw = c.idx.raw(p_);
        if (raw < chosen_raw) {
          chosen_raw = raw;
          chosen = c.idx;
        }
      }
    }
    if (hits > 1) *tie = true;
    return chosen;
  }

  void reset() {
    candidates_.clear();
    best_ = kNegInf;
    any_ = false;
  }

 private:
  struct Candidate {
    double value;
    SignedIndex idx;
  };
  int p_;
  std::vector<Candidate> candidates_;
  double best_ = kNegInf;
  bool any_ = false;
};

void select_first_knot(const CorrelationState& state, LarPath& path,
                       KnotSelector& sel) {
  for (int j = 0; j < state.p(); ++j) {
    sel.consider(state.zbar(j), SignedIndex{j, +1});
    sel.consider(-state.zbar(j), SignedIndex{j, -1});
  }
  path.knots.push_back(sel.value());
  path.entered.push_back(sel.pick(&path.tie_flag));
}

void finalize_irrepresentable(LarPath& path) {
  int upto = 0;
  for (std::size_t k = 0; k < path.theta_max.size(); ++k) {
    if (path.theta_max[k] <= 1.0 - kThetaStrictTol)
      upto = static_cast<int>(k) + 1;
    else
      break;
  }
  path.irrepresentable_upto = upto;
}

// Stops the path on a non-positive knot, per the convention that such knots
// are recorded but nothing beyond them is computed.
bool zero_knot_stop(LarPath& path) {
  if (path.knots.back() <= 0.0) {
    path.status = PathStatus::truncated_zero_knot;
    return true;
  }
  return false;
}

}  // namespace

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::complete: return "complete";
    case PathStatus::truncated_no_candidate: return "truncated-no-candidate";
    case PathStatus::truncated_rank: return "truncated-rank";
    case PathStatus::truncated_zero_knot: return "truncated-zero-knot";
  }
  return "unknown";
}

LarPath lar_path_standard(const CorrelationState& state, int steps) {
  if (steps < 0) throw std::invalid_argument("lar_path_standard: steps < 0");
  const int p = state.p();
  const int target = steps + 1;
  LarPath path;
  KnotSelector sel(p);

  select_first_knot(state, path, sel);
  ActiveSequence active(state);
  Eigen::VectorXd resid(p);  // N-bar
  for (int j = 0; j < p; ++j) resid[j] = state.zbar(j);

  if (!zero_knot_stop(path)) {
    try {
      active.extend(state, path.entered.back());
    } catch (const SingularMatrixError&) {
      path.status = PathStatus::truncated_rank;
    }
  }

  Eigen::VectorXd theta_bar(p);
  while (path.status == PathStatus::complete) {
    // theta for the current prefix; also the irrepresentable diagnostic.
    const int k = active.size();
    double tmax = 0.0;
    for (int j = 0; j < p; ++j) {
      if (active.contains_plain(j)) continue;
      theta_bar[j] = theta(state, active, SignedIndex{j, +1});
      tmax = std::max(tmax, std::fabs(theta_bar[j]));
    }
    path.theta_max.push_back(tmax);
    if (k >= target || k >= p) {
      if (path.size() < target && path.status == PathStatus::complete)
        path.status = PathStatus::truncated_no_candidate;
      break;
    }

    const double last = path.knots.back();
    sel.reset();
    for (int j = 0; j < p; ++j) {
      if (active.contains_plain(j)) continue;
      const double th = theta_bar[j];
      if (th <= 1.0 - kThetaStrictTol)
        sel.consider((resid[j] - last * th) / (1.0 - th), SignedIndex{j, +1});
      if (-th <= 1.0 - kThetaStrictTol)
        sel.consider((-resid[j] + last * th) / (1.0 + th), SignedIndex{j, -1});
    }
    if (!sel.any()) {
      path.status = PathStatus::truncated_no_candidate;
      break;
    }
    const double lambda = sel.value();
    path.knots.push_back(lambda);
    path.entered.push_back(sel.pick(&path.tie_flag));
    if (zero_knot_stop(path)) break;

    for (int j = 0; j < p; ++j) {
      if (!active.contains_plain(j)) resid[j] -= (last - lambda) * theta_bar[j];
    }
    try {
      active.extend(state, path.entered.back());
    } catch (const SingularMatrixError&) {
      path.status = PathStatus::truncated_rank;
      break;
    }
  }

  finalize_irrepresentable(path);
  return path;
}

LarPath lar_path_projected(const CorrelationState& state, int steps) {
  if (steps < 0) throw std::invalid_argument("lar_path_projected: steps < 0");
  const int p = state.p();
  const int target = steps + 1;
  LarPath path;
  KnotSelector sel(p);

  select_first_knot(state, path, sel);
  ActiveSequence active(state);
  if (!zero_knot_stop(path)) {
    try {
      active.extend(state, path.entered.back());
    } catch (const SingularMatrixError&) {
      path.status = PathStatus::truncated_rank;
    }
  }

  while (path.status == PathStatus::complete) {
    const int k = active.size();
    double tmax = 0.0;
    sel.reset();
    for (int j = 0; j < p; ++j) {
      if (active.contains_plain(j)) continue;
      const Eigen::VectorXd row = active.r_row(state, SignedIndex{j, +1});
      const double th = row.dot(active.m_inv_ones());
      const double pi = row.dot(active.m_inv_z());
      tmax = std::max(tmax, std::fabs(th));
      if (th <= 1.0 - kThetaStrictTol)
        sel.consider((state.zbar(j) - pi) / (1.0 - th), SignedIndex{j, +1});
      if (-th <= 1.0 - kThetaStrictTol)
        sel.consider((-state.zbar(j) + pi) / (1.0 + th), SignedIndex{j, -1});
    }
    path.theta_max.push_back(tmax);
    if (k >= target || k >= p) {
      if (path.size() < target) path.status = PathStatus::truncated_no_candidate;
      break;
    }
    if (!sel.any()) {
      path.status = PathStatus::truncated_no_candidate;
      break;
    }
    path.knots.push_back(sel.value());
    path.entered.push_back(sel.pick(&path.tie_flag));
    if (zero_knot_stop(path)) break;
    try {
      active.extend(state, path.entered.back());
    } catch (const SingularMatrixError&) {
      path.status = PathStatus::truncated_rank;
      break;
    }
  }

  finalize_irrepresentable(path);
  return path;
}

LarPath lar_path_recursive(const CorrelationState& state, int steps) {
  if (steps < 0) throw std::invalid_argument("lar_path_recursive: steps < 0");
  const int p = state.p();
  const int target = steps + 1;
  LarPath path;
  KnotSelector sel(p);

  select_first_knot(state, path, sel);

  Eigen::VectorXd zcur(p);
  for (int j = 0; j < p; ++j) zcur[j] = state.zbar(j);
  Eigen::MatrixXd acur = state.gram();
  Eigen::VectorXd tcur = Eigen::VectorXd::Zero(p);
  std::vector<char> in_active(p, 0);
  const double pivot_floor = state.pivot_floor();

  int k = 0;
  while (true) {
    if (zero_knot_stop(path)) break;
    // Fold the just-selected variable into (R, Z, T).
    const SignedIndex sel_idx = path.entered.back();
    const int jj = sel_idx.plain;
    const int ss = sel_idx.sign;
    const double d = acur(jj, jj);
    if (d <= pivot_floor) {
      path.status = PathStatus::truncated_rank;
      break;
    }
    const Eigen::VectorXd x = acur.col(jj) / d;
    const double zj = zcur[jj];
    const double tj = tcur[jj];
    zcur.noalias() -= x * zj;
    tcur.noalias() += x * (static_cast<double>(ss) - tj);
    const Eigen::RowVectorXd rowj = acur.row(jj);
    acur.noalias() -= x * rowj;
    in_active[jj] = 1;
    ++k;

    double tmax = 0.0;
    for (int j = 0; j < p; ++j) {
      if (!in_active[j]) tmax = std::max(tmax, std::fabs(tcur[j]));
    }
    path.theta_max.push_back(tmax);
    if (k >= target || k >= p) {
      if (path.size() < target) path.status = PathStatus::truncated_no_candidate;
      break;
    }

    sel.reset();
    for (int j = 0; j < p; ++j) {
      if (in_active[j]) continue;
      const double th = tcur[j];
      if (th <= 1.0 - kThetaStrictTol)
        sel.consider(zcur[j] / (1.0 - th), SignedIndex{j, +1});
      if (-th <= 1.0 - kThetaStrictTol)
        sel.consider(-zcur[j] / (1.0 + th), SignedIndex{j, -1});
    }
    if (!sel.any()) {
      path.status = PathStatus::truncated_no_candidate;
      break;
    }
    path.knots.push_back(sel.value());
    path.entered.push_back(sel.pick(&path.tie_flag));
  }

  finalize_irrepresentable(path);
  return path;
}

int irrepresentable_check(const CorrelationState& state, const LarPath& path,
                          int upto) {
  if (upto < 0 || upto > path.size())
    throw std::invalid_argument("irrepresentable_check: upto exceeds path length");
  ActiveSequence active(state);
  int k_max = 0;
  for (int l = 1; l <= upto; ++l) {
    active.extend(state, path.entered[l - 1]);
    double tmax = 0.0;
    for (int j = 0; j < state.p(); ++j) {
      if (active.contains_plain(j)) continue;
      tmax = std::max(tmax, std::fabs(theta(state, active, SignedIndex{j, +1})));
    }
    if (tmax <= 1.0 - kThetaStrictTol)
      k_max = l;
    else
      break;
  }
  return k_max;
}

}  // namespace larinf
