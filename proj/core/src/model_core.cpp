#include "larinf/model_core.hpp"

#include <cmath>

namespace larinf {

DesignMatrix::DesignMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1)
    throw std::invalid_argument("DesignMatrix: needs at least one row and column");
}

Eigen::Index DesignMatrix::rank() const {
  if (rank_ < 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(entries_);
    rank_ = qr.rank();
  }
  return rank_;
}

void DesignMatrix::normalize_columns() {
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    const double nrm = entries_.col(j).norm();
    if (nrm == 0.0)
      throw std::invalid_argument("DesignMatrix: cannot normalize an all-zero column");
    entries_.col(j) /= nrm;
  }
  rank_ = -1;
}

CorrelationState::CorrelationState(Eigen::VectorXd zbar, Eigen::MatrixXd gram,
                                   std::optional<Eigen::VectorXd> mu0bar)
    : zbar_(std::move(zbar)), gram_(std::move(gram)), mu0bar_(std::move(mu0bar)) {
  const auto p = zbar_.size();
  if (p < 1) throw std::invalid_argument("CorrelationState: empty correlation vector");
  if (gram_.rows() != p || gram_.cols() != p)
    throw std::invalid_argument("CorrelationState: gram dimension mismatch");
  if (mu0bar_ && mu0bar_->size() != p)
    throw std::invalid_argument("CorrelationState: mu0 dimension mismatch");
  for (Eigen::Index j = 0; j < p; ++j) {
    if (gram_(j, j) <= 0.0)
      throw std::invalid_argument(
          "CorrelationState: predictor with zero norm (all-zero column rejected)");
    max_diag_ = std::max(max_diag_, gram_(j, j));
  }
}

CorrelationState build_correlation_state(const DesignMatrix& design,
                                         const ResponseVector& response,
                                         const std::optional<Eigen::VectorXd>& truth) {
  if (response.values.size() != design.n())
    throw std::invalid_argument("build_correlation_state: response length != design rows");
  if (truth && truth->size() != design.p())
    throw std::invalid_argument("build_correlation_state: truth length != design columns");
  const Eigen::MatrixXd& X = design.matrix();
  Eigen::VectorXd zbar = X.transpose() * response.values;
  Eigen::MatrixXd gram = X.transpose() * X;
  std::optional<Eigen::VectorXd> mu0bar;
  if (truth) mu0bar = gram * (*truth);
  return CorrelationState(std::move(zbar), std::move(gram), std::move(mu0bar));
}

ActiveSequence::ActiveSequence(const CorrelationState& state)
    : in_active_(state.p(), 0) {}

void ActiveSequence::extend(const CorrelationState& state, SignedIndex i) {
  if (i.plain < 0 || i.plain >= state.p())
    throw std::invalid_argument("ActiveSequence::extend: index out of range");
  if (in_active_[i.plain])
    throw std::invalid_argument("ActiveSequence::extend: plain index already active");

  const int k = size();
  Eigen::VectorXd r = r_row(state, i);  // (R_{i,i_1} .. R_{i,i_k})
  const double d = state.r(i, i);

  Eigen::VectorXd w(k);
  if (k > 0)
    w = chol_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(r);
  const double pivot2 = d - w.squaredNorm();
  if (pivot2 <= state.pivot_floor())
    throw SingularMatrixError("ActiveSequence: active correlation matrix is singular");

  chol_.conservativeResize(k + 1, k + 1);
  chol_.row(k).head(k) = w.transpose();
  chol_.col(k).head(k).setZero();
  chol_(k, k) = std::sqrt(pivot2);

  idx_.push_back(i);
  in_active_[i.plain] = 1;

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(k + 1);
  Eigen::VectorXd zact(k + 1);
  for (int t = 0; t <= k; ++t) zact[t] = state.z(idx_[t]);
  m_inv_ones_ = solve(ones);
  m_inv_z_ = solve(zact);
}

Eigen::VectorXd ActiveSequence::solve(const Eigen::VectorXd& rhs) const {
  const int k = size();
  Eigen::VectorXd y =
      chol_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(rhs);
  return chol_.topLeftCorner(k, k)
      .triangularView<Eigen::Lower>()
      .transpose()
      .solve(y);
}

Eigen::VectorXd ActiveSequence::r_row(const CorrelationState& state,
                                      SignedIndex j) const {
  Eigen::VectorXd row(size());
  for (int t = 0; t < size(); ++t) row[t] = state.r(j, idx_[t]);
  return row;
}

namespace {
void check_theta_args(const CorrelationState& state, const ActiveSequence& active,
                      SignedIndex j) {
  if (active.empty())
    throw std::invalid_argument("theta/pi_projection: active set is empty");
  if (j.plain < 0 || j.plain >= state.p())
    throw std::invalid_argument("theta/pi_projection: index out of range");
  if (active.contains_plain(j.plain))
    throw std::invalid_argument("theta/pi_projection: index is already active");
}
}  // namespace

double theta(const CorrelationState& state, const ActiveSequence& active,
             SignedIndex j) {
  check_theta_args(state, active, j);
  return active.r_row(state, j).dot(active.m_inv_ones());
}

double pi_projection(const CorrelationState& state, const ActiveSequence& active,
                     SignedIndex j) {
  check_theta_args(state, active, j);
  return active.r_row(state, j).dot(active.m_inv_z());
}

}  // namespace larinf
