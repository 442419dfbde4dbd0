#ifndef LARINF_MODEL_CORE_HPP
#define LARINF_MODEL_CORE_HPP

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace larinf {

// Raised when an active-set factorization hits a pivot below tolerance.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Variable index plus sign. Plain indices are 0-based internally; file formats
// and JSON reports use 1-based indices. The doubled ("signed") index in
// [0, 2p) maps j with sign +1 to j and j with sign -1 to j + p.
struct SignedIndex {
  int plain = 0;
  int sign = +1;

  int raw(int p) const { return sign > 0 ? plain : plain + p; }

  static SignedIndex from_raw(int raw, int p) {
    if (raw < 0 || raw >= 2 * p)
      throw std::invalid_argument("SignedIndex: raw index out of range");
    return raw < p ? SignedIndex{raw, +1} : SignedIndex{raw - p, -1};
  }

  SignedIndex partner(int /*p*/) const { return SignedIndex{plain, -sign}; }

  bool operator==(const SignedIndex&) const = default;
};

class DesignMatrix {
 public:
  explicit DesignMatrix(Eigen::MatrixXd entries);

  Eigen::Index n() const { return entries_.rows(); }
  Eigen::Index p() const { return entries_.cols(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

  // Numerical rank, computed on first use.
  Eigen::Index rank() const;

  // Rescales every column to unit Euclidean norm (opt-in, see CLI --normalize).
  void normalize_columns();

 private:
  Eigen::MatrixXd entries_;
  mutable Eigen::Index rank_ = -1;
};

struct ResponseVector {
  Eigen::VectorXd values;

  explicit ResponseVector(Eigen::VectorXd v) : values(std::move(v)) {
    if (values.size() < 1)
      throw std::invalid_argument("ResponseVector: empty response");
  }
};

// Correlation vector Z = (Zbar, -Zbar) and its covariance structure. The
// doubled 2p x 2p matrix R is never materialized: queries on signed indices
// are answered from the p x p Gram matrix with sign bookkeeping.
class CorrelationState {
 public:
  CorrelationState(Eigen::VectorXd zbar, Eigen::MatrixXd gram,
                   std::optional<Eigen::VectorXd> mu0bar);

  int p() const { return static_cast<int>(zbar_.size()); }

  double zbar(int j) const { return zbar_[j]; }
  double z(SignedIndex i) const { return i.sign * zbar_[i.plain]; }

  const Eigen::MatrixXd& gram() const { return gram_; }
  double r(SignedIndex i, SignedIndex j) const {
    return i.sign * j.sign * gram_(i.plain, j.plain);
  }

  bool has_truth_mean() const { return mu0bar_.has_value(); }
  double mu0bar(int j) const { return (*mu0bar_)[j]; }
  double mu0(SignedIndex i) const { return i.sign * (*mu0bar_)[i.plain]; }

  double max_gram_diagonal() const { return max_diag_; }

  // Pivot cutoff for active-set factorizations: 1e-10 x largest Gram diagonal.
  double pivot_floor() const { return 1e-10 * max_diag_; }

 private:
  Eigen::VectorXd zbar_;
  Eigen::MatrixXd gram_;
  std::optional<Eigen::VectorXd> mu0bar_;
  double max_diag_ = 0.0;
};

CorrelationState build_correlation_state(
    const DesignMatrix& design, const ResponseVector& response,
    const std::optional<Eigen::VectorXd>& truth = std::nullopt);

// Ordered active set i_1..i_k with an incrementally extended Cholesky
// factorization of M = R[{i_1..i_k}, {i_1..i_k}]. Appending one index costs
// O(k^2). Mutation is limited to extend(); everything else is const.
class ActiveSequence {
 public:
  explicit ActiveSequence(const CorrelationState& state);

  void extend(const CorrelationState& state, SignedIndex i);

  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  const std::vector<SignedIndex>& indices() const { return idx_; }
  bool contains_plain(int j) const { return in_active_[j] != 0; }

  // Solves M x = rhs through the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // Row vector (R_{j,i_1} ... R_{j,i_k}).
  Eigen::VectorXd r_row(const CorrelationState& state, SignedIndex j) const;

  const Eigen::VectorXd& m_inv_ones() const { return m_inv_ones_; }
  const Eigen::VectorXd& m_inv_z() const { return m_inv_z_; }

 private:
  std::vector<SignedIndex> idx_;
  std::vector<char> in_active_;
  Eigen::MatrixXd chol_;       // lower-triangular factor, top-left size() block
  Eigen::VectorXd m_inv_ones_; // M^{-1} (1,...,1)
  Eigen::VectorXd m_inv_z_;    // M^{-1} (Z_{i_1},...,Z_{i_k})
};

// theta_j(i_1..i_k) = (R_{j,i_1} ... R_{j,i_k}) M^{-1} (1,...,1)^T.
double theta(const CorrelationState& state, const ActiveSequence& active,
             SignedIndex j);

// Pi_{i_1..i_k}(Z_j) = (R_{j,i_1} ... R_{j,i_k}) M^{-1} (Z_{i_1},...,Z_{i_k})^T,
// the regression of Z_j on the active correlations.
double pi_projection(const CorrelationState& state, const ActiveSequence& active,
                     SignedIndex j);

}  // namespace larinf

#endif
