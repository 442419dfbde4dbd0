#ifndef LARINF_HARNESS_HPP
#define LARINF_HARNESS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "larinf/multiple_testing.hpp"

namespace larinf {

inline constexpr const char* kVersion = "larinf 0.1.0";

enum class ExperimentKind { null_law, power, fdr, kmax, falseneg };
enum class DesignModel { identity, iid_gaussian, sphere_columns };

const char* to_string(ExperimentKind k);
const char* to_string(DesignModel m);

struct SignalSpec {
  int sparsity = 0;
  double amplitude = 0.0;  // value assigned to each nonzero coefficient
};

struct QmcBudget {
  std::uint32_t points = 4093;
  int shifts = 16;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::null_law;
  int n = 100;
  int p = 150;
  int K = 4;
  DesignModel design = DesignModel::sphere_columns;
  SignalSpec signal;
  double sigma = 1.0;
  int replicates = 0;
  std::uint64_t seed = 0;
  QmcBudget qmc;
  std::vector<std::array<int, 3>> triples;  // null-law / power
  double alpha = 0.2;                       // fdr
  SelectionRuleSpec selection;              // falseneg
  bool known_sigma = true;                  // falseneg
  bool bin_by_selection = false;            // fdr
  int threads = 0;                          // 0 = hardware concurrency

  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  void validate() const;
};

// One row per replicate; unused fields stay at their defaults for a given
// experiment kind. Refused replicates keep refused = true and are excluded
// from summary statistics (never silently dropped: the rate is reported).
struct ReplicateRecord {
  int replicate = 0;
  bool refused = false;
  std::vector<double> pvalues;   // per configured triple (single for falseneg)
  int k_max = -1;
  int m_hat = -1;
  int n_rejected = 0;
  int fp = 0;
  int tp = 0;
  double fdp_value = 0.0;
  std::string selection_key;     // fdr: entered sequence, for conditional binning
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string version = kVersion;
  std::vector<ReplicateRecord> records;
};

// Runners. Replicates execute on a worker pool; per-replicate RNG substreams
// are derived from the master seed, so results are independent of scheduling.
ExperimentReport run_null_law(const ExperimentConfig& config);
ExperimentReport run_power(const ExperimentConfig& config);
ExperimentReport run_fdr(const ExperimentConfig& config);
ExperimentReport run_kmax(const ExperimentConfig& config);
ExperimentReport run_falseneg(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// Serialization. Summaries are always recomputed from the records, so the
// summary block is reproducible from the CSV by construction.
std::string records_to_csv(const ExperimentReport& report);
std::string summary_to_json(const ExperimentReport& report);

// Writes summary.json and records.csv under out_dir and returns the exit
// status: 0 ok, 2 empty run, 3 refusal-dominated (refusal rate > 1/2).
int write_report(const ExperimentReport& report, const std::string& out_dir);

// Kolmogorov-Smirnov distance between a sample and the uniform law on [0,1].
double ks_uniform(std::vector<double> sample);

// Simulation inputs (shared with tests): a design draw and a truth vector
// with `sparsity` coefficients equal to `amplitude` at distinct random
// coordinates.
Eigen::MatrixXd draw_design(DesignModel model, int n, int p, RngStream& rng);
Eigen::VectorXd draw_truth(const SignalSpec& signal, int p, RngStream& rng);

}  // namespace larinf

#endif
