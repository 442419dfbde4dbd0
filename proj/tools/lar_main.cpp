// lar: LAR paths, spacing-test p-values, false-negative tests, BH/FDR, and
// the Monte-Carlo experiment harness, over header-free CSV inputs.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "larinf/csv.hpp"
#include "larinf/harness.hpp"

using json = nlohmann::ordered_json;
using namespace larinf;

namespace {

struct DataArgs {
  std::string design_path;
  std::string response_path;
  bool normalize = false;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--design", args.design_path, "design matrix CSV (n rows, p columns)")
      ->required();
  cmd->add_option("--response", args.response_path, "response CSV (n rows, 1 column)")
      ->required();
  cmd->add_flag("--normalize", args.normalize, "rescale predictor columns to unit norm");
}

std::pair<DesignMatrix, ResponseVector> load_data(const DataArgs& args) {
  DesignMatrix design(read_csv_matrix(args.design_path));
  if (args.normalize) design.normalize_columns();
  ResponseVector response(read_csv_vector(args.response_path));
  return {std::move(design), std::move(response)};
}

json path_to_json(const LarPath& path) {
  json j;
  j["knots"] = path.knots;
  json plain = json::array(), signs = json::array();
  for (const auto& e : path.entered) {
    plain.push_back(e.plain + 1);  // 1-based in reports
    signs.push_back(e.sign);
  }
  j["plain_indices"] = plain;
  j["signs"] = signs;
  j["theta_max"] = path.theta_max;
  j["K_max"] = path.irrepresentable_upto;
  j["status"] = to_string(path.status);
  j["tie"] = path.tie_flag;
  return j;
}

json estimate_to_json(const QmcEstimate& e) {
  return json{{"value", e.value},
              {"std_error", e.std_error},
              {"n_points", e.n_points},
              {"n_shifts", e.n_shifts},
              {"seed", e.seed},
              {"exact", e.exact}};
}

json outcome_to_json(const TestOutcome& out) {
  json j;
  if (refused(out)) {
    const auto& r = std::get<Refusal>(out);
    j["refused"] = true;
    j["k_max"] = r.k_max;
    j["reason"] = r.reason;
    return j;
  }
  const auto& rep = std::get<PValueReport>(out);
  j["refused"] = false;
  j["a"] = rep.a;
  j["b"] = rep.b;
  j["c"] = rep.c;
  j["p_value"] = rep.p_value;
  j["method"] = to_string(rep.method);
  if (rep.nu) j["nu"] = *rep.nu;
  if (rep.qmc) {
    j["qmc"] = json{{"numerator", estimate_to_json(rep.qmc->numerator)},
                    {"denominator", estimate_to_json(rep.qmc->denominator)}};
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

int cmd_path(const DataArgs& data, int steps, const std::string& formulation,
             const std::string& out_path) {
  auto [design, response] = load_data(data);
  if (steps + 1 > design.rank())
    throw std::invalid_argument("path: steps + 1 exceeds the design rank");
  const CorrelationState state = build_correlation_state(design, response);

  json j;
  const auto run = [&](const std::string& name) {
    if (name == "standard") return path_to_json(lar_path_standard(state, steps));
    if (name == "projected") return path_to_json(lar_path_projected(state, steps));
    if (name == "recursive") return path_to_json(lar_path_recursive(state, steps));
    throw CLI::ValidationError("--formulation", "unknown formulation '" + name + "'");
  };
  if (formulation == "all") {
    for (const char* name : {"standard", "projected", "recursive"})
      j[name] = run(name);
  } else {
    j = run(formulation);
    j["formulation"] = formulation;
  }
  write_json(out_path, j);
  return 0;
}

int cmd_test(const DataArgs& data, int K, int a, int b, int c,
             std::optional<double> sigma, bool use_split, std::uint32_t points,
             int shifts, std::uint64_t seed, const std::string& out_path) {
  if (!sigma && !use_split)
    throw CLI::ValidationError("--sigma", "provide --sigma or --split");
  auto [design, response] = load_data(data);
  const CorrelationState state = build_correlation_state(design, response);
  const LarPath path = lar_path_recursive(state, K);
  json j;
  if (path.size() < K + 1) {
    j["refused"] = true;
    j["k_max"] = path.irrepresentable_upto;
    j["reason"] = std::string("path truncated (") + to_string(path.status) + ")";
    write_json(out_path, j);
    return 0;
  }
  const FrozenGeometry geometry = frozen_geometry(state, path, sigma.value_or(1.0));
  const LatticeRule rule = LatticeRule::korobov(std::max(1, c - a - 1), points, shifts, seed);
  TestOutcome out = Refusal{};
  if (sigma) {
    out = gst_pvalue(path, geometry, *sigma, a, b, c, rule);
  } else {
    std::vector<int> active(K + 1);
    for (int k = 0; k <= K; ++k) active[k] = path.entered[k].plain;
    const VarianceSplit split = split_variance(design, response, active, K);
    out = gtst_pvalue(path, geometry, split, a, b, c, rule);
    j["sigma_test"] = split.sigma_test;
    j["sigma_select"] = split.sigma_select;
  }
  j.update(outcome_to_json(out));
  write_json(out_path, j);
  return 0;
}

int cmd_falseneg(const DataArgs& data, int K, const std::string& rule_name,
                 double alpha_prime, int gamma_fp, int fixed_m,
                 std::optional<double> sigma, std::uint32_t points, int shifts,
                 std::uint64_t seed, const std::string& out_path) {
  auto [design, response] = load_data(data);
  SelectionRuleSpec spec;
  if (rule_name == "sequential") {
    spec.kind = SelectionRuleSpec::Kind::sequential;
    spec.alpha_prime = alpha_prime;
    spec.gamma_fp = gamma_fp;
  } else if (rule_name == "fixed") {
    spec.kind = SelectionRuleSpec::Kind::fixed;
    spec.fixed_m = fixed_m;
  } else {
    throw CLI::ValidationError("--rule", "unknown rule '" + rule_name + "'");
  }
  LatticeRule rule;
  rule.n_points = points;
  rule.n_shifts = shifts;
  rule.seed = seed;
  SelectionDecision decision;
  const TestOutcome out =
      false_negative_test(design, response, K, spec, sigma, rule, &decision);
  json j = outcome_to_json(out);
  j["rule"] = rule_name;
  if (!refused(out)) {
    j["m_hat"] = decision.m_hat;
    j["step_pvalues"] = decision.step_pvalues;
  }
  write_json(out_path, j);
  return 0;
}

int cmd_fdr(const DataArgs& data, int K, double alpha, double sigma,
            const std::string& truth_path, const std::string& out_path) {
  auto [design, response] = load_data(data);
  const CorrelationState state = build_correlation_state(design, response);
  const LarPath path = lar_path_recursive(state, K);
  json j;
  if (path.size() < K + 1) {
    j["refused"] = true;
    j["reason"] = std::string("path truncated (") + to_string(path.status) + ")";
    write_json(out_path, j);
    return 0;
  }
  const FrozenGeometry geometry = frozen_geometry(state, path, sigma);
  const PValueSequence seq = spacing_pvalue_sequence(path, geometry, sigma);
  const RejectionSet rset = bh_reject(seq, alpha);
  j["refused"] = false;
  j["K"] = K;
  j["alpha"] = alpha;
  j["pvalues"] = seq.values;
  j["rejected_steps"] = json(rset.rejected);
  j["threshold_index"] = rset.threshold_index;
  json entered = json::array();
  for (int k = 0; k < K; ++k) entered.push_back(path.entered[k].plain + 1);
  j["entered_variables"] = entered;
  if (!truth_path.empty()) {
    const Eigen::VectorXd truth = read_csv_vector(truth_path);
    const std::set<int> nulls = null_step_set(state, path, truth, K);
    j["null_steps"] = json(nulls);
    j["fdp"] = fdp(rset, nulls);
  }
  write_json(out_path, j);
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open '" + config_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(buf.str());
  const ExperimentReport report = run_experiment(cfg);
  return write_report(report, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least Angle Regression post-selection inference toolkit"};
  app.require_subcommand(1);

  // path
  auto* path_cmd = app.add_subcommand("path", "compute the LAR path");
  DataArgs path_data;
  add_data_options(path_cmd, path_data);
  int steps = 10;
  std::string formulation = "recursive";
  std::string path_out = "path.json";
  path_cmd->add_option("--steps", steps, "number of steps K (emits K+1 knots)")->required();
  path_cmd->add_option("--formulation", formulation,
                       "standard|projected|recursive|all");
  path_cmd->add_option("--out", path_out, "output JSON path");

  // test
  auto* test_cmd = app.add_subcommand("test", "generalized (t-)spacing test p-value");
  DataArgs test_data;
  add_data_options(test_cmd, test_data);
  int K = 10, a = 0, b = 1, c = 2;
  double sigma_opt = 0.0;
  bool has_sigma = false, use_split = false;
  std::uint32_t points = 4093;
  int shifts = 16;
  std::uint64_t seed = 0;
  std::string test_out = "report.json";
  test_cmd->add_option("--K", K, "number of LAR steps")->required();
  test_cmd->add_option("--a", a)->required();
  test_cmd->add_option("--b", b)->required();
  test_cmd->add_option("--c", c)->required();
  auto* sig_opt = test_cmd->add_option("--sigma", sigma_opt, "known noise level");
  test_cmd->add_flag("--split", use_split,
                     "estimate the noise level by the variance split (studentized test)");
  test_cmd->add_option("--points", points, "lattice points per shift (1021|4093|16381)");
  test_cmd->add_option("--shifts", shifts, "random shift replicates");
  test_cmd->add_option("--seed", seed, "QMC seed");
  test_cmd->add_option("--out", test_out, "output JSON path");

  // falseneg
  auto* fn_cmd = app.add_subcommand("falseneg", "exact false-negative test after selection");
  DataArgs fn_data;
  add_data_options(fn_cmd, fn_data);
  int fn_K = 10;
  std::string rule_name = "sequential";
  double alpha_prime = 0.1;
  int gamma_fp = 1, fixed_m = 1;
  double fn_sigma_opt = 0.0;
  std::uint32_t fn_points = 4093;
  int fn_shifts = 16;
  std::uint64_t fn_seed = 0;
  std::string fn_out = "report.json";
  fn_cmd->add_option("--K", fn_K)->required();
  fn_cmd->add_option("--rule", rule_name, "sequential|fixed");
  fn_cmd->add_option("--alpha-prime", alpha_prime, "level of the selection-stage tests");
  fn_cmd->add_option("--gamma-fp", gamma_fp, "consecutive non-significant tests before stopping");
  fn_cmd->add_option("--fixed-m", fixed_m, "model size for --rule fixed");
  auto* fn_sig_opt = fn_cmd->add_option("--sigma", fn_sigma_opt,
                                        "known noise level (omit for studentized mode)");
  fn_cmd->add_option("--points", fn_points);
  fn_cmd->add_option("--shifts", fn_shifts);
  fn_cmd->add_option("--seed", fn_seed);
  fn_cmd->add_option("--out", fn_out, "output JSON path");

  // fdr
  auto* fdr_cmd = app.add_subcommand("fdr", "spacing p-value sequence + Benjamini-Hochberg");
  DataArgs fdr_data;
  add_data_options(fdr_cmd, fdr_data);
  int fdr_K = 20;
  double fdr_alpha = 0.2, fdr_sigma = 1.0;
  std::string truth_path;
  std::string fdr_out = "fdr.json";
  fdr_cmd->add_option("--K", fdr_K)->required();
  fdr_cmd->add_option("--alpha", fdr_alpha, "BH level")->required();
  fdr_cmd->add_option("--sigma", fdr_sigma, "known noise level")->required();
  fdr_cmd->add_option("--truth", truth_path,
                      "optional truth coefficients CSV (enables FDP accounting)");
  fdr_cmd->add_option("--out", fdr_out, "output JSON path");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte-Carlo experiment");
  std::string config_path, sim_out = "simout";
  sim_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  sim_cmd->add_option("--out", sim_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*path_cmd) return cmd_path(path_data, steps, formulation, path_out);
    if (*test_cmd) {
      has_sigma = sig_opt->count() > 0;
      return cmd_test(test_data, K, a, b, c,
                      has_sigma ? std::optional<double>(sigma_opt) : std::nullopt,
                      use_split, points, shifts, seed, test_out);
    }
    if (*fn_cmd) {
      const bool fn_has_sigma = fn_sig_opt->count() > 0;
      return cmd_falseneg(fn_data, fn_K, rule_name, alpha_prime, gamma_fp, fixed_m,
                          fn_has_sigma ? std::optional<double>(fn_sigma_opt)
                                       : std::nullopt,
                          fn_points, fn_shifts, fn_seed, fn_out);
    }
    if (*fdr_cmd)
      return cmd_fdr(fdr_data, fdr_K, fdr_alpha, fdr_sigma, truth_path, fdr_out);
    if (*sim_cmd) return cmd_simulate(config_path, sim_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
