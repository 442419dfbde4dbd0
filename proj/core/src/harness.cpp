#include "larinf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace larinf {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void parallel_for(int n_items, int threads, const std::function<void(int)>& body) {
  int nw = threads > 0 ? threads
                       : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::clamp(nw, 1, std::max(1, n_items));
  if (nw == 1) {
    for (int i = 0; i < n_items; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RepDraw {
  Eigen::MatrixXd X;
  Eigen::VectorXd truth;
  Eigen::VectorXd y;
};

// Draw order is fixed (design, then truth support, then noise) so that runs
// are reproducible from the master seed alone.
RepDraw draw_replicate(const ExperimentConfig& cfg, int rep) {
  RngStream rng(cfg.seed, static_cast<std::uint64_t>(rep));
  RepDraw d;
  d.X = draw_design(cfg.design, cfg.n, cfg.p, rng);
  d.truth = draw_truth(cfg.signal, cfg.p, rng);
  d.y.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i) d.y[i] = cfg.sigma * rng.next_gaussian();
  if (cfg.signal.sparsity > 0) d.y += d.X * d.truth;
  return d;
}

std::string selection_key_of(const LarPath& path, int K) {
  std::string key;
  for (int k = 0; k < K && k < path.size(); ++k) {
    if (k) key += ' ';
    key += (path.entered[k].sign > 0 ? '+' : '-');
    key += std::to_string(path.entered[k].plain + 1);
  }
  return key;
}

// Shared body of the null-law and power experiments: per replicate, one GST
// p-value per configured triple.
ExperimentReport run_pvalue_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.triples.empty())
    throw std::invalid_argument("experiment needs a non-empty triple list");

  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](int rep) {
    ReplicateRecord rec;
    rec.replicate = rep;
    RepDraw d = draw_replicate(cfg, rep);
    const DesignMatrix design(std::move(d.X));
    const CorrelationState state =
        build_correlation_state(design, ResponseVector(std::move(d.y)));
    const LarPath path = lar_path_recursive(state, cfg.K);
    if (path.size() < cfg.K + 1 || path.irrepresentable_upto < cfg.K) {
      rec.refused = true;
      rec.pvalues.assign(cfg.triples.size(), kNan);
    } else {
      const FrozenGeometry geometry = frozen_geometry(state, path, cfg.sigma);
      for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
        const auto [a, b, c] = cfg.triples[t];
        const LatticeRule rule = LatticeRule::korobov(
            c - a - 1, cfg.qmc.points, cfg.qmc.shifts,
            derive_seed(cfg.seed, static_cast<std::uint64_t>(rep), t + 1));
        const TestOutcome out = gst_pvalue(path, geometry, cfg.sigma, a, b, c, rule);
        if (refused(out)) {
          rec.refused = true;
          rec.pvalues.assign(cfg.triples.size(), kNan);
          break;
        }
        rec.pvalues.push_back(std::get<PValueReport>(out).p_value);
      }
    }
    report.records[rep] = std::move(rec);
  });
  return report;
}

std::vector<double> grid_99() {
  std::vector<double> g(99);
  for (int i = 0; i < 99; ++i) g[i] = (i + 1) / 100.0;
  return g;
}

double empirical_cdf(const std::vector<double>& sorted_sample, double t) {
  const auto it =
      std::upper_bound(sorted_sample.begin(), sorted_sample.end(), t);
  return sorted_sample.empty()
             ? 0.0
             : static_cast<double>(it - sorted_sample.begin()) /
                   static_cast<double>(sorted_sample.size());
}

double quantile_nearest(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNan;
  const auto n = static_cast<long long>(sorted.size());
  long long idx = std::llround(q * static_cast<double>(n - 1));
  idx = std::clamp<long long>(idx, 0, n - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

std::string triple_key(const std::array<int, 3>& t) {
  return std::to_string(t[0]) + "_" + std::to_string(t[1]) + "_" +
         std::to_string(t[2]);
}

json summarize(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  json s;
  const int total = static_cast<int>(report.records.size());
  int refused_count = 0;
  for (const auto& r : report.records) refused_count += r.refused ? 1 : 0;
  s["replicates"] = total;
  s["refused"] = refused_count;
  s["refusal_rate"] = total > 0 ? static_cast<double>(refused_count) / total : 0.0;

  switch (cfg.experiment) {
    case ExperimentKind::null_law: {
      json ks;
      for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
        std::vector<double> sample;
        for (const auto& r : report.records)
          if (!r.refused) sample.push_back(r.pvalues[t]);
        ks[triple_key(cfg.triples[t])] = ks_uniform(std::move(sample));
      }
      s["ks_distance"] = ks;
      break;
    }
    case ExperimentKind::power: {
      const std::vector<double> grid = grid_99();
      s["cdf_grid"] = grid;
      std::vector<std::vector<double>> cdfs(cfg.triples.size());
      json cdf_json;
      for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
        std::vector<double> sample;
        for (const auto& r : report.records)
          if (!r.refused) sample.push_back(r.pvalues[t]);
        std::sort(sample.begin(), sample.end());
        cdfs[t].reserve(grid.size());
        for (double g : grid) cdfs[t].push_back(empirical_cdf(sample, g));
        cdf_json[triple_key(cfg.triples[t])] = cdfs[t];
      }
      s["cdf"] = cdf_json;
      // min_cdf_gap[i][j] = min over the grid of CDF_i - CDF_j; i dominates j
      // (is everywhere at least as powerful, up to slack) when it is > -slack.
      json gaps;
      for (std::size_t i = 0; i < cfg.triples.size(); ++i) {
        json row;
        for (std::size_t j = 0; j < cfg.triples.size(); ++j) {
          if (i == j) continue;
          double gap = std::numeric_limits<double>::infinity();
          for (std::size_t g = 0; g < cdfs[i].size(); ++g)
            gap = std::min(gap, cdfs[i][g] - cdfs[j][g]);
          row[triple_key(cfg.triples[j])] = gap;
        }
        gaps[triple_key(cfg.triples[i])] = row;
      }
      s["min_cdf_gap"] = gaps;
      break;
    }
    case ExperimentKind::fdr: {
      std::vector<double> fdps;
      double mean_rej = 0.0;
      for (const auto& r : report.records) {
        if (r.refused) continue;
        fdps.push_back(r.fdp_value);
        mean_rej += r.n_rejected;
      }
      const int m = static_cast<int>(fdps.size());
      double mean = 0.0;
      for (double v : fdps) mean += v;
      if (m > 0) mean /= m;
      double sd = 0.0;
      for (double v : fdps) sd += (v - mean) * (v - mean);
      sd = m > 1 ? std::sqrt(sd / (m - 1)) : 0.0;
      s["fdr"] = mean;
      s["fdr_se"] = m > 0 ? sd / std::sqrt(static_cast<double>(m)) : 0.0;
      s["mean_rejections"] = m > 0 ? mean_rej / m : 0.0;
      if (cfg.bin_by_selection) {
        std::map<std::string, std::pair<int, double>> bins;
        for (const auto& r : report.records) {
          if (r.refused) continue;
          auto& b = bins[r.selection_key];
          b.first += 1;
          b.second += r.fdp_value;
        }
        json jb;
        for (const auto& [key, b] : bins) {
          if (b.first < 30) continue;  // report populated bins only
          jb[key] = {{"count", b.first}, {"mean_fdp", b.second / b.first}};
        }
        s["selection_bins"] = jb;
      }
      break;
    }
    case ExperimentKind::kmax: {
      std::vector<double> ks;
      for (const auto& r : report.records)
        if (!r.refused) ks.push_back(static_cast<double>(r.k_max));
      std::sort(ks.begin(), ks.end());
      double mean = 0.0;
      for (double v : ks) mean += v;
      if (!ks.empty()) mean /= static_cast<double>(ks.size());
      s["q025"] = quantile_nearest(ks, 0.025);
      s["median"] = quantile_nearest(ks, 0.5);
      s["q975"] = quantile_nearest(ks, 0.975);
      s["min"] = ks.empty() ? kNan : ks.front();
      s["max"] = ks.empty() ? kNan : ks.back();
      s["mean"] = mean;
      break;
    }
    case ExperimentKind::falseneg: {
      std::vector<double> sample;
      for (const auto& r : report.records)
        if (!r.refused) sample.push_back(r.pvalues.empty() ? kNan : r.pvalues[0]);
      std::vector<double> sorted = sample;
      std::sort(sorted.begin(), sorted.end());
      s["ks_distance"] = ks_uniform(sample);
      s["median_p"] = quantile_nearest(sorted, 0.5);
      break;
    }
  }
  return s;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::null_law: return "null-law";
    case ExperimentKind::power: return "power";
    case ExperimentKind::fdr: return "fdr";
    case ExperimentKind::kmax: return "kmax";
    case ExperimentKind::falseneg: return "falseneg";
  }
  return "unknown";
}

const char* to_string(DesignModel m) {
  switch (m) {
    case DesignModel::identity: return "identity";
    case DesignModel::iid_gaussian: return "iid-gaussian";
    case DesignModel::sphere_columns: return "sphere-columns";
  }
  return "unknown";
}

double ks_uniform(std::vector<double> sample) {
  if (sample.empty()) return kNan;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    d = std::max(d, (i + 1) / n - sample[i]);
    d = std::max(d, sample[i] - i / n);
  }
  return d;
}

Eigen::MatrixXd draw_design(DesignModel model, int n, int p, RngStream& rng) {
  switch (model) {
    case DesignModel::identity: {
      if (n != p)
        throw std::invalid_argument("identity design requires n == p");
      return Eigen::MatrixXd::Identity(n, p);
    }
    case DesignModel::iid_gaussian: {
      Eigen::MatrixXd X(n, p);
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = rng.next_gaussian();
      return X;
    }
    case DesignModel::sphere_columns: {
      Eigen::MatrixXd X(n, p);
      for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) X(i, j) = rng.next_gaussian();
        X.col(j) /= X.col(j).norm();
      }
      return X;
    }
  }
  throw std::invalid_argument("unknown design model");
}

Eigen::VectorXd draw_truth(const SignalSpec& signal, int p, RngStream& rng) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (signal.sparsity <= 0) return beta;
  if (signal.sparsity > p)
    throw std::invalid_argument("signal sparsity exceeds p");
  std::vector<int> idx(p);
  for (int j = 0; j < p; ++j) idx[j] = j;
  for (int k = 0; k < signal.sparsity; ++k) {
    const int pick = k + static_cast<int>(rng.next_u64() % (p - k));
    std::swap(idx[k], idx[pick]);
    beta[idx[k]] = signal.amplitude;
  }
  return beta;
}

ExperimentReport run_null_law(const ExperimentConfig& cfg) {
  if (cfg.signal.sparsity != 0)
    throw std::invalid_argument("null-law requires an empty signal spec");
  return run_pvalue_grid(cfg);
}

ExperimentReport run_power(const ExperimentConfig& cfg) { return run_pvalue_grid(cfg); }

ExperimentReport run_fdr(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](int rep) {
    ReplicateRecord rec;
    rec.replicate = rep;
    RepDraw d = draw_replicate(cfg, rep);
    const DesignMatrix design(std::move(d.X));
    const CorrelationState state =
        build_correlation_state(design, ResponseVector(std::move(d.y)));
    const LarPath path = lar_path_recursive(state, cfg.K);
    if (path.size() < cfg.K + 1 || path.irrepresentable_upto < cfg.K) {
      rec.refused = true;
    } else {
      const FrozenGeometry geometry = frozen_geometry(state, path, cfg.sigma);
      const PValueSequence seq = spacing_pvalue_sequence(path, geometry, cfg.sigma);
      const RejectionSet rset = bh_reject(seq, cfg.alpha);
      const std::set<int> nulls = null_step_set(state, path, d.truth, cfg.K);
      rec.n_rejected = static_cast<int>(rset.rejected.size());
      for (int k : rset.rejected) rec.fp += nulls.count(k) ? 1 : 0;
      rec.tp = rec.n_rejected - rec.fp;
      rec.fdp_value = fdp(rset, nulls);
      rec.selection_key = selection_key_of(path, cfg.K);
    }
    report.records[rep] = std::move(rec);
  });
  return report;
}

ExperimentReport run_kmax(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cfg.replicates);
  const int cap = std::min(cfg.K, std::min(cfg.n, cfg.p) - 1);
  parallel_for(cfg.replicates, cfg.threads, [&](int rep) {
    ReplicateRecord rec;
    rec.replicate = rep;
    RepDraw d = draw_replicate(cfg, rep);
    const DesignMatrix design(std::move(d.X));
    const CorrelationState state =
        build_correlation_state(design, ResponseVector(std::move(d.y)));
    const LarPath path = lar_path_recursive(state, cap);
    rec.k_max = path.irrepresentable_upto;
    report.records[rep] = std::move(rec);
  });
  return report;
}

ExperimentReport run_falseneg(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](int rep) {
    ReplicateRecord rec;
    rec.replicate = rep;
    RepDraw d = draw_replicate(cfg, rep);
    const DesignMatrix design(std::move(d.X));
    const ResponseVector response(std::move(d.y));
    LatticeRule rule;
    rule.n_points = cfg.qmc.points;
    rule.n_shifts = cfg.qmc.shifts;
    rule.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep), 0);
    SelectionDecision decision;
    const TestOutcome out = false_negative_test(
        design, response, cfg.K, cfg.selection,
        cfg.known_sigma ? std::optional<double>(cfg.sigma) : std::nullopt, rule,
        &decision);
    if (refused(out)) {
      rec.refused = true;
      rec.k_max = std::get<Refusal>(out).k_max;
    } else {
      rec.m_hat = decision.m_hat;
      rec.pvalues.push_back(std::get<PValueReport>(out).p_value);
    }
    report.records[rep] = std::move(rec);
  });
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::null_law: return run_null_law(cfg);
    case ExperimentKind::power: return run_power(cfg);
    case ExperimentKind::fdr: return run_fdr(cfg);
    case ExperimentKind::kmax: return run_kmax(cfg);
    case ExperimentKind::falseneg: return run_falseneg(cfg);
  }
  throw std::invalid_argument("unknown experiment kind");
}

std::string records_to_csv(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::string out;
  switch (cfg.experiment) {
    case ExperimentKind::null_law:
    case ExperimentKind::power: {
      out = "replicate,refused";
      for (const auto& t : cfg.triples) out += ",p_" + triple_key(t);
      out += '\n';
      for (const auto& r : report.records) {
        out += std::to_string(r.replicate);
        out += r.refused ? ",1" : ",0";
        for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
          out += ',';
          out += format_double(t < r.pvalues.size() ? r.pvalues[t] : kNan);
        }
        out += '\n';
      }
      break;
    }
    case ExperimentKind::kmax: {
      out = "replicate,k_max\n";
      for (const auto& r : report.records)
        out += std::to_string(r.replicate) + "," + std::to_string(r.k_max) + "\n";
      break;
    }
    case ExperimentKind::fdr: {
      out = "replicate,refused,n_rejected,fp,tp,fdp,selection_key\n";
      for (const auto& r : report.records) {
        out += std::to_string(r.replicate);
        out += r.refused ? ",1," : ",0,";
        out += std::to_string(r.n_rejected) + "," + std::to_string(r.fp) + "," +
               std::to_string(r.tp) + "," + format_double(r.fdp_value) + "," +
               r.selection_key + "\n";
      }
      break;
    }
    case ExperimentKind::falseneg: {
      out = "replicate,refused,m_hat,p_value\n";
      for (const auto& r : report.records) {
        out += std::to_string(r.replicate);
        out += r.refused ? ",1," : ",0,";
        out += std::to_string(r.m_hat) + "," +
               format_double(r.pvalues.empty() ? kNan : r.pvalues[0]) + "\n";
      }
      break;
    }
  }
  return out;
}

std::string summary_to_json(const ExperimentReport& report) {
  json root;
  root["version"] = report.version;
  root["config"] = json::parse(report.config.to_json_text());
  root["summary"] = summarize(report);
  return root.dump(2) + "\n";
}

int write_report(const ExperimentReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/summary.json");
    f << summary_to_json(report);
  }
  {
    std::ofstream f(out_dir + "/records.csv");
    f << records_to_csv(report);
  }
  if (report.records.empty()) return 2;
  int refused_count = 0;
  for (const auto& r : report.records) refused_count += r.refused ? 1 : 0;
  if (2 * refused_count > static_cast<int>(report.records.size())) return 3;
  return 0;
}

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("config: n, p must be positive");
  if (K < 1) throw std::invalid_argument("config: K must be >= 1");
  if (replicates < 0) throw std::invalid_argument("config: replicates < 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be > 0");
  if (design == DesignModel::identity && n != p)
    throw std::invalid_argument("config: identity design requires n == p");
  if (!LatticeRule::supported_points(qmc.points))
    throw std::invalid_argument("config: unsupported qmc point count");
  if (qmc.shifts < 2) throw std::invalid_argument("config: qmc shifts must be >= 2");
  for (const auto& t : triples) {
    if (!(t[0] >= 0 && t[0] < t[1] && t[1] < t[2] && t[2] <= K + 1))
      throw std::invalid_argument("config: invalid triple (need 0 <= a < b < c <= K+1)");
  }
  if (experiment == ExperimentKind::falseneg && n <= K + 3)
    throw std::invalid_argument("config: falseneg needs n > K + 3");
  if (signal.sparsity < 0 || signal.sparsity > p)
    throw std::invalid_argument("config: signal sparsity outside [0, p]");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  const std::string kind = j.at("experiment").get<std::string>();
  if (kind == "null-law") cfg.experiment = ExperimentKind::null_law;
  else if (kind == "power") cfg.experiment = ExperimentKind::power;
  else if (kind == "fdr") cfg.experiment = ExperimentKind::fdr;
  else if (kind == "kmax") cfg.experiment = ExperimentKind::kmax;
  else if (kind == "falseneg") cfg.experiment = ExperimentKind::falseneg;
  else throw std::invalid_argument("config: unknown experiment '" + kind + "'");

  cfg.n = j.value("n", cfg.n);
  cfg.p = j.value("p", cfg.p);
  cfg.K = j.value("K", cfg.K);
  if (j.contains("design")) {
    const std::string d = j["design"].get<std::string>();
    if (d == "identity") cfg.design = DesignModel::identity;
    else if (d == "iid-gaussian") cfg.design = DesignModel::iid_gaussian;
    else if (d == "sphere-columns") cfg.design = DesignModel::sphere_columns;
    else throw std::invalid_argument("config: unknown design '" + d + "'");
  }
  if (j.contains("signal")) {
    cfg.signal.sparsity = j["signal"].value("sparsity", 0);
    cfg.signal.amplitude = j["signal"].value("amplitude", 0.0);
  }
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.replicates = j.value("replicates", cfg.replicates);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("qmc")) {
    cfg.qmc.points = j["qmc"].value("points", cfg.qmc.points);
    cfg.qmc.shifts = j["qmc"].value("shifts", cfg.qmc.shifts);
  }
  if (j.contains("triples")) {
    for (const auto& t : j["triples"]) {
      if (!t.is_array() || t.size() != 3)
        throw std::invalid_argument("config: each triple must be [a, b, c]");
      cfg.triples.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
  }
  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("selection")) {
    const auto& sel = j["selection"];
    const std::string rule = sel.value("rule", std::string("sequential"));
    if (rule == "sequential") cfg.selection.kind = SelectionRuleSpec::Kind::sequential;
    else if (rule == "fixed") cfg.selection.kind = SelectionRuleSpec::Kind::fixed;
    else throw std::invalid_argument("config: unknown selection rule '" + rule + "'");
    cfg.selection.alpha_prime = sel.value("alpha_prime", cfg.selection.alpha_prime);
    cfg.selection.gamma_fp = sel.value("gamma_fp", cfg.selection.gamma_fp);
    cfg.selection.fixed_m = sel.value("fixed_m", cfg.selection.fixed_m);
  }
  cfg.known_sigma = j.value("known_sigma", cfg.known_sigma);
  cfg.bin_by_selection = j.value("bin_by_selection", cfg.bin_by_selection);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["experiment"] = to_string(experiment);
  j["n"] = n;
  j["p"] = p;
  j["K"] = K;
  j["design"] = to_string(design);
  j["signal"] = {{"sparsity", signal.sparsity}, {"amplitude", signal.amplitude}};
  j["sigma"] = sigma;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["qmc"] = {{"points", qmc.points}, {"shifts", qmc.shifts}};
  json jt = json::array();
  for (const auto& t : triples) jt.push_back({t[0], t[1], t[2]});
  j["triples"] = jt;
  j["alpha"] = alpha;
  j["selection"] = {
      {"rule", selection.kind == SelectionRuleSpec::Kind::fixed ? "fixed" : "sequential"},
      {"alpha_prime", selection.alpha_prime},
      {"gamma_fp", selection.gamma_fp},
      {"fixed_m", selection.fixed_m}};
  j["known_sigma"] = known_sigma;
  j["bin_by_selection"] = bin_by_selection;
  j["threads"] = threads;
  return j.dump(2);
}

}  // namespace larinf
