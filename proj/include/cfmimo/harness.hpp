#pragma once

#include "cfmimo/config.hpp"
#include "cfmimo/optimizer.hpp"
#include "cfmimo/precoding.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfmimo {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Method names accepted by the campaign: the optimizer methods plus
/// "ideal-epa", equal power with an ideal amplifier.
const std::vector<std::string>& campaign_method_names();
bool is_campaign_method(const std::string& name);

struct CampaignOptions {
  std::vector<std::string> methods{"epa", "maxmin", "uc", "ideal"};
  std::vector<Precoder> precoders{Precoder::MR, Precoder::RZF, Precoder::MMSE};
  int n_snapshots = 200;
  OptimizerOptions optimizer;
  std::optional<std::filesystem::path> cache_dir;
  int workers = 0;  // 0: hardware concurrency
};

struct SeSample {
  std::string method;
  std::string precoder;
  int snapshot = 0;
  int user = 0;
  double se = 0.0;
  double gamma = 0.0;
  double runtime_s = 0.0;
};

/// One (snapshot, method, precoder) solve.
struct SolveRecord {
  std::string method;
  std::string precoder;
  int snapshot = 0;
  double gamma_t = 0.0;
  double runtime_s = 0.0;
  SolveTrace trace;
  bool optimized = false;         // produced by bisection
  double min_realized_gamma = 0.0;  // min over users carrying an SINR constraint
  double max_budget_excess = 0.0;   // max_l sum_k u eta - budget_l
  std::vector<double> coherent_ratio;  // C_k / B_k per user
};

struct SolveFailure {
  std::string method;
  std::string precoder;
  int snapshot = 0;
  std::string message;
};

struct CampaignMetadata {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int n_snapshots = 0;
  std::string code_version = kCodeVersion;
  std::string config_json;
  double epsilon = 0.0;
  int n_closest = 1;
};

struct CurveSummary {
  std::string method;
  std::string precoder;
  std::vector<double> cdf;  // sorted SE samples
  double likely95 = 0.0;
  double runtime_mean = 0.0;
  double runtime_stddev = 0.0;
  int n_solves = 0;
};

struct CampaignResult {
  std::vector<SeSample> samples;  // sorted by (method, precoder, snapshot, user)
  std::vector<SolveRecord> solves;
  std::vector<SolveFailure> failures;
  CampaignMetadata metadata;

  /// One entry per (method, precoder) that produced samples.
  std::vector<CurveSummary> curves() const;
  std::optional<CurveSummary> curve(const std::string& method, const std::string& precoder) const;
};

/// Order statistic at ceil(q n) (1-based) of the sorted samples; NaN if empty.
double lower_percentile(std::vector<double> values, double q);
inline double likely95(const std::vector<double>& values) { return lower_percentile(values, 0.05); }

/// Snapshot s uses the configuration seed mixed with s, so results are
/// independent of worker count. Failures are recorded per solve.
CampaignResult run_campaign(const SimConfig& cfg, const CampaignOptions& options);

/// Writes <dir>/samples.csv and <dir>/summary.json.
void export_results(const CampaignResult& result, const std::filesystem::path& dir);

/// Reads samples.csv (and metadata from summary.json when present).
CampaignResult import_results(const std::filesystem::path& dir);

}  // namespace cfmimo
