#include "cfmimo/harness.hpp"

#include "cfmimo/moments.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/sinr.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

namespace cfmimo {

using json = nlohmann::json;

const std::vector<std::string>& campaign_method_names() {
  static const std::vector<std::string> names{"jup", "jup-lo", "maxmin", "epa", "uc", "ideal", "ideal-epa"};
  return names;
}

bool is_campaign_method(const std::string& name) {
  const auto& n = campaign_method_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

double lower_percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<size_t>(rank, 1, values.size()) - 1];
}

namespace {

struct SnapshotOutput {
  std::vector<SeSample> samples;
  std::vector<SolveRecord> solves;
  std::vector<SolveFailure> failures;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Allocation run_method(const std::string& method, const NetworkSnapshot& snapshot, const NetworkSnapshot& ideal,
                      const MomentTable& moments, const MomentTable& ideal_moments,
                      const OptimizerOptions& opt) {
  if (method == "jup") return jup(snapshot, moments, opt);
  if (method == "jup-lo") return jup_lo(snapshot, moments, opt);
  if (method == "maxmin") return maxmin_cf(snapshot, moments, opt);
  if (method == "epa") return epa_cf(snapshot, moments);
  if (method == "uc") return uc_nearest(snapshot, moments, opt);
  if (method == "ideal") return ideal_reference(snapshot, ideal_moments, opt);
  if (method == "ideal-epa") {
    Allocation a = epa_cf(ideal, ideal_moments);
    a.method = Method::IDEAL_REFERENCE;
    return a;
  }
  throw ConfigError("unknown method '" + method + "'");
}

SnapshotOutput run_snapshot(const SimConfig& cfg, int index, const CampaignOptions& options,
                            const MomentCache* cache) {
  SnapshotOutput out;
  SimConfig snap_cfg = cfg;
  snap_cfg.seed = derive_seed(cfg.seed, streams::kSnapshot, static_cast<std::uint64_t>(index));
  const NetworkSnapshot snapshot = generate_snapshot(snap_cfg);
  const NetworkSnapshot ideal = snapshot.with_ideal_pa();
  const std::uint64_t moment_seed = derive_seed(snap_cfg.seed, streams::kMoments);
  const bool needs_ideal = std::any_of(options.methods.begin(), options.methods.end(),
                                       [](const std::string& m) { return m == "ideal" || m == "ideal-epa"; });

  for (const Precoder pre : options.precoders) {
    const std::string pre_name = to_string(pre);
    MomentTable moments;
    MomentTable ideal_moments;
    try {
      moments = moments_for(snapshot, pre, cfg.realizations_for_moments, moment_seed, cache);
      // Only MMSE precoders depend on the amplifier (through the power split).
      if (needs_ideal)
        ideal_moments = pre == Precoder::MMSE
                            ? moments_for(ideal, pre, cfg.realizations_for_moments, moment_seed, cache)
                            : moments;
    } catch (const std::exception& e) {
      for (const auto& m : options.methods) out.failures.push_back({m, pre_name, index, e.what()});
      continue;
    }

    for (const std::string& method : options.methods) {
      const bool is_ideal = method == "ideal" || method == "ideal-epa";
      const NetworkSnapshot& eval_snapshot = is_ideal ? ideal : snapshot;
      const MomentTable& eval_moments = is_ideal ? ideal_moments : moments;
      Allocation alloc;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        alloc = run_method(method, snapshot, ideal, moments, ideal_moments, options.optimizer);
      } catch (const std::exception& e) {
        out.failures.push_back({method, pre_name, index, e.what()});
        continue;
      }
      const double runtime = elapsed_s(t0);

      const auto sinr = sinr_of(eval_snapshot, eval_moments, alloc.U, alloc.eta);
      SolveRecord rec;
      rec.method = method;
      rec.precoder = pre_name;
      rec.snapshot = index;
      rec.gamma_t = alloc.gamma_t;
      rec.runtime_s = runtime;
      rec.trace = alloc.trace;
      rec.optimized = method != "epa" && method != "ideal-epa";
      rec.min_realized_gamma = std::numeric_limits<double>::infinity();
      const auto budget = ap_budgets(eval_snapshot);
      rec.max_budget_excess = -std::numeric_limits<double>::infinity();
      for (int l = 0; l < eval_snapshot.num_aps; ++l) {
        double load = 0.0;
        for (int k = 0; k < eval_snapshot.num_users; ++k) load += alloc.U(k, l) ? alloc.eta(k, l) : 0.0;
        rec.max_budget_excess = std::max(rec.max_budget_excess, load - budget[l]);
      }
      for (int k = 0; k < eval_snapshot.num_users; ++k) {
        bool served = false;
        for (int l = 0; l < eval_snapshot.num_aps; ++l) served = served || alloc.U(k, l);
        if (served) rec.min_realized_gamma = std::min(rec.min_realized_gamma, sinr[k].gamma);
        rec.coherent_ratio.push_back(coherent_ratio(eval_snapshot, eval_moments, alloc.U, alloc.nu, k));
        out.samples.push_back({method, pre_name, index, k, sinr[k].se, sinr[k].gamma, runtime});
      }
      out.solves.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

CampaignResult run_campaign(const SimConfig& cfg, const CampaignOptions& options) {
  cfg.validate();
  if (options.n_snapshots < 0) throw ConfigError("number of snapshots must be nonnegative");
  for (const auto& m : options.methods)
    if (!is_campaign_method(m)) throw ConfigError("unknown method '" + m + "'");
  const int links = cfg.num_aps * cfg.num_users;
  const bool wants_jup = std::find(options.methods.begin(), options.methods.end(), "jup") != options.methods.end();
  if (wants_jup && links > options.optimizer.jup_max_links && !options.optimizer.allow_large_jup)
    throw JupGated("JUP needs L*K <= " + std::to_string(options.optimizer.jup_max_links) + " (got " +
                   std::to_string(links) + "); use jup-lo or pass the large-JUP override");

  std::optional<MomentCache> cache;
  if (options.cache_dir) cache.emplace(*options.cache_dir);

  std::vector<SnapshotOutput> outputs(options.n_snapshots);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::clamp(options.workers > 0 ? options.workers : static_cast<int>(hw), 1,
                                 std::max(1, options.n_snapshots));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int s = next++; s < options.n_snapshots; s = next++)
      outputs[s] = run_snapshot(cfg, s, options, cache ? &*cache : nullptr);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CampaignResult result;
  for (auto& o : outputs) {
    result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
    result.solves.insert(result.solves.end(), o.solves.begin(), o.solves.end());
    result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
  }
  std::sort(result.samples.begin(), result.samples.end(), [](const SeSample& a, const SeSample& b) {
    return std::tie(a.method, a.precoder, a.snapshot, a.user) < std::tie(b.method, b.precoder, b.snapshot, b.user);
  });
  result.metadata.config_hash = config_hash(cfg);
  result.metadata.seed = cfg.seed;
  result.metadata.n_snapshots = options.n_snapshots;
  result.metadata.config_json = config_to_json(cfg);
  result.metadata.epsilon = options.optimizer.epsilon;
  result.metadata.n_closest = options.optimizer.n_closest;
  return result;
}

std::vector<CurveSummary> CampaignResult::curves() const {
  std::map<std::pair<std::string, std::string>, CurveSummary> by_key;
  std::map<std::pair<std::string, std::string>, std::map<int, double>> runtimes;
  for (const auto& s : samples) {
    auto& c = by_key[{s.method, s.precoder}];
    c.method = s.method;
    c.precoder = s.precoder;
    c.cdf.push_back(s.se);
    runtimes[{s.method, s.precoder}][s.snapshot] = s.runtime_s;
  }
  std::vector<CurveSummary> out;
  for (auto& [key, c] : by_key) {
    std::sort(c.cdf.begin(), c.cdf.end());
    c.likely95 = likely95(c.cdf);
    const auto& rt = runtimes[key];
    c.n_solves = static_cast<int>(rt.size());
    double sum = 0.0, sq = 0.0;
    for (const auto& [snap, t] : rt) {
      sum += t;
      sq += t * t;
    }
    const double n = static_cast<double>(rt.size());
    c.runtime_mean = sum / n;
    c.runtime_stddev = n > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1))) : 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<CurveSummary> CampaignResult::curve(const std::string& method, const std::string& precoder) const {
  for (auto& c : curves())
    if (c.method == method && c.precoder == precoder) return c;
  return std::nullopt;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

const char* kCsvHeader = "method,precoder,snapshot,user,se_bps_hz,gamma,runtime_s";

}  // namespace

void export_results(const CampaignResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

  const auto csv_path = dir / "samples.csv";
  {
    auto f = open_for_write(csv_path);
    f << kCsvHeader << '\n';
    for (const auto& s : result.samples)
      f << s.method << ',' << s.precoder << ',' << s.snapshot << ',' << s.user << ',' << format_number(s.se) << ','
        << format_number(s.gamma) << ',' << format_number(s.runtime_s) << '\n';
    if (!f) throw Error("write failed for '" + csv_path.string() + "'");
  }

  json curves = json::array();
  for (const auto& c : result.curves())
    curves.push_back({{"method", c.method},
                      {"precoder", c.precoder},
                      {"samples", c.cdf.size()},
                      {"likely95", number_or_null(c.likely95)},
                      {"runtime_mean_s", c.runtime_mean},
                      {"runtime_stddev_s", c.runtime_stddev},
                      {"solves", c.n_solves}});
  json failures = json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"method", f.method}, {"precoder", f.precoder}, {"snapshot", f.snapshot}, {"error", f.message}});
  json solves = json::array();
  for (const auto& s : result.solves)
    solves.push_back({{"method", s.method},
                      {"precoder", s.precoder},
                      {"snapshot", s.snapshot},
                      {"gamma_t", s.gamma_t},
                      {"runtime_s", s.runtime_s},
                      {"bisection_steps", s.trace.bisection_steps},
                      {"bb_nodes", s.trace.bb_nodes},
                      {"solver_failures", s.trace.solver_failures},
                      {"bound_violations", s.trace.bound_violations},
                      {"max_tightness_gap", s.trace.max_tightness_gap},
                      {"min_realized_gamma", number_or_null(s.min_realized_gamma)},
                      {"max_budget_excess", s.max_budget_excess}});
  const auto& m = result.metadata;
  json summary = {{"metadata",
                   {{"config_hash", m.config_hash},
                    {"seed", m.seed},
                    {"n_snapshots", m.n_snapshots},
                    {"code_version", m.code_version},
                    {"epsilon", m.epsilon},
                    {"n_closest", m.n_closest},
                    {"config", m.config_json.empty() ? json(nullptr) : json::parse(m.config_json)}}},
                  {"curves", curves},
                  {"failures", failures},
                  {"solves", solves}};
  const auto json_path = dir / "summary.json";
  auto f = open_for_write(json_path);
  f << summary.dump(2) << '\n';
  if (!f) throw Error("write failed for '" + json_path.string() + "'");
}

CampaignResult import_results(const std::filesystem::path& dir) {
  CampaignResult result;
  const auto csv_path = dir / "samples.csv";
  std::ifstream f(csv_path);
  if (!f) throw Error("cannot open '" + csv_path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader)
    throw Error("'" + csv_path.string() + "': unexpected header, expected " + kCsvHeader);
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 7)
      throw Error("'" + csv_path.string() + "' line " + std::to_string(line_no) + ": expected 7 columns");
    try {
      result.samples.push_back({cols[0], cols[1], std::stoi(cols[2]), std::stoi(cols[3]), std::stod(cols[4]),
                                std::stod(cols[5]), std::stod(cols[6])});
    } catch (const std::exception&) {
      throw Error("'" + csv_path.string() + "' line " + std::to_string(line_no) + ": bad number");
    }
  }

  const auto json_path = dir / "summary.json";
  std::ifstream jf(json_path);
  if (jf) {
    const json summary = json::parse(jf);
    const auto& m = summary.at("metadata");
    result.metadata.config_hash = m.at("config_hash").get<std::uint64_t>();
    result.metadata.seed = m.at("seed").get<std::uint64_t>();
    result.metadata.n_snapshots = m.at("n_snapshots").get<int>();
    result.metadata.code_version = m.at("code_version").get<std::string>();
    result.metadata.epsilon = m.at("epsilon").get<double>();
    result.metadata.n_closest = m.at("n_closest").get<int>();
    if (!m.at("config").is_null()) result.metadata.config_json = m.at("config").dump();
    for (const auto& fl : summary.at("failures"))
      result.failures.push_back({fl.at("method"), fl.at("precoder"), fl.at("snapshot"), fl.at("error")});
  }
  return result;
}

}  // namespace cfmimo
