#include "cfmimo/harness.hpp"
#include "cfmimo/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

struct SimulateArgs {
  std::string config;
  std::vector<std::string> methods{"jup-lo", "maxmin", "epa", "uc", "ideal"};
  std::vector<std::string> precoders{"mr", "rzf", "mmse"};
  int snapshots = 200;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  double epsilon = 1e-3;
  int n_closest = 1;
  long long node_budget = 10000;
  bool allow_large_jup = false;
  std::string cache_dir;
  int workers = 0;
};

cfmimo::SimConfig load_or_default(const std::string& path) {
  return path.empty() ? cfmimo::SimConfig{} : cfmimo::load_config(path);
}

int simulate(const SimulateArgs& a) {
  cfmimo::SimConfig cfg = load_or_default(a.config);
  if (a.seed) cfg.seed = *a.seed;
  cfmimo::CampaignOptions opt;
  opt.methods = a.methods;
  opt.precoders.clear();
  for (const auto& p : a.precoders) opt.precoders.push_back(cfmimo::parse_precoder(p));
  opt.n_snapshots = a.snapshots;
  opt.optimizer.epsilon = a.epsilon;
  opt.optimizer.n_closest = a.n_closest;
  opt.optimizer.node_budget = a.node_budget;
  opt.optimizer.allow_large_jup = a.allow_large_jup;
  opt.workers = a.workers;
  if (!a.cache_dir.empty()) opt.cache_dir = a.cache_dir;

  const cfmimo::CampaignResult result = cfmimo::run_campaign(cfg, opt);
  cfmimo::export_results(result, a.out);

  std::printf("%-10s %-6s %8s %12s %12s\n", "method", "prec", "samples", "SE95", "runtime_s");
  for (const auto& c : result.curves())
    std::printf("%-10s %-6s %8zu %12.6f %12.4f\n", c.method.c_str(), c.precoder.c_str(), c.cdf.size(), c.likely95,
                c.runtime_mean);
  for (const auto& f : result.failures)
    std::fprintf(stderr, "failure: %s/%s snapshot %d: %s\n", f.method.c_str(), f.precoder.c_str(), f.snapshot,
                 f.message.c_str());
  std::printf("wrote %s/samples.csv and %s/summary.json\n", a.out.c_str(), a.out.c_str());
  return 0;
}

int validate(const std::string& config, int instances) {
  cfmimo::ValidationOptions opt;
  opt.instances = instances;
  int failed = 0;
  for (const auto& c : cfmimo::run_property_suite(load_or_default(config), opt)) {
    std::printf("[%s] %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.empty() ? "" : ": ",
                c.detail.c_str());
    failed += c.passed ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO downlink with nonlinear power amplifiers"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a Monte Carlo campaign and write CSV/JSON results");
  s->add_option("--config", sim.config, "JSON configuration file")->check(CLI::ExistingFile);
  s->add_option("--methods,--method", sim.methods, "jup, jup-lo, maxmin, epa, uc, ideal, ideal-epa")
      ->delimiter(',')
      ->check(CLI::IsMember(cfmimo::campaign_method_names()));
  s->add_option("--precoders", sim.precoders, "mr, zf, rzf, mmse")->delimiter(',');
  s->add_option("--snapshots", sim.snapshots, "number of large-scale snapshots")->check(CLI::NonNegativeNumber);
  s->add_option("--out", sim.out, "output directory");
  s->add_option("--seed", sim.seed, "overrides the configuration seed");
  s->add_option("--epsilon", sim.epsilon, "bisection tolerance on the SINR")->check(CLI::PositiveNumber);
  s->add_option("--n-closest", sim.n_closest, "APs per user in the two-stage method")->check(CLI::PositiveNumber);
  s->add_option("--node-budget", sim.node_budget, "branch-and-bound node limit")->check(CLI::PositiveNumber);
  s->add_flag("--allow-large-jup", sim.allow_large_jup, "run exact JUP when L*K exceeds 16");
  s->add_option("--cache-dir", sim.cache_dir, "directory for cached moment tables");
  s->add_option("--workers", sim.workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  std::string vconfig;
  int instances = 10;
  auto* v = app.add_subcommand("validate", "Run the property suites; nonzero exit on any violation");
  v->add_option("--config", vconfig, "JSON configuration file")->check(CLI::ExistingFile);
  v->add_option("--instances", instances, "random instances per optimizer property")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s) return simulate(sim);
    return validate(vconfig, instances);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
