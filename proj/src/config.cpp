#include "cfmimo/config.hpp"

#include "cfmimo/types.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cfmimo {

using nlohmann::json;

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid config: ") + what);
  };
  require(num_aps >= 1, "num_aps must be >= 1");
  require(antennas_per_ap >= 1, "antennas_per_ap must be >= 1");
  require(num_users >= 1, "num_users must be >= 1");
  require(pilot_length >= 1, "pilot_length must be >= 1");
  require(pilot_length <= coherence_block, "pilot_length must not exceed coherence_block");
  require(user_power_w > 0.0, "user_power_w must be > 0");
  require(ap_power_w > 0.0, "ap_power_w must be > 0");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(coverage_radius_m > 0.0, "coverage_radius_m must be > 0");
  require(angular_spread_deg >= 0.0, "angular_spread_deg must be >= 0");
  require(realizations_for_moments >= 1, "realizations_for_moments must be >= 1");
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const char* kKnown[] = {"L", "N_a", "K", "tau_c", "tau_p", "p_u", "p_a", "bandwidth_hz",
                                 "noise_figure_db", "coverage_radius_m", "angular_spread_deg",
                                 "realizations_for_moments", "seed"};
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }

  SimConfig cfg;
  try {
    read_field(j, "L", cfg.num_aps);
    read_field(j, "N_a", cfg.antennas_per_ap);
    read_field(j, "K", cfg.num_users);
    read_field(j, "tau_c", cfg.coherence_block);
    read_field(j, "tau_p", cfg.pilot_length);
    read_field(j, "p_u", cfg.user_power_w);
    read_field(j, "p_a", cfg.ap_power_w);
    read_field(j, "bandwidth_hz", cfg.bandwidth_hz);
    read_field(j, "noise_figure_db", cfg.noise_figure_db);
    read_field(j, "coverage_radius_m", cfg.coverage_radius_m);
    read_field(j, "angular_spread_deg", cfg.angular_spread_deg);
    read_field(j, "realizations_for_moments", cfg.realizations_for_moments);
    read_field(j, "seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const SimConfig& cfg) {
  // nlohmann::json keeps keys sorted, which gives a canonical form for hashing.
  json j = {{"L", cfg.num_aps},
            {"N_a", cfg.antennas_per_ap},
            {"K", cfg.num_users},
            {"tau_c", cfg.coherence_block},
            {"tau_p", cfg.pilot_length},
            {"p_u", cfg.user_power_w},
            {"p_a", cfg.ap_power_w},
            {"bandwidth_hz", cfg.bandwidth_hz},
            {"noise_figure_db", cfg.noise_figure_db},
            {"coverage_radius_m", cfg.coverage_radius_m},
            {"angular_spread_deg", cfg.angular_spread_deg},
            {"realizations_for_moments", cfg.realizations_for_moments},
            {"seed", cfg.seed}};
  return j.dump();
}

std::uint64_t config_hash(const SimConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cfmimo
