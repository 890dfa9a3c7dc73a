#include "cfmimo/network.hpp"

#include "cfmimo/rng.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

namespace cfmimo {

namespace {

Point uniform_in_disk(Rng& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double theta = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

class Fnv1a {
 public:
  void add_bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add_bytes(&v, sizeof v); }
  void add(int v) { add_bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

double noise_power_w(double bandwidth_hz, double noise_figure_db) {
  return std::pow(10.0, (-174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db - 30.0) / 10.0);
}

double large_scale_gain(double distance_m, double shadowing_db) {
  const double d = std::max(distance_m, 1.0);
  return std::pow(10.0, (-30.5 - 36.7 * std::log10(d) + shadowing_db) / 10.0);
}

CMat local_scattering_correlation(int antennas, double nominal_angle_rad, double angular_std_rad) {
  CMat corr(antennas, antennas);
  const double s = std::sin(nominal_angle_rad);
  const double c = std::cos(nominal_angle_rad);
  for (int m = 0; m < antennas; ++m) {
    for (int n = 0; n < antennas; ++n) {
      const double dist = n - m;
      const double spread = angular_std_rad * std::numbers::pi * dist * c;
      corr(m, n) = std::polar(std::exp(-0.5 * spread * spread), std::numbers::pi * dist * s);
    }
  }
  return corr;
}

NetworkSnapshot NetworkSnapshot::with_ideal_pa() const {
  NetworkSnapshot ideal = *this;
  std::fill(ideal.alpha.begin(), ideal.alpha.end(), cd(1.0, 0.0));
  std::fill(ideal.beta.begin(), ideal.beta.end(), 0.0);
  return ideal;
}

std::uint64_t NetworkSnapshot::hash() const {
  Fnv1a h;
  h.add(num_aps);
  h.add(num_users);
  h.add(antennas_per_ap);
  h.add(pilot_length);
  h.add(user_power_w);
  h.add(ap_power_w);
  h.add(sigma_z2);
  for (const auto& p : ap_positions) { h.add(p.x); h.add(p.y); }
  for (const auto& p : user_positions) { h.add(p.x); h.add(p.y); }
  for (const auto& r : R.raw()) h.add_bytes(r.data(), sizeof(cd) * r.size());
  for (int p : pilot_of) h.add(p);
  for (const auto& a : alpha) { h.add(a.real()); h.add(a.imag()); }
  for (double b : beta) h.add(b);
  return h.value();
}

void NetworkSnapshot::validate() const {
  if (num_aps < 1 || num_users < 1 || antennas_per_ap < 1)
    throw ConfigError("snapshot dimensions must be positive");
  if (R.rows() != num_users || R.cols() != num_aps)
    throw ConfigError("snapshot correlation grid has wrong shape");
  if (static_cast<int>(pilot_of.size()) != num_users)
    throw ConfigError("pilot map must cover every user");
  for (int p : pilot_of)
    if (p < 0 || p >= pilot_length) throw ConfigError("pilot index out of range");
  if (static_cast<int>(alpha.size()) != num_aps || static_cast<int>(beta.size()) != num_aps)
    throw ConfigError("PA parameters must be given per AP");
  for (double b : beta)
    if (b < 0.0) throw ConfigError("beta must be nonnegative");
  if (!(sigma_z2 > 0.0)) throw ConfigError("noise power must be positive");
}

NetworkSnapshot generate_snapshot(const SimConfig& cfg) {
  cfg.validate();
  const int L = cfg.num_aps;
  const int K = cfg.num_users;
  const int N = cfg.antennas_per_ap;

  NetworkSnapshot snap;
  snap.num_aps = L;
  snap.num_users = K;
  snap.antennas_per_ap = N;
  snap.pilot_length = cfg.pilot_length;
  snap.user_power_w = cfg.user_power_w;
  snap.ap_power_w = cfg.ap_power_w;
  snap.sigma_z2 = noise_power_w(cfg.bandwidth_hz, cfg.noise_figure_db);

  Rng ap_rng(derive_seed(cfg.seed, streams::kApPositions));
  Rng user_rng(derive_seed(cfg.seed, streams::kUserPositions));
  for (int l = 0; l < L; ++l) snap.ap_positions.push_back(uniform_in_disk(ap_rng, cfg.coverage_radius_m));
  for (int k = 0; k < K; ++k) snap.user_positions.push_back(uniform_in_disk(user_rng, cfg.coverage_radius_m));

  // i.i.d. shadowing per link; no spatial correlation across APs.
  Rng shadow_rng(derive_seed(cfg.seed, streams::kShadowing));
  std::normal_distribution<double> shadow(0.0, 4.0);
  const double angular_std = cfg.angular_spread_deg * std::numbers::pi / 180.0;
  snap.R = Grid<CMat>(K, L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const Point& u = snap.user_positions[k];
      const Point& a = snap.ap_positions[l];
      const double gain = large_scale_gain(distance(u, a), shadow(shadow_rng));
      const double angle = std::atan2(u.y - a.y, u.x - a.x);
      snap.R(k, l) = gain * local_scattering_correlation(N, angle, angular_std);
    }
  }

  snap.pilot_of.resize(K);
  for (int k = 0; k < K; ++k) snap.pilot_of[k] = k % cfg.pilot_length;

  Rng pa_rng(derive_seed(cfg.seed, streams::kPowerAmplifier));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int l = 0; l < L; ++l) {
    snap.alpha.emplace_back(0.8, 0.1 * gauss(pa_rng));
    snap.beta.push_back(0.05 + 0.1 * unif(pa_rng));
  }
  return snap;
}

PilotGroups pilot_groups(const NetworkSnapshot& snapshot) {
  PilotGroups groups;
  const int K = snapshot.num_users;
  groups.members.resize(K);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j)
      if (snapshot.pilot_of[j] == snapshot.pilot_of[k]) groups.members[k].push_back(j);
  return groups;
}

}  // namespace cfmimo
