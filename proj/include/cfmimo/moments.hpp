#pragma once

#include "cfmimo/network.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace cfmimo {

/// Sample statistics of the effective channels h_kl^T w_k'l. These are the only
/// channel quantities the SINR expression and the optimizer consume.
struct MomentTable {
  int num_users = 0;
  int num_aps = 0;
  int n_samples = 0;
  Grid<cd> mean_gain;           // E[h_kl^T w_kl]
  std::vector<double> second;   // E[|h_kl^T w_k'l|^2], see second_moment()
  Grid<double> trR;             // tr(R_kl)

  MomentTable() = default;
  MomentTable(int users, int aps);

  double& second_moment(int k, int k_prime, int l) { return second[index(k, k_prime, l)]; }
  double second_moment(int k, int k_prime, int l) const { return second[index(k, k_prime, l)]; }

 private:
  size_t index(int k, int kp, int l) const {
    return (static_cast<size_t>(k) * num_users + kp) * num_aps + l;
  }
};

struct MomentOptions {
  /// Worker threads; results do not depend on this value.
  int workers = 0;
};

/// Monte Carlo averages over n_realizations draws of channel -> estimate ->
/// precoder. Realization r is seeded from (seed, r) and partial sums are
/// combined in a fixed order, so the table is a pure function of the inputs.
MomentTable estimate_moments(const NetworkSnapshot& snapshot, Precoder scheme, int n_realizations,
                             std::uint64_t seed, const MomentOptions& options = {});

/// On-disk cache keyed by (snapshot hash, scheme, n, seed).
class MomentCache {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit MomentCache(std::filesystem::path dir);

  std::optional<MomentTable> load(std::uint64_t snapshot_hash, Precoder scheme, int n,
                                  std::uint64_t seed) const;
  void store(std::uint64_t snapshot_hash, Precoder scheme, int n, std::uint64_t seed,
             const MomentTable& table) const;

  std::filesystem::path path_for(std::uint64_t snapshot_hash, Precoder scheme, int n,
                                 std::uint64_t seed) const;

 private:
  std::filesystem::path dir_;
};

/// Looks the table up in the cache (if any) and computes and stores it on a miss.
MomentTable moments_for(const NetworkSnapshot& snapshot, Precoder scheme, int n_realizations,
                        std::uint64_t seed, const MomentCache* cache);

}  // namespace cfmimo
