#include "cfmimo/moments.hpp"

#include "cfmimo/channel.hpp"
#include "cfmimo/rng.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace cfmimo {

MomentTable::MomentTable(int users, int aps)
    : num_users(users),
      num_aps(aps),
      mean_gain(users, aps, cd(0.0, 0.0)),
      second(static_cast<size_t>(users) * users * aps, 0.0),
      trR(users, aps, 0.0) {}

namespace {

constexpr int kBlock = 64;

/// Flat accumulator: [Re g, Im g] per link followed by every second moment.
struct Accumulator {
  std::vector<double> v;
  explicit Accumulator(size_t n = 0) : v(n, 0.0) {}
};

void add_realization(const NetworkSnapshot& snapshot, const PilotGroups& groups,
                     const std::shared_ptr<const EstimatorStatistics>& stats,
                     const ChannelSampler& sampler, Precoder scheme, const Grid<double>& mmse_eta,
                     std::uint64_t seed, int r, std::vector<double>& acc) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  Rng rng(derive_seed(seed, streams::kMoments, r));
  const Grid<CVec> h = sampler.draw(rng);
  const ChannelSet channels = mmse_estimate(snapshot, groups, stats, h, rng);
  const PrecoderSet pre = compute_precoders(scheme, channels, snapshot, mmse_eta);

  const size_t offset = static_cast<size_t>(2) * K * L;
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const cd g = h(k, l).transpose() * pre.w(k, l);
      acc[2 * (static_cast<size_t>(k) * L + l)] += g.real();
      acc[2 * (static_cast<size_t>(k) * L + l) + 1] += g.imag();
      for (int kp = 0; kp < K; ++kp) {
        const cd x = h(k, l).transpose() * pre.w(kp, l);
        acc[offset + (static_cast<size_t>(k) * K + kp) * L + l] += std::norm(x);
      }
    }
  }
}

void pairwise_sum(std::vector<std::vector<double>>& parts) {
  while (parts.size() > 1) {
    std::vector<std::vector<double>> next;
    for (size_t i = 0; i + 1 < parts.size(); i += 2) {
      for (size_t j = 0; j < parts[i].size(); ++j) parts[i][j] += parts[i + 1][j];
      next.push_back(std::move(parts[i]));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
}

}  // namespace

MomentTable estimate_moments(const NetworkSnapshot& snapshot, Precoder scheme, int n_realizations,
                             std::uint64_t seed, const MomentOptions& options) {
  if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  snapshot.validate();
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const PilotGroups groups = pilot_groups(snapshot);
  const auto stats = estimator_statistics(snapshot, groups);
  const ChannelSampler sampler(snapshot);
  const Grid<double> mmse_eta = equal_power_split(snapshot);
  const size_t width = static_cast<size_t>(2) * K * L + static_cast<size_t>(K) * K * L;

  // Each fixed block of realizations is summed sequentially; blocks are then
  // reduced pairwise. Block boundaries do not depend on the worker count.
  const int n_blocks = (n_realizations + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> blocks(n_blocks, std::vector<double>(width, 0.0));
  auto run_block = [&](int b) {
    const int first = b * kBlock;
    const int last = std::min(n_realizations, first + kBlock);
    for (int r = first; r < last; ++r)
      add_realization(snapshot, groups, stats, sampler, scheme, mmse_eta, seed, r, blocks[b]);
  };

  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n_blocks);
  if (workers == 1) {
    for (int b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (int b = t; b < n_blocks; b += workers) run_block(b);
      });
    for (auto& th : pool) th.join();
  }
  pairwise_sum(blocks);
  const std::vector<double>& total = blocks.front();

  MomentTable table(K, L);
  table.n_samples = n_realizations;
  const double inv = 1.0 / n_realizations;
  const size_t offset = static_cast<size_t>(2) * K * L;
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const size_t i = static_cast<size_t>(k) * L + l;
      table.mean_gain(k, l) = cd(total[2 * i], total[2 * i + 1]) * inv;
      table.trR(k, l) = snapshot.R(k, l).trace().real();
    }
  }
  for (size_t i = 0; i < table.second.size(); ++i) table.second[i] = total[offset + i] * inv;
  return table;
}

MomentCache::MomentCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path MomentCache::path_for(std::uint64_t snapshot_hash, Precoder scheme, int n,
                                            std::uint64_t seed) const {
  std::ostringstream name;
  name << std::hex << std::setw(16) << std::setfill('0') << snapshot_hash << std::dec << '_'
       << to_string(scheme) << '_' << n << '_' << seed << ".moments";
  return dir_ / name.str();
}

namespace {

constexpr char kMagic[8] = {'C', 'F', 'M', 'O', 'M', 'E', 'N', 'T'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool read_pod(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

void MomentCache::store(std::uint64_t snapshot_hash, Precoder scheme, int n, std::uint64_t seed,
                        const MomentTable& table) const {
  const auto path = path_for(snapshot_hash, scheme, n, seed);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write moment cache " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kFormatVersion);
    write_pod(out, snapshot_hash);
    write_pod(out, static_cast<std::int32_t>(scheme));
    write_pod(out, static_cast<std::int32_t>(n));
    write_pod(out, seed);
    write_pod(out, static_cast<std::int32_t>(table.num_users));
    write_pod(out, static_cast<std::int32_t>(table.num_aps));
    write_pod(out, static_cast<std::int32_t>(table.n_samples));
    out.write(reinterpret_cast<const char*>(table.mean_gain.raw().data()),
              static_cast<std::streamsize>(sizeof(cd) * table.mean_gain.size()));
    out.write(reinterpret_cast<const char*>(table.second.data()),
              static_cast<std::streamsize>(sizeof(double) * table.second.size()));
    out.write(reinterpret_cast<const char*>(table.trR.raw().data()),
              static_cast<std::streamsize>(sizeof(double) * table.trR.size()));
    if (!out) throw Error("failed writing moment cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<MomentTable> MomentCache::load(std::uint64_t snapshot_hash, Precoder scheme, int n,
                                             std::uint64_t seed) const {
  std::ifstream in(path_for(snapshot_hash, scheme, n, seed), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t hash = 0, stored_seed = 0;
  std::int32_t stored_scheme = 0, stored_n = 0, K = 0, L = 0, samples = 0;
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) return std::nullopt;
  if (!read_pod(in, version) || version != kFormatVersion) return std::nullopt;
  if (!read_pod(in, hash) || !read_pod(in, stored_scheme) || !read_pod(in, stored_n) ||
      !read_pod(in, stored_seed) || !read_pod(in, K) || !read_pod(in, L) || !read_pod(in, samples))
    return std::nullopt;
  if (hash != snapshot_hash || stored_scheme != static_cast<std::int32_t>(scheme) || stored_n != n ||
      stored_seed != seed || K <= 0 || L <= 0)
    return std::nullopt;
  MomentTable table(K, L);
  table.n_samples = samples;
  in.read(reinterpret_cast<char*>(table.mean_gain.raw().data()),
          static_cast<std::streamsize>(sizeof(cd) * table.mean_gain.size()));
  in.read(reinterpret_cast<char*>(table.second.data()),
          static_cast<std::streamsize>(sizeof(double) * table.second.size()));
  in.read(reinterpret_cast<char*>(table.trR.raw().data()),
          static_cast<std::streamsize>(sizeof(double) * table.trR.size()));
  if (!in) return std::nullopt;
  return table;
}

MomentTable moments_for(const NetworkSnapshot& snapshot, Precoder scheme, int n_realizations,
                        std::uint64_t seed, const MomentCache* cache) {
  if (cache) {
    const std::uint64_t key = snapshot.hash();
    if (auto hit = cache->load(key, scheme, n_realizations, seed)) return *hit;
    MomentTable table = estimate_moments(snapshot, scheme, n_realizations, seed);
    cache->store(key, scheme, n_realizations, seed, table);
    return table;
  }
  return estimate_moments(snapshot, scheme, n_realizations, seed);
}

}  // namespace cfmimo
