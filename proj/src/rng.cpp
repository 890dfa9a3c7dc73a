#include "cfmimo/rng.hpp"

namespace cfmimo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) + index);
}

cd complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, M_SQRT1_2);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

CVec complex_normal_vector(Rng& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v;
}

}  // namespace cfmimo
