#include "cfmimo/pa_model.hpp"

#include <complex>

namespace cfmimo::pa {

double distortion_variance(double beta, double ap_power_w, double load) {
  return beta * ap_power_w * load;
}

double effective_budget(cd alpha, double beta, int antennas) {
  const double denom = std::norm(alpha) + beta * antennas;
  if (!(denom > 0.0)) throw ConfigError("degenerate PA parameters: alpha = beta = 0");
  return 1.0 / denom;
}

double transmitted_power(cd alpha, double beta, int antennas, double ap_power_w, double load) {
  return (std::norm(alpha) * ap_power_w + beta * ap_power_w * antennas) * load;
}

}  // namespace cfmimo::pa
