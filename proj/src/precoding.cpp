#include "cfmimo/precoding.hpp"

#include "cfmimo/pa_model.hpp"

#include <algorithm>

namespace cfmimo {

std::string to_string(Precoder p) {
  switch (p) {
    case Precoder::MR: return "mr";
    case Precoder::ZF: return "zf";
    case Precoder::RZF: return "rzf";
    case Precoder::MMSE: return "mmse";
  }
  return "?";
}

Precoder parse_precoder(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  if (s == "mr") return Precoder::MR;
  if (s == "zf") return Precoder::ZF;
  if (s == "rzf") return Precoder::RZF;
  if (s == "mmse") return Precoder::MMSE;
  throw ConfigError("unknown precoder '" + name + "' (expected mr, zf, rzf or mmse)");
}

Grid<double> equal_power_split(const NetworkSnapshot& snapshot) {
  Grid<double> eta(snapshot.num_users, snapshot.num_aps);
  for (int l = 0; l < snapshot.num_aps; ++l) {
    const double share = pa::effective_budget(snapshot.alpha[l], snapshot.beta[l], snapshot.antennas_per_ap) /
                         snapshot.num_users;
    for (int k = 0; k < snapshot.num_users; ++k) eta(k, l) = share;
  }
  return eta;
}

CMat precoding_matrix(Precoder scheme, const CMat& H_hat, const NetworkSnapshot& snapshot,
                      const ChannelSet& channels, int ap, const Grid<double>& eta) {
  const int N = static_cast<int>(H_hat.rows());
  const int K = static_cast<int>(H_hat.cols());
  switch (scheme) {
    case Precoder::MR:
      return H_hat.conjugate();
    case Precoder::ZF: {
      if (N < K)
        throw UnsupportedConfiguration("ZF precoding needs N_a >= K (N_a = " + std::to_string(N) +
                                       ", K = " + std::to_string(K) + "); use RZF instead");
      const CMat gram = H_hat.transpose() * H_hat.conjugate();
      Eigen::FullPivLU<CMat> lu(gram);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible())
        throw NumericalError("singular ZF Gram matrix at AP " + std::to_string(ap));
      return H_hat.conjugate() * lu.inverse();
    }
    case Precoder::RZF: {
      const CMat reg = H_hat.transpose() * H_hat.conjugate() + snapshot.sigma_z2 * CMat::Identity(K, K);
      return H_hat.conjugate() * reg.partialPivLu().inverse();
    }
    case Precoder::MMSE: {
      const double pu = snapshot.user_power_w;
      CMat C = snapshot.sigma_z2 * CMat::Identity(N, N);
      for (int k = 0; k < K; ++k) {
        C += pu * eta(k, ap) * (H_hat.col(k) * H_hat.col(k).adjoint());
        C += pu * eta(k, ap) * channels.Theta(k, ap);
      }
      // Conjugated so that h^T w stays phase-aligned, as for MR.
      return C.llt().solve(H_hat).conjugate();
    }
  }
  return {};
}

PrecoderSet compute_precoders(Precoder scheme, const ChannelSet& channels, const NetworkSnapshot& snapshot,
                              const std::optional<Grid<double>>& eta_for_mmse) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const int N = snapshot.antennas_per_ap;
  if (scheme == Precoder::ZF && N < K)
    throw UnsupportedConfiguration("ZF precoding needs N_a >= K (N_a = " + std::to_string(N) +
                                   ", K = " + std::to_string(K) + "); use RZF instead");

  const Grid<double> eta = (scheme == Precoder::MMSE && !eta_for_mmse) ? equal_power_split(snapshot)
                                                                       : eta_for_mmse.value_or(Grid<double>());
  PrecoderSet out;
  out.scheme = scheme;
  out.w = Grid<CVec>(K, L);
  out.zero_column = Grid<char>(K, L, 0);
  CMat H_hat(N, K);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) H_hat.col(k) = channels.h_hat(k, l);
    const CMat V = precoding_matrix(scheme, H_hat, snapshot, channels, l, eta);
    for (int k = 0; k < K; ++k) {
      const double norm = V.col(k).norm();
      if (norm > 0.0 && std::isfinite(norm)) {
        out.w(k, l) = V.col(k) / norm;
      } else {
        out.w(k, l) = CVec::Zero(N);
        out.zero_column(k, l) = 1;
        out.any_zero_column = true;
      }
    }
  }
  return out;
}

}  // namespace cfmimo
