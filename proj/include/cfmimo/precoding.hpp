#pragma once

#include "cfmimo/channel.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/types.hpp"

#include <optional>
#include <string>

namespace cfmimo {

enum class Precoder { MR, ZF, RZF, MMSE };

std::string to_string(Precoder p);
Precoder parse_precoder(const std::string& name);

/// Unit-norm local precoders w_kl for one channel realization.
struct PrecoderSet {
  Precoder scheme = Precoder::MR;
  Grid<CVec> w;
  /// True where v_kl was the zero vector; w_kl is then left at zero.
  Grid<char> zero_column;
  bool any_zero_column = false;
};

/// Equal split of each AP's effective budget, used to build MMSE precoders
/// before any power optimization has run.
Grid<double> equal_power_split(const NetworkSnapshot& snapshot);

/// Builds V_l from the local estimates of every AP, then normalizes columns.
/// The signal model uses h^T w, so every scheme is phase-aligned through the
/// conjugate of the estimate. Throws UnsupportedConfiguration for ZF with
/// N_a < K and NumericalError for a singular ZF Gram matrix.
PrecoderSet compute_precoders(Precoder scheme, const ChannelSet& channels,
                              const NetworkSnapshot& snapshot,
                              const std::optional<Grid<double>>& eta_for_mmse = std::nullopt);

/// Unnormalized V_l for a single AP; exposed for the defining-property tests.
CMat precoding_matrix(Precoder scheme, const CMat& H_hat, const NetworkSnapshot& snapshot,
                      const ChannelSet& channels, int ap, const Grid<double>& eta);

}  // namespace cfmimo
