#pragma once

#include "ccd/stacked_operator.hpp"

#include <cstdint>

namespace ccd {

/// Row-major grid dimensions; ny == 1 denotes a 1D signal.
struct GridShape {
  Index nx = 1;
  Index ny = 1;
  Index size() const { return nx * ny; }
  bool is_2d() const { return ny > 1; }
};

struct NoiseSpec {
  double sigma_rel = 0.15;     ///< std as a fraction of max |clean|
  double mute_fraction = 0.25; ///< wavenumbers below this fraction of Nyquist are zeroed
  std::uint64_t seed = 1;
};

/// Gaussian noise with its low-wavenumber band removed, rescaled afterwards
/// to std = sigma_rel * max|clean|.
///
/// In 2D the muted band is the box max(|kx|/Nyq_x, |ky|/Nyq_y) < mute_fraction.
/// mute_fraction >= 1 removes everything and yields exact zeros.
/// Deterministic for a fixed seed.
Vector make_noise(const GridShape& shape, const NoiseSpec& spec, const Vector& clean);

/// Five isolated spikes of mixed sign at fixed relative positions; zero elsewhere.
Vector spikes_truth(Index n);

/// Relative spike positions used by spikes_truth (index = round(pos * n)).
inline constexpr double kSpikePositions[5] = {0.18, 0.34, 0.47, 0.66, 0.81};
inline constexpr double kSpikeValues[5] = {100.0, -70.0, 60.0, 90.0, -50.0};

/// Three rectangular plateaus on a zero background, row-major n_side x n_side.
Vector blocky_truth(Index n_side);

/// Extreme eigenvalues of F^T F.
struct ConditionEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool singular = false;

  /// lambda_max / lambda_min: condition of the normal equations (the u-step Hessian).
  double normal() const;
  /// sqrt(normal()): ratio of extreme singular values of F.
  double operator_ratio() const;
};

/// Dense eigensolve for n_in <= 512. Larger operators: lambda_max from
/// n_power_iters power steps (sharpened by the Lanczos Ritz value), lambda_min
/// from Lanczos with full reorthogonalization run until the smallest Ritz value settles.
ConditionEstimate estimate_condition(const StackedOperator& f_op, int n_power_iters);

inline constexpr Index kDenseConditionLimit = 512;

/// ||u - truth|| / ||truth||
double relative_error(const Vector& u, const Vector& truth);

}  // namespace ccd
