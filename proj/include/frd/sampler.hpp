#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frd/lattice.hpp"

namespace frd {

struct SampleBatch {
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<Field> fields;
};

/// Per-mode Hermitian PSD square root; squaring recovers the input.
/// Throws on a mode with an eigenvalue below -1e-10 * scale.
SpectralKernel spectral_sqrt(const SpectralKernel& kernel);

/// Draws `count` real fields with covariance E[xi(x) xi(y)^T] = K(x - y):
/// one complex standard normal per +/- mode pair, scaled by sqrt(volume)
/// K_hat(p)^{1/2}, conjugate-filled and inverse-transformed. An optional
/// zero-mode covariance adds the constant component needed by coarse-torus
/// measures; without it samples are exactly zero-mean.
SampleBatch sample(const SpectralKernel& kernel, std::uint64_t seed, int count,
                   const std::optional<Eigen::MatrixXd>& zero_mode_cov = std::nullopt,
                   int workers = 1);

struct RangeCheckRow {
  std::int64_t x = 0, y = 0;
  int i = 0, j = 0;        // gradient axes
  int r = 0, s = 0;        // components
  double empirical = 0;    // empirical covariance of the two gradients
  double band = 0;         // Monte Carlo noise band
  bool pass = true;
};
struct RangeCheckReport {
  std::vector<RangeCheckRow> rows;
  int violations = 0;
};

/// Empirical covariance of gradient pairs at distance >= L^k/2 + 1; every
/// entry must sit inside the 4/sqrt(count) noise band since the exact
/// covariance vanishes beyond the range.
RangeCheckReport gradient_range_check(const SampleBatch& batch, int k, int max_pairs = 64,
                                      std::uint64_t pair_seed = 17);

/// Empirical covariance E[xi(x)_i xi(y)_j] over the batch.
double empirical_covariance(const SampleBatch& batch, std::int64_t x, int i, std::int64_t y,
                            int j);

}  // namespace frd
