#pragma once

#include "strip/model.hpp"

#include <cstdint>
#include <vector>

namespace strip {

struct LyapunovSpectrum {
  double energy = 0.0;
  std::vector<double> exponents;        // descending, 2N entries
  std::vector<double> standard_errors;  // batch-means, aligned with exponents
  /// Batch-means error of gamma_i + gamma_{2N+1-i}, i = 1..N.
  std::vector<double> pair_standard_errors;
  std::int64_t cells_used = 0;
  std::uint64_t seed = 0;
  int renorm_period = 1;  // period actually used (may be capped)
};

/// Estimate of gamma_1 + ... + gamma_p with its batch-means error.
struct ExponentSum {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t cells_used = 0;
};

/// Minimum number of batches behind every error bar.
inline constexpr int kMinBatches = 20;

/// Largest renormalization period keeping the growth of a p-fold wedge
/// between renormalizations below 1e100, from the per-cell bound
/// ||A||^2 <= exp(V_max + |E| + 1).
int max_renorm_period(const DisorderSpec& spec, double energy, int p);

/// Full spectrum from products of cell transfers applied to an orthonormal
/// 2N-frame, re-orthonormalized by QR (positive diagonal) every
/// `renorm_period` cells. Throws StatisticsError if fewer than 20 batches fit.
LyapunovSpectrum lyapunov_spectrum(const DisorderSpec& spec, double energy, std::int64_t n_cells, std::uint64_t seed,
                                   int renorm_period = 1);

/// gamma_1 + ... + gamma_p from the growth of the p-th exterior power acting
/// on e_1 ^ ... ^ e_p, rescaled every `renorm_period` cells. 1 <= p <= N.
ExponentSum lyapunov_sum_p(const DisorderSpec& spec, double energy, int p, std::int64_t n_cells, std::uint64_t seed,
                           int renorm_period = 1);

}  // namespace strip
