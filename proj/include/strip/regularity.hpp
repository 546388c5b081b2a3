#pragma once

// Regularity diagnostics: empirical Hoelder exponents, the a-priori
// transfer-matrix bounds, and Lie-algebra generation by near-identity powers.

#include "strip/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace strip {

struct HoelderEstimate {
  double alpha = 1.0;     // regression slope clamped to (0, 1]
  double constant = 0.0;  // exp(intercept): max increment ~ constant * lag^alpha
  double r2 = 0.0;
  double slope = 0.0;     // unclamped slope
  std::vector<double> lags;        // all dyadic lags, in x units
  std::vector<double> increments;  // max |f(x + lag) - f(x)|
  std::size_t first_scale = 0;     // regression uses [first_scale, last_scale)
  std::size_t last_scale = 0;
  bool clamped = false;
  bool undefined = false;  // constant samples: reported as alpha = 1
};

/// Max increments at dyadic lags 1, 2, 4, ... grid steps, regressed in
/// log-log over all but the two smallest and two largest scales.
/// Requires at least 128 samples.
HoelderEstimate hoelder_exponent(const std::vector<double>& samples, double step);

struct BoundConstants {
  double c1 = 0.0;  // sup ||V||
  double lo = 0.0;
  double hi = 0.0;
  double c2 = 0.0;  // exp(C1 + max|E| + 1)
  double c3 = 0.0;  // exp(2 C1 + 2 + 2 len(I))
};

BoundConstants bound_constants(const DisorderSpec& spec, double lo, double hi);

struct BoundsReport {
  BoundConstants constants;
  int samples = 0;
  /// Per p = 1..N: max of ||^p A(E)||^2 / exp(p C1 + p|E| + p).
  std::vector<double> max_growth_ratio;
  /// Per p = 1..N: max of ||^p A(E) - ^p A(E')|| / (p C2^(p-1) C3 |E - E'|).
  std::vector<double> max_lipschitz_ratio;
};

/// Samples cells and energy pairs in [lo, hi] and evaluates both bounds.
/// Throws NumericalError naming the witness if a ratio exceeds 1.
BoundsReport check_bounds(const DisorderSpec& spec, double lo, double hi, int n_samples, std::uint64_t seed);

/// Principal logarithm of a matrix with ||M - I|| < 0.5 (inverse scaling
/// and squaring); throws DomainError otherwise.
Matrix matrix_log_near_identity(const Matrix& m);

/// ||X^T J + J X|| in operator norm; zero exactly on sp_N.
double hamiltonian_residual(const Matrix& x);

/// Dimension of the Lie algebra generated by the matrices: span closed under
/// commutators, rank by singular values above tolerance * largest.
int bracket_closure_rank(const std::vector<Matrix>& generators, double tolerance = 1e-8);

struct GeneratorInfo {
  std::string word;  // e.g. "c0", "c1*c3" (cells by support index)
  int power = 0;
  double distance = 0.0;  // ||W^power - I||
};

struct RankReport {
  double energy = 0.0;
  std::vector<GeneratorInfo> generators;
  int rank = 0;
  int target = 0;  // N (2N + 1)
  double tolerance = 1e-8;
  int max_power = 0;
  bool inconclusive = false;  // no near-identity power found
};

/// Cells are all combinations of support points of the random entries
/// (or 4 sampled cells for continuous laws). Words of length one and two
/// are searched for powers k <= max_power with ||W^k - I|| < 0.5; the logs
/// of the closest such powers generate the algebra.
RankReport lie_algebra_rank(const DisorderSpec& spec, double energy, int max_power = 10000, double tolerance = 1e-8,
                            std::uint64_t seed = 0);

}  // namespace strip
