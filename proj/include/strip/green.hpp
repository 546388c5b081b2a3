#pragma once

// Matrix m-functions, the Kotani w-function and the Green kernel at
// coincident points, for complex energies in the upper half plane.

#include "strip/model.hpp"

#include <cstdint>
#include <vector>

namespace strip {

/// z = e + i a with a > 0.
struct ComplexEnergy {
  double e = 0.0;
  double a = 1.0;
  Complex z() const { return {e, a}; }
};

/// M+(z) at x = 0: Dirichlet data at x = L_w (Y = 0, Y' = -I) carried back to
/// 0 with complex-energy transfers; returns Y'(0) Y(0)^{-1}.
CMatrix m_plus(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window);

/// M-(z) at x = 0 from Dirichlet data at -L_w (Y = 0, Y' = I); returns -Y'(0) Y(0)^{-1}.
CMatrix m_minus(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window);

/// G_z(0, 0) = -(M+ + M-)^{-1}; throws NumericalError on a singular sum.
CMatrix green_at_zero(const CMatrix& m_plus, const CMatrix& m_minus);

struct MFunction {
  Complex z;
  CMatrix m_plus;
  CMatrix m_minus;
  int truncation_length = 0;
  double sum_condition = 0.0;  // 2-norm condition number of M+ + M-
};

MFunction m_functions(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window);

/// Smallest eigenvalue of the Hermitian part (M - M^*) / (2i).
double herglotz_margin(const CMatrix& m);

struct WOptions {
  /// Positions averaged per realization: eight Gauss-Legendre nodes in every
  /// potential piece of cells 0 .. window_cells - 1.
  int window_cells = 100;
  /// Step of the centered difference for w'(z); 0 disables it.
  double derivative_step = 0.0;
  int threads = 0;
};

struct WValue {
  Complex z;
  Complex w;            // (1/2) E Tr(M+ + M-)
  Complex green_trace;  // E Tr G_z(x, x)
  double se_re_w = 0.0;
  double se_im_w = 0.0;
  double se_re_green = 0.0;
  double se_im_green = 0.0;
  /// (Im z / 2) E Tr((Im M+)^{-1}), which should equal -Re w.
  double im_m_inverse_trace = 0.0;
  double se_im_m_inverse_trace = 0.0;
  /// Centered difference of w (valid when derivative_step > 0) and its error.
  Complex w_prime;
  double se_w_prime_minus_green = 0.0;
  /// Per-realization minima of Im w and Im Tr G.
  double min_im_w = 0.0;
  double min_im_green = 0.0;
  int realizations = 0;
  int truncation_length = 0;
  int window_cells = 0;
};

/// Averages over independent realizations and over positions in a window of
/// cells; windows are truncated with Dirichlet data L_w cells beyond each end.
WValue w_estimate(const DisorderSpec& spec, Complex z, int window, int n_realizations, std::uint64_t seed,
                  const WOptions& options = {});

/// Value at 0 of the interpolating polynomial through (x_i, y_i) (Neville).
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y);

/// The imaginary parts used for the a -> 0 limits.
inline const std::vector<double>& default_limit_heights() {
  static const std::vector<double> a{0.4, 0.2, 0.1, 0.05};
  return a;
}

}  // namespace strip
