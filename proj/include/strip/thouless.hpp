#pragma once

#include "strip/ids.hpp"

#include <vector>

namespace strip {

/// Log-potential of the IDS measure, int log|(E' - E) / (E' - i)| dN(E'),
/// exact for the piecewise-linear table plus the free-tail continuation.
/// E must sit at least four grid steps inside the table.
double thouless_rhs(const IdsTable& table, double energy);

/// The same integral against a finite sum of point masses.
double thouless_rhs(const DiscreteMeasure& measure, double energy);

struct ThoulessFit {
  double alpha = 0.0;
  double rms = 0.0;
  std::vector<double> energies;
  std::vector<double> gamma_sums;
  std::vector<double> rhs;
  std::vector<double> residuals;  // gamma_sum + alpha - rhs
};

/// Least-squares constant alpha in gamma_sum(E) = -alpha + rhs(E).
ThoulessFit thouless_fit(const std::vector<double>& energies, const std::vector<double>& gamma_sums,
                         const IdsTable& table);

/// Hilbert transform (1/pi) PV int psi(t) / (x - t) dt of samples on a
/// uniform grid. Each sample stands for a constant on its own cell, which
/// integrates the kernel exactly and leaves the singular cell with zero
/// principal value. The function should vanish near both ends of the grid.
std::vector<double> hilbert_transform(const std::vector<double>& samples, double step);

}  // namespace strip
