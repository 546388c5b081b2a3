#pragma once

// Integrated density of states: finite-box eigenvalue counting for the
// discretized operator, its Laplace/Stieltjes transforms, and the
// Feynman-Kac Monte-Carlo estimate of the Laplace transform.

#include "strip/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace strip {

enum class Boundary { Dirichlet, Neumann };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

struct CountResult {
  std::int64_t count = 0;
  /// True when a zero pivot forced a retry at energy + 1e-9.
  bool perturbed = false;
};

/// Second-order central-difference discretization of -d^2/dx^2 (x) I_N + V
/// on the box (-L, L) with mesh h. Each site carries the mean of V over its
/// dual cell. Dirichlet keeps interior sites only; Neumann keeps both
/// endpoints with the half-weight (symmetrized) ghost-point closure.
class BoxOperator {
 public:
  BoxOperator(const Realization& realization, int box_length, double mesh, Boundary boundary);

  int channels() const { return channels_; }
  int sites() const { return sites_; }
  int box_length() const { return box_length_; }
  double mesh() const { return mesh_; }
  Boundary boundary() const { return boundary_; }

  /// Number of eigenvalues <= energy via the inertia of the block LDL^T
  /// factorization of H - energy (negative pivots, Sylvester's law).
  CountResult count_below(double energy) const;

  /// Dense symmetric matrix; intended for small boxes.
  Matrix dense() const;

 private:
  bool try_count(double energy, std::int64_t& count) const;

  int channels_;
  int sites_;
  int box_length_;
  double mesh_;
  Boundary boundary_;
  std::vector<double> diagonal_;  // sites * N * N, row-major blocks
  std::vector<double> coupling_;  // sites - 1 scalars (block = c * I)
};

CountResult finite_box_count(const DisorderSpec& spec, std::uint64_t seed, int box_length, double mesh, double energy,
                             Boundary boundary);

struct IdsTable {
  std::vector<double> energies;  // sorted ascending
  std::vector<double> ids;       // counts / (2L)
  int box_length = 0;
  double mesh = 0.0;
  Boundary boundary = Boundary::Dirichlet;
  std::uint64_t seed = 0;
  int channels = 1;
  std::int64_t perturbed_energies = 0;
};

/// finite_box_count over a grid, normalized by |D| = 2L.
IdsTable ids_table(const DisorderSpec& spec, std::uint64_t seed, int box_length, double mesh,
                   const std::vector<double>& energies, Boundary boundary, int threads = 0);

std::vector<double> uniform_grid(double lo, double hi, int points);

/// High-energy continuation of a table: density channels / (2 pi sqrt(E - shift))
/// beyond the last grid energy, with the shift matched to the last table value.
struct FreeTail {
  int channels = 1;
  double start = 0.0;
  double shift = 0.0;
};

FreeTail fit_free_tail(const IdsTable& table);

/// Linear interpolation of N between grid energies (0 below, last value above).
double ids_at(const IdsTable& table, double energy);

/// Laplace transform of the IDS measure: exact on each grid cell for the
/// piecewise-linear N, plus the free-tail contribution above the grid.
double laplace_of_ids(const IdsTable& table, double t);

/// Integral of dN(E') / (E' - z) for Im z != 0, same conventions.
Complex stieltjes_of_ids(const IdsTable& table, Complex z);

/// A finite sum of point masses.
struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
};

double laplace_of_measure(const DiscreteMeasure& measure, double t);

struct FeynmanKacEstimate {
  double t = 0.0;
  double value = 0.0;
  double mc_standard_error = 0.0;
  std::int64_t paths = 0;
  double time_step = 0.0;
};

/// Monte-Carlo estimate of the IDS Laplace transform. Each path draws an
/// independent disorder realization and a pinning point x0 uniform in the
/// unit cell, samples a Brownian bridge x0 -> x0 over [0, t] whose variance
/// at time s is 2s (generator d^2/dx^2), and averages the trace of the
/// time-ordered product of exp(-ds V) at left endpoints; the result is
/// scaled by the coincident heat kernel (4 pi t)^(-1/2).
FeynmanKacEstimate feynman_kac_laplace(const DisorderSpec& spec, double t, std::int64_t n_paths, double time_step,
                                       std::uint64_t seed, int threads = 0);

}  // namespace strip
