#pragma once

// Operator family: N channels on the line, -d^2/dx^2 (x) I_N plus a
// potential that is i.i.d. from unit cell to unit cell.

#include "strip/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace strip {

struct Dirac {
  double value = 0.0;
};

/// Takes v1 with probability p and v0 otherwise.
struct Bernoulli {
  double p = 0.5;
  double v0 = 0.0;
  double v1 = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

struct FiniteDistribution {
  std::vector<double> values;
  std::vector<double> probs;
};

using Distribution = std::variant<Dirac, Bernoulli, Uniform, FiniteDistribution>;

void validate(const Distribution& dist);

/// Inverse-CDF draw from u in [0, 1).
double draw(const Distribution& dist, double u);

double max_abs_value(const Distribution& dist);

/// Atoms of a discrete law; empty for continuous ones.
std::vector<double> support_points(const Distribution& dist);

struct RandomEntry {
  int channel = 0;  // 0-based diagonal index
  Distribution dist;
};

/// The law of one cell: base_coupling + diag(random entries) on [0, 1].
struct DisorderSpec {
  int channels = 1;
  Matrix base_coupling;
  std::vector<RandomEntry> random_entries;
  /// Declared V_max; when absent the a-priori bound is used.
  std::optional<double> declared_bound;

  /// Throws ConfigError on inconsistent fields.
  void validate() const;

  /// ||base_coupling|| + max over channels of the summed max |random value|.
  double apriori_bound() const;

  /// V_max used for checks: declared bound if set, else apriori_bound().
  double potential_bound() const;

  /// Matrix with every random entry at its mean value.
  Matrix mean_potential() const;
};

/// Two coupled strings with i.i.d. diagonal disorder of law `nu` on each.
DisorderSpec model2_preset(const Distribution& nu = Bernoulli{0.5, 0.0, 1.0});

DisorderSpec constant_potential(const Matrix& v);

struct PotentialPiece {
  double start = 0.0;
  Matrix value;
};

/// Piecewise-constant symmetric N x N potential on one unit cell [0, 1).
class CellPotential {
 public:
  /// Throws DomainError unless breakpoints start at 0, increase strictly and
  /// stay below 1, and every matrix is symmetric to 1e-14.
  explicit CellPotential(std::vector<PotentialPiece> pieces);
  static CellPotential constant(const Matrix& v);

  int channels() const { return static_cast<int>(pieces_.front().value.rows()); }
  const std::vector<PotentialPiece>& pieces() const { return pieces_; }
  double piece_end(std::size_t i) const {
    return i + 1 < pieces_.size() ? pieces_[i + 1].start : 1.0;
  }

  /// Right-continuous value at local coordinate s in [0, 1).
  const Matrix& value_at(double s) const;

  /// Integral of V over [a, b] with 0 <= a <= b <= 1.
  Matrix integral(double a, double b) const;

  double sup_norm() const;

 private:
  std::vector<PotentialPiece> pieces_;
};

/// Cell n of the realization with the given seed; deterministic in (seed, n).
CellPotential sample_cell(const DisorderSpec& spec, std::uint64_t seed, std::int64_t n);

/// A seeded disorder realization; cells are generated on demand.
class Realization {
 public:
  Realization(DisorderSpec spec, std::uint64_t seed);

  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  int channels() const { return spec_.channels; }

  CellPotential cell(std::int64_t n) const { return sample_cell(spec_, seed_, n); }

  /// Potential at x (right-continuous).
  Matrix value_at(double x) const;

  /// Mean of V over [a, b], a < b.
  Matrix average(double a, double b) const;

 private:
  DisorderSpec spec_;
  std::uint64_t seed_;
};

DisorderSpec parse_model(const nlohmann::json& j);
nlohmann::json model_to_json(const DisorderSpec& spec);
DisorderSpec load_model_file(const std::string& path);

}  // namespace strip
