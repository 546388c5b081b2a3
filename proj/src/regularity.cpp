#include "strip/regularity.hpp"

#include "strip/errors.hpp"
#include "strip/random.hpp"
#include "strip/transfer.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace strip {

HoelderEstimate hoelder_exponent(const std::vector<double>& samples, double step) {
  if (samples.size() < 128) throw DomainError("Hoelder estimate needs at least 128 samples");
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  HoelderEstimate est;
  const std::size_t n = samples.size();
  for (std::size_t lag = 1; lag < n; lag *= 2) {
    double m = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) m = std::max(m, std::abs(samples[i + lag] - samples[i]));
    est.lags.push_back(static_cast<double>(lag) * step);
    est.increments.push_back(m);
  }
  est.first_scale = 2;
  est.last_scale = est.lags.size() - 2;

  if (*std::max_element(est.increments.begin(), est.increments.end()) == 0.0) {
    est.undefined = true;
    est.alpha = 1.0;
    est.slope = 0.0;
    return est;
  }

  std::vector<double> x, y;
  for (std::size_t i = est.first_scale; i < est.last_scale; ++i) {
    // a zero increment at a mid scale is floored so the log stays finite
    const double inc = std::max(est.increments[i], std::numeric_limits<double>::min());
    x.push_back(std::log(est.lags[i]));
    y.push_back(std::log(inc));
  }
  const auto k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  est.slope = sxy / sxx;
  const double intercept = my - est.slope * mx;
  est.constant = std::exp(intercept);
  est.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  constexpr double kFloor = 1e-6;
  est.alpha = std::clamp(est.slope, kFloor, 1.0);
  est.clamped = est.alpha != est.slope;
  return est;
}

BoundConstants bound_constants(const DisorderSpec& spec, double lo, double hi) {
  if (!(hi >= lo)) throw DomainError("interval must satisfy lo <= hi");
  BoundConstants c;
  c.c1 = spec.potential_bound();
  c.lo = lo;
  c.hi = hi;
  c.c2 = std::exp(c.c1 + std::max(std::abs(lo), std::abs(hi)) + 1.0);
  c.c3 = std::exp(2.0 * c.c1 + 2.0 + 2.0 * (hi - lo));
  return c;
}

BoundsReport check_bounds(const DisorderSpec& spec, double lo, double hi, int n_samples, std::uint64_t seed) {
  spec.validate();
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  BoundsReport report;
  report.constants = bound_constants(spec, lo, hi);
  report.samples = n_samples;
  const int n = spec.channels;
  report.max_growth_ratio.assign(static_cast<std::size_t>(n), 0.0);
  report.max_lipschitz_ratio.assign(static_cast<std::size_t>(n), 0.0);
  const auto& c = report.constants;

  for (int s = 0; s < n_samples; ++s) {
    const CellPotential cell = sample_cell(spec, seed, s);
    const double e = lo + (hi - lo) * to_unit_interval(counter_hash(seed, static_cast<std::uint64_t>(s), 101));
    const double f = lo + (hi - lo) * to_unit_interval(counter_hash(seed, static_cast<std::uint64_t>(s), 102));
    const Matrix a = cell_transfer(cell, e);
    const Matrix b = cell_transfer(cell, f);
    for (int p = 1; p <= n; ++p) {
      const Matrix wa = exterior_power(a, p);
      const double growth = std::pow(operator_norm(wa), 2) / std::exp(p * (c.c1 + std::abs(e) + 1.0));
      auto& g = report.max_growth_ratio[static_cast<std::size_t>(p - 1)];
      g = std::max(g, growth);
      if (growth > 1.0)
        throw NumericalError("growth bound violated: sample " + std::to_string(s) + ", p = " + std::to_string(p) +
                             ", E = " + std::to_string(e) + ", ratio = " + std::to_string(growth));
      if (e != f) {
        const double diff = operator_norm(wa - exterior_power(b, p));
        const double lip = diff / (p * std::pow(c.c2, p - 1) * c.c3 * std::abs(e - f));
        auto& l = report.max_lipschitz_ratio[static_cast<std::size_t>(p - 1)];
        l = std::max(l, lip);
        if (lip > 1.0)
          throw NumericalError("Lipschitz bound violated: sample " + std::to_string(s) + ", p = " + std::to_string(p) +
                               ", E = " + std::to_string(e) + ", E' = " + std::to_string(f) +
                               ", ratio = " + std::to_string(lip));
      }
    }
  }
  return report;
}

Matrix matrix_log_near_identity(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix log needs a square matrix");
  const double dist = operator_norm(m - Matrix::Identity(m.rows(), m.cols()));
  if (!(dist < 0.5)) throw DomainError("matrix log requires ||M - I|| < 0.5");
  return m.log();
}

double hamiltonian_residual(const Matrix& x) {
  const Matrix j = symplectic_form(static_cast<int>(x.rows() / 2));
  return operator_norm(x.transpose() * j + j * x);
}

namespace {

/// Orthonormal basis of a growing span of vectorized matrices.
class SpanBasis {
 public:
  SpanBasis(Eigen::Index dim, double tolerance) : dim_(dim), tolerance_(tolerance) {}

  /// Adds v if it enlarges the span; returns whether it did.
  bool add(const Vector& v) {
    const double norm = v.norm();
    if (norm == 0.0) return false;
    Vector r = v / norm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis_) r -= b.dot(r) * b;
    if (r.norm() <= tolerance_) return false;
    basis_.push_back(r / r.norm());
    return true;
  }

  std::size_t size() const { return basis_.size(); }

  /// Rank by singular values relative to the largest one.
  int rank(const std::vector<Vector>& vectors) const {
    if (vectors.empty()) return 0;
    Matrix stacked(dim_, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = vectors[i];
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tolerance_ * s(0)) ++r;
    return r;
  }

 private:
  Eigen::Index dim_;
  double tolerance_;
  std::vector<Vector> basis_;
};

Vector vectorize(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvectorize(const Vector& v, Eigen::Index n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

}  // namespace

int bracket_closure_rank(const std::vector<Matrix>& generators, double tolerance) {
  if (generators.empty()) return 0;
  const Eigen::Index n = generators.front().rows();
  SpanBasis span(n * n, tolerance);
  std::vector<Vector> elements;
  for (const auto& g : generators) {
    const Vector v = vectorize(g);
    if (span.add(v)) elements.push_back(v / v.norm());
  }
  const auto limit = static_cast<std::size_t>(n * n);
  for (std::size_t checked = 0; checked < elements.size() && elements.size() < limit; ++checked) {
    // bracket the newest unchecked element with everything before it
    const Matrix x = unvectorize(elements[checked], n);
    for (std::size_t j = 0; j < checked && elements.size() < limit; ++j) {
      const Matrix y = unvectorize(elements[j], n);
      const Vector c = vectorize(x * y - y * x);
      if (span.add(c)) elements.push_back(c / c.norm());
    }
  }
  return span.rank(elements);
}

namespace {

std::vector<CellPotential> generator_cells(const DisorderSpec& spec, std::uint64_t seed) {
  std::vector<std::vector<double>> supports;
  bool discrete = true;
  for (const auto& entry : spec.random_entries) {
    supports.push_back(support_points(entry.dist));
    if (supports.back().empty()) discrete = false;
  }
  std::vector<CellPotential> cells;
  if (!discrete) {
    for (int i = 0; i < 4; ++i) cells.push_back(sample_cell(spec, seed, i));
    return cells;
  }
  std::vector<std::size_t> index(supports.size(), 0);
  while (true) {
    Matrix v = spec.base_coupling;
    for (std::size_t e = 0; e < supports.size(); ++e) {
      const int ch = spec.random_entries[e].channel;
      v(ch, ch) += supports[e][index[e]];
    }
    cells.push_back(CellPotential::constant(v));
    std::size_t e = 0;
    while (e < index.size() && ++index[e] == supports[e].size()) index[e++] = 0;
    if (e == index.size()) break;
  }
  return cells;
}

}  // namespace

RankReport lie_algebra_rank(const DisorderSpec& spec, double energy, int max_power, double tolerance,
                            std::uint64_t seed) {
  spec.validate();
  if (max_power < 10) throw DomainError("max_power must be >= 10");
  RankReport report;
  report.energy = energy;
  report.tolerance = tolerance;
  report.max_power = max_power;
  report.target = spec.channels * (2 * spec.channels + 1);

  const auto cells = generator_cells(spec, seed);
  std::vector<std::pair<std::string, Matrix>> words;
  std::vector<Matrix> letters;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    letters.push_back(cell_transfer(cells[i], energy));
    words.emplace_back("c" + std::to_string(i), letters.back());
  }
  for (std::size_t i = 0; i < letters.size(); ++i)
    for (std::size_t j = i + 1; j < letters.size(); ++j)
      words.emplace_back("c" + std::to_string(i) + "*c" + std::to_string(j), letters[i] * letters[j]);

  const Eigen::Index dim = 2 * spec.channels;
  const Matrix identity = Matrix::Identity(dim, dim);
  std::vector<Matrix> logs;
  for (const auto& [name, w] : words) {
    Matrix power = identity;
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    Matrix best_power;
    for (int k = 1; k <= max_power; ++k) {
      power = w * power;
      const double d = (power - identity).norm();  // Frobenius, cheap screen
      if (d > 1e8) break;                          // hyperbolic growth: no recurrence
      if (d < best && d < 0.5) {
        const double op = operator_norm(power - identity);
        if (op < best) {
          best = op;
          best_k = k;
          best_power = power;
        }
      }
    }
    if (best_k == 0) continue;
    report.generators.push_back({name, best_k, best});
    logs.push_back(matrix_log_near_identity(best_power));
  }
  report.inconclusive = logs.empty();
  report.rank = bracket_closure_rank(logs, tolerance);
  return report;
}

}  // namespace strip
