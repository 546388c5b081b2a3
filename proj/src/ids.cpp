#include "strip/ids.hpp"

#include "strip/errors.hpp"
#include "strip/parallel.hpp"
#include "strip/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace strip {

std::string to_string(Boundary b) { return b == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "dirichlet" || s == "D") return Boundary::Dirichlet;
  if (s == "neumann" || s == "N") return Boundary::Neumann;
  throw ConfigError("unknown boundary condition '" + s + "' (expected dirichlet or neumann)");
}

BoxOperator::BoxOperator(const Realization& realization, int box_length, double mesh, Boundary boundary)
    : channels_(realization.channels()), box_length_(box_length), mesh_(mesh), boundary_(boundary) {
  if (box_length < 1) throw DomainError("box length must be >= 1");
  if (!(mesh > 0.0) || mesh > 0.5) throw DomainError("mesh must lie in (0, 0.5]");
  const double per_cell = 1.0 / mesh;
  const long steps = std::lround(per_cell);
  if (std::abs(per_cell - static_cast<double>(steps)) > 1e-9 * per_cell)
    throw DomainError("mesh must divide the unit cell evenly");
  const long intervals = 2L * box_length * steps;
  const double h = 2.0 * box_length / static_cast<double>(intervals);
  mesh_ = h;
  const long first = boundary == Boundary::Dirichlet ? 1 : 0;
  const long last = boundary == Boundary::Dirichlet ? intervals - 1 : intervals;
  sites_ = static_cast<int>(last - first + 1);

  const int n = channels_;
  const double inv_h2 = 1.0 / (h * h);
  const double left_edge = -static_cast<double>(box_length);
  const double right_edge = static_cast<double>(box_length);
  diagonal_.assign(static_cast<std::size_t>(sites_) * n * n, 0.0);
  for (long k = first; k <= last; ++k) {
    const double x = left_edge + static_cast<double>(k) * h;
    const double a = std::max(left_edge, x - 0.5 * h);
    const double b = std::min(right_edge, x + 0.5 * h);
    const Matrix v = realization.average(a, b);
    double* block = &diagonal_[static_cast<std::size_t>(k - first) * n * n];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) block[i * n + j] = v(i, j) + (i == j ? 2.0 * inv_h2 : 0.0);
  }
  coupling_.assign(static_cast<std::size_t>(sites_ - 1), -inv_h2);
  if (boundary == Boundary::Neumann && sites_ >= 2) {
    // ghost point u_{-1} = u_1 doubles the boundary link; D^{1/2} H D^{-1/2}
    // with D = diag(1/2, 1, ..., 1, 1/2) restores symmetry
    coupling_.front() = -std::numbers::sqrt2 * inv_h2;
    coupling_.back() = -std::numbers::sqrt2 * inv_h2;
  }
}

bool BoxOperator::try_count(double energy, std::int64_t& count) const {
  const int n = channels_;
  std::vector<double> s(static_cast<std::size_t>(n * n)), inv(static_cast<std::size_t>(n * n), 0.0);
  std::vector<double> l(static_cast<std::size_t>(n * n)), d(static_cast<std::size_t>(n)), col(static_cast<std::size_t>(n));
  count = 0;
  for (int k = 0; k < sites_; ++k) {
    const double* block = &diagonal_[static_cast<std::size_t>(k) * n * n];
    const double c2 = k > 0 ? coupling_[static_cast<std::size_t>(k - 1)] * coupling_[static_cast<std::size_t>(k - 1)] : 0.0;
    for (int i = 0; i < n * n; ++i) s[i] = block[i] - c2 * inv[i];
    for (int i = 0; i < n; ++i) s[i * n + i] -= energy;
    // S = L D L^T, unit lower L
    for (int j = 0; j < n; ++j) {
      double dj = s[j * n + j];
      for (int m = 0; m < j; ++m) dj -= l[j * n + m] * l[j * n + m] * d[m];
      if (dj == 0.0 || !std::isfinite(dj)) return false;
      d[j] = dj;
      if (dj < 0.0) ++count;
      for (int i = j + 1; i < n; ++i) {
        double v = s[i * n + j];
        for (int m = 0; m < j; ++m) v -= l[i * n + m] * l[j * n + m] * d[m];
        l[i * n + j] = v / dj;
      }
    }
    if (k + 1 == sites_) break;
    // S^{-1} column by column
    for (int c = 0; c < n; ++c) {
      for (int i = 0; i < n; ++i) {
        double v = i == c ? 1.0 : 0.0;
        for (int m = 0; m < i; ++m) v -= l[i * n + m] * col[m];
        col[i] = v;
      }
      for (int i = 0; i < n; ++i) col[i] /= d[i];
      for (int i = n - 1; i >= 0; --i) {
        double v = col[i];
        for (int m = i + 1; m < n; ++m) v -= l[m * n + i] * col[m];
        col[i] = v;
      }
      for (int i = 0; i < n; ++i) inv[i * n + c] = col[i];
    }
  }
  return true;
}

CountResult BoxOperator::count_below(double energy) const {
  CountResult out;
  if (try_count(energy, out.count)) return out;
  out.perturbed = true;
  if (!try_count(energy + 1e-9, out.count)) throw NumericalError("singular pivot in inertia count");
  return out;
}

Matrix BoxOperator::dense() const {
  const int n = channels_;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(sites_) * n, static_cast<Eigen::Index>(sites_) * n);
  for (int k = 0; k < sites_; ++k) {
    const double* block = &diagonal_[static_cast<std::size_t>(k) * n * n];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(k * n + i, k * n + j) = block[i * n + j];
    if (k + 1 < sites_)
      for (int i = 0; i < n; ++i) {
        m(k * n + i, (k + 1) * n + i) = coupling_[static_cast<std::size_t>(k)];
        m((k + 1) * n + i, k * n + i) = coupling_[static_cast<std::size_t>(k)];
      }
  }
  return m;
}

CountResult finite_box_count(const DisorderSpec& spec, std::uint64_t seed, int box_length, double mesh, double energy,
                             Boundary boundary) {
  spec.validate();
  return BoxOperator(Realization(spec, seed), box_length, mesh, boundary).count_below(energy);
}

IdsTable ids_table(const DisorderSpec& spec, std::uint64_t seed, int box_length, double mesh,
                   const std::vector<double>& energies, Boundary boundary, int threads) {
  spec.validate();
  if (energies.empty()) throw ConfigError("energy grid is empty");
  if (!std::is_sorted(energies.begin(), energies.end()) ||
      std::adjacent_find(energies.begin(), energies.end()) != energies.end())
    throw ConfigError("energy grid must be strictly increasing");
  const BoxOperator op(Realization(spec, seed), box_length, mesh, boundary);
  const auto counts = parallel_map(energies.size(), [&](std::size_t i) { return op.count_below(energies[i]); }, threads);

  IdsTable t;
  t.energies = energies;
  t.box_length = box_length;
  t.mesh = op.mesh();
  t.boundary = boundary;
  t.seed = seed;
  t.channels = spec.channels;
  for (const auto& c : counts) {
    t.ids.push_back(static_cast<double>(c.count) / (2.0 * box_length));
    if (c.perturbed) ++t.perturbed_energies;
  }
  return t;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw ConfigError("energy grid needs lo < hi and at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

FreeTail fit_free_tail(const IdsTable& table) {
  if (table.energies.empty()) throw ConfigError("empty IDS table");
  FreeTail tail;
  tail.channels = table.channels;
  tail.start = table.energies.back();
  const double root = std::numbers::pi * table.ids.back() / table.channels;
  tail.shift = tail.start - root * root;
  return tail;
}

double ids_at(const IdsTable& table, double energy) {
  const auto& e = table.energies;
  if (e.empty() || energy < e.front()) return 0.0;
  if (energy >= e.back()) return table.ids.back();
  const auto it = std::upper_bound(e.begin(), e.end(), energy);
  const auto k = static_cast<std::size_t>(it - e.begin());
  const double w = (energy - e[k - 1]) / (e[k] - e[k - 1]);
  return table.ids[k - 1] + w * (table.ids[k] - table.ids[k - 1]);
}

double laplace_of_ids(const IdsTable& table, double t) {
  if (!(t > 0.0)) throw DomainError("Laplace variable must be positive");
  const auto& e = table.energies;
  const auto& n = table.ids;
  double sum = n.front() * std::exp(-t * e.front());  // mass already present at the bottom of the grid
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double density = (n[k] - n[k - 1]) / (e[k] - e[k - 1]);
    sum += density * (std::exp(-t * e[k - 1]) - std::exp(-t * e[k])) / t;
  }
  const FreeTail tail = fit_free_tail(table);
  const double u0 = tail.start - tail.shift;
  sum += tail.channels / (2.0 * std::numbers::pi) * std::exp(-t * tail.shift) * std::sqrt(std::numbers::pi / t) *
         std::erfc(std::sqrt(t * u0));
  return sum;
}

Complex stieltjes_of_ids(const IdsTable& table, Complex z) {
  if (z.imag() == 0.0) throw DomainError("Stieltjes transform needs Im z != 0");
  const auto& e = table.energies;
  const auto& n = table.ids;
  Complex sum = n.front() / (e.front() - z);
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double density = (n[k] - n[k - 1]) / (e[k] - e[k - 1]);
    sum += density * (std::log(Complex(e[k]) - z) - std::log(Complex(e[k - 1]) - z));
  }
  // tail: (c/pi) int_{u0}^inf du / (u^2 - k^2) = (c/pi) atanh(k/u0) / k with k^2 = z - shift
  const FreeTail tail = fit_free_tail(table);
  const double u0 = std::max(std::sqrt(tail.start - tail.shift), 1e-12);
  const Complex k = std::sqrt(z - tail.shift);
  sum += tail.channels / std::numbers::pi * std::atanh(k / u0) / k;
  return sum;
}

double laplace_of_measure(const DiscreteMeasure& measure, double t) {
  if (measure.atoms.size() != measure.weights.size()) throw ConfigError("atoms and weights differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) sum += measure.weights[i] * std::exp(-t * measure.atoms[i]);
  return sum;
}

FeynmanKacEstimate feynman_kac_laplace(const DisorderSpec& spec, double t, std::int64_t n_paths, double time_step,
                                       std::uint64_t seed, int threads) {
  spec.validate();
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (!(time_step > 0.0) || time_step > t / 10.0 * (1.0 + 1e-12)) throw DomainError("time_step must lie in (0, t/10]");
  if (n_paths < 2) throw StatisticsError("at least 2 paths are required");
  const auto steps = static_cast<std::int64_t>(std::ceil(t / time_step - 1e-12));
  const double ds = t / static_cast<double>(steps);
  const double sigma = std::sqrt(2.0 * ds);
  const int n = spec.channels;

  // propagators exp(-ds V) for distinct cell values, shared read-only after warm-up
  auto propagator = [ds](const Matrix& v) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(v);
    return Matrix(es.eigenvectors() * (-ds * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                  es.eigenvectors().transpose());
  };

  constexpr std::int64_t kChunk = 256;
  const auto chunks = static_cast<std::size_t>((n_paths + kChunk - 1) / kChunk);
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto partials = parallel_map(
      chunks,
      [&](std::size_t c) {
        std::map<std::vector<double>, Matrix> cache;
        std::vector<double> key;
        std::vector<double> walk(static_cast<std::size_t>(steps + 1));
        Partial p;
        const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
        const std::int64_t end = std::min(n_paths, begin + kChunk);
        for (std::int64_t i = begin; i < end; ++i) {
          std::mt19937_64 rng(counter_hash(seed, static_cast<std::uint64_t>(i), 1));
          std::normal_distribution<double> normal;
          const std::uint64_t realization_seed = counter_hash(seed, static_cast<std::uint64_t>(i), 2);
          const double x0 = to_unit_interval(rng());
          walk[0] = 0.0;
          for (std::int64_t j = 1; j <= steps; ++j) walk[j] = walk[j - 1] + sigma * normal(rng);
          Matrix product = Matrix::Identity(n, n);
          for (std::int64_t j = 0; j < steps; ++j) {
            const double bridge = walk[j] - (static_cast<double>(j) / static_cast<double>(steps)) * walk[steps];
            const double x = x0 + bridge;
            const double cell_index = std::floor(x);
            const CellPotential cell = sample_cell(spec, realization_seed, static_cast<std::int64_t>(cell_index));
            const Matrix& v = cell.value_at(x - cell_index);
            key.assign(v.data(), v.data() + v.size());
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, propagator(v)).first;
            product = it->second * product;
          }
          const double tr = product.trace();
          p.sum += tr;
          p.sum_sq += tr * tr;
        }
        return p;
      },
      threads);

  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : partials) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const auto m = static_cast<double>(n_paths);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  const double kernel = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  return {t, kernel * mean, kernel * std::sqrt(var / m), n_paths, ds};
}

}  // namespace strip
