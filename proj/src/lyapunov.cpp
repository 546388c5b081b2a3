#include "strip/lyapunov.hpp"

#include "strip/errors.hpp"
#include "strip/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace strip {

namespace {

constexpr double kLogGrowthCap = 230.0;  // log(1e100)

struct BatchLayout {
  int period;
  std::int64_t batch_cells;
  std::int64_t batches;
};

BatchLayout layout(std::int64_t n_cells, int period) {
  if (period < 1) throw DomainError("renorm_period must be >= 1");
  if (n_cells < static_cast<std::int64_t>(kMinBatches) * period)
    throw StatisticsError("n_cells too small for " + std::to_string(kMinBatches) + " batches of whole renormalization periods");
  const std::int64_t per_batch = n_cells / (static_cast<std::int64_t>(kMinBatches) * period);
  const std::int64_t batch_cells = per_batch * period;
  return {period, batch_cells, n_cells / batch_cells};
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double standard_error(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const auto n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

int max_renorm_period(const DisorderSpec& spec, double energy, int p) {
  const double per_cell = 0.5 * p * (spec.potential_bound() + std::abs(energy) + 1.0);
  return std::max(1, static_cast<int>(std::floor(kLogGrowthCap / per_cell)));
}

LyapunovSpectrum lyapunov_spectrum(const DisorderSpec& spec, double energy, std::int64_t n_cells, std::uint64_t seed,
                                   int renorm_period) {
  spec.validate();
  if (renorm_period < 1) throw DomainError("renorm_period must be >= 1");
  const int dim = 2 * spec.channels;
  const int period = std::min(renorm_period, max_renorm_period(spec, energy, dim));
  const BatchLayout lay = layout(n_cells, period);

  CellMatrixCache cache;
  auto transfer = [energy](const CellPotential& c) { return cell_transfer(c, energy); };

  Matrix frame = Matrix::Identity(dim, dim);
  std::vector<std::vector<double>> batch_rates(static_cast<std::size_t>(dim));
  std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
  Eigen::HouseholderQR<Matrix> qr(dim, dim);
  std::int64_t n = 0;
  for (std::int64_t b = 0; b < lay.batches; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::int64_t k = 0; k < lay.batch_cells; ++k, ++n) {
      frame = cache.get(sample_cell(spec, seed, n), transfer) * frame;
      if ((k + 1) % period == 0) {
        qr.compute(frame);
        const Matrix& r = qr.matrixQR();
        frame = qr.householderQ();
        for (int i = 0; i < dim; ++i) {
          const double rii = r(i, i);
          if (rii < 0.0) frame.col(i) = -frame.col(i);
          if (rii == 0.0) throw NumericalError("rank-deficient frame in QR renormalization");
          acc[static_cast<std::size_t>(i)] += std::log(std::abs(rii));
        }
      }
    }
    for (int i = 0; i < dim; ++i)
      batch_rates[static_cast<std::size_t>(i)].push_back(acc[static_cast<std::size_t>(i)] /
                                                         static_cast<double>(lay.batch_cells));
  }

  std::vector<std::pair<double, double>> est;
  for (const auto& rates : batch_rates) est.emplace_back(mean(rates), standard_error(rates));
  std::vector<std::size_t> order(est.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return est[a].first > est[b].first; });

  LyapunovSpectrum out;
  out.energy = energy;
  out.seed = seed;
  out.renorm_period = period;
  out.cells_used = lay.batches * lay.batch_cells;
  for (std::size_t i : order) {
    out.exponents.push_back(est[i].first);
    out.standard_errors.push_back(est[i].second);
  }
  for (std::size_t i = 0; i < order.size() / 2; ++i) {
    const auto& hi = batch_rates[order[i]];
    const auto& lo = batch_rates[order[order.size() - 1 - i]];
    std::vector<double> sums(hi.size());
    for (std::size_t b = 0; b < hi.size(); ++b) sums[b] = hi[b] + lo[b];
    out.pair_standard_errors.push_back(standard_error(sums));
  }
  return out;
}

ExponentSum lyapunov_sum_p(const DisorderSpec& spec, double energy, int p, std::int64_t n_cells, std::uint64_t seed,
                           int renorm_period) {
  spec.validate();
  if (p < 1 || p > spec.channels) throw DomainError("lyapunov_sum_p: p must lie in [1, N]");
  if (renorm_period < 1) throw DomainError("renorm_period must be >= 1");
  const int period = std::min(renorm_period, max_renorm_period(spec, energy, p));
  const BatchLayout lay = layout(n_cells, period);

  CellMatrixCache cache;
  auto wedge = [energy, p](const CellPotential& c) { return exterior_power(cell_transfer(c, energy), p); };

  const auto dim = static_cast<Eigen::Index>(binomial(2 * spec.channels, p));
  Vector x = Vector::Zero(dim);
  x(0) = 1.0;  // e_1 ^ ... ^ e_p, a Lagrangian direction
  std::vector<double> rates;
  std::int64_t n = 0;
  for (std::int64_t b = 0; b < lay.batches; ++b) {
    double acc = 0.0;
    for (std::int64_t k = 0; k < lay.batch_cells; ++k, ++n) {
      x = cache.get(sample_cell(spec, seed, n), wedge) * x;
      if ((k + 1) % period == 0) {
        const double norm = x.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("wedge vector degenerated");
        acc += std::log(norm);
        x /= norm;
      }
    }
    rates.push_back(acc / static_cast<double>(lay.batch_cells));
  }
  return {mean(rates), standard_error(rates), lay.batches * lay.batch_cells};
}

}  // namespace strip
