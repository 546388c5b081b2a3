#include "strip/thouless.hpp"

#include "strip/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <numbers>

namespace strip {

namespace {

/// Antiderivative of log|u|.
double log_abs_primitive(double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; }

/// Antiderivative of (1/2) log(1 + x^2).
double half_log_primitive(double x) { return 0.5 * x * std::log1p(x * x) - x + std::atan(x); }

double tail_integral(const FreeTail& tail, double energy) {
  const double u0 = std::sqrt(std::max(tail.start - tail.shift, 0.0));
  const auto integrand = [&](double u) {
    const double e = u * u + tail.shift;
    return std::log(std::abs(e - energy)) - 0.5 * std::log1p(e * e);
  };
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, u0, std::numeric_limits<double>::infinity(), 15, 1e-12);
  return tail.channels / std::numbers::pi * value;
}

}  // namespace

double thouless_rhs(const IdsTable& table, double energy) {
  const auto& e = table.energies;
  const auto& n = table.ids;
  if (e.size() < 9) throw DomainError("IDS table too short for the Thouless integral");
  const double step_lo = e[4] - e[0];
  const double step_hi = e.back() - e[e.size() - 5];
  if (energy < e.front() + step_lo || energy > e.back() - step_hi)
    throw DomainError("energy within four grid steps of the IDS table edge");

  double sum = n.front() * (std::log(std::abs(e.front() - energy)) - 0.5 * std::log1p(e.front() * e.front()));
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double mass = n[k] - n[k - 1];
    if (mass == 0.0) continue;
    const double width = e[k] - e[k - 1];
    const double near = log_abs_primitive(e[k] - energy) - log_abs_primitive(e[k - 1] - energy);
    const double far = half_log_primitive(e[k]) - half_log_primitive(e[k - 1]);
    sum += mass / width * (near - far);
  }
  return sum + tail_integral(fit_free_tail(table), energy);
}

double thouless_rhs(const DiscreteMeasure& measure, double energy) {
  if (measure.atoms.size() != measure.weights.size()) throw ConfigError("atoms and weights differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    const double a = measure.atoms[i];
    sum += measure.weights[i] * (std::log(std::abs(a - energy)) - 0.5 * std::log1p(a * a));
  }
  return sum;
}

ThoulessFit thouless_fit(const std::vector<double>& energies, const std::vector<double>& gamma_sums,
                         const IdsTable& table) {
  if (energies.size() != gamma_sums.size()) throw ConfigError("energies and gamma sums differ in length");
  if (energies.size() < 10) throw DomainError("the Thouless fit needs at least 10 energies");
  ThoulessFit fit;
  fit.energies = energies;
  fit.gamma_sums = gamma_sums;
  double acc = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    fit.rhs.push_back(thouless_rhs(table, energies[i]));
    acc += fit.rhs.back() - gamma_sums[i];
  }
  fit.alpha = acc / static_cast<double>(energies.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    fit.residuals.push_back(gamma_sums[i] + fit.alpha - fit.rhs[i]);
    ss += fit.residuals.back() * fit.residuals.back();
  }
  fit.rms = std::sqrt(ss / static_cast<double>(energies.size()));
  return fit;
}

std::vector<double> hilbert_transform(const std::vector<double>& samples, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const std::size_t n = samples.size();
  if (n == 0) return {};
  // linear convolution with the odd kernel c_k = (1/pi) log|(k + 1/2) / (k - 1/2)|
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  std::vector<double> kernel(size, 0.0), data(size, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double c = std::log((k + 0.5) / (k - 0.5)) / std::numbers::pi;
    kernel[k] = c;
    kernel[size - k] = -c;
  }
  std::copy(samples.begin(), samples.end(), data.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fk, fd;
  fft.fwd(fk, kernel);
  fft.fwd(fd, data);
  for (std::size_t i = 0; i < fk.size(); ++i) fd[i] *= fk[i];
  std::vector<double> out;
  fft.inv(out, fd);
  out.resize(n);
  return out;
}

}  // namespace strip
