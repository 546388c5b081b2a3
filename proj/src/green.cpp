#include "strip/green.hpp"

#include "strip/errors.hpp"
#include "strip/parallel.hpp"
#include "strip/random.hpp"
#include "strip/transfer.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace strip {

namespace {

constexpr double kMaxCondition = 1e12;

void require_upper(Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("energy must lie in the upper half plane (Im z > 0)");
}

void require_window(int window) {
  if (window < 10) throw DomainError("truncation length L_w must be >= 10 cells");
}

/// Keeps the column span of a 2N x N frame while restoring orthonormal columns.
void renormalize(CMatrix& frame) {
  Eigen::HouseholderQR<CMatrix> qr(frame);
  frame = qr.householderQ() * CMatrix::Identity(frame.rows(), frame.cols());
}

/// Inverse with a Frobenius-norm condition estimate (an upper bound for the 2-norm one).
double inverse_with_condition(const CMatrix& m, CMatrix& inverse) {
  inverse = m.inverse();
  const double cond = m.norm() * inverse.norm();
  return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

/// Y' Y^{-1} of a frame [Y; Y'].
CMatrix log_derivative(const CMatrix& frame) {
  const Eigen::Index n = frame.cols();
  CMatrix inverse;
  if (!(inverse_with_condition(frame.topRows(n), inverse) < kMaxCondition))
    throw NumericalError("Y(0) is numerically singular; increase the truncation length L_w");
  return frame.bottomRows(n) * inverse;
}

CMatrix initial_frame(int n, double derivative_sign) {
  CMatrix f = CMatrix::Zero(2 * n, n);
  f.bottomRows(n) = derivative_sign * CMatrix::Identity(n, n);
  return f;
}

/// Per-cell quadrature nodes and the complex transfers between them.
struct CellPlan {
  std::vector<double> weights;      // sum to 1 over the cell
  std::vector<CMatrix> segments;    // 0 -> s_0, s_0 -> s_1, ..., s_last -> 1
  std::vector<CMatrix> inverses;    // symplectic inverses of segments
  CMatrix whole;
  CMatrix whole_inverse;
};

CellPlan make_plan(const CellPotential& cell, Complex z) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<std::pair<double, double>> unit;  // nodes on [-1, 1]
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    unit.emplace_back(-Rule::abscissa()[i], Rule::weights()[i]);
    if (Rule::abscissa()[i] != 0.0) unit.emplace_back(Rule::abscissa()[i], Rule::weights()[i]);
  }
  std::sort(unit.begin(), unit.end());

  const DiagonalizedCell dc(cell);
  CellPlan plan;
  std::vector<double> nodes;
  for (std::size_t p = 0; p < cell.pieces().size(); ++p) {
    const double a = cell.pieces()[p].start;
    const double b = cell.piece_end(p);
    for (const auto& [x, w] : unit) {
      nodes.push_back(a + 0.5 * (b - a) * (x + 1.0));
      plan.weights.push_back(0.5 * (b - a) * w);
    }
  }
  double from = 0.0;
  for (double s : nodes) {
    plan.segments.push_back(dc.transfer(from, s, z));
    from = s;
  }
  plan.segments.push_back(dc.transfer(from, 1.0, z));
  plan.whole = cell_transfer(cell, z);
  for (const auto& m : plan.segments) plan.inverses.push_back(symplectic_inverse(m));
  plan.whole_inverse = symplectic_inverse(plan.whole);
  return plan;
}

class PlanCache {
 public:
  explicit PlanCache(Complex z) : z_(z) {}
  const CellPlan& get(const CellPotential& cell) {
    key_.clear();
    for (const auto& p : cell.pieces()) {
      key_.push_back(p.start);
      key_.insert(key_.end(), p.value.data(), p.value.data() + p.value.size());
    }
    if (auto it = plans_.find(key_); it != plans_.end()) return it->second;
    if (plans_.size() >= 256) {
      scratch_ = make_plan(cell, z_);
      return scratch_;
    }
    return plans_.emplace(key_, make_plan(cell, z_)).first->second;
  }

  /// False for the overflow slot, whose contents change between calls.
  bool holds(const CellPlan& p) const { return &p != &scratch_; }

 private:
  Complex z_;
  std::map<std::vector<double>, CellPlan> plans_;
  std::vector<double> key_;
  CellPlan scratch_;
};

/// Sample averages over positions in one realization.
struct WindowSample {
  Complex w;
  Complex green_trace;
  double im_m_inverse_trace = 0.0;
  double min_im_w = std::numeric_limits<double>::infinity();
  double min_im_green = std::numeric_limits<double>::infinity();
};

CMatrix hermitian_imaginary_part(const CMatrix& m) { return (m - m.adjoint()) / Complex(0.0, 2.0); }

/// The position sweep with matrix sizes fixed at compile time when N is small.
template <int N>
class WindowSweep {
 public:
  static constexpr int D = N == Eigen::Dynamic ? Eigen::Dynamic : 2 * N;
  using Square = Eigen::Matrix<Complex, N, N>;
  using Frame = Eigen::Matrix<Complex, D, N>;
  using Transfer = Eigen::Matrix<Complex, D, D>;

  struct Plan {
    std::vector<double> weights;
    std::vector<Transfer> segments;
    std::vector<Transfer> inverses;
    Transfer whole;
    Transfer whole_inverse;
  };

  WindowSweep(const DisorderSpec& spec, Complex z) : spec_(spec), z_(z), cache_(z), n_(spec.channels) {}

  WindowSample run(std::uint64_t seed, int window, int cells) {
    std::vector<Square> minus;
    minus.reserve(static_cast<std::size_t>(cells) * 8);

    Frame frame = start(1.0);
    for (std::int64_t c = -window; c < 0; ++c) {
      frame = plan(seed, c).whole * frame;
      renormalize(frame);
    }
    for (int c = 0; c < cells; ++c) {
      const Plan& p = plan(seed, c);
      for (std::size_t j = 0; j < p.weights.size(); ++j) {
        frame = p.segments[j] * frame;
        minus.push_back(-derivative_ratio(frame));
      }
      frame = p.segments.back() * frame;
      renormalize(frame);
    }

    WindowSample out;
    frame = start(-1.0);
    for (std::int64_t c = static_cast<std::int64_t>(cells) + window - 1; c >= cells; --c) {
      frame = plan(seed, c).whole_inverse * frame;
      renormalize(frame);
    }
    std::size_t k = minus.size();
    for (int c = cells - 1; c >= 0; --c) {
      const Plan& p = plan(seed, c);
      frame = p.inverses.back() * frame;
      for (std::size_t j = p.weights.size(); j-- > 0;) {
        const Square mp = derivative_ratio(frame);
        const Square sum = mp + minus[--k];
        Square inverse;
        if (!(inverse_condition(sum, inverse) < kMaxCondition)) throw NumericalError("M+ + M- is singular");
        const Complex w = 0.5 * sum.trace();
        const Complex g = -inverse.trace();
        const Square im = (mp - mp.adjoint()) / Complex(0.0, 2.0);
        const double inv_im = im.inverse().trace().real();
        const double weight = p.weights[j] / cells;
        out.w += weight * w;
        out.green_trace += weight * g;
        out.im_m_inverse_trace += weight * 0.5 * z_.imag() * inv_im;
        out.min_im_w = std::min(out.min_im_w, w.imag());
        out.min_im_green = std::min(out.min_im_green, g.imag());
        frame = p.inverses[j] * frame;
      }
      renormalize(frame);
    }
    return out;
  }

 private:
  Frame start(double derivative_sign) const {
    Frame f = Frame::Zero(2 * n_, n_);
    f.bottomRows(n_) = derivative_sign * Square::Identity(n_, n_);
    return f;
  }

  void renormalize(Frame& frame) const {
    Eigen::HouseholderQR<Frame> qr(frame);
    frame = qr.householderQ() * Frame::Identity(2 * n_, n_);
  }

  static double inverse_condition(const Square& m, Square& inverse) {
    inverse = m.inverse();
    const double cond = m.norm() * inverse.norm();
    return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
  }

  Square derivative_ratio(const Frame& frame) const {
    Square inverse;
    if (!(inverse_condition(frame.topRows(n_), inverse) < kMaxCondition))
      throw NumericalError("Y is numerically singular; increase the truncation length L_w");
    return frame.bottomRows(n_) * inverse;
  }

  const Plan& plan(std::uint64_t seed, std::int64_t c) {
    const CellPotential cell = sample_cell(spec_, seed, c);
    const CellPlan& dynamic = cache_.get(cell);
    auto it = fixed_.find(&dynamic);
    if (it == fixed_.end() || !cache_.holds(dynamic)) {
      Plan p;
      p.weights = dynamic.weights;
      for (const auto& m : dynamic.segments) p.segments.push_back(m);
      for (const auto& m : dynamic.inverses) p.inverses.push_back(m);
      p.whole = dynamic.whole;
      p.whole_inverse = dynamic.whole_inverse;
      it = fixed_.insert_or_assign(&dynamic, std::move(p)).first;
    }
    return it->second;
  }

  const DisorderSpec& spec_;
  Complex z_;
  PlanCache cache_;
  int n_;
  std::map<const CellPlan*, Plan> fixed_;
};

WindowSample window_sample(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window, int cells) {
  switch (spec.channels) {
    case 1:
      return WindowSweep<1>(spec, z).run(seed, window, cells);
    case 2:
      return WindowSweep<2>(spec, z).run(seed, window, cells);
    default:
      return WindowSweep<Eigen::Dynamic>(spec, z).run(seed, window, cells);
  }
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return sum / count; }
  double standard_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - count * m * m) / (count - 1.0)) / count);
  }
};

}  // namespace

CMatrix m_plus(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window) {
  spec.validate();
  require_upper(z);
  require_window(window);
  PlanCache cache(z);
  CMatrix frame = initial_frame(spec.channels, -1.0);
  for (std::int64_t c = window - 1; c >= 0; --c) {
    frame = cache.get(sample_cell(spec, seed, c)).whole_inverse * frame;
    renormalize(frame);
  }
  return log_derivative(frame);
}

CMatrix m_minus(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window) {
  spec.validate();
  require_upper(z);
  require_window(window);
  PlanCache cache(z);
  CMatrix frame = initial_frame(spec.channels, 1.0);
  for (std::int64_t c = -window; c < 0; ++c) {
    frame = cache.get(sample_cell(spec, seed, c)).whole * frame;
    renormalize(frame);
  }
  return -log_derivative(frame);
}

CMatrix green_at_zero(const CMatrix& mp, const CMatrix& mm) {
  CMatrix inverse;
  const double cond = inverse_with_condition(mp + mm, inverse);
  if (!(cond < kMaxCondition))
    throw NumericalError("M+ + M- is singular (condition number " + std::to_string(cond) + ")");
  return -inverse;
}

MFunction m_functions(const DisorderSpec& spec, std::uint64_t seed, Complex z, int window) {
  MFunction out;
  out.z = z;
  out.truncation_length = window;
  out.m_plus = m_plus(spec, seed, z, window);
  out.m_minus = m_minus(spec, seed, z, window);
  Eigen::JacobiSVD<CMatrix> svd(out.m_plus + out.m_minus);
  const auto& s = svd.singularValues();
  out.sum_condition = s(0) / s(s.size() - 1);
  return out;
}

double herglotz_margin(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_imaginary_part(m));
  return es.eigenvalues()(0);
}

WValue w_estimate(const DisorderSpec& spec, Complex z, int window, int n_realizations, std::uint64_t seed,
                  const WOptions& options) {
  spec.validate();
  require_upper(z);
  require_window(window);
  if (n_realizations < 1) throw DomainError("n_realizations must be >= 1");
  if (options.window_cells < 1) throw DomainError("window_cells must be >= 1");
  const double step = options.derivative_step;
  if (step < 0.0 || step >= z.imag()) throw DomainError("derivative_step must lie in [0, Im z)");

  struct Sample {
    WindowSample at;
    Complex derivative;
  };
  const auto samples = parallel_map(
      static_cast<std::size_t>(n_realizations),
      [&](std::size_t r) {
        const std::uint64_t rs = counter_hash(seed, r, 3);
        Sample s;
        s.at = window_sample(spec, rs, z, window, options.window_cells);
        if (step > 0.0) {
          const Complex up = window_sample(spec, rs, z + step, window, options.window_cells).w;
          const Complex down = window_sample(spec, rs, z - step, window, options.window_cells).w;
          s.derivative = (up - down) / (2.0 * step);
        }
        return s;
      },
      options.threads);

  Moments re_w, im_w, re_g, im_g, inv, re_d, im_d, re_gap, im_gap;
  WValue out;
  out.z = z;
  out.realizations = n_realizations;
  out.truncation_length = window;
  out.window_cells = options.window_cells;
  out.min_im_w = std::numeric_limits<double>::infinity();
  out.min_im_green = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    re_w.add(s.at.w.real());
    im_w.add(s.at.w.imag());
    re_g.add(s.at.green_trace.real());
    im_g.add(s.at.green_trace.imag());
    inv.add(s.at.im_m_inverse_trace);
    re_d.add(s.derivative.real());
    im_d.add(s.derivative.imag());
    re_gap.add((s.derivative - s.at.green_trace).real());
    im_gap.add((s.derivative - s.at.green_trace).imag());
    out.min_im_w = std::min(out.min_im_w, s.at.w.imag());
    out.min_im_green = std::min(out.min_im_green, s.at.green_trace.imag());
  }
  out.w = {re_w.mean(), im_w.mean()};
  out.green_trace = {re_g.mean(), im_g.mean()};
  out.se_re_w = re_w.standard_error();
  out.se_im_w = im_w.standard_error();
  out.se_re_green = re_g.standard_error();
  out.se_im_green = im_g.standard_error();
  out.im_m_inverse_trace = inv.mean();
  out.se_im_m_inverse_trace = inv.standard_error();
  if (step > 0.0) {
    out.w_prime = {re_d.mean(), im_d.mean()};
    out.se_w_prime_minus_green = std::hypot(re_gap.standard_error(), im_gap.standard_error());
  }
  return out;
}

double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw DomainError("extrapolation needs matching, non-empty samples");
  std::vector<double> p = y;
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) {
      const double xi = x[i], xj = x[i + level];
      if (xi == xj) throw DomainError("extrapolation nodes must be distinct");
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  return p[0];
}

}  // namespace strip
