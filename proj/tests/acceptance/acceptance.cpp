// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit status
// when any criterion fails.

#include "strip/green.hpp"
#include "strip/ids.hpp"
#include "strip/lyapunov.hpp"
#include "strip/regularity.hpp"
#include "strip/thouless.hpp"
#include "strip/transfer.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace strip;

namespace {

std::string format(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

class Report {
 public:
  void detail(const std::string& text) { std::printf("    %s\n", text.c_str()); }

  void criterion(int id, const std::string& title, bool ok) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
    std::fflush(stdout);
    failures_ += ok ? 0 : 1;
    start_ = std::chrono::steady_clock::now();
  }

  int failures() const { return failures_; }

 private:
  int failures_ = 0;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double free_two_channel_ids(double e) {
  return (std::sqrt(std::max(e + 1.0, 0.0)) + std::sqrt(std::max(e - 1.0, 0.0))) / std::numbers::pi;
}

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

std::vector<Matrix> sp_basis(int n) {
  const Matrix j = symplectic_form(n);
  std::vector<Matrix> out;
  for (int r = 0; r < 2 * n; ++r)
    for (int c = r; c < 2 * n; ++c) {
      Matrix s = Matrix::Zero(2 * n, 2 * n);
      s(r, c) = s(c, r) = 1.0;
      out.push_back(j * s);
    }
  return out;
}

/// Table used by the Laplace and Thouless checks.
const IdsTable& model2_table() {
  static const IdsTable table =
      ids_table(model2_preset(), 1, 200, 0.01, uniform_grid(-2.0, 40.0, 841), Boundary::Dirichlet);
  return table;
}

void criterion1(Report& r) {
  const DisorderSpec spec = model2_preset(Dirac{0.0});
  const auto energies = uniform_grid(1.5, 5.0, 71);
  const IdsTable t = ids_table(spec, 1, 100, 0.01, energies, Boundary::Dirichlet);
  const double exact3 = (2.0 + std::sqrt(2.0)) / std::numbers::pi;
  const double rel3 = std::abs(ids_at(t, 3.0) - exact3) / exact3;
  double worst = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i)
    worst = std::max(worst, std::abs(t.ids[i] - free_two_channel_ids(energies[i])) / free_two_channel_ids(energies[i]));
  r.detail(format("N(3) = %.5f vs %.5f, relative error %.2e (limit 2e-2)", ids_at(t, 3.0), exact3, rel3));
  r.detail(format("max relative error on [1.5, 5], 71 energies: %.2e (limit 2e-2)", worst));
  r.criterion(1, "free-channel IDS oracle", rel3 < 2e-2 && worst < 2e-2);
}

void criterion2(Report& r) {
  const DisorderSpec spec = model2_preset(Dirac{0.0});
  const auto at0 = lyapunov_spectrum(spec, 0.0, 10000, 1);
  const auto at3 = lyapunov_spectrum(spec, 3.0, 10000, 1);
  const double expected0[] = {1.0, 0.0, 0.0, -1.0};
  double err0 = 0.0, err3 = 0.0;
  for (int i = 0; i < 4; ++i) {
    err0 = std::max(err0, std::abs(at0.exponents[i] - expected0[i]));
    err3 = std::max(err3, std::abs(at3.exponents[i]));
  }
  r.detail(format("E = 0: (%.4f, %.4f, %.4f, %.4f), max error %.2e", at0.exponents[0], at0.exponents[1],
                  at0.exponents[2], at0.exponents[3], err0));
  r.detail(format("E = 3: max |gamma| %.2e", err3));
  r.criterion(2, "deterministic Lyapunov oracle", err0 < 1e-2 && err3 < 1e-2);
}

void criterion3(Report& r) {
  const DisorderSpec spec = model2_preset();
  const auto energies = uniform_grid(-3.0, 10.0, 50);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const CellPotential cell = sample_cell(spec, 3, n);
    for (double e : energies) worst = std::max(worst, symplectic_residual(cell_transfer(cell, e)));
  }
  r.detail(format("max symplectic residual over 1e4 cells x 50 energies: %.2e (limit 1e-10)", worst));
  bool paired = true;
  for (double e : {0.5, 3.0, 3.7}) {
    const auto s = lyapunov_spectrum(spec, e, 100000, 11);
    for (int i = 0; i < 2; ++i) {
      const double sum = s.exponents[i] + s.exponents[3 - i];
      const double se = s.pair_standard_errors[i];
      paired = paired && std::abs(sum) <= 3.0 * se;
      r.detail(format("E = %.1f: gamma_%d + gamma_%d = %.2e, joint SE %.2e", e, i + 1, 4 - i, sum, se));
    }
  }
  r.criterion(3, "symplectic structure and exponent pairing", worst <= 1e-10 && paired);
}

void criterion4(Report& r) {
  const DisorderSpec free1 = constant_potential(Matrix::Zero(1, 1));
  const auto a = feynman_kac_laplace(free1, 1.0, 10000, 1e-2, 4);
  const double exact = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  // the free estimator has zero variance; allow rounding only
  const bool ok_a = std::abs(a.value - exact) <= 3.0 * a.mc_standard_error + 1e-12;
  r.detail(format("(a) free: %.10f vs %.10f, SE %.1e", a.value, exact, a.mc_standard_error));

  const auto b = feynman_kac_laplace(model2_preset(), 1.0, 10000, 1e-2, 5);
  const double lap = laplace_of_ids(model2_table(), 1.0);
  const bool ok_b = std::abs(b.value - lap) <= 3.0 * b.mc_standard_error + 0.03 * std::abs(lap);
  r.detail(format("(b) model2: FK %.5f (SE %.5f) vs IDS Laplace %.5f, |diff| %.5f, budget %.5f", b.value,
                  b.mc_standard_error, lap, std::abs(b.value - lap), 3.0 * b.mc_standard_error + 0.03 * std::abs(lap)));
  r.criterion(4, "Feynman-Kac cross-check", ok_a && ok_b);
}

void criterion5(Report& r) {
  const DisorderSpec spec = model2_preset();
  const auto& heights = default_limit_heights();
  std::vector<double> neg_re, im;
  bool herglotz = true;
  WValue at01;
  for (double a : heights) {
    WOptions o;
    o.window_cells = 1000;
    o.derivative_step = a == 0.1 ? 1e-4 : 0.0;
    const WValue w = w_estimate(spec, Complex(3.0, a), 50, 200, 9, o);
    herglotz = herglotz && w.min_im_w > 0.0 && w.min_im_green > 0.0;
    neg_re.push_back(-w.w.real());
    im.push_back(w.w.imag());
    if (a == 0.1) at01 = w;
    r.detail(format("a = %.2f: w = %.5f + %.5fi (SE %.1e, %.1e), min Im w %.3f, min Im TrG %.3f", a, w.w.real(),
                    w.w.imag(), w.se_re_w, w.se_im_w, w.min_im_w, w.min_im_green));
  }
  const double re0 = extrapolate_to_zero(heights, neg_re);
  const double im0 = extrapolate_to_zero(heights, im);
  const auto gamma = lyapunov_sum_p(spec, 3.0, 2, 400000, 5);
  const double ids3 = static_cast<double>(finite_box_count(spec, 6, 400, 0.01, 3.0, Boundary::Dirichlet).count) / 800.0;
  const double rel_re = std::abs(re0 - gamma.value) / gamma.value;
  const double rel_im = std::abs(im0 - std::numbers::pi * ids3) / (std::numbers::pi * ids3);
  const Complex g = at01.green_trace;
  const double rel_wp = std::abs(at01.w_prime - g) / std::abs(g);
  r.detail(format("-Re w -> %.5f vs gamma1 + gamma2 = %.5f (SE %.1e): relative %.2e (limit 5e-2)", re0, gamma.value,
                  gamma.standard_error, rel_re));
  r.detail(format("Im w -> %.5f vs pi N(3) = %.5f: relative %.2e (limit 5e-2)", im0, std::numbers::pi * ids3, rel_im));
  r.detail(format("w' = %.5f + %.5fi vs E Tr G = %.5f + %.5fi: relative %.2e (limit 1e-3), SE of gap %.1e",
                  at01.w_prime.real(), at01.w_prime.imag(), g.real(), g.imag(), rel_wp,
                  at01.se_w_prime_minus_green));
  r.detail(format("Herglotz signs in every realization: %s", herglotz ? "yes" : "no"));
  r.criterion(5, "Kotani identities", herglotz && rel_re < 5e-2 && rel_im < 5e-2 && rel_wp < 1e-3);
}

void criterion6(Report& r) {
  std::vector<double> energies, gamma;
  for (int k = -40; k <= 40; ++k)
    if (std::abs(k) >= 2) {
      energies.push_back(0.1 * k);
      gamma.push_back(std::sqrt(std::max(-0.1 * k, 0.0)));
    }
  const DisorderSpec free1 = constant_potential(Matrix::Zero(1, 1));
  const IdsTable free_table = ids_table(free1, 0, 200, 0.01, uniform_grid(-6.0, 30.0, 721), Boundary::Dirichlet);
  const ThoulessFit free_fit = thouless_fit(energies, gamma, free_table);
  r.detail(format("free scalar: rms %.2e (limit 2e-2), alpha %.5f (Re w(i) = %.5f)", free_fit.rms, free_fit.alpha,
                  -1.0 / std::numbers::sqrt2));

  const DisorderSpec spec = model2_preset();
  const auto grid = uniform_grid(3.0, 4.0, 40);
  std::vector<double> sums;
  double mean_se = 0.0;
  for (double e : grid) {
    const auto s = lyapunov_sum_p(spec, e, 2, 100000, 7);
    sums.push_back(s.value);
    mean_se += s.standard_error / static_cast<double>(grid.size());
  }
  const ThoulessFit fit = thouless_fit(grid, sums, model2_table());
  r.detail(format("model2 on [3, 4], 40 energies: rms %.2e (limit 5e-2), alpha %.5f", fit.rms, fit.alpha));

  const WValue wi = w_estimate(spec, Complex(0.0, 1.0), 50, 400, 8);
  const double combined = std::hypot(wi.se_re_w, mean_se);
  const double gap = fit.alpha - wi.w.real();
  r.detail(format("optional: alpha - Re w(i) = %.4f with Re w(i) = %.4f; statistical error %.1e (%s)", gap,
                  wi.w.real(), combined,
                  std::abs(gap) <= 3.0 * combined ? "within 3 combined SE"
                                                  : "outside 3 combined SE; IDS table bias is not in this error"));
  r.criterion(6, "Thouless formula", free_fit.rms < 2e-2 && fit.rms < 5e-2);
}

void criterion7(Report& r) {
  const double h = 1e-3;
  const double half_width = 100.0;
  const int n = static_cast<int>(2 * half_width / h);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = -half_width + (i + 0.5) * h;
  const std::vector<std::function<double(double)>> family{
      [](double s) { return bump(s); },
      [](double s) { return bump(2.0 * (s - 0.3)); },
      [](double s) { return s * bump(s / 1.5); },
      [](double s) { return std::cos(3.0 * s) * bump(s / 2.0); },
  };
  double worst_rms = 0.0;
  for (const auto& f : family) {
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) psi[i] = f(x[i]);
    const auto tt = hilbert_transform(hilbert_transform(psi, h), h);
    double ss = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(x[i]) < 3.0) {
        ss += (tt[i] + psi[i]) * (tt[i] + psi[i]);
        ++count;
      }
    worst_rms = std::max(worst_rms, std::sqrt(ss / count));
  }
  r.detail(format("T^2 + Id: worst RMS over 4 test functions %.2e (limit 1e-2)", worst_rms));

  const int m = 6000;
  std::vector<double> y(m), ind(m);
  for (int i = 0; i < m; ++i) {
    y[i] = -3.0 + (i + 0.5) * h;
    ind[i] = std::abs(y[i]) < 1.0 ? 1.0 : 0.0;
  }
  const auto t = hilbert_transform(ind, h);
  double max_err = 0.0;
  for (int i = 0; i < m; ++i)
    max_err = std::max(max_err, std::abs(t[i] - std::log(std::abs((y[i] + 1.0) / (y[i] - 1.0))) / std::numbers::pi));
  r.detail(format("indicator of (-1, 1): max error %.2e (limit 1e-2)", max_err));
  r.criterion(7, "Hilbert transform", worst_rms < 1e-2 && max_err < 1e-2);
}

void criterion8(Report& r) {
  const int n = 1024;
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) root[i] = std::sqrt(std::abs(static_cast<double>(i) / n - 0.5));
  const auto syn = hoelder_exponent(root, 1.0 / n);
  r.detail(format("|x|^(1/2): alpha %.4f (0.5 +- 0.05)", syn.alpha));

  const DisorderSpec spec = model2_preset();
  const auto grid = uniform_grid(3.0, 4.0, 257);
  const IdsTable table = ids_table(spec, 1, 400, 0.01, grid, Boundary::Dirichlet);
  const auto ids = hoelder_exponent(table.ids, grid[1] - grid[0]);
  r.detail(format("N(E) on [3, 4]: alpha %.3f, r^2 %.3f", ids.alpha, ids.r2));

  std::vector<double> sums;
  for (double e : grid) sums.push_back(lyapunov_sum_p(spec, e, 2, 20000, 7).value);
  const auto gam = hoelder_exponent(sums, grid[1] - grid[0]);
  r.detail(format("gamma1 + gamma2 on [3, 4]: alpha %.3f, r^2 %.3f", gam.alpha, gam.r2));
  r.criterion(8, "Hoelder diagnostics",
              std::abs(syn.alpha - 0.5) <= 0.05 && ids.alpha > 0.1 && ids.r2 > 0.8 && gam.alpha > 0.1 && gam.r2 > 0.8);
}

void criterion9(Report& r) {
  bool ok = true;
  try {
    const BoundsReport b = check_bounds(model2_preset(), 2.5, 4.5, 1000, 21);
    for (std::size_t p = 0; p < b.max_growth_ratio.size(); ++p) {
      r.detail(format("p = %zu: max growth ratio %.2e, max Lipschitz ratio %.2e", p + 1, b.max_growth_ratio[p],
                      b.max_lipschitz_ratio[p]));
      ok = ok && b.max_growth_ratio[p] <= 1.0 && b.max_lipschitz_ratio[p] <= 1.0;
    }
  } catch (const std::exception& e) {
    r.detail(e.what());
    ok = false;
  }
  r.criterion(9, "transfer-matrix bounds on [2.5, 4.5]", ok);
}

void criterion10(Report& r) {
  const int full = bracket_closure_rank(sp_basis(2));
  const RankReport rep = lie_algebra_rank(model2_preset(), 3.0, 10000);
  r.detail(format("full sp_2 basis: rank %d / 10", full));
  r.detail(format("model2 at E = 3: rank %d / %d from %zu generators", rep.rank, rep.target, rep.generators.size()));
  r.criterion(10, "Lie-algebra rank", full == 10 && rep.rank == 10 && rep.target == 10);
}

void criterion11(Report& r) {
  const DisorderSpec spec = model2_preset();
  const auto grid = uniform_grid(0.0, 5.0, 501);
  double sup[2] = {0.0, 0.0};
  const int lengths[2] = {50, 100};
  for (int k = 0; k < 2; ++k) {
    const IdsTable d = ids_table(spec, 12, lengths[k], 0.01, grid, Boundary::Dirichlet);
    const IdsTable n = ids_table(spec, 12, lengths[k], 0.01, grid, Boundary::Neumann);
    for (std::size_t i = 0; i < grid.size(); ++i) sup[k] = std::max(sup[k], std::abs(d.ids[i] - n.ids[i]));
    r.detail(format("L = %d: sup |N_D - N_N| on [0, 5] = %.4f", lengths[k], sup[k]));
  }
  r.criterion(11, "boundary-condition independence", sup[1] < 2.0 * sup[0]);
}

}  // namespace

int main() {
  Report r;
  criterion1(r);
  criterion2(r);
  criterion3(r);
  criterion4(r);
  criterion5(r);
  criterion6(r);
  criterion7(r);
  criterion8(r);
  criterion9(r);
  criterion10(r);
  criterion11(r);
  std::printf("%d of 11 criteria failed\n", r.failures());
  return r.failures() == 0 ? 0 : 1;
}
