#include "doctest.h"

#include "strip/errors.hpp"
#include "strip/lyapunov.hpp"

#include <cmath>

using namespace strip;

namespace {
double joint(double a, double b) { return std::hypot(a, b); }
}  // namespace

TEST_CASE("decoupled channels: hyperbolic and elliptic rates") {
  const DisorderSpec spec = model2_preset(Dirac{0.0});
  // E=0: channel with coupling +1 solves u'' = u (rate 1), coupling -1 gives u'' = -u
  const auto at0 = lyapunov_spectrum(spec, 0.0, 10000, 1);
  REQUIRE(at0.exponents.size() == 4);
  const double expected0[4] = {1.0, 0.0, 0.0, -1.0};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(at0.exponents[i] - expected0[i]) < 1e-2);
  const auto at3 = lyapunov_spectrum(spec, 3.0, 10000, 1);
  for (double g : at3.exponents) CHECK(std::abs(g) < 1e-2);

  const auto sum2 = lyapunov_sum_p(spec, 0.0, 2, 10000, 1);
  CHECK(std::abs(sum2.value - 1.0) < 1e-2);

  // scalar free operator below 0: gamma = sqrt(-E)
  const DisorderSpec free1 = constant_potential(Matrix::Zero(1, 1));
  const auto below = lyapunov_spectrum(free1, -2.25, 4000, 3);
  CHECK(std::abs(below.exponents[0] - 1.5) < 1e-3);
  CHECK(std::abs(below.exponents[1] + 1.5) < 1e-3);
}

TEST_CASE("random model: symmetry, ordering and method consistency") {
  const DisorderSpec spec = model2_preset();
  for (double e : {0.5, 3.0, 3.7}) {
    const auto s = lyapunov_spectrum(spec, e, 40000, 11);
    for (std::size_t i = 0; i + 1 < s.exponents.size(); ++i) CHECK(s.exponents[i] >= s.exponents[i + 1]);
    for (std::size_t i = 0; i < 2; ++i) {
      const std::size_t j = 3 - i;
      CHECK(std::abs(s.exponents[i] + s.exponents[j]) <= 3.0 * s.pair_standard_errors[i]);
      CHECK(s.pair_standard_errors[i] <= s.standard_errors[i] + s.standard_errors[j] + 1e-15);
    }
    const auto p1 = lyapunov_sum_p(spec, e, 1, 40000, 11);
    CHECK(std::abs(p1.value - s.exponents[0]) <= 3.0 * joint(p1.standard_error, s.standard_errors[0]));
    const auto p2 = lyapunov_sum_p(spec, e, 2, 40000, 11);
    CHECK(std::abs(p2.value - (s.exponents[0] + s.exponents[1])) <=
          3.0 * joint(p2.standard_error, s.standard_errors[0] + s.standard_errors[1]));
    CHECK(s.exponents[1] > 0.0);
  }
}

TEST_CASE("renormalization period does not change the estimate") {
  const DisorderSpec spec = model2_preset();
  const auto p1 = lyapunov_spectrum(spec, 2.5, 30000, 4, 1);
  for (int period : {5, 10}) {
    const auto pk = lyapunov_spectrum(spec, 2.5, 30000, 4, period);
    CHECK(pk.renorm_period == period);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(pk.exponents[i] - p1.exponents[i]) <= 3.0 * joint(pk.standard_errors[i], p1.standard_errors[i]) + 1e-12);
  }
  // a huge period gets capped below the overflow threshold
  const auto capped = lyapunov_spectrum(spec, 3.0, 100000, 4, 5000);
  CHECK(capped.renorm_period < 5000);
  CHECK(capped.renorm_period == max_renorm_period(spec, 3.0, 4));
  for (double g : capped.exponents) CHECK(std::isfinite(g));
}

TEST_CASE("seed stability and error paths") {
  const DisorderSpec spec = model2_preset();
  const auto a = lyapunov_spectrum(spec, 3.3, 2000, 99, 2);
  const auto b = lyapunov_spectrum(spec, 3.3, 2000, 99, 2);
  CHECK(a.exponents == b.exponents);
  CHECK(a.standard_errors == b.standard_errors);
  CHECK(a.cells_used == 2000);
  CHECK_THROWS_AS(lyapunov_spectrum(spec, 3.0, 19, 1), StatisticsError);
  CHECK_THROWS_AS(lyapunov_spectrum(spec, 3.0, 100, 1, 10), StatisticsError);
  CHECK_THROWS_AS(lyapunov_sum_p(spec, 3.0, 3, 1000, 1), DomainError);
  CHECK_THROWS_AS(lyapunov_spectrum(spec, 3.0, 1000, 1, 0), DomainError);
}
