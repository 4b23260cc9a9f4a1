#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "qeikit/errors.hpp"
#include "qeikit/qei.hpp"
#include "qeikit/spectrum.hpp"

using namespace qeikit;
using spectrum::MassSpectrum;

TEST_CASE("generators produce the documented masses") {
  const auto a = MassSpectrum::arithmetic(0.5);
  CHECK(a.mass(1) == 0.5);
  CHECK(a.mass(7) == 3.5);
  const auto p = MassSpectrum::power_law(2.0, 2.0);  // N(u) = floor(2 u^2)
  CHECK(p.mass(8) == doctest::Approx(2.0));
  const auto l = MassSpectrum::logarithmic(1.0);
  CHECK(l.mass(3) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("counting uses theta(0) = 1 and is non-decreasing") {
  const auto s = MassSpectrum::list({1.0, 2.0, 2.0, 3.5});
  CHECK(spectrum::counting(s, 0.999) == 0);
  CHECK(spectrum::counting(s, 1.0) == 1);
  CHECK(spectrum::counting(s, 2.0) == 3);
  CHECK(spectrum::counting(s, 10.0) == 4);
  const auto a = MassSpectrum::arithmetic(1.0);
  CHECK(spectrum::counting(a, 5.0) == 5);
  std::uint64_t prev = 0;
  for (double u = 0.0; u < 30.0; u += 0.37) {
    const auto n = spectrum::counting(MassSpectrum::power_law(1.0, 1.5), u);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("list spectra are validated") {
  CHECK_THROWS_AS(MassSpectrum::list({1.0, -2.0}), InvalidArgument);
  CHECK_THROWS_AS(MassSpectrum::arithmetic(0.0), InvalidArgument);
  CHECK_THROWS_AS(MassSpectrum::power_law(1.0, 0.0), InvalidArgument);
}

TEST_CASE("partition sum of the arithmetic spectrum") {
  const auto s = MassSpectrum::arithmetic(1.0);
  for (double beta : {0.05, 0.5, 2.0}) {
    const auto r = spectrum::partition_sum(s, beta);
    CHECK(r.value == doctest::Approx(1.0 / std::expm1(beta)).epsilon(1e-12));
  }
  double prev = HUGE_VAL;
  for (double beta = 0.1; beta < 3.0; beta += 0.2) {
    const double z = spectrum::partition_sum(s, beta).value;
    CHECK(z < prev);
    prev = z;
  }
}

TEST_CASE("finite lists are exhausted") {
  const auto r = spectrum::partition_sum(MassSpectrum::list({1.0, 2.0}), 1.0);
  CHECK(r.test == spectrum::TailTest::exhausted);
  CHECK(r.value == doctest::Approx(std::exp(-1.0) + std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("single-mass nuclearity estimate") {
  const auto e = spectrum::nuclearity_log_index(MassSpectrum::single(1.0), 1.0, 1.0, 1.0);
  CHECK(e.log_index_bound == doctest::Approx(oracle::nuclearity_single).epsilon(1e-12));
  CHECK(e.log_index_bound == doctest::Approx(-std::log1p(-std::exp(-0.5))).epsilon(1e-14));
}

TEST_CASE("nuclearity scales exactly as r^3") {
  const auto s = MassSpectrum::arithmetic(1.0);
  const double base = spectrum::nuclearity_log_index(s, 0.3, 1.0).log_index_bound;
  for (double r : {0.5, 2.0, 3.7}) {
    const double v = spectrum::nuclearity_log_index(s, 0.3, r).log_index_bound;
    CHECK(v == doctest::Approx(base * r * r * r).epsilon(1e-12));
  }
}

TEST_CASE("nuclearity decreases when any mass increases") {
  std::vector<double> masses{0.5, 1.0, 1.5, 2.0};
  const double base = spectrum::nuclearity_log_index(MassSpectrum::list(masses), 1.0).log_index_bound;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    auto bumped = masses;
    bumped[i] += 0.1;
    std::sort(bumped.begin(), bumped.end());
    CHECK(spectrum::nuclearity_log_index(MassSpectrum::list(bumped), 1.0).log_index_bound < base);
  }
}

TEST_CASE("arithmetic spectrum: beta exponent near 4") {
  auto grid = qei::log_grid(1e-3, 1e-2, 10);
  std::reverse(grid.begin(), grid.end());
  const auto fit = spectrum::fit_nuclearity_exponent(MassSpectrum::arithmetic(1.0), grid);
  CHECK(fit.exponent == doctest::Approx(4.0).epsilon(0.05));
  CHECK(fit.estimates.size() == 10);
}

TEST_CASE("exponent fit needs a decreasing grid of three points") {
  const std::vector<double> up{0.1, 0.2, 0.3};
  const std::vector<double> short_grid{0.2, 0.1};
  CHECK_THROWS(spectrum::fit_nuclearity_exponent(MassSpectrum::arithmetic(1.0), up));
  CHECK_THROWS_AS(spectrum::fit_nuclearity_exponent(MassSpectrum::arithmetic(1.0), short_grid), InsufficientPoints);
}

TEST_CASE("logarithmic spectrum diverges at beta = 0.5") {
  CHECK_THROWS_AS(spectrum::nuclearity_log_index(MassSpectrum::logarithmic(1.0), 0.5), DivergenceDetected);
  CHECK_THROWS_AS(spectrum::partition_sum(MassSpectrum::logarithmic(1.0), 0.9), DivergenceDetected);
  // e^{-beta log(j+1)} = (j+1)^-beta converges for beta > 1
  const auto r = spectrum::partition_sum(MassSpectrum::logarithmic(1.0), 3.0);
  CHECK(r.value == doctest::Approx(1.2020569031595942 - 1.0).epsilon(1e-9));
}

TEST_CASE("sum over masses reports the tail test used") {
  const auto r = spectrum::sum_over_masses(MassSpectrum::arithmetic(1.0), [](double m) { return std::exp(-m); });
  CHECK(r.test == spectrum::TailTest::geometric_envelope);
  const auto p = spectrum::sum_over_masses(MassSpectrum::arithmetic(1.0), [](double m) { return 1.0 / (m * m); });
  CHECK(p.value == doctest::Approx(oracle::pi * oracle::pi / 6.0).epsilon(1e-9));
  CHECK(p.test == spectrum::TailTest::euler_maclaurin);
}
