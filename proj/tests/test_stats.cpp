#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "hyptest/stats.hpp"

using namespace hyptest::stats;

TEST_CASE("wilson interval") {
  // zero successes: lower end 0, upper end z^2/(n+z^2)
  const auto i0 = wilson(0, 100);
  CHECK(i0.lo == 0.0);
  const double z2 = 1.959963984540054 * 1.959963984540054;
  CHECK(i0.hi == doctest::Approx(z2 / (100.0 + z2)).epsilon(1e-12));
  // symmetric case contains the point estimate
  const auto ih = wilson(50, 100);
  CHECK(ih.contains(0.5));
  CHECK(ih.lo > 0.40);
  CHECK(ih.hi < 0.60);
  // n successes mirrors zero successes
  const auto i1 = wilson(100, 100);
  CHECK(i1.hi == 1.0);
  CHECK(i1.lo == doctest::Approx(1.0 - z2 / (100.0 + z2)).epsilon(1e-12));
  CHECK_THROWS(wilson(5, 0));
  CHECK_THROWS(wilson(-1, 10));
}

TEST_CASE("ks statistic") {
  const std::array<double, 3> a{1.0, 2.0, 3.0};
  const std::array<double, 3> b{4.0, 5.0, 6.0};
  CHECK(ks_statistic(a, a) == 0.0);
  CHECK(ks_statistic(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  const std::array<double, 2> c{1.0, 3.0};
  const std::array<double, 2> d{2.0, 4.0};
  CHECK(ks_statistic(c, d) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ks critical value") {
  // c(0.01) = sqrt(-ln(0.005)/2) = 1.62762...
  const double crit = ks_critical(10000, 10000, 0.01);
  CHECK(crit == doctest::Approx(1.6276236115189502 * std::sqrt(2.0 / 10000.0))
                    .epsilon(1e-9));
  CHECK(ks_critical(100, 100, 0.05) < ks_critical(100, 100, 0.01));
  CHECK_THROWS(ks_critical(0, 10, 0.01));
}

TEST_CASE("empirical exponent smoothing") {
  CHECK(empirical_exponent(0.25, 1000000, 8) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // zero counts floor at 1/trials
  CHECK(empirical_exponent(0.0, 1024, 10) ==
        doctest::Approx(1.0).epsilon(1e-12));
}
