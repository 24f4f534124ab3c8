#include "hyptest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyptest::stats {

Interval wilson(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("wilson: bad counts");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) iv.lo = 0.0;
  if (successes == trials) iv.hi = 1.0;
  return iv;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::int64_t n1, std::int64_t n2, double alpha) {
  if (n1 <= 0 || n2 <= 0 || alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("ks_critical: bad arguments");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double m = static_cast<double>(n1);
  const double n = static_cast<double>(n2);
  return c * std::sqrt((m + n) / (m * n));
}

double empirical_exponent(double rate, std::int64_t trials, int n) {
  const double floor_rate = 1.0 / static_cast<double>(trials);
  return -std::log2(std::max(rate, floor_rate)) / static_cast<double>(n);
}

}  // namespace hyptest::stats
