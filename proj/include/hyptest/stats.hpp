#pragma once

#include <cstdint>
#include <span>

namespace hyptest::stats {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Wilson score interval for a binomial proportion (default 95%).
Interval wilson(std::int64_t successes, std::int64_t trials,
                double z = 1.959963984540054);

/// Two-sample Kolmogorov-Smirnov statistic; inputs must be sorted ascending.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Rejection threshold of the two-sample KS test at significance alpha.
double ks_critical(std::int64_t n1, std::int64_t n2, double alpha);

/// -log2(max(rate, 1/trials)) / n; the usual zero-count smoothing for an
/// empirical error exponent.
double empirical_exponent(double rate, std::int64_t trials, int n);

}  // namespace hyptest::stats
