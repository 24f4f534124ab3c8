#pragma once

#include <cstdint>

#include "hyptest/types.hpp"

namespace hyptest {

// ---------------------------------------------------------------------------
// Single-letter exponent optimization
//
//   theta(R, eps) = max { I(U;Y) : P_{U|X} with (1-eps) I(U;X) <= R },
//
// over auxiliary channels with |U| = u_cardinality (default |X|+1, which is
// enough by the usual support-size bound). The objective is convex in
// P_{U|X}, so the maximum sits on the boundary of the feasible set; the
// solver runs projected gradient ascent from multiple starts and restores
// feasibility by exact line search toward a constant channel.
// ---------------------------------------------------------------------------

struct ExponentQuery {
  JointSource source;
  double rate = 0.0;           // bits per source symbol
  double epsilon = 0.0;        // allowed type-I error, in [0, 1)
  Index u_cardinality = 0;     // 0 means |X| + 1

  ExponentQuery(JointSource src, double r, double eps, Index u_card = 0);
};

struct SolverOptions {
  int restarts = 32;          // random starts on top of the deterministic ones
  int max_iters = 20000;      // per start
  int stall_window = 50;      // iterations without improvement ...
  double stall_tol = 1e-7;    // ... below this objective gain => converged
  std::uint64_t seed = 1;     // start-generation seed; fixed for reproducibility
};

struct ExponentResult {
  double theta = 0.0;      // achieved I(U;Y), bits
  AuxChannel optimizer;    // the maximizing conditional law
  double iux = 0.0;        // I(U;X) at the optimizer
  double iuy = 0.0;        // I(U;Y) at the optimizer (== theta)
  double constraint_slack = 0.0;  // R - (1-eps) I(U;X)
};

/// Exponent under an expected-rate constraint (variable-length coding).
ExponentResult solve_vl_exponent(const ExponentQuery& q,
                                 const SolverOptions& opt = {});

/// Exponent under a maximum-rate constraint; the epsilon = 0 special case.
ExponentResult solve_fl_exponent(const JointSource& source, double rate,
                                 Index u_cardinality = 0,
                                 const SolverOptions& opt = {});

/// Exponent over a noisy channel with expected duration kappa*n; depends on
/// the channel only through its capacity: rate budget = kappa * C.
ExponentResult solve_dmc_exponent(const JointSource& source, const Dmc& dmc,
                                  double kappa, double epsilon,
                                  Index u_cardinality = 0,
                                  const SolverOptions& opt = {});

/// Channel capacity in bits/use by alternating maximization; iterates until
/// the standard upper and lower bounds differ by at most tol.
double capacity(const Dmc& dmc, double tol = 1e-10,
                std::int64_t max_iters = 100000);

/// The input law the capacity iteration converges to.
Pmf capacity_achieving_input(const Dmc& dmc, double tol = 1e-10,
                             std::int64_t max_iters = 100000);

/// Closed form for the doubly symmetric binary source with crossover alpha:
///   1 - h_b( h_b^{-1}(1 - R/(1-eps)) * alpha ).
/// R/(1-eps) above 1 saturates the exponent at 1 - h_b(alpha).
double binary_example_exponent(double alpha, double rate, double epsilon);

/// Closed form for bivariate Gaussians with correlation rho:
///   1/2 log2( 1 / (1 - rho^2 + rho^2 2^{-2R/(1-eps)}) ).
double gaussian_example_exponent(double rho, double rate, double epsilon);

}  // namespace hyptest
