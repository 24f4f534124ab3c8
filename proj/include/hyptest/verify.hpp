#pragma once

#include <vector>

#include "hyptest/types.hpp"

namespace hyptest {

// ---------------------------------------------------------------------------
// Change-of-measure bound: for pmfs P, Q on a common alphabet and any event A
// with P(A) > 0,   -log2 Q(A) <= (D(P||Q) + 1) / P(A).
// ---------------------------------------------------------------------------
struct MeasureTriple {
  Pmf p;
  Pmf q;
  std::vector<int> event_set;  // subset of the common alphabet
};

struct ChangeOfMeasureReport {
  double lhs = 0.0;  // -log2 Q(A)
  double rhs = 0.0;  // (D(P||Q) + 1) / P(A)
  bool holds = false;
  bool infinite_divergence = false;  // bound vacuous, rhs = +inf
};

ChangeOfMeasureReport check_change_of_measure(const MeasureTriple& t);

// ---------------------------------------------------------------------------
// Exhaustive lower bound for the exponent optimization: every row of P_{U|X}
// ranges over the simplex lattice with grid_steps subdivisions, and the best
// feasible I(U;Y) is returned. Complexity is (#lattice points)^{|X|}, so the
// alphabets are guarded. Any reported value is achievable by construction.
// ---------------------------------------------------------------------------
struct GridSearchResult {
  double theta = 0.0;
  AuxChannel argmax;
  std::int64_t evaluated = 0;
};

GridSearchResult brute_force_exponent(const JointSource& source, double rate,
                                      double epsilon, int grid_steps,
                                      Index u_cardinality = 0);

}  // namespace hyptest
