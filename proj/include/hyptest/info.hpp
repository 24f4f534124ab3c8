#pragma once

#include <span>
#include <vector>

#include "hyptest/rng.hpp"
#include "hyptest/types.hpp"

namespace hyptest {

// All information measures are in bits (log base 2).

/// Shannon entropy H(p), with 0 log 0 = 0.
double entropy(const Pmf& p);

/// D(p||q); throws AbsoluteContinuityViolation when support(p) leaves
/// support(q).
double kl_divergence(const Pmf& p, const Pmf& q);

/// I(X;Y) of a joint law.
double mutual_information(const JointSource& j);

/// Binary entropy h_b(a) for a in [0,1].
double binary_entropy(double a);

/// Inverse of h_b on [0, 1/2]; bisection to |h_b(a) - h| <= 1e-10.
double binary_entropy_inv(double h);

/// a*b = a(1-b) + b(1-a); the crossover of two cascaded symmetric channels.
double star(double a, double b);

// ---------------------------------------------------------------------------
// Typicality. A length-n sequence is mu-typical for p when every symbol count
// c_x satisfies |c_x/n - p(x)| <= mu * p(x). The tolerance is relative, so a
// symbol of probability zero may not appear at all. The window below turns
// the test into integer count-range comparisons, which is what the encoders
// use in their inner loops.
// ---------------------------------------------------------------------------
struct TypicalityWindow {
  VecI lo, hi;  // admissible count range per symbol

  static TypicalityWindow of(const Vec& probs, int n, double mu);
  bool contains(const VecI& counts) const {
    return (counts.array() >= lo.array()).all() &&
           (counts.array() <= hi.array()).all();
  }
};

bool is_typical(std::span<const int> seq, const Pmf& p, double mu);
bool is_typical(const EmpiricalType& type, const Pmf& p, double mu);

/// Joint typicality of the pair sequence (a_i, b_i) against j, same rule with
/// symbols replaced by pairs.
bool is_jointly_typical(std::span<const int> a, std::span<const int> b,
                        const JointSource& j, double mu);

/// Counts of the flattened pairs a_i * b_size + b_i.
VecI pair_counts(std::span<const int> a, std::span<const int> b, Index a_size,
                 Index b_size);

/// n i.i.d. draws from p.
std::vector<int> sample_iid(const Pmf& p, int n, rng::Engine& e);

// ---------------------------------------------------------------------------
// Induced joints along the chain U - X - Y.
// ---------------------------------------------------------------------------

/// P_{UX}(u,x) = P_{U|X}(u|x) P_X(x); rows index U.
JointSource lift_ux(const AuxChannel& ux, const Pmf& px);

/// P_{UY}(u,y) = sum_x P_{U|X}(u|x) P_{XY}(x,y); rows index U.
JointSource lift_uy(const AuxChannel& ux, const JointSource& xy);

/// P_{WV}(w,v) = P_W(w) Gamma(v|w); rows index W.
JointSource lift_wv(const Pmf& pw, const Dmc& channel);

}  // namespace hyptest
