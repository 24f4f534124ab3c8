#include "hyptest/verify.hpp"

#include <cmath>
#include <limits>

#include "hyptest/info.hpp"

namespace hyptest {

ChangeOfMeasureReport check_change_of_measure(const MeasureTriple& t) {
  if (t.p.size() != t.q.size())
    throw DomainError("check_change_of_measure: alphabet mismatch");
  double pa = 0.0, qa = 0.0;
  for (int z : t.event_set) {
    if (z < 0 || z >= t.p.size())
      throw DomainError("check_change_of_measure: event outside alphabet");
    pa += t.p(z);
    qa += t.q(z);
  }

  ChangeOfMeasureReport rep;
  rep.lhs = qa > 0.0 ? -std::log2(qa)
                     : std::numeric_limits<double>::infinity();
  double divergence;
  try {
    divergence = kl_divergence(t.p, t.q);
  } catch (const AbsoluteContinuityViolation&) {
    divergence = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(divergence) || pa <= 0.0) {
    rep.rhs = std::numeric_limits<double>::infinity();
    rep.infinite_divergence = !std::isfinite(divergence);
    rep.holds = true;  // vacuous
    return rep;
  }
  rep.rhs = (divergence + 1.0) / pa;
  rep.holds = rep.lhs <= rep.rhs + 1e-12;
  return rep;
}

namespace {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// All pmfs over k symbols with entries that are multiples of 1/steps.
void lattice_rows(Index k, int steps, std::vector<Vec>& out) {
  std::vector<int> parts(static_cast<std::size_t>(k));
  const double inv = 1.0 / static_cast<double>(steps);
  auto rec = [&](auto&& self, Index sym, int remaining) -> void {
    if (sym == k - 1) {
      parts[static_cast<std::size_t>(sym)] = remaining;
      Vec v(k);
      for (Index i = 0; i < k; ++i)
        v(i) = parts[static_cast<std::size_t>(i)] * inv;
      out.push_back(std::move(v));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      parts[static_cast<std::size_t>(sym)] = c;
      self(self, sym + 1, remaining - c);
    }
  };
  rec(rec, 0, steps);
}

}  // namespace

GridSearchResult brute_force_exponent(const JointSource& source, double rate,
                                      double epsilon, int grid_steps,
                                      Index u_cardinality) {
  if (source.x_size() > 3)
    throw ResourceLimit("brute_force_exponent: |X| > 3");
  if (grid_steps < 1 || grid_steps > 21)
    throw ResourceLimit("brute_force_exponent: grid_steps outside [1, 21]");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw DomainError("brute_force_exponent: epsilon");
  if (!(rate >= 0.0)) throw DomainError("brute_force_exponent: rate");
  const Index xs = source.x_size();
  const Index us = u_cardinality == 0 ? xs + 1 : u_cardinality;
  if (us > xs + 1) throw ResourceLimit("brute_force_exponent: |U| > |X|+1");

  std::vector<Vec> rows;
  lattice_rows(us, grid_steps, rows);
  const auto nrows = static_cast<std::int64_t>(rows.size());
  double combos = 1.0;
  for (Index x = 0; x < xs; ++x) combos *= static_cast<double>(nrows);
  if (combos > 2.5e8)
    throw ResourceLimit("brute_force_exponent: lattice too large");

  const Mat& pxy = source.joint();
  const Vec& px = source.x_marginal().probs();
  const Index ys = source.y_size();
  const double limit = rate / (1.0 - epsilon);

  // Entropy of Y is constant; I(U;Y) = sum_uy xlog2x(P_UY) - sum_u xlog2x(P_U)
  // - sum_y xlog2x(P_Y), and similarly for I(U;X). Per-row contributions to
  // the UX terms are precomputed; the UY table must be summed per combo.
  Vec hy_terms(ys);
  for (Index y = 0; y < ys; ++y) hy_terms(y) = xlog2x(source.y_marginal()(y));
  const double sum_y_terms = hy_terms.sum();
  Vec hx_terms(xs);
  for (Index x = 0; x < xs; ++x) hx_terms(x) = xlog2x(px(x));
  const double sum_x_terms = hx_terms.sum();

  // ux_part[r][x] = sum_u xlog2x(row_r(u) * px(x))
  std::vector<Vec> ux_part(static_cast<std::size_t>(nrows), Vec::Zero(xs));
  for (std::int64_t r = 0; r < nrows; ++r)
    for (Index x = 0; x < xs; ++x) {
      double acc = 0.0;
      for (Index u = 0; u < us; ++u)
        acc += xlog2x(rows[static_cast<std::size_t>(r)](u) * px(x));
      ux_part[static_cast<std::size_t>(r)](x) = acc;
    }

  GridSearchResult best{-1.0, AuxChannel::constant(xs, us), 0};
  std::vector<std::int64_t> choice(static_cast<std::size_t>(xs), 0);
  Mat puy(us, ys);
  Vec pu(us);

  auto evaluate = [&]() {
    puy.setZero();
    pu.setZero();
    double ux_terms = 0.0;
    for (Index x = 0; x < xs; ++x) {
      const Vec& r = rows[static_cast<std::size_t>(choice[static_cast<std::size_t>(x)])];
      ux_terms += ux_part[static_cast<std::size_t>(choice[static_cast<std::size_t>(x)])](x);
      for (Index u = 0; u < us; ++u) {
        pu(u) += r(u) * px(x);
        for (Index y = 0; y < ys; ++y) puy(u, y) += r(u) * pxy(x, y);
      }
    }
    double pu_terms = 0.0;
    for (Index u = 0; u < us; ++u) pu_terms += xlog2x(pu(u));
    const double iux = ux_terms - pu_terms - sum_x_terms;
    if (iux > limit + 1e-12) return;
    double uy_terms = 0.0;
    for (Index u = 0; u < us; ++u)
      for (Index y = 0; y < ys; ++y) uy_terms += xlog2x(puy(u, y));
    const double iuy = uy_terms - pu_terms - sum_y_terms;
    if (iuy > best.theta) {
      best.theta = iuy;
      Mat a(xs, us);
      for (Index x = 0; x < xs; ++x)
        a.row(x) =
            rows[static_cast<std::size_t>(choice[static_cast<std::size_t>(x)])]
                .transpose();
      best.argmax = AuxChannel(std::move(a));
    }
  };

  auto sweep = [&](auto&& self, Index x) -> void {
    if (x == xs) {
      ++best.evaluated;
      evaluate();
      return;
    }
    for (std::int64_t r = 0; r < nrows; ++r) {
      choice[static_cast<std::size_t>(x)] = r;
      self(self, x + 1);
    }
  };
  sweep(sweep, 0);
  if (best.theta < 0.0) best.theta = 0.0;  // constant rows are always feasible
  return best;
}

}  // namespace hyptest
