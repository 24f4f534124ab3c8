#include "hyptest/info.hpp"

#include <cmath>

namespace hyptest {

namespace {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double entropy(const Pmf& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i) h -= xlog2x(p(i));
  return h;
}

double kl_divergence(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size())
    throw DomainError("kl_divergence: alphabet mismatch");
  double d = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) == 0.0) continue;
    if (q(i) == 0.0)
      throw AbsoluteContinuityViolation(
          "kl_divergence: p puts mass where q has none");
    d += p(i) * std::log2(p(i) / q(i));
  }
  return d;
}

double mutual_information(const JointSource& j) {
  const Mat& pj = j.joint();
  const Vec& px = j.x_marginal().probs();
  const Vec& py = j.y_marginal().probs();
  double mi = 0.0;
  for (Index x = 0; x < pj.rows(); ++x)
    for (Index y = 0; y < pj.cols(); ++y) {
      const double v = pj(x, y);
      if (v > 0.0) mi += v * std::log2(v / (px(x) * py(y)));
    }
  return mi;
}

double binary_entropy(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("binary_entropy: a not in [0,1]");
  return -xlog2x(a) - xlog2x(1.0 - a);
}

double binary_entropy_inv(double h) {
  if (!(h >= 0.0 && h <= 1.0))
    throw DomainError("binary_entropy_inv: h not in [0,1]");
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  // h_b is strictly increasing on [0, 1/2]; 100 halvings reach full precision.
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < h)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double star(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0))
    throw DomainError("star: arguments must be in [0,1]");
  return a * (1.0 - b) + b * (1.0 - a);
}

TypicalityWindow TypicalityWindow::of(const Vec& probs, int n, double mu) {
  if (n < 1) throw DomainError("TypicalityWindow: n < 1");
  if (!(mu > 0.0)) throw DomainError("TypicalityWindow: mu must be positive");
  const Index k = probs.size();
  TypicalityWindow w;
  w.lo.resize(k);
  w.hi.resize(k);
  const double nn = static_cast<double>(n);
  for (Index i = 0; i < k; ++i) {
    // |c/n - p| <= mu p  <=>  n p (1-mu) <= c <= n p (1+mu).
    // The 1e-9 count slack keeps exact boundary types inside the window.
    const double lo = nn * probs(i) * (1.0 - mu);
    const double hi = nn * probs(i) * (1.0 + mu);
    w.lo(i) = static_cast<int>(std::ceil(lo - 1e-9));
    w.hi(i) = static_cast<int>(std::floor(std::min(hi + 1e-9, nn)));
    if (w.lo(i) < 0) w.lo(i) = 0;
  }
  return w;
}

bool is_typical(std::span<const int> seq, const Pmf& p, double mu) {
  return is_typical(EmpiricalType::of(seq, p.size()), p, mu);
}

bool is_typical(const EmpiricalType& type, const Pmf& p, double mu) {
  if (type.counts.size() != p.size())
    throw DomainError("is_typical: alphabet mismatch");
  return TypicalityWindow::of(p.probs(), type.n, mu).contains(type.counts);
}

VecI pair_counts(std::span<const int> a, std::span<const int> b, Index a_size,
                 Index b_size) {
  if (a.size() != b.size()) throw DomainError("pair_counts: length mismatch");
  VecI c = VecI::Zero(a_size * b_size);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= a_size || b[i] < 0 || b[i] >= b_size)
      throw DomainError("pair_counts: symbol outside alphabet");
    ++c(static_cast<Index>(a[i]) * b_size + b[i]);
  }
  return c;
}

bool is_jointly_typical(std::span<const int> a, std::span<const int> b,
                        const JointSource& j, double mu) {
  const VecI c = pair_counts(a, b, j.x_size(), j.y_size());
  Vec flat(j.x_size() * j.y_size());
  for (Index x = 0; x < j.x_size(); ++x)
    for (Index y = 0; y < j.y_size(); ++y)
      flat(x * j.y_size() + y) = j.joint()(x, y);
  return TypicalityWindow::of(flat, static_cast<int>(a.size()), mu).contains(c);
}

std::vector<int> sample_iid(const Pmf& p, int n, rng::Engine& e) {
  if (n < 1) throw DomainError("sample_iid: n < 1");
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& s : out) s = rng::sample(p, e);
  return out;
}

JointSource lift_ux(const AuxChannel& ux, const Pmf& px) {
  if (ux.x_size() != px.size()) throw DomainError("lift_ux: size mismatch");
  return JointSource(ux.rows().transpose() * px.probs().asDiagonal());
}

JointSource lift_uy(const AuxChannel& ux, const JointSource& xy) {
  if (ux.x_size() != xy.x_size()) throw DomainError("lift_uy: size mismatch");
  return JointSource(ux.rows().transpose() * xy.joint());
}

JointSource lift_wv(const Pmf& pw, const Dmc& channel) {
  if (pw.size() != channel.w_size()) throw DomainError("lift_wv: size mismatch");
  return JointSource(pw.probs().asDiagonal() * channel.transition());
}

}  // namespace hyptest
