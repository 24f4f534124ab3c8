#include "hyptest/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hyptest/info.hpp"
#include "hyptest/rng.hpp"

namespace hyptest {

namespace {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Mutual information of a joint matrix, in bits.
double mi_of_joint(const Mat& j) {
  const Vec rows = j.rowwise().sum();
  const Vec cols = j.colwise().sum().transpose();
  double mi = 0.0;
  for (Index a = 0; a < j.rows(); ++a)
    for (Index b = 0; b < j.cols(); ++b) mi += xlog2x(j(a, b));
  for (Index a = 0; a < j.rows(); ++a) mi -= xlog2x(rows(a));
  for (Index b = 0; b < j.cols(); ++b) mi -= xlog2x(cols(b));
  return mi;
}

// Objective and constraint as functions of the conditional A = P_{U|X}
// (|X| x |U|, row stochastic), under a fixed source P_XY.
struct Landscape {
  Mat pxy;  // |X| x |Y|
  Vec px;   // |X|
  double ixy = 0.0;

  explicit Landscape(const JointSource& s)
      : pxy(s.joint()),
        px(s.x_marginal().probs()),
        ixy(mutual_information(s)) {}

  double iuy(const Mat& a) const { return mi_of_joint(a.transpose() * pxy); }
  double iux(const Mat& a) const {
    return mi_of_joint(a.transpose() * px.asDiagonal());
  }

  // d I(U;Y) / d A(x,u) = sum_y P_XY(x,y) log2 P_UY(u,y) - P_X(x) log2 P_U(u).
  // Logs of empty cells are clamped; the clamps cancel for dead columns, so
  // unused U symbols keep a near-zero gradient.
  Mat grad_iuy(const Mat& a) const {
    constexpr double kFloor = 1e-300;
    const Mat puy = a.transpose() * pxy;  // |U| x |Y|
    const Vec pu = puy.rowwise().sum();
    const Mat logpuy = puy.array().max(kFloor).log2().matrix();
    const Vec logpu = pu.array().max(kFloor).log2().matrix();
    return pxy * logpuy.transpose() - px * logpu.transpose();
  }
};

// Euclidean projection onto the probability simplex (sort-based).
void project_row(Mat& a, Index x) {
  const Index k = a.cols();
  std::vector<double> u(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = a(x, i);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, tau = 0.0;
  for (Index i = 0; i < k; ++i) {
    css += u[static_cast<std::size_t>(i)];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) tau = t;
  }
  for (Index i = 0; i < k; ++i) a(x, i) = std::max(0.0, a(x, i) - tau);
}

void project_rows(Mat& a) {
  for (Index x = 0; x < a.rows(); ++x) project_row(a, x);
}

// Constant channel with the same output marginal as a; blending toward it
// shrinks I(U;X) continuously while keeping P_U fixed along the segment.
Mat constant_like(const Mat& a, const Vec& px) {
  const Eigen::RowVectorXd pu = px.transpose() * a;
  Mat c(a.rows(), a.cols());
  for (Index x = 0; x < a.rows(); ++x) c.row(x) = pu;
  return c;
}

// Pull a onto {I(U;X) <= limit} by bisecting the blend parameter toward the
// constant channel. I(U;X) is convex along the segment and negative at the
// far end, so there is a single sign change for bisection to find.
Mat make_feasible(Mat a, double limit, const Landscape& land) {
  if (land.iux(a) <= limit) return a;
  const Mat c = constant_like(a, land.px);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (land.iux((1.0 - mid) * a + mid * c) > limit)
      lo = mid;
    else
      hi = mid;
  }
  return (1.0 - hi) * a + hi * c;
}

struct AscentOutcome {
  Mat a;
  double value = -1.0;
  bool converged = false;
};

AscentOutcome ascend(Mat start, double limit, const Landscape& land,
                     const SolverOptions& opt) {
  AscentOutcome out;
  out.a = make_feasible(std::move(start), limit, land);
  out.value = land.iuy(out.a);
  double step = 0.25;
  double window_base = out.value;
  int since_check = 0;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    const Mat g = land.grad_iuy(out.a);
    bool improved = false;
    for (double s = step * 4.0; s > 1e-14; s *= 0.25) {
      Mat cand = out.a + s * g;
      project_rows(cand);
      cand = make_feasible(std::move(cand), limit, land);
      const double v = land.iuy(cand);
      if (v > out.value) {
        out.a = std::move(cand);
        out.value = v;
        step = s;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // The update is deterministic, so no step size will ever help again.
      out.converged = true;
      break;
    }
    if (++since_check >= opt.stall_window) {
      if (out.value - window_base < opt.stall_tol) {
        out.converged = true;
        break;
      }
      window_base = out.value;
      since_check = 0;
    }
  }
  return out;
}

Mat random_start(Index x_size, Index u_size, rng::Engine& e) {
  Mat a(x_size, u_size);
  for (Index x = 0; x < x_size; ++x) {
    double sum = 0.0;
    for (Index u = 0; u < u_size; ++u) {
      const double g = -std::log(1.0 - rng::canonical(e));  // Exp(1)
      a(x, u) = g;
      sum += g;
    }
    a.row(x) /= sum;
  }
  return a;
}

struct BaOutcome {
  Vec input;
  double lower = 0.0;
  double upper = 0.0;
};

BaOutcome blahut_arimoto(const Mat& g, double tol, std::int64_t max_iters) {
  const Index ws = g.rows();
  Vec p = Vec::Constant(ws, 1.0 / static_cast<double>(ws));
  for (std::int64_t it = 0; it < max_iters; ++it) {
    const Vec q = g.transpose() * p;
    Vec d(ws);
    for (Index w = 0; w < ws; ++w) {
      double acc = 0.0;
      for (Index v = 0; v < g.cols(); ++v)
        if (g(w, v) > 0.0) acc += g(w, v) * std::log2(g(w, v) / q(v));
      d(w) = acc;
    }
    const double lower = p.dot(d);
    const double upper = d.maxCoeff();
    if (upper - lower <= tol) return {p, lower, upper};
    for (Index w = 0; w < ws; ++w) p(w) *= std::exp2(d(w) - lower);
    p /= p.sum();
  }
  throw NonConvergence("capacity: alternating maximization did not converge");
}

}  // namespace

ExponentQuery::ExponentQuery(JointSource src, double r, double eps,
                             Index u_card)
    : source(std::move(src)), rate(r), epsilon(eps), u_cardinality(u_card) {
  if (!(rate >= 0.0)) throw DomainError("ExponentQuery: rate must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw DomainError("ExponentQuery: epsilon must be in [0, 1)");
  if (u_cardinality == 0) u_cardinality = source.x_size() + 1;
  if (u_cardinality < 1) throw DomainError("ExponentQuery: u_cardinality");
}

ExponentResult solve_vl_exponent(const ExponentQuery& q,
                                 const SolverOptions& opt) {
  const Landscape land(q.source);
  const Index xs = q.source.x_size();
  const Index us = q.u_cardinality;
  const double limit = q.rate / (1.0 - q.epsilon);

  std::vector<Mat> starts;
  if (us >= xs) starts.push_back(AuxChannel::identity_embedding(xs, us).rows());
  starts.push_back(AuxChannel::constant(xs, us).rows());
  for (int r = 0; r < opt.restarts; ++r) {
    auto e = rng::substream(opt.seed, 0x5741u, static_cast<std::uint64_t>(r));
    starts.push_back(random_start(xs, us, e));
  }

  AscentOutcome best;
  bool any_converged = false;
  for (const Mat& s : starts) {
    AscentOutcome o = ascend(s, limit, land, opt);
    if (!o.converged) continue;
    any_converged = true;
    if (o.value > best.value) best = std::move(o);  // ties keep the earliest
  }
  if (!any_converged)
    throw NonConvergence("solve_vl_exponent: no start met the stopping rule");

  ExponentResult res{best.value, AuxChannel(best.a), land.iux(best.a),
                     best.value, 0.0};
  res.constraint_slack = q.rate - (1.0 - q.epsilon) * res.iux;
  if (res.theta > land.ixy + 1e-9)
    throw NonConvergence("solve_vl_exponent: exponent exceeds I(X;Y)");
  return res;
}

ExponentResult solve_fl_exponent(const JointSource& source, double rate,
                                 Index u_cardinality,
                                 const SolverOptions& opt) {
  return solve_vl_exponent(ExponentQuery(source, rate, 0.0, u_cardinality),
                           opt);
}

ExponentResult solve_dmc_exponent(const JointSource& source, const Dmc& dmc,
                                  double kappa, double epsilon,
                                  Index u_cardinality,
                                  const SolverOptions& opt) {
  if (!(kappa > 0.0)) throw DomainError("solve_dmc_exponent: kappa <= 0");
  const double c = dmc.capacity_cache() ? *dmc.capacity_cache() : capacity(dmc);
  return solve_vl_exponent(
      ExponentQuery(source, kappa * c, epsilon, u_cardinality), opt);
}

double capacity(const Dmc& dmc, double tol, std::int64_t max_iters) {
  const BaOutcome o = blahut_arimoto(dmc.transition(), tol, max_iters);
  return 0.5 * (o.lower + o.upper);
}

Pmf capacity_achieving_input(const Dmc& dmc, double tol,
                             std::int64_t max_iters) {
  return Pmf(blahut_arimoto(dmc.transition(), tol, max_iters).input);
}

double binary_example_exponent(double alpha, double rate, double epsilon) {
  if (!(alpha >= 0.0 && alpha <= 0.5))
    throw DomainError("binary_example_exponent: alpha must be in [0, 1/2]");
  if (!(rate >= 0.0)) throw DomainError("binary_example_exponent: rate < 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw DomainError("binary_example_exponent: epsilon");
  const double boosted = std::min(rate / (1.0 - epsilon), 1.0);
  const double delta = binary_entropy_inv(1.0 - boosted);
  return 1.0 - binary_entropy(star(delta, alpha));
}

double gaussian_example_exponent(double rho, double rate, double epsilon) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw DomainError("gaussian_example_exponent: rho must be in [0, 1]");
  if (!(rate >= 0.0)) throw DomainError("gaussian_example_exponent: rate < 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw DomainError("gaussian_example_exponent: epsilon");
  const double boosted = rate / (1.0 - epsilon);
  const double denom = 1.0 - rho * rho + rho * rho * std::exp2(-2.0 * boosted);
  return 0.5 * std::log2(1.0 / denom);
}

}  // namespace hyptest
