#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace hyptest {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecI = Eigen::VectorXi;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Error taxonomy. Everything thrown by this library derives from Error so the
// CLI can map failures to stable exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct InvalidDistribution : Error {
  using Error::Error;
};

/// support(p) is not contained in support(q), so D(p||q) = +inf.
struct AbsoluteContinuityViolation : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

struct ResourceLimit : Error {
  using Error::Error;
};

/// Requested event mass exceeds what the typical set can supply.
struct InfeasibleTarget : Error {
  InfeasibleTarget(const std::string& what, double achievable_mass)
      : Error(what), achievable(achievable_mass) {}
  double achievable;
};

struct MalformedMessage : Error {
  using Error::Error;
};

struct DegenerateChannels : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Probability mass function over a finite alphabet {0, ..., size-1}.
//
// Construction accepts vectors whose total deviates from 1 by at most 1e-9
// (they are renormalized); larger deviations are rejected. Entries below
// -1e-12 are rejected, tiny negative float noise is clamped to zero.
// Immutable after construction.
// ---------------------------------------------------------------------------
class Pmf {
 public:
  explicit Pmf(Vec probs);

  static Pmf uniform(Index size);
  static Pmf point_mass(Index size, Index at);
  static Pmf bernoulli(double p1);  // P(1) = p1 over {0,1}

  const Vec& probs() const { return p_; }
  Index size() const { return p_.size(); }
  double operator()(Index i) const { return p_(i); }

  bool operator==(const Pmf& other) const { return p_ == other.p_; }

 private:
  Vec p_;
};

// ---------------------------------------------------------------------------
// Joint law of a pair (X, Y) over finite alphabets, with cached marginals.
// Rows index X, columns index Y. The product() law keeps the marginals and
// drops the dependence.
// ---------------------------------------------------------------------------
class JointSource {
 public:
  explicit JointSource(Mat joint);

  /// Doubly symmetric binary source: X ~ Bern(1/2), Y = X through a binary
  /// symmetric channel with crossover alpha in [0, 1/2].
  static JointSource dsbs(double alpha);

  /// Assemble from P_X and the conditional P_{Y|X} (rows = x, cols = y).
  static JointSource from_conditional(const Pmf& x, const Mat& y_given_x);

  const Mat& joint() const { return joint_; }
  const Pmf& x_marginal() const { return px_; }
  const Pmf& y_marginal() const { return py_; }
  Index x_size() const { return joint_.rows(); }
  Index y_size() const { return joint_.cols(); }

  /// The independent coupling P_X * P_Y of the same marginals.
  JointSource product() const;

 private:
  Mat joint_;
  Pmf px_;
  Pmf py_;
};

// ---------------------------------------------------------------------------
// Conditional law P_{U|X}: one pmf over U per input symbol x. This is the
// optimization variable of the exponent solvers. Rows index X, columns U.
// ---------------------------------------------------------------------------
class AuxChannel {
 public:
  explicit AuxChannel(Mat rows);

  /// U = X, embedded into an alphabet of u_size >= x_size symbols.
  static AuxChannel identity_embedding(Index x_size, Index u_size);
  /// U independent of X (every row uniform); carries zero information.
  static AuxChannel constant(Index x_size, Index u_size);
  /// Binary symmetric conditional with crossover delta.
  static AuxChannel bsc(double delta);

  const Mat& rows() const { return rows_; }
  Index x_size() const { return rows_.rows(); }
  Index u_size() const { return rows_.cols(); }
  Pmf row(Index x) const { return Pmf(rows_.row(x).transpose()); }

 private:
  Mat rows_;
};

// ---------------------------------------------------------------------------
// Empirical type (histogram) of a finite-alphabet sequence.
// ---------------------------------------------------------------------------
struct EmpiricalType {
  VecI counts;
  int n = 0;

  template <typename Seq>
  static EmpiricalType of(const Seq& seq, Index alphabet_size) {
    EmpiricalType t;
    t.counts = VecI::Zero(alphabet_size);
    for (auto s : seq) {
      if (s < 0 || static_cast<Index>(s) >= alphabet_size)
        throw DomainError("EmpiricalType: symbol outside alphabet");
      ++t.counts(static_cast<Index>(s));
      ++t.n;
    }
    return t;
  }

  Vec frequencies() const {
    if (n == 0) throw DomainError("EmpiricalType: empty sequence");
    return counts.cast<double>() / static_cast<double>(n);
  }
};

// ---------------------------------------------------------------------------
// Discrete memoryless channel Gamma_{V|W}; rows index the input W, columns
// the output V, each row a valid pmf. capacity_cache may be filled at
// construction time via with_capacity() and is never mutated afterwards.
// ---------------------------------------------------------------------------
class Dmc {
 public:
  explicit Dmc(Mat transition);

  static Dmc bsc(double crossover);
  static Dmc bec(double erasure);  // outputs {0, erased, 1}
  static Dmc identity(Index size);

  const Mat& transition() const { return t_; }
  Index w_size() const { return t_.rows(); }
  Index v_size() const { return t_.cols(); }
  Pmf output_law(Index w) const { return Pmf(t_.row(w).transpose()); }

  const std::optional<double>& capacity_cache() const { return cache_; }
  Dmc with_capacity(double bits) const;

 private:
  Mat t_;
  std::optional<double> cache_;
};

}  // namespace hyptest
