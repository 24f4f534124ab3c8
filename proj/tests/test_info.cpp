#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hyptest/info.hpp"
#include "hyptest/rng.hpp"

using namespace hyptest;

namespace {

Pmf random_pmf(Index k, rng::Engine& e) {
  Vec v(k);
  for (Index i = 0; i < k; ++i) v(i) = -std::log(1.0 - rng::canonical(e));
  return Pmf(v / v.sum());
}

}  // namespace

TEST_CASE("entropy basics") {
  CHECK(entropy(Pmf::uniform(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(Pmf::point_mass(5, 2)) == 0.0);
  // direct two-term evaluation as the oracle
  const double oracle = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
  CHECK(entropy(Pmf::bernoulli(0.9)) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(entropy(Pmf::uniform(8)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("kl divergence") {
  const Pmf u = Pmf::uniform(4);
  CHECK(kl_divergence(u, u) == 0.0);
  Vec p(2);
  p << 1.0, 0.0;
  CHECK(kl_divergence(Pmf(p), Pmf::uniform(2)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double oracle =
      0.3 * std::log2(0.3 / 0.5) + 0.7 * std::log2(0.7 / 0.5);
  CHECK(kl_divergence(Pmf::bernoulli(0.7), Pmf::uniform(2)) ==
        doctest::Approx(oracle).epsilon(1e-14));
  CHECK_THROWS_AS(kl_divergence(Pmf::uniform(2), Pmf::point_mass(2, 0)),
                  AbsoluteContinuityViolation);
}

TEST_CASE("kl divergence nonnegativity on random pairs") {
  auto e = rng::engine(42);
  for (int t = 0; t < 10000; ++t) {
    const Index k = 2 + static_cast<Index>(rng::canonical(e) * 5.0);
    const Pmf p = random_pmf(k, e), q = random_pmf(k, e);
    CHECK(kl_divergence(p, q) >= -1e-12);
  }
  // equality iff p == q
  const Pmf p = random_pmf(4, e);
  CHECK(kl_divergence(p, p) <= 1e-12);
}

TEST_CASE("mutual information") {
  // product law has zero mutual information
  auto e = rng::engine(7);
  for (int t = 0; t < 50; ++t) {
    const Pmf px = random_pmf(3, e), py = random_pmf(4, e);
    const JointSource prod(px.probs() * py.probs().transpose());
    CHECK(std::abs(mutual_information(prod)) <= 1e-12);
  }
  // identity coupling of a uniform binary pair carries one bit
  Mat ident(2, 2);
  ident << 0.5, 0.0, 0.0, 0.5;
  CHECK(mutual_information(JointSource(ident)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // doubly symmetric source: closed form 1 - h_b(alpha) against a summation
  // oracle over the four cells
  const JointSource dsbs = JointSource::dsbs(0.1);
  double oracle = 0.0;
  for (Index x = 0; x < 2; ++x)
    for (Index y = 0; y < 2; ++y) {
      const double v = dsbs.joint()(x, y);
      oracle += v * std::log2(v / 0.25);
    }
  CHECK(mutual_information(dsbs) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(mutual_information(dsbs) ==
        doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-12));
}

TEST_CASE("binary entropy and its inverse") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const double oracle = -0.11 * std::log2(0.11) - 0.89 * std::log2(0.89);
  CHECK(binary_entropy(0.11) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(binary_entropy(0.3) == binary_entropy(0.7));  // symmetry
  CHECK_THROWS_AS(binary_entropy(-0.01), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.01), DomainError);

  CHECK(binary_entropy_inv(0.0) == 0.0);
  CHECK(binary_entropy_inv(1.0) == 0.5);
  const double a = binary_entropy_inv(0.5);
  CHECK(binary_entropy(a) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(binary_entropy_inv(1.5), DomainError);
  // right inverse on a dense grid
  for (int i = 0; i <= 200; ++i) {
    const double h = static_cast<double>(i) / 200.0;
    CHECK(std::abs(binary_entropy(binary_entropy_inv(h)) - h) <= 1e-9);
  }
}

TEST_CASE("star operation") {
  CHECK(star(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(star(0.7, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(star(0.2, 0.1) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK_THROWS_AS(star(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(star(0.1, 1.5), DomainError);
  auto e = rng::engine(3);
  for (int t = 0; t < 1000; ++t) {
    const double a = rng::canonical(e), b = rng::canonical(e),
                 c = rng::canonical(e);
    CHECK(std::abs(star(a, b) - star(b, a)) <= 1e-15);
    CHECK(std::abs(star(star(a, b), c) - star(a, star(b, c))) <= 1e-15);
  }
}

TEST_CASE("typicality") {
  // empirical type equal to the pmf passes for every mu
  const std::vector<int> balanced{0, 1, 0, 1, 0, 1, 0, 1};
  for (double mu : {1e-6, 0.1, 1.0, 50.0})
    CHECK(is_typical(balanced, Pmf::uniform(2), mu));
  // all-zeros against a fair coin at mu = 0.1: deviation 0.5 > 0.05
  const std::vector<int> zeros(10, 0);
  CHECK_FALSE(is_typical(zeros, Pmf::uniform(2), 0.1));
  // 11 ones out of 20 at mu = 0.2: |11/20 - 1/2| = 0.05 <= 0.1
  std::vector<int> seq(20, 0);
  for (int i = 0; i < 11; ++i) seq[static_cast<std::size_t>(i)] = 1;
  CHECK(is_typical(seq, Pmf::uniform(2), 0.2));
  // a zero-probability symbol in the sequence fails for any mu
  Vec withzero(3);
  withzero << 0.5, 0.5, 0.0;
  CHECK_FALSE(is_typical(std::vector<int>{0, 1, 2, 0}, Pmf(withzero), 100.0));
  // huge mu accepts everything supported on the pmf
  auto e = rng::engine(5);
  const Pmf p = Pmf::bernoulli(0.3);
  for (int t = 0; t < 100; ++t)
    CHECK(is_typical(sample_iid(p, 17, e), p, 1e6));
}

TEST_CASE("typicality acceptance under the law of large numbers") {
  const Pmf p = Pmf::bernoulli(0.5);
  auto e = rng::engine(11);
  int accepted = 0;
  const int reps = 400;
  for (int t = 0; t < reps; ++t)
    if (is_typical(sample_iid(p, 10000, e), p, 0.1)) ++accepted;
  CHECK(static_cast<double>(accepted) / reps > 0.99);
}

TEST_CASE("joint typicality") {
  const JointSource dsbs = JointSource::dsbs(0.2);
  // build a pair sequence with the exact joint type (n = 10: 4,1,1,4)
  std::vector<int> a, b;
  auto put = [&](int x, int y, int times) {
    for (int i = 0; i < times; ++i) {
      a.push_back(x);
      b.push_back(y);
    }
  };
  put(0, 0, 4);
  put(0, 1, 1);
  put(1, 0, 1);
  put(1, 1, 4);
  for (double mu : {1e-9, 0.3, 2.0}) CHECK(is_jointly_typical(a, b, dsbs, mu));
  // a zero-probability pair kills typicality at any mu
  Mat degenerate(2, 2);
  degenerate << 0.5, 0.5, 0.0, 0.0;
  const JointSource deg(degenerate);
  CHECK_FALSE(is_jointly_typical(std::vector<int>{1}, std::vector<int>{0}, deg,
                                 1e9));

  // acceptance rate of fresh draws against the exact type-lattice oracle
  const JointSource j = JointSource::dsbs(0.1);
  const int n = 50;
  const double mu = 0.5;
  const auto w = TypicalityWindow::of(
      Vec{{(1.0 - 0.1) / 2.0, 0.05, 0.05, 0.45}}, n, mu);
  // exact probability: sum multinomial masses of in-window pair types
  double exact = 0.0;
  for (int c00 = w.lo(0); c00 <= w.hi(0); ++c00)
    for (int c01 = w.lo(1); c01 <= w.hi(1); ++c01)
      for (int c10 = w.lo(2); c10 <= w.hi(2); ++c10) {
        const int c11 = n - c00 - c01 - c10;
        if (c11 < w.lo(3) || c11 > w.hi(3)) continue;
        double logm = std::lgamma(n + 1.0) - std::lgamma(c00 + 1.0) -
                      std::lgamma(c01 + 1.0) - std::lgamma(c10 + 1.0) -
                      std::lgamma(c11 + 1.0);
        logm += c00 * std::log(0.45) + c01 * std::log(0.05) +
                c10 * std::log(0.05) + c11 * std::log(0.45);
        exact += std::exp(logm);
      }
  auto e = rng::engine(13);
  const Pmf flat = Pmf(Vec{{0.45, 0.05, 0.05, 0.45}});
  int hits = 0;
  const int reps = 20000;
  for (int t = 0; t < reps; ++t) {
    std::vector<int> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      const int pair = rng::sample(flat, e);
      xs[static_cast<std::size_t>(i)] = pair / 2;
      ys[static_cast<std::size_t>(i)] = pair % 2;
    }
    if (is_jointly_typical(xs, ys, j, mu)) ++hits;
  }
  const double rate = static_cast<double>(hits) / reps;
  const double sigma = std::sqrt(exact * (1.0 - exact) / reps);
  CHECK(std::abs(rate - exact) <= 4.0 * sigma + 1e-9);
}

TEST_CASE("iid sampling") {
  auto e = rng::engine(17);
  // point mass gives a constant sequence
  const auto constant = sample_iid(Pmf::point_mass(3, 1), 5, e);
  for (int s : constant) CHECK(s == 1);
  // fixed seed replays identically
  auto e1 = rng::engine(99), e2 = rng::engine(99);
  CHECK(sample_iid(Pmf::bernoulli(0.3), 1000, e1) ==
        sample_iid(Pmf::bernoulli(0.3), 1000, e2));
  // empirical frequency within 3 sigma of the mean
  auto e3 = rng::engine(23);
  const int n = 100000;
  const auto seq = sample_iid(Pmf::uniform(2), n, e3);
  int ones = 0;
  for (int s : seq) ones += s;
  const double sigma = std::sqrt(0.25 * n);
  CHECK(std::abs(ones - n / 2.0) <= 3.0 * sigma);
}

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf(Vec{{0.5, 0.4}}), InvalidDistribution);      // sums to 0.9
  CHECK_THROWS_AS(Pmf(Vec{{1.2, -0.2}}), InvalidDistribution);     // negative
  CHECK_NOTHROW(Pmf(Vec{{0.5, 0.5 + 5e-10}}));                     // renormalized
  const Pmf p(Vec{{0.25, 0.75 + 3e-10}});
  CHECK(p.probs().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("joint source marginals and lifts") {
  const JointSource j = JointSource::dsbs(0.3);
  CHECK(j.x_marginal()(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(j.y_marginal()(1) == doctest::Approx(0.5).epsilon(1e-12));
  const JointSource prod = j.product();
  CHECK(std::abs(mutual_information(prod)) <= 1e-12);

  // U -> X -> Y lifts reproduce the cascade crossover
  const AuxChannel aux = AuxChannel::bsc(0.25);
  const JointSource jux = lift_ux(aux, j.x_marginal());
  CHECK(mutual_information(jux) ==
        doctest::Approx(1.0 - binary_entropy(0.25)).epsilon(1e-12));
  const JointSource juy = lift_uy(aux, j);
  CHECK(mutual_information(juy) ==
        doctest::Approx(1.0 - binary_entropy(star(0.25, 0.3))).epsilon(1e-12));

  const Dmc bsc = Dmc::bsc(0.1);
  const JointSource jwv = lift_wv(Pmf::uniform(2), bsc);
  CHECK(mutual_information(jwv) ==
        doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-12));
}
