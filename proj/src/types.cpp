#include "hyptest/types.hpp"

#include <cmath>

namespace hyptest {

namespace {

constexpr double kSumTol = 1e-9;
constexpr double kNegTol = -1e-12;

Vec checked_pmf_vector(Vec p, const char* what) {
  if (p.size() == 0) throw InvalidDistribution(std::string(what) + ": empty");
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p(i)) || p(i) < kNegTol)
      throw InvalidDistribution(std::string(what) +
                                ": negative or non-finite entry");
    if (p(i) < 0) p(i) = 0.0;
  }
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > kSumTol)
    throw InvalidDistribution(std::string(what) + ": total mass " +
                              std::to_string(sum) + " is not 1");
  return p / sum;
}

}  // namespace

Pmf::Pmf(Vec probs) : p_(checked_pmf_vector(std::move(probs), "Pmf")) {}

Pmf Pmf::uniform(Index size) {
  if (size < 1) throw InvalidDistribution("Pmf::uniform: empty alphabet");
  return Pmf(Vec::Constant(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::point_mass(Index size, Index at) {
  if (at < 0 || at >= size) throw InvalidDistribution("Pmf::point_mass: index");
  Vec v = Vec::Zero(size);
  v(at) = 1.0;
  return Pmf(std::move(v));
}

Pmf Pmf::bernoulli(double p1) {
  if (p1 < 0.0 || p1 > 1.0) throw InvalidDistribution("Pmf::bernoulli: p");
  Vec v(2);
  v << 1.0 - p1, p1;
  return Pmf(std::move(v));
}

JointSource::JointSource(Mat joint)
    : joint_(std::move(joint)),
      px_(checked_pmf_vector(joint_.rowwise().sum(), "JointSource")),
      py_(checked_pmf_vector(joint_.colwise().sum().transpose(),
                             "JointSource")) {
  for (Index i = 0; i < joint_.rows(); ++i)
    for (Index j = 0; j < joint_.cols(); ++j)
      if (!std::isfinite(joint_(i, j)) || joint_(i, j) < kNegTol)
        throw InvalidDistribution("JointSource: negative entry");
  const double sum = joint_.sum();
  joint_ /= sum;  // same renormalization the marginals received
}

JointSource JointSource::dsbs(double alpha) {
  if (alpha < 0.0 || alpha > 0.5)
    throw DomainError("dsbs: alpha must be in [0, 1/2]");
  Mat j(2, 2);
  j << (1.0 - alpha) / 2.0, alpha / 2.0, alpha / 2.0, (1.0 - alpha) / 2.0;
  return JointSource(std::move(j));
}

JointSource JointSource::from_conditional(const Pmf& x, const Mat& y_given_x) {
  if (y_given_x.rows() != x.size())
    throw InvalidDistribution("from_conditional: row count");
  for (Index i = 0; i < y_given_x.rows(); ++i)
    (void)Pmf(y_given_x.row(i).transpose());  // validate each row
  return JointSource(x.probs().asDiagonal() * y_given_x);
}

JointSource JointSource::product() const {
  return JointSource(px_.probs() * py_.probs().transpose());
}

AuxChannel::AuxChannel(Mat rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1)
    throw InvalidDistribution("AuxChannel: empty");
  for (Index x = 0; x < rows_.rows(); ++x)
    rows_.row(x) = Pmf(rows_.row(x).transpose()).probs().transpose();
}

AuxChannel AuxChannel::identity_embedding(Index x_size, Index u_size) {
  if (u_size < x_size)
    throw DomainError("identity_embedding: u_size < x_size");
  Mat m = Mat::Zero(x_size, u_size);
  for (Index x = 0; x < x_size; ++x) m(x, x) = 1.0;
  return AuxChannel(std::move(m));
}

AuxChannel AuxChannel::constant(Index x_size, Index u_size) {
  return AuxChannel(
      Mat::Constant(x_size, u_size, 1.0 / static_cast<double>(u_size)));
}

AuxChannel AuxChannel::bsc(double delta) {
  if (delta < 0.0 || delta > 1.0) throw DomainError("AuxChannel::bsc: delta");
  Mat m(2, 2);
  m << 1.0 - delta, delta, delta, 1.0 - delta;
  return AuxChannel(std::move(m));
}

Dmc::Dmc(Mat transition) : t_(std::move(transition)) {
  if (t_.rows() < 1 || t_.cols() < 1) throw InvalidDistribution("Dmc: empty");
  for (Index w = 0; w < t_.rows(); ++w)
    t_.row(w) = Pmf(t_.row(w).transpose()).probs().transpose();
}

Dmc Dmc::bsc(double crossover) {
  if (crossover < 0.0 || crossover > 1.0) throw DomainError("Dmc::bsc: p");
  Mat m(2, 2);
  m << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
  return Dmc(std::move(m));
}

Dmc Dmc::bec(double erasure) {
  if (erasure < 0.0 || erasure > 1.0) throw DomainError("Dmc::bec: e");
  Mat m(2, 3);
  m << 1.0 - erasure, erasure, 0.0, 0.0, erasure, 1.0 - erasure;
  return Dmc(std::move(m));
}

Dmc Dmc::identity(Index size) {
  return Dmc(Mat::Identity(size, size));
}

Dmc Dmc::with_capacity(double bits) const {
  Dmc copy = *this;
  copy.cache_ = bits;
  return copy;
}

}  // namespace hyptest
