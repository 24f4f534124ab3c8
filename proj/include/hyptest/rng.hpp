#pragma once

#include <cstdint>
#include <random>

#include "hyptest/types.hpp"

namespace hyptest::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; good enough to decorrelate substream seeds.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t substream = 0) {
  return mix(seed ^ mix(stream ^ mix(substream)));
}

inline Engine engine(std::uint64_t seed) { return Engine(mix(seed)); }

/// Independent engine for (seed, stream, substream); trials and purposes get
/// their own streams so parallel and serial execution agree bit for bit.
inline Engine substream(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t sub = 0) {
  return Engine(derive(seed, stream, sub));
}

/// Uniform double in [0, 1) with 53 random bits; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double canonical(Engine& e) {
  return static_cast<double>(e() >> 11) * 0x1.0p-53;
}

/// One draw from a pmf by inverse CDF walk; deterministic given the engine
/// state on every platform.
inline int sample(const Pmf& p, Engine& e) {
  const double u = canonical(e);
  double acc = 0.0;
  const Index k = p.size();
  for (Index i = 0; i + 1 < k; ++i) {
    acc += p(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(k - 1);
}

/// Draw from one row of a row-stochastic matrix (e.g. a channel law).
inline int sample_row(const Mat& m, Index row, Engine& e) {
  const double u = canonical(e);
  double acc = 0.0;
  const Index k = m.cols();
  for (Index i = 0; i + 1 < k; ++i) {
    acc += m(row, i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(k - 1);
}

}  // namespace hyptest::rng
