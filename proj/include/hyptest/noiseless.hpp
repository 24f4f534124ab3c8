#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hyptest/rng.hpp"
#include "hyptest/stats.hpp"
#include "hyptest/types.hpp"

namespace hyptest {

enum class Hypothesis { H0, H1 };

// ---------------------------------------------------------------------------
// Messages on the noiseless bit pipe. Either the single reject bit [0] or a
// fixed-width index. The index width is max(2, ceil(log2 size)) so a reject
// message can always be told apart from an index by its length alone; the
// max(2, ...) only kicks in for degenerate books of size <= 2.
// ---------------------------------------------------------------------------
struct Message {
  int length = 1;           // bits
  std::uint32_t bits = 0;   // index value; 0 for the reject bit

  static Message reject() { return {1, 0}; }
  static Message index(std::int64_t m, int width);
  bool is_reject() const { return length == 1; }
};

int index_width(std::int64_t codebook_size);

// ---------------------------------------------------------------------------
// Random codebook: `count` sequences of length `length`, entries i.i.d. from
// `symbols`. Codeword m is a deterministic function of (seed, m), so books
// too large to keep in memory are regenerated on the fly; small books are
// cached. Guarded to <= 2^26 codewords.
// ---------------------------------------------------------------------------
class Codebook {
 public:
  Codebook(Pmf symbols, int length, std::int64_t count, std::uint64_t seed,
           std::size_t materialize_limit_bytes = std::size_t(1) << 26);

  /// Book of floor(2^{n*rate}) codewords; throws ResourceLimit when
  /// n*rate > 26.
  static Codebook of_rate(Pmf symbols, int n, double rate, std::uint64_t seed,
                          std::size_t materialize_limit_bytes = std::size_t(1)
                                                                << 26);

  std::int64_t size() const { return count_; }
  int length() const { return length_; }
  const Pmf& symbols() const { return symbols_; }
  std::uint64_t seed() const { return seed_; }

  void fill_codeword(std::int64_t m, std::span<int> out) const;
  std::vector<int> codeword(std::int64_t m) const;

 private:
  Pmf symbols_;
  int length_;
  std::int64_t count_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> store_;  // empty when streaming
};

/// Codebook over U of rate R (the transmitter's source codebook).
Codebook build_codebook(const Pmf& p_u, int n, double rate,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reject set S_n: a subset of the (mu/2)-typical x-sequences whose exact
// probability equals target_prob. Sequences of one empirical type are
// equiprobable, so the set is a union of whole type classes, filled in order
// of decreasing per-sequence probability, plus one boundary class whose
// sequences are accepted with probability gamma. The randomized boundary is
// what makes the mass exact.
// ---------------------------------------------------------------------------
class RejectSetSpec {
 public:
  /// Typicality tolerance is mu/2, matching the encoder's joint test.
  /// Throws InfeasibleTarget (carrying the achievable maximum) when the
  /// typical set holds less than target_prob.
  static RejectSetSpec build(const Pmf& p_x, int n, double mu,
                             double target_prob);

  static RejectSetSpec empty(Index alphabet_size, int n);

  /// P[seq accepted into S_n] for a sequence of this type: 1, gamma, or 0.
  double acceptance_probability(const EmpiricalType& type) const;

  double target_prob() const { return target_; }
  double gamma() const { return gamma_; }
  /// Total mass of the (mu/2)-typical set the classes were drawn from.
  double typical_mass() const { return typical_mass_; }
  /// Sum of accepted class masses; equals target_prob up to rounding.
  double analytic_mass() const { return analytic_mass_; }

 private:
  RejectSetSpec() = default;
  int n_ = 0;
  double target_ = 0.0;
  double gamma_ = 0.0;
  double typical_mass_ = 0.0;
  double analytic_mass_ = 0.0;
  std::map<std::vector<int>, double> accept_;  // type -> probability
};

RejectSetSpec build_reject_set(const Pmf& p_x, int n, double mu,
                               double target_prob);

// ---------------------------------------------------------------------------
// Encoder / decoder of the variable-length scheme. The encoder tests the
// joint type of (codeword, x) at tolerance mu/2; the decoder tests
// (codeword, y) at tolerance mu. joint_ux and joint_uy index U on the rows.
// ---------------------------------------------------------------------------

/// All codewords jointly (mu/2)-typical with x; the returned pick is uniform
/// among them (consumes exactly one draw when nonempty).
std::optional<std::int64_t> pick_source_index(std::span<const int> x,
                                              const Codebook& cb,
                                              const JointSource& joint_ux,
                                              double mu, rng::Engine& e);

enum class EncodeBranch { kRejectSet, kCoverMiss, kIndex };

struct EncodeOutcome {
  Message message;
  EncodeBranch branch = EncodeBranch::kIndex;
  std::optional<std::int64_t> picked;  // codebook index when branch == kIndex
};

/// Always consumes the reject-set coin first, so runs with different reject
/// sets stay aligned on the same rng stream (used by the paired comparison).
EncodeOutcome encode_detail(std::span<const int> x, const Codebook& cb,
                            const RejectSetSpec& reject,
                            const JointSource& joint_ux, double mu,
                            rng::Engine& e);

Message encode(std::span<const int> x, const Codebook& cb,
               const RejectSetSpec& reject, const JointSource& joint_ux,
               double mu, rng::Engine& e);

Hypothesis decode(const Message& msg, std::span<const int> y,
                  const Codebook& cb, const JointSource& joint_uy, double mu);

// ---------------------------------------------------------------------------
// Monte Carlo evaluation.
// ---------------------------------------------------------------------------
struct NoiselessConfig {
  JointSource source;
  AuxChannel aux;
  int n = 0;
  double mu = 0.0;
  double epsilon = 0.0;
  double rate = 0.0;
  std::uint64_t seed = 0;

  /// rate = (1 - epsilon + mu) I(U;X) + mu, the budget the scheme needs.
  static NoiselessConfig derive_rate(JointSource source, AuxChannel aux, int n,
                                     double mu, double epsilon,
                                     std::uint64_t seed);
  static NoiselessConfig with_rate(JointSource source, AuxChannel aux, int n,
                                   double mu, double epsilon, double rate,
                                   std::uint64_t seed);
};

struct SimReport {
  std::int64_t trials_h0 = 0, trials_h1 = 0;
  double alpha_hat = 0.0, beta_hat = 0.0;
  stats::Interval alpha_ci, beta_ci;
  double mean_len_bits = 0.0;        // E[len(M)] per block, both hypotheses
  double mean_len_per_symbol = 0.0;  // mean_len_bits / n
  double empirical_exponent = 0.0;   // -log2(max(beta_hat, 1/trials)) / n
  std::int64_t reject_messages = 0, index_messages = 0;
  int index_message_width = 0;
  // Breakdown of H0 rejections, for the error-budget accounting.
  std::int64_t h0_reject_set = 0, h0_cover_miss = 0, h0_decoder_miss = 0;

  bool operator==(const SimReport&) const = default;
};

SimReport run_trials(const NoiselessConfig& cfg,
                     std::int64_t trials_per_hypothesis);

/// Replays the same trials with and without the reject set on shared rng
/// substreams and counts trials where the reject branch flipped a decision
/// toward H0 (it never should; the branch only converts decisions to H1).
std::int64_t paired_reject_dominance_violations(
    const NoiselessConfig& cfg, std::int64_t trials_per_hypothesis);

}  // namespace hyptest
