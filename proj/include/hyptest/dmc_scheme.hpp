#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hyptest/noiseless.hpp"
#include "hyptest/solver.hpp"
#include "hyptest/stats.hpp"
#include "hyptest/types.hpp"

namespace hyptest {

// ---------------------------------------------------------------------------
// Phase-1 detector: a randomized likelihood-ratio test between the two
// repetition words. The log-LR of a length-q output block depends only on its
// type, so the threshold and the boundary randomization gamma are computed
// from the exact type distribution under the w0 word; the false-alarm
// probability then equals target_fa exactly, not just asymptotically.
// ---------------------------------------------------------------------------
struct NpTest {
  double threshold = 0.0;  // on the total log2 likelihood ratio
  double gamma = 0.0;      // P[declare w1] on the threshold atom
  int q = 0;               // samples per decision
  double target_fa = 0.0;  // designed P[declare w1 | w0 sent]
  Vec llr;                 // per-output-symbol log2 LR; +-inf allowed
};

/// Throws DegenerateChannels when the two output laws coincide.
NpTest design_np_test(const Pmf& gamma0, const Pmf& gamma1, int q,
                      double target_fa);

/// 1 = w1 detected (stop, declare H1), 0 = w0 detected (continue).
int phase1_detect(const NpTest& test, std::span<const int> outputs,
                  rng::Engine& e);

struct MissBounds {
  double exact = 0.0;        // P[detect w0 | w1 sent], by the same convolution
  double stein_lower = 0.0;  // 2^{-q (D(G_w0||G_w1) + mu)}
  double stein_upper = 0.0;  // 2^{-q (D(G_w0||G_w1) - mu)}
  bool within_bracket = false;
};

MissBounds miss_probability_bounds(const NpTest& test, const Pmf& gamma0,
                                   const Pmf& gamma1, double mu);

// ---------------------------------------------------------------------------
// Two-phase variable-length scheme over a DMC with stop feedback. Phase 1
// signals whether X^n fell into the reject set by repeating w1 or w0 for q(n)
// uses; on a w1 detection the receiver stops at tau = q(n) and declares H1.
// Otherwise phase 2 sends a channel codeword for the source index over
// n' = ceil(n kappa / (1 - epsilon')) more uses.
// ---------------------------------------------------------------------------
struct DmcSchemeConfig {
  JointSource source;
  AuxChannel aux;
  Dmc channel;
  int n = 0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;  // reject-set mass; in [0, epsilon)
  double mu = 0.0;             // epsilon - epsilon_prime
  double q_exponent = 0.75;    // q(n) = ceil(n^q_exponent)
  int w0 = 0, w1 = 1;
  Pmf p_w;       // phase-2 input law; defaults to the capacity achiever
  double rate = 0.0;  // I(U;X) + mu
  std::uint64_t seed = 0;

  static DmcSchemeConfig make(JointSource source, AuxChannel aux, Dmc channel,
                              int n, double kappa, double epsilon,
                              double epsilon_prime, std::uint64_t seed,
                              double q_exponent = 0.75, int w0 = 0, int w1 = 1,
                              std::optional<Pmf> p_w = std::nullopt);

  int q() const;        // phase-1 length
  int n_prime() const;  // phase-2 length
};

struct DmcTrialRecord {
  Hypothesis hypothesis = Hypothesis::H0;
  bool reject_branch = false;  // X^n fell into S_n, so w1 was repeated
  int phase1_detect = 0;  // 0 = continued, 1 = stopped after phase 1
  std::int64_t tau = 0;   // q or q + n'
  Hypothesis decision = Hypothesis::H1;
  std::optional<std::int64_t> transmitted_index;  // C_W index sent in phase 2
  std::optional<std::int64_t> decoded_index;      // unique typical C_W index
};

/// One protocol run. cu must hold floor(2^{nR}) codewords of length n over U;
/// cw must hold floor(2^{nR}) + 1 codewords of length n' over W (entry 0 is
/// the encoder-failure word).
DmcTrialRecord run_dmc_trial(const DmcSchemeConfig& cfg, const Codebook& cu,
                             const Codebook& cw, const RejectSetSpec& reject,
                             const NpTest& test, const JointSource& joint_ux,
                             const JointSource& joint_wv,
                             const JointSource& joint_uy,
                             Hypothesis hypothesis, std::int64_t trial_index);

struct DmcSimReport {
  std::int64_t trials_h0 = 0, trials_h1 = 0;
  double alpha_hat = 0.0, beta_hat = 0.0;
  stats::Interval alpha_ci, beta_ci;
  double mean_tau_over_n = 0.0;
  double analytic_mean_tau_over_n = 0.0;  // (q + n' P[continue]) / n
  double analytic_continue_prob = 0.0;    // (1-s)(1-fa) + s * miss, s = |S_n|
  double phase1_fa_hat = 0.0, phase1_miss_hat = 0.0;
  std::int64_t phase1_w0_trials = 0, phase1_w1_trials = 0;
  std::int64_t continue_h0 = 0, continue_h1 = 0;  // tau = q + n' counts
  double empirical_exponent = 0.0;
  int q = 0, n_prime = 0;

  bool operator==(const DmcSimReport&) const = default;
};

DmcSimReport run_dmc_trials(const DmcSchemeConfig& cfg,
                            std::int64_t trials_per_hypothesis);

}  // namespace hyptest
