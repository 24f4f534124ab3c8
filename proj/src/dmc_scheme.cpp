#include "hyptest/dmc_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hyptest/info.hpp"

namespace hyptest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxTypes = 5'000'000;

// Per-symbol log2 likelihood ratios log2(g1(v)/g0(v)); +-inf where one law
// has no mass.
Vec per_symbol_llr(const Pmf& g0, const Pmf& g1) {
  if (g0.size() != g1.size())
    throw DomainError("design_np_test: output alphabets differ");
  Vec llr(g0.size());
  for (Index v = 0; v < g0.size(); ++v) {
    if (g0(v) > 0.0 && g1(v) > 0.0)
      llr(v) = std::log2(g1(v) / g0(v));
    else if (g0(v) > 0.0)
      llr(v) = -kInf;
    else if (g1(v) > 0.0)
      llr(v) = kInf;
    else
      llr(v) = 0.0;  // unreachable symbol under both words
  }
  return llr;
}

// Total log2 LR of a block with the given output type. Fixed accumulation
// order over v, so the detector and the designer produce bitwise-identical
// values for the same type.
double llr_of_counts(const VecI& counts, const Vec& llr) {
  bool pos = false, neg = false;
  double finite = 0.0;
  for (Index v = 0; v < llr.size(); ++v) {
    if (counts(v) == 0) continue;
    if (llr(v) == kInf)
      pos = true;
    else if (llr(v) == -kInf)
      neg = true;
    else
      finite += static_cast<double>(counts(v)) * llr(v);
  }
  if (pos) return kInf;  // impossible under w0, certain w1 evidence
  if (neg) return -kInf;
  return finite;
}

struct TypeAtom {
  double llr = 0.0;
  long double p0 = 0.0L;  // block probability under gamma0
  long double p1 = 0.0L;  // block probability under gamma1
};

void enumerate_output_types(const Pmf& g0, const Pmf& g1, const Vec& llr,
                            int q, VecI& counts, Index sym, int remaining,
                            std::vector<TypeAtom>& out) {
  const Index k = llr.size();
  if (sym == k - 1) {
    counts(sym) = remaining;
    const double lgq = std::lgamma(q + 1.0);
    double coef = lgq;
    double lp0 = 0.0, lp1 = 0.0;
    bool ok0 = true, ok1 = true;
    for (Index v = 0; v < k; ++v) {
      const int c = counts(v);
      if (c == 0) continue;
      coef -= std::lgamma(c + 1.0);
      if (g0(v) > 0.0) lp0 += c * std::log(g0(v)); else ok0 = false;
      if (g1(v) > 0.0) lp1 += c * std::log(g1(v)); else ok1 = false;
    }
    if (!ok0 && !ok1) return;  // unreachable block
    TypeAtom atom;
    atom.llr = llr_of_counts(counts, llr);
    atom.p0 = ok0 ? std::exp(static_cast<long double>(coef + lp0)) : 0.0L;
    atom.p1 = ok1 ? std::exp(static_cast<long double>(coef + lp1)) : 0.0L;
    out.push_back(atom);
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts(sym) = c;
    enumerate_output_types(g0, g1, llr, q, counts, sym + 1, remaining - c, out);
  }
}

std::vector<TypeAtom> output_type_atoms(const Pmf& g0, const Pmf& g1,
                                        const Vec& llr, int q) {
  // #types = C(q + |V| - 1, |V| - 1); refuse absurd enumerations.
  long double count = 1.0L;
  for (Index i = 1; i < llr.size(); ++i)
    count *= static_cast<long double>(q + i) / static_cast<long double>(i);
  if (count > static_cast<long double>(kMaxTypes))
    throw ResourceLimit("design_np_test: output type lattice too large");
  std::vector<TypeAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(count));
  VecI counts = VecI::Zero(llr.size());
  enumerate_output_types(g0, g1, llr, q, counts, 0, q, atoms);
  std::sort(atoms.begin(), atoms.end(),
            [](const TypeAtom& a, const TypeAtom& b) { return a.llr > b.llr; });
  return atoms;
}

}  // namespace

NpTest design_np_test(const Pmf& gamma0, const Pmf& gamma1, int q,
                      double target_fa) {
  if (q < 1) throw DomainError("design_np_test: q < 1");
  if (!(target_fa > 0.0 && target_fa < 1.0))
    throw DomainError("design_np_test: target_fa must be in (0, 1)");
  if (gamma0.size() == gamma1.size() &&
      (gamma0.probs() - gamma1.probs()).cwiseAbs().maxCoeff() < 1e-15)
    throw DegenerateChannels("design_np_test: identical output laws");

  NpTest test;
  test.q = q;
  test.target_fa = target_fa;
  test.llr = per_symbol_llr(gamma0, gamma1);

  const auto atoms = output_type_atoms(gamma0, gamma1, test.llr, q);
  long double above = 0.0L;
  std::size_t i = 0;
  while (i < atoms.size()) {
    // merge the run of equal-LLR atoms into one threshold candidate
    long double run0 = 0.0L;
    const double level = atoms[i].llr;
    std::size_t j = i;
    for (; j < atoms.size() && atoms[j].llr == level; ++j) run0 += atoms[j].p0;
    if (run0 > 0.0L &&
        above + run0 >= static_cast<long double>(target_fa)) {
      test.threshold = level;
      test.gamma = static_cast<double>(
          (static_cast<long double>(target_fa) - above) / run0);
      test.gamma = std::clamp(test.gamma, 0.0, 1.0);
      return test;
    }
    above += run0;
    i = j;
  }
  // target_fa below total w0 mass is guaranteed (mass sums to 1 > target_fa),
  // so falling through means a numerical degeneracy.
  throw NonConvergence("design_np_test: threshold search failed");
}

int phase1_detect(const NpTest& test, std::span<const int> outputs,
                  rng::Engine& e) {
  if (outputs.size() != static_cast<std::size_t>(test.q))
    throw DomainError("phase1_detect: output length != q");
  const auto type = EmpiricalType::of(outputs, test.llr.size());
  const double llr = llr_of_counts(type.counts, test.llr);
  if (llr > test.threshold) return 1;
  if (llr == test.threshold) return rng::canonical(e) < test.gamma ? 1 : 0;
  return 0;
}

MissBounds miss_probability_bounds(const NpTest& test, const Pmf& gamma0,
                                   const Pmf& gamma1, double mu) {
  MissBounds mb;
  const auto atoms = output_type_atoms(gamma0, gamma1, test.llr, test.q);
  long double miss = 0.0L;
  for (const auto& a : atoms) {
    if (a.llr < test.threshold)
      miss += a.p1;
    else if (a.llr == test.threshold)
      miss += a.p1 * static_cast<long double>(1.0 - test.gamma);
  }
  mb.exact = static_cast<double>(miss);
  double d;
  try {
    d = kl_divergence(gamma0, gamma1);
  } catch (const AbsoluteContinuityViolation&) {
    d = kInf;
  }
  const double qd = static_cast<double>(test.q);
  mb.stein_lower = std::exp2(-qd * (d + mu));
  mb.stein_upper = d == kInf ? 0.0 : std::exp2(-qd * (d - mu));
  mb.within_bracket = mb.exact >= mb.stein_lower && mb.exact <= mb.stein_upper;
  return mb;
}

// ---------------------------------------------------------------------------
// Scheme configuration
// ---------------------------------------------------------------------------

int DmcSchemeConfig::q() const {
  return static_cast<int>(
      std::ceil(std::pow(static_cast<double>(n), q_exponent) - 1e-9));
}

int DmcSchemeConfig::n_prime() const {
  return static_cast<int>(
      std::ceil(static_cast<double>(n) * kappa / (1.0 - epsilon_prime) - 1e-9));
}

DmcSchemeConfig DmcSchemeConfig::make(JointSource source, AuxChannel aux,
                                      Dmc channel, int n, double kappa,
                                      double epsilon, double epsilon_prime,
                                      std::uint64_t seed, double q_exponent,
                                      int w0, int w1, std::optional<Pmf> p_w) {
  if (n < 1) throw DomainError("DmcSchemeConfig: n < 1");
  if (!(kappa > 0.0)) throw DomainError("DmcSchemeConfig: kappa <= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("DmcSchemeConfig: epsilon must be in (0, 1)");
  if (!(epsilon_prime >= 0.0 && epsilon_prime < epsilon))
    throw DomainError("DmcSchemeConfig: need 0 <= epsilon' < epsilon");
  if (!(q_exponent > 0.0 && q_exponent < 1.0))
    throw DomainError("DmcSchemeConfig: q_exponent must be in (0, 1)");
  if (aux.x_size() != source.x_size())
    throw DomainError("DmcSchemeConfig: aux/source alphabet mismatch");
  if (w0 < 0 || w1 < 0 || w0 >= channel.w_size() || w1 >= channel.w_size() ||
      w0 == w1)
    throw DomainError("DmcSchemeConfig: bad signaling symbols");

  // The two repetition words must be distinguishable at the output.
  bool separated;
  try {
    separated = kl_divergence(channel.output_law(w0), channel.output_law(w1)) >
                0.0;
  } catch (const AbsoluteContinuityViolation&) {
    separated = true;  // infinite divergence
  }
  if (!separated)
    throw DegenerateChannels("DmcSchemeConfig: D(G_w0 || G_w1) = 0");

  Pmf input_law = p_w ? std::move(*p_w) : capacity_achieving_input(channel);
  if (input_law.size() != channel.w_size())
    throw DomainError("DmcSchemeConfig: p_w size does not match the channel");

  DmcSchemeConfig cfg{std::move(source),
                      std::move(aux),
                      std::move(channel),
                      n,
                      kappa,
                      epsilon,
                      epsilon_prime,
                      epsilon - epsilon_prime,
                      q_exponent,
                      w0,
                      w1,
                      std::move(input_law),
                      0.0,
                      seed};

  const double iux =
      mutual_information(lift_ux(cfg.aux, cfg.source.x_marginal()));
  cfg.rate = iux + cfg.mu;
  const double iwv = mutual_information(lift_wv(cfg.p_w, cfg.channel));
  if (cfg.rate >= cfg.kappa / (1.0 - cfg.epsilon_prime) * iwv + 1e-9)
    throw DomainError(
        "DmcSchemeConfig: rate exceeds the phase-2 budget kappa/(1-eps') I(W;V)");
  if (static_cast<double>(n) * cfg.rate > 26.0 + 1e-9)
    throw ResourceLimit("DmcSchemeConfig: n*rate exceeds the codebook guard");
  return cfg;
}

// ---------------------------------------------------------------------------
// Protocol simulation
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kStreamCuBook = 0xc0deULL;
constexpr std::uint64_t kStreamCwBook = 0xc1deULL;

enum : std::uint64_t {
  kTagSource = 1,
  kTagEncode = 2,
  kTagPhase1 = 3,
  kTagNp = 4,
  kTagPhase2 = 5,
};
constexpr std::uint64_t tag(std::uint64_t base, Hypothesis h) {
  return base + (h == Hypothesis::H1 ? 16 : 0);
}

std::vector<int> pass_through(const Dmc& channel, std::span<const int> input,
                              rng::Engine& e) {
  std::vector<int> out(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const Index w = static_cast<Index>(input[i]);
    if (w < 0 || w >= channel.w_size())
      throw DomainError("pass_through: input symbol outside alphabet");
    out[i] = rng::sample_row(channel.transition(), w, e);
  }
  return out;
}

Vec flatten_joint(const JointSource& j) {
  Vec flat(j.x_size() * j.y_size());
  for (Index a = 0; a < j.x_size(); ++a)
    for (Index b = 0; b < j.y_size(); ++b)
      flat(a * j.y_size() + b) = j.joint()(a, b);
  return flat;
}

}  // namespace

DmcTrialRecord run_dmc_trial(const DmcSchemeConfig& cfg, const Codebook& cu,
                             const Codebook& cw, const RejectSetSpec& reject,
                             const NpTest& test, const JointSource& joint_ux,
                             const JointSource& joint_wv,
                             const JointSource& joint_uy,
                             Hypothesis hypothesis, std::int64_t trial_index) {
  if (cw.size() != cu.size() + 1)
    throw DomainError("run_dmc_trial: C_W must hold one extra failure word");
  const int q = cfg.q();
  const int np = cfg.n_prime();
  const auto t = static_cast<std::uint64_t>(trial_index);

  DmcTrialRecord rec;
  rec.hypothesis = hypothesis;

  // Source draw.
  auto e_src = rng::substream(cfg.seed, t, tag(kTagSource, hypothesis));
  std::vector<int> x(static_cast<std::size_t>(cfg.n)),
      y(static_cast<std::size_t>(cfg.n));
  if (hypothesis == Hypothesis::H0) {
    const Pmf flat = Pmf(flatten_joint(cfg.source));
    const Index ys = cfg.source.y_size();
    for (int i = 0; i < cfg.n; ++i) {
      const int pair = rng::sample(flat, e_src);
      x[static_cast<std::size_t>(i)] = pair / static_cast<int>(ys);
      y[static_cast<std::size_t>(i)] = pair % static_cast<int>(ys);
    }
  } else {
    for (int i = 0; i < cfg.n; ++i)
      x[static_cast<std::size_t>(i)] = rng::sample(cfg.source.x_marginal(), e_src);
    for (int i = 0; i < cfg.n; ++i)
      y[static_cast<std::size_t>(i)] = rng::sample(cfg.source.y_marginal(), e_src);
  }

  // Reject-set membership decides the phase-1 repetition word.
  auto e_enc = rng::substream(cfg.seed, t, tag(kTagEncode, hypothesis));
  const double coin = rng::canonical(e_enc);
  const auto type_x = EmpiricalType::of(x, cfg.source.x_size());
  const bool in_reject = coin < reject.acceptance_probability(type_x);
  rec.reject_branch = in_reject;

  const std::vector<int> phase1_word(static_cast<std::size_t>(q),
                                     in_reject ? cfg.w1 : cfg.w0);
  auto e_ch1 = rng::substream(cfg.seed, t, tag(kTagPhase1, hypothesis));
  const std::vector<int> v1 = pass_through(cfg.channel, phase1_word, e_ch1);
  auto e_np = rng::substream(cfg.seed, t, tag(kTagNp, hypothesis));
  rec.phase1_detect = phase1_detect(test, v1, e_np);

  if (rec.phase1_detect == 1) {
    rec.tau = q;
    rec.decision = Hypothesis::H1;
    return rec;
  }

  // Phase 2: source index -> channel codeword -> typicality decoding.
  const auto pick = pick_source_index(x, cu, joint_ux, cfg.mu, e_enc);
  const std::int64_t sent = pick ? *pick + 1 : 0;  // C_W reserves index 0
  rec.transmitted_index = sent;

  auto e_ch2 = rng::substream(cfg.seed, t, tag(kTagPhase2, hypothesis));
  const std::vector<int> w_word = cw.codeword(sent);
  const std::vector<int> v2 = pass_through(cfg.channel, w_word, e_ch2);

  const auto window =
      TypicalityWindow::of(flatten_joint(joint_wv), np, cfg.mu);
  const Index vs = joint_wv.y_size();
  std::vector<int> buf(static_cast<std::size_t>(np));
  VecI counts(joint_wv.x_size() * vs);
  std::int64_t unique_hit = -1;
  int hits = 0;
  for (std::int64_t m = 0; m < cw.size(); ++m) {
    cw.fill_codeword(m, buf);
    counts.setZero();
    for (int i = 0; i < np; ++i)
      ++counts(static_cast<Index>(buf[static_cast<std::size_t>(i)]) * vs +
               v2[static_cast<std::size_t>(i)]);
    if (window.contains(counts)) {
      ++hits;
      unique_hit = m;
      if (hits > 1) break;
    }
  }

  rec.tau = q + np;
  rec.decision = Hypothesis::H1;
  if (hits == 1 && unique_hit >= 1) {
    rec.decoded_index = unique_hit;
    const std::vector<int> u = cu.codeword(unique_hit - 1);
    if (is_jointly_typical(u, y, joint_uy, cfg.mu))
      rec.decision = Hypothesis::H0;
  }
  return rec;
}

DmcSimReport run_dmc_trials(const DmcSchemeConfig& cfg,
                            std::int64_t trials_per_hypothesis) {
  if (trials_per_hypothesis < 1)
    throw DomainError("run_dmc_trials: trials < 1");
  const int q = cfg.q();
  const int np = cfg.n_prime();

  const JointSource joint_ux = lift_ux(cfg.aux, cfg.source.x_marginal());
  const JointSource joint_uy = lift_uy(cfg.aux, cfg.source);
  const JointSource joint_wv = lift_wv(cfg.p_w, cfg.channel);
  const Pmf p_u = joint_ux.x_marginal();

  const Codebook cu = Codebook::of_rate(p_u, cfg.n, cfg.rate,
                                        rng::derive(cfg.seed, kStreamCuBook));
  const Codebook cw(cfg.p_w, np, cu.size() + 1,
                    rng::derive(cfg.seed, kStreamCwBook));
  const RejectSetSpec reject =
      cfg.epsilon_prime == 0.0
          ? RejectSetSpec::empty(cfg.source.x_size(), cfg.n)
          : build_reject_set(cfg.source.x_marginal(), cfg.n, cfg.mu,
                             cfg.epsilon_prime);
  const NpTest test =
      design_np_test(cfg.channel.output_law(cfg.w0),
                     cfg.channel.output_law(cfg.w1), q, cfg.mu / 3.0);

  DmcSimReport rep;
  rep.trials_h0 = rep.trials_h1 = trials_per_hypothesis;
  rep.q = q;
  rep.n_prime = np;

  std::int64_t h0_rejects = 0, h1_accepts = 0;
  std::int64_t fa_count = 0, miss_count = 0;
  long double tau_sum = 0.0L;

  for (std::int64_t t = 0; t < trials_per_hypothesis; ++t) {
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
      const DmcTrialRecord rec =
          run_dmc_trial(cfg, cu, cw, reject, test, joint_ux, joint_wv,
                        joint_uy, h, t);
      tau_sum += static_cast<long double>(rec.tau);
      if (rec.reject_branch) {
        ++rep.phase1_w1_trials;
        if (rec.phase1_detect == 0) ++miss_count;
      } else {
        ++rep.phase1_w0_trials;
        if (rec.phase1_detect == 1) ++fa_count;
      }
      if (h == Hypothesis::H0 && rec.decision == Hypothesis::H1) ++h0_rejects;
      if (h == Hypothesis::H1 && rec.decision == Hypothesis::H0) ++h1_accepts;
      if (rec.tau == q + np) {
        if (h == Hypothesis::H0) ++rep.continue_h0; else ++rep.continue_h1;
      }
    }
  }

  const double nt = static_cast<double>(trials_per_hypothesis);
  rep.alpha_hat = static_cast<double>(h0_rejects) / nt;
  rep.beta_hat = static_cast<double>(h1_accepts) / nt;
  rep.alpha_ci = stats::wilson(h0_rejects, trials_per_hypothesis);
  rep.beta_ci = stats::wilson(h1_accepts, trials_per_hypothesis);
  rep.mean_tau_over_n =
      static_cast<double>(tau_sum / (2.0L * nt)) / static_cast<double>(cfg.n);
  rep.phase1_fa_hat =
      rep.phase1_w0_trials > 0
          ? static_cast<double>(fa_count) / static_cast<double>(rep.phase1_w0_trials)
          : 0.0;
  rep.phase1_miss_hat =
      rep.phase1_w1_trials > 0
          ? static_cast<double>(miss_count) /
                static_cast<double>(rep.phase1_w1_trials)
          : 0.0;

  const MissBounds mb = miss_probability_bounds(
      test, cfg.channel.output_law(cfg.w0), cfg.channel.output_law(cfg.w1),
      cfg.mu);
  const double s = reject.analytic_mass();
  rep.analytic_continue_prob =
      (1.0 - s) * (1.0 - cfg.mu / 3.0) + s * mb.exact;
  rep.analytic_mean_tau_over_n =
      (q + np * rep.analytic_continue_prob) / static_cast<double>(cfg.n);
  rep.empirical_exponent =
      stats::empirical_exponent(rep.beta_hat, trials_per_hypothesis, cfg.n);
  return rep;
}

}  // namespace hyptest
