#include "hyptest/noiseless.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hyptest/info.hpp"

namespace hyptest {

namespace {

constexpr std::uint64_t kStreamCodebook = 0xb00cULL;
constexpr double kMaxBits = 26.0;  // codebook guard: at most 2^26 codewords

// rng substream tags per (trial, purpose); H1 purposes are offset by 8.
enum : std::uint64_t { kTagSource = 1, kTagEncode = 2 };
constexpr std::uint64_t tag(std::uint64_t base, Hypothesis h) {
  return base + (h == Hypothesis::H1 ? 8 : 0);
}

Vec flatten_joint(const JointSource& j) {
  Vec flat(j.x_size() * j.y_size());
  for (Index a = 0; a < j.x_size(); ++a)
    for (Index b = 0; b < j.y_size(); ++b)
      flat(a * j.y_size() + b) = j.joint()(a, b);
  return flat;
}

}  // namespace

Message Message::index(std::int64_t m, int width) {
  if (m < 0 || width < 2 || width > 31 || (m >> width) != 0)
    throw MalformedMessage("Message::index: value does not fit the width");
  return {width, static_cast<std::uint32_t>(m)};
}

int index_width(std::int64_t codebook_size) {
  if (codebook_size < 1) throw DomainError("index_width: empty codebook");
  const auto w = std::bit_width(
      static_cast<std::uint64_t>(codebook_size - 1));
  return std::max(2, static_cast<int>(w));
}

// ---------------------------------------------------------------------------
// Codebook
// ---------------------------------------------------------------------------

Codebook::Codebook(Pmf symbols, int length, std::int64_t count,
                   std::uint64_t seed, std::size_t materialize_limit_bytes)
    : symbols_(std::move(symbols)), length_(length), count_(count), seed_(seed) {
  if (length_ < 1) throw DomainError("Codebook: length < 1");
  if (count_ < 1) throw DomainError("Codebook: empty book");
  if (count_ > (std::int64_t(1) << 26))
    throw ResourceLimit("Codebook: more than 2^26 codewords");
  if (symbols_.size() > 255) throw ResourceLimit("Codebook: alphabet > 255");
  const auto bytes = static_cast<std::size_t>(count_) *
                     static_cast<std::size_t>(length_);
  if (bytes <= materialize_limit_bytes) {
    store_.resize(bytes);
    std::vector<int> buf(static_cast<std::size_t>(length_));
    for (std::int64_t m = 0; m < count_; ++m) {
      auto e = rng::substream(seed_, kStreamCodebook,
                              static_cast<std::uint64_t>(m));
      for (int i = 0; i < length_; ++i) buf[static_cast<std::size_t>(i)] =
          rng::sample(symbols_, e);
      for (int i = 0; i < length_; ++i)
        store_[static_cast<std::size_t>(m) * length_ + i] =
            static_cast<std::uint8_t>(buf[static_cast<std::size_t>(i)]);
    }
  }
}

Codebook Codebook::of_rate(Pmf symbols, int n, double rate,
                           std::uint64_t seed,
                           std::size_t materialize_limit_bytes) {
  if (!(rate >= 0.0)) throw DomainError("Codebook: negative rate");
  const double bits = static_cast<double>(n) * rate;
  if (bits > kMaxBits + 1e-9)
    throw ResourceLimit("Codebook: n*rate exceeds the 26-bit guard");
  const auto count =
      static_cast<std::int64_t>(std::floor(std::exp2(bits) + 1e-9));
  return Codebook(std::move(symbols), n, std::max<std::int64_t>(count, 1),
                  seed, materialize_limit_bytes);
}

void Codebook::fill_codeword(std::int64_t m, std::span<int> out) const {
  if (m < 0 || m >= count_) throw DomainError("Codebook: index out of range");
  if (out.size() != static_cast<std::size_t>(length_))
    throw DomainError("Codebook: output span size");
  if (!store_.empty()) {
    const std::uint8_t* base = store_.data() +
                               static_cast<std::size_t>(m) * length_;
    for (int i = 0; i < length_; ++i) out[static_cast<std::size_t>(i)] = base[i];
    return;
  }
  auto e = rng::substream(seed_, kStreamCodebook, static_cast<std::uint64_t>(m));
  for (int i = 0; i < length_; ++i)
    out[static_cast<std::size_t>(i)] = rng::sample(symbols_, e);
}

std::vector<int> Codebook::codeword(std::int64_t m) const {
  std::vector<int> out(static_cast<std::size_t>(length_));
  fill_codeword(m, out);
  return out;
}

Codebook build_codebook(const Pmf& p_u, int n, double rate,
                        std::uint64_t seed) {
  return Codebook::of_rate(p_u, n, rate, seed);
}

// ---------------------------------------------------------------------------
// Reject set
// ---------------------------------------------------------------------------

namespace {

struct TypeClass {
  std::vector<int> counts;
  double per_seq_log2p = 0.0;  // log2 of one sequence's probability
  long double mass = 0.0L;     // class size * per-sequence probability
};

void enumerate_types(const Vec& probs, int n, const VecI& lo, const VecI& hi,
                     std::vector<int>& counts, Index sym, int remaining,
                     std::vector<TypeClass>& out) {
  const Index k = probs.size();
  if (sym == k - 1) {
    if (remaining < lo(sym) || remaining > hi(sym)) return;
    counts[static_cast<std::size_t>(sym)] = remaining;
    TypeClass tc;
    tc.counts = counts;
    double log2coef = std::lgamma(n + 1.0);
    double log2p = 0.0;
    for (Index i = 0; i < k; ++i) {
      const int c = counts[static_cast<std::size_t>(i)];
      log2coef -= std::lgamma(c + 1.0);
      if (c > 0) log2p += c * std::log2(probs(i));
    }
    log2coef /= std::log(2.0);
    tc.per_seq_log2p = log2p;
    tc.mass = std::exp2(static_cast<long double>(log2coef) + log2p);
    out.push_back(std::move(tc));
    return;
  }
  for (int c = lo(sym); c <= std::min<int>(hi(sym), remaining); ++c) {
    counts[static_cast<std::size_t>(sym)] = c;
    enumerate_types(probs, n, lo, hi, counts, sym + 1, remaining - c, out);
  }
}

}  // namespace

RejectSetSpec RejectSetSpec::build(const Pmf& p_x, int n, double mu,
                                   double target_prob) {
  if (n < 1) throw DomainError("RejectSetSpec: n < 1");
  if (!(mu > 0.0)) throw DomainError("RejectSetSpec: mu must be positive");
  if (target_prob < 0.0 || target_prob > 1.0)
    throw DomainError("RejectSetSpec: target_prob outside [0,1]");

  const auto window = TypicalityWindow::of(p_x.probs(), n, mu / 2.0);
  std::vector<TypeClass> classes;
  std::vector<int> scratch(static_cast<std::size_t>(p_x.size()));
  enumerate_types(p_x.probs(), n, window.lo, window.hi, scratch, 0, n, classes);

  long double total = 0.0L;
  for (const auto& tc : classes) total += tc.mass;

  RejectSetSpec spec;
  spec.n_ = n;
  spec.target_ = target_prob;
  spec.typical_mass_ = static_cast<double>(total);

  if (target_prob > static_cast<double>(total) + 1e-12)
    throw InfeasibleTarget(
        "RejectSetSpec: typical set holds only " +
            std::to_string(static_cast<double>(total)) + " of the requested " +
            std::to_string(target_prob),
        static_cast<double>(total));

  // Highest per-sequence probability first; ties broken lexicographically so
  // the construction is deterministic.
  std::sort(classes.begin(), classes.end(),
            [](const TypeClass& a, const TypeClass& b) {
              if (a.per_seq_log2p != b.per_seq_log2p)
                return a.per_seq_log2p > b.per_seq_log2p;
              return a.counts < b.counts;
            });

  long double acc = 0.0L;
  for (const auto& tc : classes) {
    if (tc.mass <= 0.0L) continue;
    const long double want = static_cast<long double>(target_prob) - acc;
    if (want <= 0.0L) break;
    if (tc.mass <= want) {
      spec.accept_[tc.counts] = 1.0;
      acc += tc.mass;
    } else {
      const double g = static_cast<double>(want / tc.mass);
      spec.gamma_ = g;
      spec.accept_[tc.counts] = g;
      acc += tc.mass * static_cast<long double>(g);
      break;
    }
  }
  spec.analytic_mass_ = static_cast<double>(acc);
  return spec;
}

RejectSetSpec RejectSetSpec::empty(Index /*alphabet_size*/, int n) {
  RejectSetSpec spec;
  spec.n_ = n;
  return spec;
}

double RejectSetSpec::acceptance_probability(const EmpiricalType& type) const {
  if (n_ != 0 && type.n != n_)
    throw DomainError("RejectSetSpec: sequence length mismatch");
  std::vector<int> key(type.counts.data(), type.counts.data() + type.counts.size());
  const auto it = accept_.find(key);
  return it == accept_.end() ? 0.0 : it->second;
}

RejectSetSpec build_reject_set(const Pmf& p_x, int n, double mu,
                               double target_prob) {
  return RejectSetSpec::build(p_x, n, mu, target_prob);
}

// ---------------------------------------------------------------------------
// Encoder / decoder
// ---------------------------------------------------------------------------

std::optional<std::int64_t> pick_source_index(std::span<const int> x,
                                              const Codebook& cb,
                                              const JointSource& joint_ux,
                                              double mu, rng::Engine& e) {
  const int n = cb.length();
  if (x.size() != static_cast<std::size_t>(n))
    throw DomainError("pick_source_index: sequence length");
  const Index us = joint_ux.x_size();  // rows of joint_ux index U
  const Index xs = joint_ux.y_size();
  const auto window =
      TypicalityWindow::of(flatten_joint(joint_ux), n, mu / 2.0);

  std::vector<std::int64_t> hits;
  std::vector<int> buf(static_cast<std::size_t>(n));
  VecI counts(us * xs);
  for (std::int64_t m = 0; m < cb.size(); ++m) {
    cb.fill_codeword(m, buf);
    counts.setZero();
    for (int i = 0; i < n; ++i)
      ++counts(static_cast<Index>(buf[static_cast<std::size_t>(i)]) * xs +
               x[static_cast<std::size_t>(i)]);
    if (window.contains(counts)) hits.push_back(m);
  }
  if (hits.empty()) return std::nullopt;
  const auto j = std::min<std::size_t>(
      static_cast<std::size_t>(rng::canonical(e) * hits.size()),
      hits.size() - 1);
  return hits[j];
}

EncodeOutcome encode_detail(std::span<const int> x, const Codebook& cb,
                            const RejectSetSpec& reject,
                            const JointSource& joint_ux, double mu,
                            rng::Engine& e) {
  const double coin = rng::canonical(e);  // always drawn; keeps streams aligned
  const auto type = EmpiricalType::of(x, joint_ux.y_size());
  if (coin < reject.acceptance_probability(type))
    return {Message::reject(), EncodeBranch::kRejectSet, std::nullopt};
  const auto pick = pick_source_index(x, cb, joint_ux, mu, e);
  if (!pick) return {Message::reject(), EncodeBranch::kCoverMiss, std::nullopt};
  return {Message::index(*pick, index_width(cb.size())), EncodeBranch::kIndex,
          pick};
}

Message encode(std::span<const int> x, const Codebook& cb,
               const RejectSetSpec& reject, const JointSource& joint_ux,
               double mu, rng::Engine& e) {
  return encode_detail(x, cb, reject, joint_ux, mu, e).message;
}

Hypothesis decode(const Message& msg, std::span<const int> y,
                  const Codebook& cb, const JointSource& joint_uy, double mu) {
  if (y.size() != static_cast<std::size_t>(cb.length()))
    throw DomainError("decode: sequence length");
  if (msg.length == 1) {
    if (msg.bits != 0) throw MalformedMessage("decode: length-1 message != [0]");
    return Hypothesis::H1;
  }
  if (msg.length != index_width(cb.size()))
    throw MalformedMessage("decode: unexpected message length");
  const auto m = static_cast<std::int64_t>(msg.bits);
  if (m >= cb.size()) throw MalformedMessage("decode: index out of range");

  const std::vector<int> u = cb.codeword(m);
  const Index ys = joint_uy.y_size();
  const auto window =
      TypicalityWindow::of(flatten_joint(joint_uy), cb.length(), mu);
  VecI counts = VecI::Zero(joint_uy.x_size() * ys);
  for (int i = 0; i < cb.length(); ++i)
    ++counts(static_cast<Index>(u[static_cast<std::size_t>(i)]) * ys +
             y[static_cast<std::size_t>(i)]);
  return window.contains(counts) ? Hypothesis::H0 : Hypothesis::H1;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace {

void validate_scheme_params(int n, double mu, double epsilon) {
  if (n < 1) throw DomainError("NoiselessConfig: n < 1");
  if (!(mu > 0.0 && mu < epsilon && epsilon < 1.0))
    throw DomainError("NoiselessConfig: need 0 < mu < epsilon < 1");
}

}  // namespace

NoiselessConfig NoiselessConfig::derive_rate(JointSource source, AuxChannel aux,
                                             int n, double mu, double epsilon,
                                             std::uint64_t seed) {
  validate_scheme_params(n, mu, epsilon);
  const double iux = mutual_information(lift_ux(aux, source.x_marginal()));
  const double rate = (1.0 - epsilon + mu) * iux + mu;
  return with_rate(std::move(source), std::move(aux), n, mu, epsilon, rate,
                   seed);
}

NoiselessConfig NoiselessConfig::with_rate(JointSource source, AuxChannel aux,
                                           int n, double mu, double epsilon,
                                           double rate, std::uint64_t seed) {
  validate_scheme_params(n, mu, epsilon);
  if (aux.x_size() != source.x_size())
    throw DomainError("NoiselessConfig: aux/source alphabet mismatch");
  NoiselessConfig cfg{std::move(source), std::move(aux), n, mu, epsilon, rate,
                      seed};
  return cfg;
}

namespace {

struct TrialContext {
  Codebook codebook;
  RejectSetSpec reject;
  JointSource joint_ux;
  JointSource joint_uy;
  Pmf flat_h0;  // flattened P_XY for H0 sampling
};

TrialContext make_context(const NoiselessConfig& cfg, bool with_reject_set) {
  const Pmf& px = cfg.source.x_marginal();
  JointSource jux = lift_ux(cfg.aux, px);
  JointSource juy = lift_uy(cfg.aux, cfg.source);
  Pmf pu = jux.x_marginal();
  Codebook cb = Codebook::of_rate(pu, cfg.n, cfg.rate,
                                  rng::derive(cfg.seed, kStreamCodebook));
  RejectSetSpec rs =
      with_reject_set
          ? build_reject_set(px, cfg.n, cfg.mu, cfg.epsilon - cfg.mu)
          : RejectSetSpec::empty(px.size(), cfg.n);
  Pmf flat = Pmf(flatten_joint(cfg.source));
  return {std::move(cb), std::move(rs), std::move(jux), std::move(juy),
          std::move(flat)};
}

struct DrawnPair {
  std::vector<int> x, y;
};

DrawnPair draw_pair(const NoiselessConfig& cfg, const TrialContext& ctx,
                    Hypothesis h, std::int64_t t) {
  auto e = rng::substream(cfg.seed, static_cast<std::uint64_t>(t),
                          tag(kTagSource, h));
  DrawnPair p;
  const auto n = static_cast<std::size_t>(cfg.n);
  p.x.resize(n);
  p.y.resize(n);
  if (h == Hypothesis::H0) {
    const Index ys = cfg.source.y_size();
    for (std::size_t i = 0; i < n; ++i) {
      const int pair = rng::sample(ctx.flat_h0, e);
      p.x[i] = pair / static_cast<int>(ys);
      p.y[i] = pair % static_cast<int>(ys);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      p.x[i] = rng::sample(cfg.source.x_marginal(), e);
    for (std::size_t i = 0; i < n; ++i)
      p.y[i] = rng::sample(cfg.source.y_marginal(), e);
  }
  return p;
}

}  // namespace

SimReport run_trials(const NoiselessConfig& cfg,
                     std::int64_t trials_per_hypothesis) {
  if (trials_per_hypothesis < 1) throw DomainError("run_trials: trials < 1");
  const TrialContext ctx = make_context(cfg, true);

  SimReport rep;
  rep.trials_h0 = rep.trials_h1 = trials_per_hypothesis;
  rep.index_message_width = index_width(ctx.codebook.size());
  std::int64_t h1_accepts = 0, h0_rejects = 0, total_len = 0;

  for (std::int64_t t = 0; t < trials_per_hypothesis; ++t) {
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
      const DrawnPair pair = draw_pair(cfg, ctx, h, t);
      auto enc = rng::substream(cfg.seed, static_cast<std::uint64_t>(t),
                                tag(kTagEncode, h));
      const EncodeOutcome out = encode_detail(pair.x, ctx.codebook, ctx.reject,
                                              ctx.joint_ux, cfg.mu, enc);
      total_len += out.message.length;
      if (out.message.is_reject())
        ++rep.reject_messages;
      else
        ++rep.index_messages;
      const Hypothesis verdict =
          decode(out.message, pair.y, ctx.codebook, ctx.joint_uy, cfg.mu);
      if (h == Hypothesis::H0) {
        if (verdict == Hypothesis::H1) {
          ++h0_rejects;
          switch (out.branch) {
            case EncodeBranch::kRejectSet: ++rep.h0_reject_set; break;
            case EncodeBranch::kCoverMiss: ++rep.h0_cover_miss; break;
            case EncodeBranch::kIndex: ++rep.h0_decoder_miss; break;
          }
        }
      } else if (verdict == Hypothesis::H0) {
        ++h1_accepts;
      }
    }
  }

  const double nt = static_cast<double>(trials_per_hypothesis);
  rep.alpha_hat = static_cast<double>(h0_rejects) / nt;
  rep.beta_hat = static_cast<double>(h1_accepts) / nt;
  rep.alpha_ci = stats::wilson(h0_rejects, trials_per_hypothesis);
  rep.beta_ci = stats::wilson(h1_accepts, trials_per_hypothesis);
  rep.mean_len_bits = static_cast<double>(total_len) / (2.0 * nt);
  rep.mean_len_per_symbol = rep.mean_len_bits / static_cast<double>(cfg.n);
  rep.empirical_exponent =
      stats::empirical_exponent(rep.beta_hat, trials_per_hypothesis, cfg.n);
  return rep;
}

std::int64_t paired_reject_dominance_violations(
    const NoiselessConfig& cfg, std::int64_t trials_per_hypothesis) {
  if (trials_per_hypothesis < 1)
    throw DomainError("paired_reject_dominance_violations: trials < 1");
  const TrialContext with_ctx = make_context(cfg, true);
  const TrialContext without_ctx = make_context(cfg, false);

  std::int64_t violations = 0;
  for (std::int64_t t = 0; t < trials_per_hypothesis; ++t) {
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
      const DrawnPair pair = draw_pair(cfg, with_ctx, h, t);
      auto enc_a = rng::substream(cfg.seed, static_cast<std::uint64_t>(t),
                                  tag(kTagEncode, h));
      auto enc_b = enc_a;
      const Message with_msg = encode(pair.x, with_ctx.codebook,
                                      with_ctx.reject, with_ctx.joint_ux,
                                      cfg.mu, enc_a);
      const Message without_msg = encode(pair.x, without_ctx.codebook,
                                         without_ctx.reject,
                                         without_ctx.joint_ux, cfg.mu, enc_b);
      const Hypothesis with_h = decode(with_msg, pair.y, with_ctx.codebook,
                                       with_ctx.joint_uy, cfg.mu);
      const Hypothesis without_h =
          decode(without_msg, pair.y, without_ctx.codebook,
                 without_ctx.joint_uy, cfg.mu);
      if (with_h == Hypothesis::H0 && without_h == Hypothesis::H1) ++violations;
    }
  }
  return violations;
}

}  // namespace hyptest
