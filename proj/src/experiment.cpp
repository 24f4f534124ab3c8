#include "hyptest/experiment.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hyptest/dmc_scheme.hpp"
#include "hyptest/info.hpp"
#include "hyptest/noiseless.hpp"
#include "hyptest/solver.hpp"
#include "hyptest/verify.hpp"

namespace hyptest {

using json = nlohmann::ordered_json;

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kExponent: return "exponent";
    case Mode::kExponentDmc: return "exponent-dmc";
    case Mode::kSimulateLink: return "simulate-link";
    case Mode::kSimulateDmc: return "simulate-dmc";
    case Mode::kSweep: return "sweep";
    case Mode::kVerify: return "verify";
  }
  throw ConfigError("mode_name: unreachable");
}

Mode mode_from_name(const std::string& name) {
  if (name == "exponent") return Mode::kExponent;
  if (name == "exponent-dmc") return Mode::kExponentDmc;
  if (name == "simulate-link") return Mode::kSimulateLink;
  if (name == "simulate-dmc") return Mode::kSimulateDmc;
  if (name == "sweep") return Mode::kSweep;
  if (name == "verify") return Mode::kVerify;
  throw ConfigError("unknown mode '" + name + "'");
}

JointSource SourceSpec::build() const {
  if (kind == Kind::kDsbs) return JointSource::dsbs(alpha);
  return JointSource(joint);
}

AuxChannel AuxSpec::build(Index x_size) const {
  switch (kind) {
    case Kind::kBsc:
      if (x_size != 2)
        throw ConfigError("aux type 'bsc' needs a binary source alphabet");
      return AuxChannel::bsc(delta);
    case Kind::kConstant:
      return AuxChannel::constant(x_size, u_size > 0 ? u_size : x_size + 1);
    case Kind::kMatrix: {
      AuxChannel a{rows};
      if (a.x_size() != x_size)
        throw ConfigError("aux matrix rows do not match the source alphabet");
      return a;
    }
  }
  throw ConfigError("AuxSpec: unreachable");
}

Dmc DmcSpec::build() const {
  switch (kind) {
    case Kind::kBsc: return Dmc::bsc(param);
    case Kind::kBec: return Dmc::bec(param);
    case Kind::kMatrix: return Dmc(rows);
  }
  throw ConfigError("DmcSpec: unreachable");
}

// ---------------------------------------------------------------------------
// Strict JSON helpers
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown field '" + item.key() + "' in " + ctx);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& ctx) {
  if (!obj.contains(key))
    throw ConfigError("missing field '" + key + "' in " + ctx);
  return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number())
    throw ConfigError("field '" + field + "' must be a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer())
    throw ConfigError("field '" + field + "' must be an integer");
  return v.get<std::int64_t>();
}

Mat as_matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty())
    throw ConfigError("field '" + field + "' must be a nonempty array of rows");
  const auto rows = static_cast<Index>(v.size());
  Index cols = -1;
  Mat m;
  for (Index r = 0; r < rows; ++r) {
    const json& row = v.at(static_cast<std::size_t>(r));
    if (!row.is_array() || row.empty())
      throw ConfigError("field '" + field + "': row " + std::to_string(r) +
                        " must be a nonempty array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ConfigError("field '" + field + "': ragged rows");
    }
    for (Index c = 0; c < cols; ++c)
      m(r, c) = as_number(row.at(static_cast<std::size_t>(c)),
                          field + "[" + std::to_string(r) + "]");
  }
  return m;
}

SourceSpec parse_source(const json& v) {
  if (!v.is_object()) throw ConfigError("field 'source' must be an object");
  const std::string type = require(v, "type", "source").get<std::string>();
  SourceSpec s;
  if (type == "dsbs") {
    check_keys(v, {"type", "alpha"}, "source");
    s.kind = SourceSpec::Kind::kDsbs;
    s.alpha = as_number(require(v, "alpha", "source"), "source.alpha");
  } else if (type == "joint") {
    check_keys(v, {"type", "matrix"}, "source");
    s.kind = SourceSpec::Kind::kJoint;
    s.joint = as_matrix(require(v, "matrix", "source"), "source.matrix");
  } else {
    throw ConfigError("source.type must be 'dsbs' or 'joint'");
  }
  return s;
}

AuxSpec parse_aux(const json& v) {
  if (!v.is_object()) throw ConfigError("field 'aux' must be an object");
  const std::string type = require(v, "type", "aux").get<std::string>();
  AuxSpec a;
  if (type == "bsc") {
    check_keys(v, {"type", "delta"}, "aux");
    a.kind = AuxSpec::Kind::kBsc;
    a.delta = as_number(require(v, "delta", "aux"), "aux.delta");
  } else if (type == "constant") {
    check_keys(v, {"type", "u_size"}, "aux");
    a.kind = AuxSpec::Kind::kConstant;
    if (v.contains("u_size"))
      a.u_size = static_cast<Index>(as_integer(v.at("u_size"), "aux.u_size"));
  } else if (type == "matrix") {
    check_keys(v, {"type", "rows"}, "aux");
    a.kind = AuxSpec::Kind::kMatrix;
    a.rows = as_matrix(require(v, "rows", "aux"), "aux.rows");
  } else {
    throw ConfigError("aux.type must be 'bsc', 'constant' or 'matrix'");
  }
  return a;
}

DmcSpec parse_dmc(const json& v) {
  if (!v.is_object()) throw ConfigError("field 'dmc' must be an object");
  const std::string type = require(v, "type", "dmc").get<std::string>();
  DmcSpec d;
  if (type == "bsc") {
    check_keys(v, {"type", "p"}, "dmc");
    d.kind = DmcSpec::Kind::kBsc;
    d.param = as_number(require(v, "p", "dmc"), "dmc.p");
  } else if (type == "bec") {
    check_keys(v, {"type", "e"}, "dmc");
    d.kind = DmcSpec::Kind::kBec;
    d.param = as_number(require(v, "e", "dmc"), "dmc.e");
  } else if (type == "matrix") {
    check_keys(v, {"type", "rows"}, "dmc");
    d.kind = DmcSpec::Kind::kMatrix;
    d.rows = as_matrix(require(v, "rows", "dmc"), "dmc.rows");
  } else {
    throw ConfigError("dmc.type must be 'bsc', 'bec' or 'matrix'");
  }
  return d;
}

SweepSpec parse_sweep(const json& v) {
  if (!v.is_object()) throw ConfigError("field 'sweep' must be an object");
  check_keys(v, {"parameter", "start", "stop", "steps"}, "sweep");
  SweepSpec s;
  s.parameter = require(v, "parameter", "sweep").get<std::string>();
  s.start = as_number(require(v, "start", "sweep"), "sweep.start");
  s.stop = as_number(require(v, "stop", "sweep"), "sweep.stop");
  s.steps = static_cast<int>(as_integer(require(v, "steps", "sweep"),
                                        "sweep.steps"));
  if (s.steps < 2) throw ConfigError("sweep.steps must be at least 2");
  if (s.start > s.stop) throw ConfigError("sweep.start exceeds sweep.stop");
  const std::set<std::string> params{"alpha", "rho", "R", "epsilon", "kappa"};
  if (!params.count(s.parameter))
    throw ConfigError("sweep.parameter must be one of alpha, rho, R, epsilon, "
                      "kappa");
  if (s.parameter == "alpha" && (s.start < 0.0 || s.stop > 0.5))
    throw ConfigError("sweep over alpha must stay inside [0, 0.5]");
  if (s.parameter == "rho" && (s.start < 0.0 || s.stop > 1.0))
    throw ConfigError("sweep over rho must stay inside [0, 1]");
  if (s.parameter == "R" && s.start < 0.0)
    throw ConfigError("sweep over R must start at 0 or above");
  if (s.parameter == "epsilon" && (s.start < 0.0 || s.stop >= 1.0))
    throw ConfigError("sweep over epsilon must stay inside [0, 1)");
  if (s.parameter == "kappa" && s.start <= 0.0)
    throw ConfigError("sweep over kappa must be positive");
  return s;
}

struct FieldRule {
  std::set<std::string> required;
  std::set<std::string> optional;
};

FieldRule rule_for(Mode m, const std::string& sweep_param) {
  const std::set<std::string> common{"mode", "seed", "trials", "out"};
  FieldRule r;
  r.optional = common;
  switch (m) {
    case Mode::kExponent:
      r.required = {"source", "rate", "epsilon"};
      r.optional.insert("u_cardinality");
      break;
    case Mode::kExponentDmc:
      r.required = {"source", "dmc", "kappa", "epsilon"};
      r.optional.insert("u_cardinality");
      break;
    case Mode::kSimulateLink:
      r.required = {"source", "aux", "n", "mu", "epsilon"};
      r.optional.insert("rate");
      break;
    case Mode::kSimulateDmc:
      r.required = {"source", "aux", "dmc", "n", "kappa", "epsilon",
                    "epsilon_prime"};
      r.optional.insert("q_exponent");
      r.optional.insert("w0");
      r.optional.insert("w1");
      break;
    case Mode::kSweep:
      r.required = {"sweep"};
      if (sweep_param == "alpha" || sweep_param == "rho") {
        r.required.insert("rate");
        r.required.insert("epsilon");
      } else if (sweep_param == "R") {
        r.required.insert("source");
        r.required.insert("epsilon");
        r.optional.insert("u_cardinality");
      } else if (sweep_param == "epsilon") {
        r.required.insert("source");
        r.required.insert("rate");
        r.optional.insert("u_cardinality");
      } else if (sweep_param == "kappa") {
        r.required.insert("source");
        r.required.insert("dmc");
        r.required.insert("epsilon");
        r.optional.insert("u_cardinality");
      }
      break;
    case Mode::kVerify:
      break;
  }
  return r;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  cfg.mode = mode_from_name(
      require(j, "mode", "config").get<std::string>());

  std::string sweep_param;
  if (cfg.mode == Mode::kSweep && j.contains("sweep") &&
      j.at("sweep").is_object() && j.at("sweep").contains("parameter") &&
      j.at("sweep").at("parameter").is_string())
    sweep_param = j.at("sweep").at("parameter").get<std::string>();

  const FieldRule rule = rule_for(cfg.mode, sweep_param);
  std::set<std::string> allowed = rule.optional;
  allowed.insert(rule.required.begin(), rule.required.end());
  check_keys(j, allowed, "config");
  for (const auto& k : rule.required)
    if (!j.contains(k))
      throw ConfigError("mode '" + mode_name(cfg.mode) +
                        "' requires field '" + k + "'");

  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(as_integer(j.at("seed"), "seed"));
  if (j.contains("trials")) {
    cfg.trials = as_integer(j.at("trials"), "trials");
    if (cfg.trials < 1) throw ConfigError("field 'trials' must be positive");
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("source")) cfg.source = parse_source(j.at("source"));
  if (j.contains("aux")) cfg.aux = parse_aux(j.at("aux"));
  if (j.contains("dmc")) cfg.dmc = parse_dmc(j.at("dmc"));
  if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
  if (j.contains("rate")) cfg.rate = as_number(j.at("rate"), "rate");
  if (j.contains("epsilon"))
    cfg.epsilon = as_number(j.at("epsilon"), "epsilon");
  if (j.contains("kappa")) cfg.kappa = as_number(j.at("kappa"), "kappa");
  if (j.contains("mu")) cfg.mu = as_number(j.at("mu"), "mu");
  if (j.contains("epsilon_prime"))
    cfg.epsilon_prime = as_number(j.at("epsilon_prime"), "epsilon_prime");
  if (j.contains("q_exponent"))
    cfg.q_exponent = as_number(j.at("q_exponent"), "q_exponent");
  if (j.contains("n"))
    cfg.n = static_cast<int>(as_integer(j.at("n"), "n"));
  if (j.contains("u_cardinality"))
    cfg.u_cardinality = static_cast<Index>(
        as_integer(j.at("u_cardinality"), "u_cardinality"));
  if (j.contains("w0")) cfg.w0 = static_cast<int>(as_integer(j.at("w0"), "w0"));
  if (j.contains("w1")) cfg.w1 = static_cast<int>(as_integer(j.at("w1"), "w1"));
  return cfg;
}

namespace {

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string dump_config_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = mode_name(cfg.mode);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  if (!cfg.out.empty()) j["out"] = cfg.out;
  if (cfg.source) {
    json s;
    if (cfg.source->kind == SourceSpec::Kind::kDsbs) {
      s["type"] = "dsbs";
      s["alpha"] = cfg.source->alpha;
    } else {
      s["type"] = "joint";
      s["matrix"] = matrix_to_json(cfg.source->joint);
    }
    j["source"] = std::move(s);
  }
  if (cfg.aux) {
    json a;
    switch (cfg.aux->kind) {
      case AuxSpec::Kind::kBsc:
        a["type"] = "bsc";
        a["delta"] = cfg.aux->delta;
        break;
      case AuxSpec::Kind::kConstant:
        a["type"] = "constant";
        if (cfg.aux->u_size > 0) a["u_size"] = cfg.aux->u_size;
        break;
      case AuxSpec::Kind::kMatrix:
        a["type"] = "matrix";
        a["rows"] = matrix_to_json(cfg.aux->rows);
        break;
    }
    j["aux"] = std::move(a);
  }
  if (cfg.dmc) {
    json d;
    switch (cfg.dmc->kind) {
      case DmcSpec::Kind::kBsc:
        d["type"] = "bsc";
        d["p"] = cfg.dmc->param;
        break;
      case DmcSpec::Kind::kBec:
        d["type"] = "bec";
        d["e"] = cfg.dmc->param;
        break;
      case DmcSpec::Kind::kMatrix:
        d["type"] = "matrix";
        d["rows"] = matrix_to_json(cfg.dmc->rows);
        break;
    }
    j["dmc"] = std::move(d);
  }
  if (cfg.sweep) {
    json s;
    s["parameter"] = cfg.sweep->parameter;
    s["start"] = cfg.sweep->start;
    s["stop"] = cfg.sweep->stop;
    s["steps"] = cfg.sweep->steps;
    j["sweep"] = std::move(s);
  }
  if (cfg.rate) j["rate"] = *cfg.rate;
  if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
  if (cfg.kappa) j["kappa"] = *cfg.kappa;
  if (cfg.mu) j["mu"] = *cfg.mu;
  if (cfg.epsilon_prime) j["epsilon_prime"] = *cfg.epsilon_prime;
  if (cfg.q_exponent) j["q_exponent"] = *cfg.q_exponent;
  if (cfg.n) j["n"] = *cfg.n;
  if (cfg.u_cardinality) j["u_cardinality"] = *cfg.u_cardinality;
  if (cfg.w0) j["w0"] = *cfg.w0;
  if (cfg.w1) j["w1"] = *cfg.w1;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep mode needs a 'sweep' object");
  const SweepSpec& sw = *cfg.sweep;
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(sw.steps));

  std::optional<JointSource> src;
  if (cfg.source) src = cfg.source->build();
  std::optional<Dmc> channel;
  if (cfg.dmc) {
    Dmc built = cfg.dmc->build();
    channel = built.with_capacity(capacity(built));
  }
  const Index ucard = cfg.u_cardinality.value_or(0);

  for (int i = 0; i < sw.steps; ++i) {
    const double v = i == sw.steps - 1
                         ? sw.stop
                         : sw.start + (sw.stop - sw.start) *
                                          static_cast<double>(i) /
                                          static_cast<double>(sw.steps - 1);
    SweepRow row;
    row.param = sw.parameter;
    row.value = v;
    if (sw.parameter == "alpha") {
      row.theta_vl = binary_example_exponent(v, *cfg.rate, *cfg.epsilon);
      row.theta_fl = binary_example_exponent(v, *cfg.rate, 0.0);
      row.theta_source = "closed_form";
    } else if (sw.parameter == "rho") {
      row.theta_vl = gaussian_example_exponent(v, *cfg.rate, *cfg.epsilon);
      row.theta_fl = gaussian_example_exponent(v, *cfg.rate, 0.0);
      row.theta_source = "closed_form";
    } else if (sw.parameter == "R") {
      row.theta_vl =
          solve_vl_exponent(ExponentQuery(*src, v, *cfg.epsilon, ucard)).theta;
      row.theta_fl = solve_fl_exponent(*src, v, ucard).theta;
      row.theta_source = "optimizer";
    } else if (sw.parameter == "epsilon") {
      row.theta_vl =
          solve_vl_exponent(ExponentQuery(*src, *cfg.rate, v, ucard)).theta;
      row.theta_fl = solve_fl_exponent(*src, *cfg.rate, ucard).theta;
      row.theta_source = "optimizer";
    } else if (sw.parameter == "kappa") {
      row.theta_vl =
          solve_dmc_exponent(*src, *channel, v, *cfg.epsilon, ucard).theta;
      row.theta_fl = solve_dmc_exponent(*src, *channel, v, 0.0, ucard).theta;
      row.theta_source = "optimizer";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  if (rows.empty()) throw IoError("emit_sweep_csv: no rows");
  os << "param,value,theta_vl,theta_fl,theta_source\n";
  for (const auto& r : rows)
    os << r.param << ',' << format_double(r.value) << ','
       << format_double(r.theta_vl) << ',' << format_double(r.theta_fl) << ','
       << r.theta_source << '\n';
  if (!os) throw IoError("emit_sweep_csv: write failed");
}

namespace {

void emit_exponent_csv(const ExponentResult& res, std::ostream& os,
                       const std::optional<double>& cap,
                       const std::optional<double>& budget) {
  os << "theta,iux,iuy,constraint_slack";
  if (cap) os << ",capacity,rate_budget";
  os << '\n';
  os << format_double(res.theta) << ',' << format_double(res.iux) << ','
     << format_double(res.iuy) << ',' << format_double(res.constraint_slack);
  if (cap) os << ',' << format_double(*cap) << ',' << format_double(*budget);
  os << '\n';
}

void emit_link_csv(const NoiselessConfig& scheme, const SimReport& rep,
                   std::ostream& os) {
  os << "n,rate,mu,epsilon,trials_h0,trials_h1,alpha_hat,alpha_lo,alpha_hi,"
        "beta_hat,beta_lo,beta_hi,mean_len_per_symbol,empirical_exponent\n";
  os << scheme.n << ',' << format_double(scheme.rate) << ','
     << format_double(scheme.mu) << ',' << format_double(scheme.epsilon) << ','
     << rep.trials_h0 << ',' << rep.trials_h1 << ','
     << format_double(rep.alpha_hat) << ',' << format_double(rep.alpha_ci.lo)
     << ',' << format_double(rep.alpha_ci.hi) << ','
     << format_double(rep.beta_hat) << ',' << format_double(rep.beta_ci.lo)
     << ',' << format_double(rep.beta_ci.hi) << ','
     << format_double(rep.mean_len_per_symbol) << ','
     << format_double(rep.empirical_exponent) << '\n';
}

void emit_dmc_csv(const DmcSchemeConfig& scheme, const DmcSimReport& rep,
                  std::ostream& os) {
  os << "n,q,n_prime,rate,kappa,epsilon,epsilon_prime,trials_h0,trials_h1,"
        "alpha_hat,alpha_lo,alpha_hi,beta_hat,beta_lo,beta_hi,"
        "mean_tau_over_n,analytic_mean_tau_over_n,phase1_fa_hat,"
        "phase1_fa_target,phase1_miss_hat,empirical_exponent\n";
  os << scheme.n << ',' << rep.q << ',' << rep.n_prime << ','
     << format_double(scheme.rate) << ',' << format_double(scheme.kappa) << ','
     << format_double(scheme.epsilon) << ','
     << format_double(scheme.epsilon_prime) << ',' << rep.trials_h0 << ','
     << rep.trials_h1 << ',' << format_double(rep.alpha_hat) << ','
     << format_double(rep.alpha_ci.lo) << ',' << format_double(rep.alpha_ci.hi)
     << ',' << format_double(rep.beta_hat) << ','
     << format_double(rep.beta_ci.lo) << ',' << format_double(rep.beta_ci.hi)
     << ',' << format_double(rep.mean_tau_over_n) << ','
     << format_double(rep.analytic_mean_tau_over_n) << ','
     << format_double(rep.phase1_fa_hat) << ','
     << format_double(scheme.mu / 3.0) << ','
     << format_double(rep.phase1_miss_hat) << ','
     << format_double(rep.empirical_exponent) << '\n';
}

struct VerifyOutcome {
  std::string check;
  std::int64_t cases = 0;
  std::int64_t failures = 0;
};

std::vector<VerifyOutcome> run_verify(std::uint64_t seed,
                                      std::int64_t trials) {
  std::vector<VerifyOutcome> out;

  // Randomized change-of-measure inequality over alphabets up to 8.
  VerifyOutcome com{"change_of_measure", trials, 0};
  auto e = rng::engine(rng::derive(seed, 0x434f4dULL));
  for (std::int64_t t = 0; t < trials; ++t) {
    const Index k = 2 + static_cast<Index>(rng::canonical(e) * 7.0);
    Vec p(k), q(k);
    for (Index i = 0; i < k; ++i) {
      p(i) = -std::log(1.0 - rng::canonical(e));
      q(i) = -std::log(1.0 - rng::canonical(e));
    }
    MeasureTriple triple{Pmf(p / p.sum()), Pmf(q / q.sum()), {}};
    for (Index i = 0; i < k; ++i)
      if (rng::canonical(e) < 0.5)
        triple.event_set.push_back(static_cast<int>(i));
    if (triple.event_set.empty())
      triple.event_set.push_back(static_cast<int>(k - 1));
    if (!check_change_of_measure(triple).holds) ++com.failures;
  }
  out.push_back(com);

  // The ascent solver must dominate the exhaustive lattice bound.
  VerifyOutcome grid{"solver_vs_grid", 0, 0};
  auto ge = rng::engine(rng::derive(seed, 0x475249ULL));
  std::vector<std::tuple<JointSource, double, double, int>> instances;
  instances.emplace_back(JointSource::dsbs(0.1), 0.5, 0.1, 11);
  instances.emplace_back(JointSource::dsbs(0.3), 0.3, 0.0, 11);
  for (int i = 0; i < 2; ++i) {
    Mat m(2, 2);
    for (Index r = 0; r < 2; ++r)
      for (Index c = 0; c < 2; ++c) m(r, c) = 0.05 + rng::canonical(ge);
    m /= m.sum();
    instances.emplace_back(JointSource(m), 0.2 + 0.3 * i, 0.15, 9);
  }
  for (const auto& [src, rate, eps, steps] : instances) {
    ++grid.cases;
    const auto bound = brute_force_exponent(src, rate, eps, steps);
    const auto solved = solve_vl_exponent(ExponentQuery(src, rate, eps));
    if (solved.theta < bound.theta - 1e-9) ++grid.failures;
  }
  out.push_back(grid);
  return out;
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& fallback_out,
        std::ostream& log) {
  std::ofstream file;
  std::ostream* os = &fallback_out;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) throw IoError("cannot open output file '" + cfg.out + "'");
    os = &file;
  }

  switch (cfg.mode) {
    case Mode::kExponent: {
      const JointSource src = cfg.source->build();
      const ExponentResult res = solve_vl_exponent(
          ExponentQuery(src, *cfg.rate, *cfg.epsilon,
                        cfg.u_cardinality.value_or(0)));
      emit_exponent_csv(res, *os, std::nullopt, std::nullopt);
      log << "theta = " << res.theta << " bits  (I(U;X) = " << res.iux
          << ", I(U;Y) = " << res.iuy << ", slack = " << res.constraint_slack
          << ")\n";
      break;
    }
    case Mode::kExponentDmc: {
      const JointSource src = cfg.source->build();
      const Dmc channel = cfg.dmc->build();
      const double cap = capacity(channel);
      const ExponentResult res = solve_dmc_exponent(
          src, channel.with_capacity(cap), *cfg.kappa, *cfg.epsilon,
          cfg.u_cardinality.value_or(0));
      emit_exponent_csv(res, *os, cap, *cfg.kappa * cap);
      log << "theta = " << res.theta << " bits over a channel of capacity "
          << cap << " (budget " << *cfg.kappa * cap << " bits/symbol)\n";
      break;
    }
    case Mode::kSimulateLink: {
      const JointSource src = cfg.source->build();
      const AuxChannel aux = cfg.aux->build(src.x_size());
      const NoiselessConfig scheme =
          cfg.rate ? NoiselessConfig::with_rate(src, aux, *cfg.n, *cfg.mu,
                                                *cfg.epsilon, *cfg.rate,
                                                cfg.seed)
                   : NoiselessConfig::derive_rate(src, aux, *cfg.n, *cfg.mu,
                                                  *cfg.epsilon, cfg.seed);
      log << "simulating " << cfg.trials << " trials per hypothesis at n = "
          << scheme.n << ", rate = " << scheme.rate << "\n";
      const SimReport rep = run_trials(scheme, cfg.trials);
      emit_link_csv(scheme, rep, *os);
      log << "alpha_hat = " << rep.alpha_hat << ", beta_hat = " << rep.beta_hat
          << ", mean len/symbol = " << rep.mean_len_per_symbol
          << ", exponent = " << rep.empirical_exponent << "\n";
      break;
    }
    case Mode::kSimulateDmc: {
      const JointSource src = cfg.source->build();
      const AuxChannel aux = cfg.aux->build(src.x_size());
      const Dmc channel = cfg.dmc->build();
      const DmcSchemeConfig scheme = DmcSchemeConfig::make(
          src, aux, channel, *cfg.n, *cfg.kappa, *cfg.epsilon,
          *cfg.epsilon_prime, cfg.seed, cfg.q_exponent.value_or(0.75),
          cfg.w0.value_or(0), cfg.w1.value_or(1));
      log << "simulating " << cfg.trials << " trials per hypothesis at n = "
          << scheme.n << ", q = " << scheme.q()
          << ", n' = " << scheme.n_prime() << "\n";
      const DmcSimReport rep = run_dmc_trials(scheme, cfg.trials);
      emit_dmc_csv(scheme, rep, *os);
      log << "alpha_hat = " << rep.alpha_hat << ", beta_hat = " << rep.beta_hat
          << ", mean tau/n = " << rep.mean_tau_over_n << " (analytic "
          << rep.analytic_mean_tau_over_n << ")\n";
      break;
    }
    case Mode::kSweep: {
      const std::vector<SweepRow> rows = run_sweep(cfg);
      emit_sweep_csv(rows, *os);
      log << "sweep over " << cfg.sweep->parameter << ": " << rows.size()
          << " rows\n";
      break;
    }
    case Mode::kVerify: {
      const auto outcomes = run_verify(cfg.seed, cfg.trials);
      *os << "check,cases,failures\n";
      bool ok = true;
      for (const auto& o : outcomes) {
        *os << o.check << ',' << o.cases << ',' << o.failures << '\n';
        log << o.check << ": " << o.cases - o.failures << "/" << o.cases
            << " ok\n";
        if (o.failures > 0) ok = false;
      }
      if (!ok) return 4;
      break;
    }
  }
  if (os == &file) {
    file.flush();
    if (!file) throw IoError("write to '" + cfg.out + "' failed");
  }
  return 0;
}

}  // namespace hyptest
