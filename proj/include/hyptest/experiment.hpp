#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hyptest/types.hpp"

namespace hyptest {

// ---------------------------------------------------------------------------
// Experiment configuration: one JSON object per run. Parsing is strict: an
// unknown or missing field is a ConfigError naming the field. CLI flags
// (--seed, --trials, --out) override file fields.
// ---------------------------------------------------------------------------

enum class Mode {
  kExponent,
  kExponentDmc,
  kSimulateLink,
  kSimulateDmc,
  kSweep,
  kVerify,
};

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct SourceSpec {
  enum class Kind { kDsbs, kJoint } kind = Kind::kDsbs;
  double alpha = 0.0;
  Mat joint;
  JointSource build() const;
};

struct AuxSpec {
  enum class Kind { kBsc, kConstant, kMatrix } kind = Kind::kBsc;
  double delta = 0.0;
  Index u_size = 0;  // constant kind
  Mat rows;
  AuxChannel build(Index x_size) const;
};

struct DmcSpec {
  enum class Kind { kBsc, kBec, kMatrix } kind = Kind::kBsc;
  double param = 0.0;
  Mat rows;
  Dmc build() const;
};

struct SweepSpec {
  std::string parameter;  // alpha | rho | R | epsilon | kappa
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;  // >= 2; includes both endpoints
};

struct ExperimentConfig {
  Mode mode = Mode::kVerify;
  std::uint64_t seed = 0;
  std::int64_t trials = 10000;
  std::string out;  // empty = stdout

  std::optional<SourceSpec> source;
  std::optional<AuxSpec> aux;
  std::optional<DmcSpec> dmc;
  std::optional<SweepSpec> sweep;
  std::optional<double> rate;
  std::optional<double> epsilon;
  std::optional<double> kappa;
  std::optional<double> mu;
  std::optional<double> epsilon_prime;
  std::optional<double> q_exponent;
  std::optional<int> n;
  std::optional<Index> u_cardinality;
  std::optional<int> w0;
  std::optional<int> w1;
};

/// Strict parse; throws ConfigError with the offending field in the message.
ExperimentConfig parse_config_json(const std::string& text);

/// Normalized JSON (stable key order, defaults filled in); reparsing yields
/// an identical experiment.
std::string dump_config_json(const ExperimentConfig& cfg);

struct SweepRow {
  std::string param;
  double value = 0.0;
  double theta_vl = 0.0;
  double theta_fl = 0.0;
  std::string theta_source;  // closed_form | optimizer
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

/// Full-precision decimal rendering used in every CSV cell.
std::string format_double(double v);

/// Executes the experiment: data (CSV) to cfg.out or `fallback_out`, progress
/// to `log`. Returns the process exit code (0 ok, 4 = verification failure).
int run(const ExperimentConfig& cfg, std::ostream& fallback_out,
        std::ostream& log);

/// argv-level entry point used by the binary; maps errors to exit codes
/// (2 config, 3 resource limit, 4 verification failure).
int cli_main(const std::vector<std::string>& args);

}  // namespace hyptest
