#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hyptest/experiment.hpp"

namespace hyptest {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Distributed-testing exponent solver and scheme simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  bool dump = false;

  const std::vector<std::pair<std::string, std::string>> modes{
      {"exponent", "optimal exponent over a noiseless rate-R link"},
      {"exponent-dmc", "optimal exponent over a noisy channel"},
      {"simulate-link", "Monte Carlo run of the variable-length link scheme"},
      {"simulate-dmc", "Monte Carlo run of the two-phase stop-feedback scheme"},
      {"sweep", "parameter sweep producing a theta_vl/theta_fl CSV"},
      {"verify", "internal consistency suites (inequalities, grid bounds)"},
  };
  for (const auto& [name, desc] : modes) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON experiment description");
    sub->add_option("--seed", seed, "override the rng seed");
    sub->add_option("--trials", trials, "override the trial count");
    sub->add_option("--out", out_path, "write the CSV here instead of stdout");
    sub->add_flag("--dump-config", dump,
                  "print the normalized config and exit");
  }

  std::vector<const char*> argv;
  argv.push_back("hyptest");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const Mode mode = mode_from_name(sub->get_name());

    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = parse_config_json(slurp(config_path));
      if (cfg.mode != mode)
        throw ConfigError("config file is for mode '" + mode_name(cfg.mode) +
                          "' but the '" + sub->get_name() +
                          "' subcommand was invoked");
    } else if (mode == Mode::kVerify) {
      cfg.mode = Mode::kVerify;
    } else {
      throw ConfigError("subcommand '" + sub->get_name() +
                        "' needs --config <file>");
    }
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--trials")) {
      if (trials < 1) throw ConfigError("--trials must be positive");
      cfg.trials = trials;
    }
    if (sub->count("--out")) cfg.out = out_path;

    if (dump) {
      std::cout << dump_config_json(cfg);
      return 0;
    }
    return run(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidDistribution& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleTarget& e) {
    std::cerr << "config error: " << e.what()
              << " (achievable: " << e.achievable << ")\n";
    return 2;
  } catch (const DegenerateChannels& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hyptest
