// chsh: exact values, simulations and verification for the CHSH experiment.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure,
// 3 runtime or numeric error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chsh/angle_text.hpp"
#include "chsh/errors.hpp"
#include "chsh/report.hpp"

namespace {

using chsh::report::ExitCode;

bool argv_has(int argc, char** argv, const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHSH experiment: exact statistics, Monte-Carlo runs and checks", "chsh"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style key = value file with option defaults");

  chsh::report::Options opt;
  std::string angles_text = "0,pi/4,pi/8,3pi/8";
  std::string source_text = "quantum-exact";
  bool want_json = false;
  bool want_csv = false;

  app.add_option("--angles", angles_text,
                 "a1,a2,b1,b2 in radians or multiples of pi (e.g. 3pi/8)")
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", opt.seed,
                                  std::string("64-bit seed (default ") +
                                      std::to_string(chsh::report::kDefaultSeed) +
                                      ", or $" + chsh::report::kSeedEnvVar + ")");
  app.add_option("--runs", opt.runs, "number of simulated runs k")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--trials", opt.trials, "random local models / settings to probe")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--source", source_text, "sampling source: quantum-exact | bell-measure")
      ->check(CLI::IsMember({"quantum-exact", "bell-measure"}))
      ->capture_default_str();
  app.add_option("--correct", opt.correction_text,
                 "apply detection/transmission factors, e.g. F=0.984,T=0.971");
  app.add_flag("--parallel{4}", opt.threads,
               "use N worker streams (default 4); output is distributionally, "
               "not bitwise, equivalent to the single-stream run");
  auto* json_flag = app.add_flag("--json", want_json, "emit the JSON report");
  auto* csv_flag = app.add_flag("--csv", want_csv, "emit CSV");
  json_flag->excludes(csv_flag);
  app.add_option("--inject-fault", opt.fault, "test hook")
      ->group("")
      ->check(CLI::IsMember({"pvm-completeness"}));

  auto* exact = app.add_subcommand("exact", "exact correlators, probabilities and S");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of the protocol");
  auto* verify = app.add_subcommand("verify", "full verification battery");
  auto* lhv = app.add_subcommand("lhv", "local hidden-variable bound");
  auto* trace = app.add_subcommand("trace-theorem", "normalised partial-trace check");
  for (auto* sub : {exact, simulate, verify, lhv, trace}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::kSuccess : ExitCode::kUsageError;
  }

  chsh::report::Report report;
  try {
    opt.angles = chsh::parse_angles(angles_text);
    opt.source = chsh::parse_sampling_source(source_text);
    if (!opt.correction_text.empty()) {
      opt.correction = chsh::report::parse_correction(opt.correction_text);
    }
    if (seed_opt->count() > 0) {
      opt.seed_source = argv_has(argc, argv, "--seed") ? "cli" : "config";
    } else if (const char* env = std::getenv(chsh::report::kSeedEnvVar)) {
      try {
        std::size_t used = 0;
        opt.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw chsh::InputError(std::string("$") + chsh::report::kSeedEnvVar +
                               " is not an unsigned integer: '" + env + "'");
      }
      opt.seed_source = "env";
    }

    if (*exact) {
      report = chsh::report::cmd_exact(opt);
    } else if (*simulate) {
      report = chsh::report::cmd_simulate(opt);
    } else if (*verify) {
      report = chsh::report::cmd_verify(opt);
    } else if (*lhv) {
      report = chsh::report::cmd_lhv(opt);
    } else {
      report = chsh::report::cmd_trace_theorem(opt);
    }
  } catch (const chsh::InputError& e) {
    std::cerr << "chsh: " << e.what() << '\n';
    return ExitCode::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "chsh: " << e.what() << '\n';
    return ExitCode::kRuntimeError;
  }

  if (want_json) {
    std::cout << report.json.dump(2) << '\n';
  } else if (want_csv) {
    std::cout << report.csv;
  } else {
    std::cout << report.text;
  }
  if (report.exit_code == ExitCode::kVerificationFailure) {
    std::cerr << "chsh: verification failed";
    if (report.json.contains("failed")) {
      for (const auto& f : report.json["failed"]) std::cerr << ' ' << f.get<std::string>();
    }
    std::cerr << '\n';
  }
  return report.exit_code;
}
