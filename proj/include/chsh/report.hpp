#pragma once

// Report documents behind the command-line tool.
//
// Each command is a pure function of its options and returns the same result
// in three renderings: JSON, CSV and a human-readable table. Every floating
// value in the JSON carries a provenance tag: "exact" (closed form or matrix
// algebra), "sampled" (Monte-Carlo) or "corrected" (scaled by F and T).
// Inputs are echoed as canonical strings so the echo holds no floats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsh/angle_text.hpp"
#include "chsh/angles.hpp"
#include "chsh/classical_model.hpp"
#include "chsh/experiment_sim.hpp"
#include "chsh/lhv_bound.hpp"
#include "chsh/quantum_model.hpp"
#include "chsh/random.hpp"

namespace chsh::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 1982;
inline constexpr const char* kSeedEnvVar = "CHSH_SEED";

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kVerificationFailure = 2,
  kRuntimeError = 3,
};

struct Correction {
  double f;
  double t;
};

/// "F=0.984,T=0.971" (either order, case-insensitive keys).
inline Correction parse_correction(const std::string& text) {
  std::optional<double> f;
  std::optional<double> t;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = detail::trim(
        std::string_view(text).substr(start, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - start));
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw InputError("--correct: expected F=<value>,T=<value>, got '" + text + "'");
    }
    const std::string key = detail::trim(std::string_view(part).substr(0, eq));
    bool ok = false;
    const double v = detail::parse_real(detail::trim(std::string_view(part).substr(eq + 1)), ok);
    if (!ok) throw InputError("--correct: bad number in '" + part + "'");
    if (key == "F" || key == "f") {
      f = v;
    } else if (key == "T" || key == "t") {
      t = v;
    } else {
      throw InputError("--correct: unknown factor '" + key + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!f || !t) throw InputError("--correct: both F and T are required");
  if (!(*f > 0.0 && *f <= 1.0) || !(*t > 0.0 && *t <= 1.0)) {
    throw InputError("--correct: F and T must lie in (0, 1]");
  }
  return {*f, *t};
}

struct Options {
  Angles angles = kAspectAngles;
  std::uint64_t runs = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";  // "cli", "config", "env" or "default"
  std::uint64_t trials = 10'000;
  unsigned threads = 0;  // 0: single stream
  SamplingSource source = SamplingSource::kQuantumExact;
  std::optional<Correction> correction;
  std::string correction_text;
  std::string fault;  // verify only: name of an injected defect
};

struct Report {
  Json json;
  std::string text;
  std::string csv;
  int exit_code = kSuccess;
};

inline Json tagged(double value, const char* provenance) {
  return Json{{"value", value}, {"provenance", provenance}};
}

inline Json tagged_list(const std::vector<double>& values, const char* provenance) {
  return Json{{"provenance", provenance}, {"values", values}};
}

namespace detail {

inline std::string fixed(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline Json header(const char* command, const Options& opt, bool uses_seed) {
  Json j;
  j["command"] = command;
  j["version"] = kVersion;
  if (uses_seed) {
    j["seed"] = opt.seed;
    j["seed_source"] = opt.seed_source;
  } else {
    j["seed"] = nullptr;
  }
  Json cfg;
  cfg["angles"] = {{"a1", format_angle(opt.angles.a1)},
                   {"a2", format_angle(opt.angles.a2)},
                   {"b1", format_angle(opt.angles.b1)},
                   {"b2", format_angle(opt.angles.b2)}};
  j["config"] = cfg;
  return j;
}

inline std::string setting_label(const Angles& a, std::size_t k) {
  const auto s = a.setting(k);
  return "(" + format_angle(s.a) + ", " + format_angle(s.b) + ")";
}

inline std::vector<double> as_vector(const OutcomeDistribution& n) {
  return {n.begin(), n.end()};
}

}  // namespace detail

// ---------------------------------------------------------------- exact

inline Report cmd_exact(const Options& opt) {
  opt.angles.validate();
  const auto measure = bell_measure(opt.angles);
  const auto e = correlators(measure);
  const double s = chsh_value_exact(measure);

  Report r;
  r.json = detail::header("exact", opt, false);
  if (opt.correction) r.json["config"]["correct"] = opt.correction_text;

  Json settings = Json::array();
  std::ostringstream txt;
  std::ostringstream csv;
  csv.precision(17);
  csv << "a,b,p,q,probability\n";
  txt << "Exact CHSH statistics at angles " << format_angles(opt.angles) << "\n\n";
  txt << "setting            E(a,b)        n(+,+)      n(+,-)      n(-,+)      n(-,-)\n";
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto sp = opt.angles.setting(k);
    const auto n = measure.block(k);
    Json row;
    row["a"] = format_angle(sp.a);
    row["b"] = format_angle(sp.b);
    row["E"] = tagged(e[k], "exact");
    row["probabilities"] = tagged_list(detail::as_vector(n), "exact");
    settings.push_back(row);

    char line[160];
    std::snprintf(line, sizeof line, "%-16s %+.10f  %.8f  %.8f  %.8f  %.8f\n",
                  detail::setting_label(opt.angles, k).c_str(), e[k], n[0], n[1],
                  n[2], n[3]);
    txt << line;
    for (std::size_t c = 0; c < 4; ++c) {
      csv << sp.a << ',' << sp.b << ',' << kJointOutcomes[c].p << ','
          << kJointOutcomes[c].q << ',' << n[c] << '\n';
    }
  }
  Json results;
  results["outcome_order"] = "(+1,+1),(+1,-1),(-1,+1),(-1,-1)";
  results["settings"] = settings;
  results["S"] = tagged(s, "exact");
  txt << "\nS = " << detail::fixed(s, 10) << "\n";
  if (opt.correction) {
    const double corrected = corrected_prediction(s, opt.correction->f, opt.correction->t);
    results["S_corrected"] = tagged(corrected, "corrected");
    txt << "S corrected (F=" << opt.correction->f << ", T=" << opt.correction->t
        << ") = " << detail::fixed(corrected, 10) << "\n";
  }
  r.json["results"] = results;
  auto warnings = Json::array();
  for (const auto& w : measure.warnings()) warnings.push_back(w);
  r.json["warnings"] = warnings;
  r.text = txt.str();
  r.csv = csv.str();
  return r;
}

// ------------------------------------------------------------- simulate

inline Report cmd_simulate(const Options& opt) {
  ExperimentConfig cfg{opt.angles, opt.runs, opt.seed, opt.source};
  cfg.validate();
  const bool parallel = opt.threads > 0;
  const TallyTable tally =
      parallel ? run_experiment_parallel(cfg, opt.threads) : run_experiment(cfg);
  const double exact_s = chsh_closed_form(opt.angles);

  Report r;
  r.json = detail::header("simulate", opt, true);
  r.json["config"]["runs"] = opt.runs;
  r.json["config"]["source"] = to_string(opt.source);
  Json mode;
  mode["kind"] = parallel ? "parallel" : "single-stream";
  mode["threads"] = parallel ? opt.threads : 1u;
  mode["equivalence"] = parallel ? "distributional" : "bitwise";
  r.json["mode"] = mode;

  Json results;
  Json settings = Json::array();
  Json warnings = Json::array();
  std::ostringstream txt;
  txt << "Simulated " << opt.runs << " runs at angles " << format_angles(opt.angles)
      << " (seed " << opt.seed << ", source " << to_string(opt.source) << ", "
      << (parallel ? "parallel" : "single-stream") << ")\n\n";
  txt << "setting            N         E_k            stderr       exact E\n";
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto sp = opt.angles.setting(k);
    const double exact_e = std::cos(2 * (sp.a - sp.b));
    Json row;
    row["a"] = format_angle(sp.a);
    row["b"] = format_angle(sp.b);
    row["n"] = tally.setting_count(k);
    row["counts"] = {tally.count(k, 0), tally.count(k, 1), tally.count(k, 2),
                     tally.count(k, 3)};
    row["E_exact"] = tagged(exact_e, "exact");
    char line[160];
    if (tally.setting_count(k) == 0) {
      row["E"] = nullptr;
      warnings.push_back(Json{{"type", "empty-cell"},
                              {"setting", k},
                              {"message", "no runs recorded for setting " +
                                              detail::setting_label(opt.angles, k)}});
      std::snprintf(line, sizeof line, "%-16s %-9llu %-14s %-12s %+.8f\n",
                    detail::setting_label(opt.angles, k).c_str(), 0ull, "(empty)",
                    "-", exact_e);
    } else {
      const double ek = estimate_E(tally, k);
      const double se = estimate_E_stderr(tally, k);
      row["E"] = tagged(ek, "sampled");
      row["E_stderr"] = tagged(se, "sampled");
      std::snprintf(line, sizeof line, "%-16s %-9llu %+.8f    %.8f   %+.8f\n",
                    detail::setting_label(opt.angles, k).c_str(),
                    static_cast<unsigned long long>(tally.setting_count(k)), ek, se,
                    exact_e);
    }
    txt << line;
    settings.push_back(row);
  }
  results["outcome_order"] = "(+1,+1),(+1,-1),(-1,+1),(-1,-1)";
  results["settings"] = settings;
  results["S_exact"] = tagged(exact_s, "exact");
  if (warnings.empty()) {
    const auto est = estimate_S(tally);
    results["S"] = tagged(est.s, "sampled");
    results["S_stderr"] = tagged(est.s_stderr, "sampled");
    results["deviation"] = tagged(est.s - exact_s, "sampled");
    txt << "\nS_k = " << detail::fixed(est.s, 6) << " +/- " << detail::fixed(est.s_stderr, 6)
        << "   exact S = " << detail::fixed(exact_s, 6)
        << "   deviation = " << detail::fixed(est.s - exact_s, 6) << "\n";
  } else {
    results["S"] = nullptr;
    txt << "\nS_k unavailable: " << warnings.size()
        << " setting(s) received no runs\n";
  }
  r.json["results"] = results;
  r.json["warnings"] = warnings;
  r.text = txt.str();
  r.csv = to_csv(tally);
  return r;
}

// --------------------------------------------------------------- verify

struct Check {
  std::string name;
  bool passed;
  double value;
  std::string tolerance;
  std::string detail;
};

namespace detail {

/// Four configured settings followed by `extra` uniform settings on [-pi, pi).
inline std::vector<SettingPair> probe_settings(const Angles& angles,
                                               std::uint64_t seed,
                                               std::size_t extra) {
  std::vector<SettingPair> out;
  for (std::size_t k = 0; k < kSettingCount; ++k) out.push_back(angles.setting(k));
  RandomStream rng(seed, StreamDomain::kVerify);
  for (std::size_t i = 0; i < extra; ++i) {
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double b = rng.uniform(-std::numbers::pi, std::numbers::pi);
    out.push_back({a, b});
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kRandomSettings = 1000;

inline std::vector<Check> verification_battery(const Options& opt) {
  opt.angles.validate();
  const auto settings = detail::probe_settings(opt.angles, opt.seed, kRandomSettings);
  const auto psi = bell_state();
  std::vector<Check> checks;

  // PVM invariants, joint and local.
  PvmDefects worst;
  auto fold = [&worst](const PvmDefects& d) {
    worst.hermitian = std::max(worst.hermitian, d.hermitian);
    worst.idempotent = std::max(worst.idempotent, d.idempotent);
    worst.orthogonal = std::max(worst.orthogonal, d.orthogonal);
    worst.complete = std::max(worst.complete, d.complete);
  };
  for (const auto& s : settings) {
    auto joint = joint_pvm(s);
    if (opt.fault == "pvm-completeness") {
      joint = joint.with_projector({-1, -1}, SquareComplexMatrix(4));
    }
    fold(joint.defects());
    fold(local_pvm_A(s.a).defects());
    fold(local_pvm_B(s.b).defects());
  }
  const std::string n_settings = std::to_string(settings.size()) + " settings";
  checks.push_back({"pvm-hermitian", worst.hermitian <= kTolerance, worst.hermitian,
                    "1e-12", n_settings});
  checks.push_back({"pvm-idempotent", worst.idempotent <= kTolerance, worst.idempotent,
                    "1e-12", n_settings});
  checks.push_back({"pvm-orthogonal", worst.orthogonal <= kTolerance, worst.orthogonal,
                    "1e-12", n_settings});
  checks.push_back({"pvm-completeness", worst.complete <= kTolerance, worst.complete,
                    "1e-12", n_settings});

  // Matrix-path Born probabilities against the closed form.
  double born_dev = 0.0;
  double marginal_dev = 0.0;
  for (const auto& s : settings) {
    const auto matrix = born_distribution(joint_pvm(s), psi);
    const auto closed = closed_form_distribution(s);
    for (std::size_t c = 0; c < 4; ++c) {
      born_dev = std::max(born_dev, std::abs(matrix[c] - closed[c]));
    }
    const auto la = born_distribution(local_pvm_A(s.a), psi);
    const auto lb = born_distribution(local_pvm_B(s.b), psi);
    const auto ma = marginal_over_q(matrix);
    const auto mb = marginal_over_p(matrix);
    for (std::size_t i = 0; i < 2; ++i) {
      marginal_dev = std::max({marginal_dev, std::abs(la[i] - 0.5),
                               std::abs(lb[i] - 0.5), std::abs(ma[i] - la[i]),
                               std::abs(mb[i] - lb[i])});
    }
  }
  checks.push_back({"born-closed-form", born_dev <= kTolerance, born_dev, "1e-12",
                    n_settings});

  // Classical marginals: 1/2 and independent of the far setting.
  const auto measure = bell_measure(opt.angles);
  const auto& ang = opt.angles;
  for (std::size_t ia = 0; ia < 2; ++ia) {
    for (std::size_t ib = 0; ib < 2; ++ib) {
      const auto ma = marginal_A(measure, ang.a(ia), ang.b(ib));
      const auto mb = marginal_B(measure, ang.a(ia), ang.b(ib));
      const auto ma_other = marginal_A(measure, ang.a(ia), ang.b(1 - ib));
      const auto mb_other = marginal_B(measure, ang.a(1 - ia), ang.b(ib));
      for (std::size_t i = 0; i < 2; ++i) {
        marginal_dev = std::max({marginal_dev, std::abs(ma[i] - 0.5),
                                 std::abs(mb[i] - 0.5),
                                 std::abs(ma[i] - ma_other[i]),
                                 std::abs(mb[i] - mb_other[i])});
      }
    }
  }
  checks.push_back({"marginal-uniformity", marginal_dev <= kTolerance, marginal_dev,
                    "1e-12", "quantum local PVMs and classical marginals"});

  double trace_dev = 0.0;
  for (const auto& s : settings) {
    trace_dev = std::max(trace_dev, verify_partial_trace_theorem(s).worst());
  }
  checks.push_back({"partial-trace-theorem", trace_dev <= kTolerance, trace_dev,
                    "1e-12", n_settings});

  // Conditional identities and the factorization verdict.
  double cond_dev = 0.0;
  double expected_a3 = 0.0;
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto s = ang.setting(k);
    const double c = std::cos(s.a - s.b);
    const double joint_cond = conditional_probability(
        measure, {{.eps_a = 1}, {.eps_b = 1, .gamma_a = s.a, .gamma_b = s.b}});
    const double local_cond =
        conditional_probability(measure, {{.eps_a = 1}, {.gamma_a = s.a}});
    cond_dev = std::max({cond_dev, std::abs(joint_cond - c * c),
                         std::abs(local_cond - 0.5)});
    expected_a3 = std::max(expected_a3, std::abs(0.5 * c * c - 0.25));
  }
  const auto a3 = check_A3_factorization(measure);
  const bool a3_consistent = a3.holds == (expected_a3 <= kTolerance) &&
                             std::abs(a3.worst_deviation - expected_a3) <= kTolerance;
  checks.push_back({"a3-conditionals", cond_dev <= kTolerance, cond_dev, "1e-12",
                    "P(eps_A=1|a,b,eps_B=1)=cos^2(a-b), P(eps_A=1|a)=1/2"});
  checks.push_back({"a3-factorization", a3_consistent, a3.worst_deviation, "1e-12",
                    a3.holds ? "factorization holds" : "factorization violated"});

  const double s_exact = chsh_value_exact(measure);
  std::array<double, kSettingCount> e_matrix{};
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    e_matrix[k] = correlator(born_distribution(joint_pvm(ang.setting(k)), psi));
  }
  const double chsh_dev = std::max(std::abs(s_exact - chsh_closed_form(ang)),
                                   std::abs(s_exact - chsh_combination(e_matrix)));
  checks.push_back({"chsh-exact", chsh_dev <= kTolerance &&
                                      std::abs(s_exact) <= 2 * std::numbers::sqrt2 + 1e-9,
                    chsh_dev, "1e-12", "measure, matrix path and closed form agree"});

  int enum_max = -3;
  int enum_min = 3;
  for (const auto& st : enumerate_deterministic_strategies()) {
    enum_max = std::max(enum_max, chsh_functional(st));
    enum_min = std::min(enum_min, chsh_functional(st));
  }
  const auto probe = verify_chsh_bound(opt.trials, opt.seed, std::max(1u, opt.threads));
  checks.push_back({"lhv-bound",
                    probe.bound_respected && enum_max == 2 && enum_min == -2,
                    probe.max_abs_s, "2 + 1e-12",
                    std::to_string(probe.models_checked) + " local models"});
  return checks;
}

inline Report cmd_verify(const Options& opt) {
  const auto checks = verification_battery(opt);
  Report r;
  r.json = detail::header("verify", opt, true);
  r.json["config"]["trials"] = opt.trials;
  if (!opt.fault.empty()) r.json["config"]["fault"] = opt.fault;

  Json list = Json::array();
  std::ostringstream txt;
  std::ostringstream csv;
  csv.precision(17);
  csv << "check,passed,value,tolerance\n";
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    list.push_back(Json{{"name", c.name},
                        {"passed", c.passed},
                        {"value", tagged(c.value, "exact")},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    char line[200];
    std::snprintf(line, sizeof line, "[%s] %-22s %-11s (tol %s; %s)\n",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(),
                  detail::sci(c.value).c_str(), c.tolerance.c_str(), c.detail.c_str());
    txt << line;
    csv << c.name << ',' << (c.passed ? "true" : "false") << ',' << c.value << ','
        << c.tolerance << '\n';
    if (!c.passed) failed.push_back(c.name);
  }
  r.json["results"] = Json{{"checks", list}};
  r.json["verdict"] = failed.empty() ? "pass" : "fail";
  r.json["failed"] = failed;
  if (failed.empty()) {
    txt << "\nall " << checks.size() << " checks passed\n";
  } else {
    txt << "\nverification failed:";
    for (const auto& f : failed) txt << ' ' << f;
    txt << '\n';
    r.exit_code = kVerificationFailure;
  }
  r.text = txt.str();
  r.csv = csv.str();
  return r;
}

// ------------------------------------------------------------------ lhv

inline Report cmd_lhv(const Options& opt) {
  opt.angles.validate();
  const auto measure = bell_measure(opt.angles);
  const auto strategies = enumerate_deterministic_strategies();
  const auto probe =
      verify_chsh_bound(opt.trials, opt.seed, std::max(1u, opt.threads), measure);
  const auto best = best_local_approximation(measure);

  Report r;
  r.json = detail::header("lhv", opt, true);
  r.json["config"]["trials"] = opt.trials;

  std::ostringstream txt;
  std::ostringstream csv;
  csv << "f_a1,f_a2,g_b1,g_b2,chsh\n";
  txt << "Deterministic strategies (f(a1) f(a2) g(b1) g(b2) -> CHSH):\n";
  Json list = Json::array();
  int max_f = -3;
  int min_f = 3;
  for (const auto& s : strategies) {
    const int v = chsh_functional(s);
    max_f = std::max(max_f, v);
    min_f = std::min(min_f, v);
    auto j = to_json(s);
    j["chsh"] = v;
    list.push_back(j);
    char line[80];
    std::snprintf(line, sizeof line, "  %+d %+d %+d %+d -> %+d\n", s.f[0], s.f[1],
                  s.g[0], s.g[1], v);
    txt << line;
    csv << s.f[0] << ',' << s.f[1] << ',' << s.g[0] << ',' << s.g[1] << ',' << v << '\n';
  }
  Json results;
  results["strategies"] = list;
  results["enumeration_max"] = max_f;
  results["enumeration_min"] = min_f;
  Json pj;
  pj["models_checked"] = probe.models_checked;
  pj["max_abs_S"] = tagged(probe.max_abs_s, "exact");
  pj["bound_respected"] = probe.bound_respected;
  pj["witness"] = Json{{"provenance", "exact"}, {"model", to_json(*probe.witness)}};
  pj["min_distance_to_target"] = tagged(*probe.min_distance_to_target, "exact");
  results["probe"] = pj;
  Json bj;
  bj["strategy"] = to_json(best.strategy);
  bj["achieved_S"] = tagged(best.achieved_s, "exact");
  bj["target_S"] = tagged(best.target_s, "exact");
  bj["gap"] = tagged(best.target_s - best.achieved_s, "exact");
  results["best_local"] = bj;
  r.json["results"] = results;

  txt << "\nenumeration: max " << max_f << ", min " << min_f << "\n";
  txt << "probe over " << probe.models_checked << " local models: max |S| = "
      << detail::fixed(probe.max_abs_s, 12) << " ("
      << (probe.bound_respected ? "bound respected" : "BOUND VIOLATED") << ")\n";
  txt << "closest sampled model to the Bell measure: max-norm distance "
      << detail::fixed(*probe.min_distance_to_target, 6) << "\n";
  txt << "best local S = " << detail::fixed(best.achieved_s, 6) << ", quantum S = "
      << detail::fixed(best.target_s, 6) << "\n";
  r.text = txt.str();
  r.csv = csv.str();
  if (!probe.bound_respected || max_f != 2 || min_f != -2) {
    r.exit_code = kVerificationFailure;
  }
  return r;
}

// --------------------------------------------------------- trace-theorem

inline Report cmd_trace_theorem(const Options& opt) {
  opt.angles.validate();
  Report r;
  r.json = detail::header("trace-theorem", opt, true);
  r.json["config"]["trials"] = opt.trials;

  std::ostringstream txt;
  std::ostringstream csv;
  csv.precision(17);
  csv << "a,b,side_a,side_b\n";
  txt << "Normalised partial traces vs local projectors\n\n";
  txt << "setting            side A       side B\n";
  Json list = Json::array();
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto s = opt.angles.setting(k);
    const auto dev = verify_partial_trace_theorem(s);
    list.push_back(Json{{"a", format_angle(s.a)},
                        {"b", format_angle(s.b)},
                        {"side_a", tagged(dev.side_a, "exact")},
                        {"side_b", tagged(dev.side_b, "exact")}});
    char line[120];
    std::snprintf(line, sizeof line, "%-16s %.3e    %.3e\n",
                  detail::setting_label(opt.angles, k).c_str(), dev.side_a, dev.side_b);
    txt << line;
    csv << s.a << ',' << s.b << ',' << dev.side_a << ',' << dev.side_b << '\n';
  }
  const auto random = detail::probe_settings(opt.angles, opt.seed, opt.trials);
  double worst = 0.0;
  for (const auto& s : random) {
    worst = std::max(worst, verify_partial_trace_theorem(s).worst());
  }
  Json results;
  results["configured"] = list;
  results["settings_checked"] = random.size();
  results["max_deviation"] = tagged(worst, "exact");
  const bool ok = worst <= kTolerance;
  results["passed"] = ok;
  r.json["results"] = results;
  txt << "\nmax deviation over " << random.size() << " settings: "
      << detail::sci(worst) << (ok ? " (< 1e-12)" : " (EXCEEDS 1e-12)") << "\n";
  r.text = txt.str();
  r.csv = csv.str();
  if (!ok) r.exit_code = kVerificationFailure;
  return r;
}

}  // namespace chsh::report
