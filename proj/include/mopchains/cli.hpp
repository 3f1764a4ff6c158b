#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: build, analyze, factor, iterate, simulate
 * and verify chains, and list the family catalog.
 *
 * Exit codes: 0 success; 1 invalid parameters or usage; 2 numerical failure;
 * 3 verification failure.  Options may also be read from a TOML/INI file via
 * --config using the long option names as keys.
 */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chains.hpp"
#include "errors.hpp"
#include "factor.hpp"
#include "families.hpp"
#include "io.hpp"
#include "sim.hpp"
#include "verify.hpp"

namespace mopchains::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

/** @brief Option values shared by all subcommands. */
struct Options {
  std::string family;
  std::vector<std::string> params;
  int states{0};
  std::string kind;
  double shift{0};
  std::string format{"json"};
  int digits{2};
  int r{1};
  std::uint64_t steps{1000000};
  std::uint64_t seed{20240601};
  int start{1};
  int trajectories{1};
  std::vector<std::string> tol;
  std::string output;
};

/** @brief Split "key=value" and parse the value as a double. */
inline std::pair<std::string, double> parse_assignment(const std::string& kv, const char* what) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::InvalidParams, std::string(what) + " must have the form name=value (got '" + kv + "')");
  const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != val.size())
    throw Error(ErrorCode::InvalidParams, std::string(what) + " '" + key + "' has a non-numeric value '" + val + "'");
  return {key, v};
}

inline FamilySpec family_spec(const Options& o) {
  if (o.family.empty()) throw Error(ErrorCode::InvalidParams, "--family is required");
  std::map<std::string, double> kv;
  for (const auto& p : o.params) {
    auto [k, v] = parse_assignment(p, "--param");
    if (kv.count(k)) throw Error(ErrorCode::InvalidParams, "parameter '" + k + "' given twice");
    kv[k] = v;
  }
  auto s = FamilySpec::from_params(o.family, kv, o.shift);
  validate(s);
  return s;
}

inline std::optional<ChainKind> chain_kind(const Options& o) {
  if (o.kind.empty()) return std::nullopt;
  return chain_kind_from_string(o.kind);
}

inline std::map<std::string, double> tolerance_overrides(const Options& o) {
  std::map<std::string, double> out;
  for (const auto& t : o.tol) {
    if (t.find('=') == std::string::npos) {
      // A bare number overrides every tolerance.
      const double v = parse_assignment("all=" + t, "--tol").second;
      for (const auto& [k, _] : default_tolerances()) out[k] = v;
    } else {
      auto [k, v] = parse_assignment(t, "--tol");
      out[k] = v;
    }
  }
  return out;
}

/** @brief Write text to --output if given, otherwise to out. */
inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw Error(ErrorCode::InvalidParams, "cannot open output file '" + o.output + "'");
  f << text;
}

inline std::string render(const Options& o, const OutputDocument& d) {
  if (o.format == "csv") return io::to_csv(d.matrix);
  if (o.format == "table") return io::to_table(d, o.digits);
  return io::dump(d) + "\n";
}

inline std::string list_families(const Options& o) {
  if (o.format == "json") {
    auto arr = nlohmann::json::array();
    for (const auto& f : catalog()) {
      arr.push_back({{"name", f.cli_name},
                     {"display_name", f.display_name},
                     {"params", f.params},
                     {"multiple", f.multiple},
                     {"domain", f.domain},
                     {"nonneg_stochastic", f.multiple ? "|difference| < 1" : "always"},
                     {"pbf", f.family == Family::Hermite ? "no (shift beyond the largest zero: numeric)"
                             : f.multiple                ? "-1 < difference < 0"
                                                         : "always"}});
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  for (const auto& f : catalog()) {
    os << f.cli_name << "  [";
    for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? ", " : "") << f.params[i];
    os << "]  " << (f.multiple ? "multiple" : "scalar") << "\n    domain: " << f.domain << "\n";
    if (f.multiple) {
      const char* d = f.family == Family::MultipleMeixnerII ? "beta1 - beta2" : "alpha1 - alpha2";
      os << "    nonneg_stochastic: |" << d << "| < 1;  pbf: -1 < " << d << " < 0\n";
    } else if (f.family == Family::Hermite) {
      os << "    nonneg_stochastic: yes;  pbf: no (with --shift beyond the largest zero: numeric)\n";
    } else {
      os << "    nonneg_stochastic: yes;  pbf: yes\n";
    }
  }
  return os.str();
}

inline int verify_command(const Options& o, std::ostream& out) {
  const auto spec = family_spec(o);
  if (o.states < 1) throw Error(ErrorCode::InvalidParams, "--states must be at least 1");
  std::vector<std::optional<ChainKind>> kinds;
  if (auto k = chain_kind(o))
    kinds.push_back(k);
  else if (is_multiple(spec))
    kinds = {ChainKind::TypeII, ChainKind::TypeI};
  else
    kinds = {std::nullopt};
  const auto tol = tolerance_overrides(o);
  bool ok = true;
  auto arr = nlohmann::json::array();
  std::ostringstream os;
  for (const auto& k : kinds) {
    const auto results = verify::run_suite(spec, o.states, k, tol);
    const std::string kname = to_string(k.value_or(chains::default_kind(spec)));
    for (const auto& r : results) {
      ok = ok && r.passed;
      arr.push_back({{"kind", kname},
                     {"property", r.name},
                     {"passed", r.passed},
                     {"skipped", r.skipped},
                     {"value", r.value},
                     {"tolerance", r.tolerance},
                     {"detail", r.detail}});
      os << (r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL") << "  " << kname << "  " << r.name;
      if (!r.skipped) os << "  " << r.value << " <= " << r.tolerance;
      if (!r.detail.empty()) os << "  (" << r.detail << ")";
      os << "\n";
    }
  }
  emit(o, o.format == "json" ? arr.dump(2) + "\n" : os.str(), out);
  return ok ? kExitOk : kExitVerification;
}

inline int chain_command(const std::string& cmd, const Options& o, std::ostream& out) {
  const auto spec = family_spec(o);
  if (o.states < 1) throw Error(ErrorCode::InvalidParams, "--states must be at least 1");
  const auto ch = chains::build(spec, o.states, chain_kind(o));
  auto doc = io::make_document(spec, ch);
  if (cmd == "build") doc.reversal.reset();
  if (cmd == "factor") doc.factors = io::factor_entries(factor::stochastic_factors(ch));
  if (cmd == "iterate") {
    if (o.r < 0) throw Error(ErrorCode::InvalidParams, "--r must be nonnegative");
    doc.r = o.r;
    doc.matrix = io::to_rows(chains::iterated(ch, o.r));
    doc.reversal.reset();
  }
  if (cmd == "simulate") {
    doc.simulation = sim::simulate(ch, o.start, o.steps, o.seed, o.trajectories);
    doc.reversal.reset();
  }
  emit(o, render(o, doc), out);
  return kExitOk;
}

/** @brief Parse argv and run one subcommand; returns the process exit code. */
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Markov chains from banded recurrence matrices of orthogonal polynomials", "mopchains"};
  app.set_config("--config", "", "Read options from a TOML/INI file (keys are the long option names)");
  app.require_subcommand(1);
  Options o;
  app.add_option("--family", o.family, "Family name (see list-families)");
  app.add_option("--param", o.params, "Family parameter name=value (repeatable)")->take_all()->allow_extra_args(false);
  app.add_option("--states,-m", o.states, "Number of states m (truncation size)");
  app.add_option("--kind", o.kind, "Recurrence matrix: scalar, I or II (default scalar / II by family)")
      ->check(CLI::IsMember({"scalar", "I", "II"}));
  app.add_option("--shift", o.shift, "Add shift * identity to the recurrence matrix");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--digits", o.digits, "Decimals for table output")->check(CLI::Range(0, 17));
  app.add_option("--r", o.r, "Number of steps for iterate");
  app.add_option("--steps", o.steps, "Number of simulated transitions");
  app.add_option("--seed", o.seed, "Seed of the counter-based generator");
  app.add_option("--start", o.start, "Start state (1-based) for simulate");
  app.add_option("--trajectories", o.trajectories, "Independent trajectories (streams seed + index)");
  app.add_option("--tol", o.tol, "Verification tolerance override: name=value, or a bare value for all");
  app.add_option("--output,-o", o.output, "Write the result to this path instead of stdout");

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"build", "Build the stochastic matrix and its steady-state data"},
      {"analyze", "Build and analyze (adds the time reversal)"},
      {"factor", "Build and factor into pure-birth / pure-death stochastic factors"},
      {"iterate", "r-step transition probabilities from the spectral representation"},
      {"simulate", "Monte Carlo trajectories and empirical statistics"},
      {"verify", "Run the invariant suite and report pass/fail per property"},
      {"list-families", "Print the family catalog with parameter domains and flags"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "list-families") {
      emit(o, list_families(o), out);
      return kExitOk;
    }
    if (cmd == "verify") return verify_command(o, out);
    return chain_command(cmd, o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_usage() ? kExitUsage : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace mopchains::cli
