/**
 * @file acceptance.cpp
 * @brief Acceptance criteria 1-7.  Each criterion prints one PASS/FAIL line;
 * run with a criterion number to execute only that one (the exit status is
 * nonzero if any executed criterion fails).
 */

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mopchains/chains.hpp"
#include "mopchains/factor.hpp"
#include "mopchains/sim.hpp"
#include "mopchains/verify.hpp"

using namespace mopchains;

namespace {

/** @brief Rows separated by ';', entries by whitespace. */
Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    std::stringstream rs(row);
    std::vector<double> r;
    double v;
    while (rs >> v) r.push_back(v);
    rows.push_back(r);
  }
  Matrix M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

/** @brief Collects mismatches against printed two-decimal values. */
struct Comparison {
  double tol{0.01};
  double worst{0};
  std::vector<std::string> misses;

  void matrix(const std::string& label, const Matrix& got, const std::string& printed) {
    const Matrix want = parse_matrix(printed);
    if (want.rows() != got.rows() || want.cols() != got.cols()) {
      misses.push_back(label + ": shape mismatch");
      return;
    }
    for (int i = 0; i < got.rows(); ++i)
      for (int j = 0; j < got.cols(); ++j) check(label + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                                                 got(i, j), want(i, j));
  }

  void vector(const std::string& label, const std::vector<double>& got, const std::vector<double>& want) {
    for (std::size_t j = 0; j < want.size(); ++j) check(label + "[" + std::to_string(j + 1) + "]", got[j], want[j]);
  }

  void check(const std::string& label, double got, double want) {
    const double d = std::abs(got - want);
    worst = std::max(worst, d);
    if (d > tol + 1e-12) {
      std::ostringstream os;
      os << label << " = " << std::fixed << std::setprecision(4) << got << " vs printed " << std::setprecision(2)
         << want;
      misses.push_back(os.str());
    }
  }

  std::string summary() const {
    std::ostringstream os;
    os << "max |computed - printed| = " << std::setprecision(3) << worst;
    if (!misses.empty()) {
      os << "; " << misses.size() << " entries outside +-" << tol << ": ";
      for (std::size_t i = 0; i < misses.size(); ++i) os << (i ? "; " : "") << misses[i];
    }
    return os.str();
  }
};

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/** @brief Shared check for the two scalar examples. */
Outcome scalar_example(const FamilySpec& spec, const std::string& P, const std::string& Pi, const std::string& Ups,
                       const std::vector<double>& pi, const std::vector<double>& t, double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ch = chains::build(spec, 5);
  const auto f = factor::stochastic_factors(ch);
  Comparison c;
  c.matrix("P", ch.P, P);
  c.matrix("Pi", f.factors.at(0).matrix, Pi);
  c.matrix("Upsilon", f.factors.at(1).matrix, Ups);
  c.vector("pi", chains::steady_state(ch), pi);
  c.vector("t", chains::return_times(ch), t);
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << c.summary() << "; runtime " << std::setprecision(3) << secs << " s";
  return {c.misses.empty() && secs < time_limit, os.str()};
}

struct MultiplePrinted {
  std::string PII, PiII1, PiII2, UpsII, PI, UpsI, PiI2, PiI1;
  std::vector<double> pi, t;
};

Outcome multiple_example(const FamilySpec& spec, const MultiplePrinted& p, bool check_reversal, double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c2 = chains::build(spec, 7, ChainKind::TypeII);
  const auto c1 = chains::build(spec, 7, ChainKind::TypeI);
  const auto f2 = factor::stochastic_factors(c2);
  const auto f1 = factor::stochastic_factors(c1);
  Comparison c;
  c.matrix("P_II", c2.P, p.PII);
  c.matrix("P_I", c1.P, p.PI);
  c.matrix("Pi_II1", f2.factors.at(0).matrix, p.PiII1);
  c.matrix("Pi_II2", f2.factors.at(1).matrix, p.PiII2);
  c.matrix("Upsilon_II", f2.factors.at(2).matrix, p.UpsII);
  c.matrix("Upsilon_I", f1.factors.at(0).matrix, p.UpsI);
  c.matrix("Pi_I2", f1.factors.at(1).matrix, p.PiI2);
  c.matrix("Pi_I1", f1.factors.at(2).matrix, p.PiI1);
  c.vector("pi", chains::steady_state(c2), p.pi);
  c.vector("t", chains::return_times(c2), p.t);
  if (check_reversal) c.matrix("reversal(P_II)", chains::reversal(c2).P, p.PI);
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << c.summary() << "; runtime " << std::setprecision(3) << secs << " s";
  return {c.misses.empty() && secs < time_limit, os.str()};
}

Outcome criterion1() {
  return scalar_example(FamilySpec::hahn(0.5, 0.75, 5),
                        "0.46 0.54 0 0 0;0.18 0.50 0.32 0 0;0 0.29 0.51 0.20 0;0 0 0.37 0.52 0.11;0 0 0 0.49 0.51",
                        "1 0 0 0 0;0.39 0.61 0 0 0;0 0.60 0.40 0 0;0 0 0.76 0.24 0;0 0 0 0.94 0.06",
                        "0.46 0.54 0 0 0;0 0.48 0.52 0 0;0 0 0.49 0.51 0;0 0 0 0.52 0.48;0 0 0 0 1",
                        {0.11, 0.31, 0.35, 0.19, 0.04}, {9.09, 3.23, 2.86, 5.26, 25.00}, 1.0);
}

Outcome criterion2() {
  return scalar_example(FamilySpec::jacobi01(0.5, 0.75),
                        "0.50 0.50 0 0 0;0.14 0.53 0.33 0 0;0 0.22 0.54 0.24 0;0 0 0.30 0.54 0.16;0 0 0 0.46 0.54",
                        "1 0 0 0 0;0.28 0.72 0 0 0;0 0.40 0.60 0 0;0 0 0.50 0.50 0;0 0 0 0.68 0.32",
                        "0.50 0.50 0 0 0;0 0.55 0.45 0 0;0 0 0.60 0.40 0;0 0 0 0.68 0.32;0 0 0 0 1",
                        {0.06, 0.23, 0.34, 0.27, 0.10}, {15.93, 4.41, 2.94, 3.64, 10.46}, 1.0);
}

Outcome criterion3() {
  MultiplePrinted p;
  p.PII = "0.46 0.55 0 0 0 0 0;0.14 0.43 0.43 0 0 0 0;0.02 0.19 0.48 0.31 0 0 0;0 0.02 0.24 0.48 0.26 0 0;"
          "0 0 0.04 0.27 0.50 0.19 0;0 0 0 0.04 0.33 0.50 0.13;0 0 0 0 0.06 0.42 0.52";
  p.PiII1 = "1 0 0 0 0 0 0;0.06 0.94 0 0 0 0 0;0 0.18 0.82 0 0 0 0;0 0 0.13 0.87 0 0 0;0 0 0 0.18 0.82 0 0;"
            "0 0 0 0 0.15 0.85 0;0 0 0 0 0 0.22 0.78";
  p.PiII2 = "1 0 0 0 0 0 0;0.28 0.72 0 0 0 0 0;0 0.37 0.63 0 0 0 0;0 0 0.52 0.48 0 0 0;0 0 0 0.61 0.39 0 0;"
            "0 0 0 0 0.73 0.27 0;0 0 0 0 0 0.90 0.10";
  p.UpsII = "0.45 0.55 0 0 0 0 0;0 0.37 0.63 0 0 0 0;0 0 0.40 0.60 0 0 0;0 0 0 0.37 0.63 0 0;0 0 0 0 0.40 0.60 0;"
            "0 0 0 0 0 0.42 0.58;0 0 0 0 0 0 1";
  p.PI = "0.45 0.43 0.12 0 0 0 0;0.18 0.43 0.35 0.04 0 0 0;0 0.23 0.48 0.26 0.03 0 0;0 0 0.29 0.48 0.22 0.01 0;"
         "0 0 0 0.32 0.50 0.17 0.01;0 0 0 0 0.38 0.50 0.12;0 0 0 0 0 0.48 0.52";
  p.UpsI = "1 0 0 0 0 0 0;0.41 0.59 0 0 0 0 0;0 0.54 0.46 0 0 0 0;0 0 0.66 0.34 0 0 0;0 0 0 0.72 0.28 0 0;"
           "0 0 0 0 0.81 0.19 0;0 0 0 0 0 0.92 0.08";
  p.PiI2 = "0.53 0.47 0 0 0 0 0;0 0.59 0.41 0 0 0 0;0 0 0.52 0.48 0 0 0;0 0 0 0.52 0.48 0 0;0 0 0 0 0.51 0.49 0;"
           "0 0 0 0 0 0.56 0.44;0 0 0 0 0 0 1";
  p.PiI1 = "0.85 0.15 0 0 0 0 0;0 0.74 0.26 0 0 0 0;0 0 0.85 0.15 0 0 0;0 0 0 0.86 0.14 0 0;0 0 0 0 0.91 0.09 0;"
           "0 0 0 0 0 0.93 0.07;0 0 0 0 0 0 1";
  p.pi = {0.04, 0.13, 0.24, 0.25, 0.21, 0.10, 0.03};
  p.t = {23.10, 7.74, 4.19, 3.95, 4.92, 9.67, 34.73};
  return multiple_example(FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), p, true, 5.0);
}

Outcome criterion4() {
  MultiplePrinted p;
  p.PII = "0.47 0.53 0 0 0 0 0;0.13 0.44 0.43 0 0 0 0;0.02 0.17 0.48 0.33 0 0 0;0 0.02 0.22 0.46 0.30 0 0;"
          "0 0 0.04 0.24 0.48 0.24 0;0 0 0 0.05 0.31 0.46 0.18;0 0 0 0 0.10 0.42 0.48";
  p.PiII1 = "1 0 0 0 0 0 0;0.07 0.93 0 0 0 0 0;0 0.23 0.77 0 0 0 0;0 0 0.23 0.77 0 0 0;0 0 0 0.32 0.68 0 0;"
            "0 0 0 0 0.34 0.66 0;0 0 0 0 0 0.50 0.50";
  p.PiII2 = "1 0 0 0 0 0 0;0.22 0.78 0 0 0 0 0;0 0.22 0.78 0 0 0 0;0 0 0.31 0.69 0 0 0;0 0 0 0.32 0.68 0 0;"
            "0 0 0 0 0.42 0.58 0;0 0 0 0 0 0.58 0.42";
  p.UpsII = "0.47 0.53 0 0 0 0 0;0 0.41 0.59 0 0 0 0;0 0 0.45 0.55 0 0 0;0 0 0 0.43 0.57 0 0;0 0 0 0 0.49 0.51 0;"
            "0 0 0 0 0 0.54 0.46;0 0 0 0 0 0 1";
  p.PI = "0.47 0.39 0.14 0 0 0 0;0.17 0.44 0.34 0.05 0 0 0;0 0.21 0.48 0.26 0.05 0 0;0 0 0.28 0.46 0.23 0.03 0;"
         "0 0 0 0.32 0.47 0.19 0.02;0 0 0 0 0.40 0.46 0.14;0 0 0 0 0 0.52 0.48";
  p.UpsI = "1 0 0 0 0 0 0;0.37 0.63 0 0 0 0 0;0 0.46 0.54 0 0 0 0;0 0 0.57 0.43 0 0 0;0 0 0 0.60 0.40 0 0;"
           "0 0 0 0 0.69 0.31 0;0 0 0 0 0 0.79 0.21";
  p.PiI2 = "0.57 0.43 0 0 0 0 0;0 0.70 0.30 0 0 0 0;0 0 0.67 0.33 0 0 0;0 0 0 0.73 0.27 0 0;0 0 0 0 0.74 0.26 0;"
           "0 0 0 0 0 0.83 0.17;0 0 0 0 0 0 1";
  p.PiI1 = "0.83 0.17 0 0 0 0 0;0 0.67 0.33 0 0 0 0;0 0 0.74 0.26 0 0 0;0 0 0 0.72 0.28 0 0;0 0 0 0 0.77 0.23 0;"
           "0 0 0 0 0 0.80 0.20;0 0 0 0 0 0 1";
  p.pi = {0.03, 0.10, 0.21, 0.24, 0.23, 0.14, 0.05};
  p.t = {30.10, 9.89, 4.85, 4.11, 4.31, 7.24, 21.66};
  return multiple_example(FamilySpec::jacobi_pineiro(0.4, 0.6, 0.75), p, false, 5.0);
}

/** @brief Five parameter points per family without printed numbers. */
std::vector<FamilySpec> property_sweep() {
  return {FamilySpec::meixner(0.5, 0.3),
          FamilySpec::meixner(1.0, 0.5),
          FamilySpec::meixner(2.5, 0.7),
          FamilySpec::meixner(0.2, 0.1),
          FamilySpec::meixner(4.0, 0.9),
          FamilySpec::kravchuk(0.3, 10),
          FamilySpec::kravchuk(0.5, 8),
          FamilySpec::kravchuk(0.7, 12),
          FamilySpec::kravchuk(0.1, 9),
          FamilySpec::kravchuk(0.9, 20),
          FamilySpec::laguerre(-0.5),
          FamilySpec::laguerre(0.0),
          FamilySpec::laguerre(0.5),
          FamilySpec::laguerre(2.0),
          FamilySpec::laguerre(5.0),
          FamilySpec::charlier(0.3),
          FamilySpec::charlier(1.0),
          FamilySpec::charlier(2.0),
          FamilySpec::charlier(5.0),
          FamilySpec::charlier(10.0),
          FamilySpec::hermite(0.0),
          FamilySpec::hermite(0.5),
          FamilySpec::hermite(2.0),
          FamilySpec::hermite(4.0),
          FamilySpec::hermite(8.0),
          FamilySpec::multiple_meixner2(0.5, 1.2, 0.3),
          FamilySpec::multiple_meixner2(1.0, 1.5, 0.5),
          FamilySpec::multiple_meixner2(2.0, 2.4, 0.7),
          FamilySpec::multiple_meixner2(1.5, 1.2, 0.4),
          FamilySpec::multiple_meixner2(0.3, 0.9, 0.2),
          FamilySpec::multiple_laguerre1(0.4, 0.6),
          FamilySpec::multiple_laguerre1(-0.5, 0.2),
          FamilySpec::multiple_laguerre1(1.0, 1.5),
          FamilySpec::multiple_laguerre1(0.7, 0.2),
          FamilySpec::multiple_laguerre1(2.0, 2.9)};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  int runs = 0, checks = 0, skipped = 0;
  std::vector<std::string> failures;
  for (const auto& s : property_sweep())
    for (int m : {3, 5, 8}) {
      std::vector<std::optional<ChainKind>> kinds = {std::nullopt};
      if (is_multiple(s)) kinds = {ChainKind::TypeII, ChainKind::TypeI};
      for (const auto& k : kinds) {
        ++runs;
        const std::string label = std::string(info(s.kind).cli_name) + " " +
                                  [&] {
                                    std::ostringstream os;
                                    for (const auto& [n, v] : s.params()) os << n << "=" << v << " ";
                                    if (s.shift != 0) os << "shift=" << s.shift << " ";
                                    return os.str();
                                  }() +
                                  "m=" + std::to_string(m) + (k ? std::string(" kind=") + to_string(*k) : "");
        try {
          for (const auto& r : verify::run_suite(s, m, k)) {
            if (r.skipped) {
              ++skipped;
              continue;
            }
            ++checks;
            if (!r.passed) {
              std::ostringstream os;
              os << label << ": " << r.name << " = " << r.value << " > " << r.tolerance;
              failures.push_back(os.str());
            }
          }
        } catch (const std::exception& e) {
          failures.push_back(label + ": " + e.what());
        }
      }
    }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << runs << " chains, " << checks << " property checks (" << skipped << " not applicable), " << failures.size()
     << " failures; runtime " << std::setprecision(3) << secs << " s";
  for (const auto& f : failures) os << "; " << f;
  return {failures.empty() && secs < 60.0, os.str()};
}

Outcome criterion6() {
  std::vector<std::string> problems;
  for (int m : {3, 4, 5, 8}) {
    const auto ch = chains::build(FamilySpec::hermite(), m);
    if (chains::period(ch) != 2) problems.push_back("m=" + std::to_string(m) + ": period != 2");
    if (chains::ergodic(ch)) problems.push_back("m=" + std::to_string(m) + ": reported ergodic");
    try {
      factor::stochastic_factors(ch);
      problems.push_back("m=" + std::to_string(m) + ": unshifted Hermite factorized");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPBF && e.code() != ErrorCode::ZeroPivot)
        problems.push_back("m=" + std::to_string(m) + ": unexpected error " + e.what());
    }
    try {
      factor::numeric_pbf(ch.bands);
      problems.push_back("m=" + std::to_string(m) + ": numeric PBF of unshifted Hermite succeeded");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroPivot) problems.push_back("m=" + std::to_string(m) + ": " + e.what());
    }
    const double xmax = ch.x_max;
    for (double extra : {0.1, 1.0, 5.0}) {
      const auto sh = chains::build(FamilySpec::hermite(xmax + extra), m);
      try {
        const auto f = factor::stochastic_factors(sh);
        for (const auto& F : f.factors) {
          const double rs = (F.matrix.rowwise().sum().array() - 1).abs().maxCoeff();
          if (rs > 1e-9 || F.matrix.minCoeff() < 0)
            problems.push_back("m=" + std::to_string(m) + ": factor " + F.name + " not stochastic");
        }
        const double e = (f.product() - sh.P).cwiseAbs().maxCoeff();
        if (e > 1e-9) problems.push_back("m=" + std::to_string(m) + ": product error " + std::to_string(e));
      } catch (const std::exception& e) {
        problems.push_back("m=" + std::to_string(m) + " shift " + std::to_string(xmax + extra) + ": " + e.what());
      }
    }
  }
  std::ostringstream os;
  os << "unshifted Hermite m in {3,4,5,8}: period 2, not ergodic, no factorization; shifted beyond x_max: "
     << "stochastic factors with product error <= 1e-9";
  for (const auto& p : problems) os << "; " << p;
  return {problems.empty(), os.str()};
}

Outcome criterion7() {
  const auto ch = chains::build(FamilySpec::hahn(0.5, 0.75, 5), 5);
  const auto pi = chains::steady_state(ch);
  const std::uint64_t seed = 20240601;
  const auto rep = sim::simulate(ch, 1, 1000000, seed);
  double worst_pi = 0, worst_z = 0;
  for (int j = 0; j < 5; ++j) {
    worst_pi = std::max(worst_pi, std::abs(rep.empirical_distribution[j] - pi[j]));
    worst_z = std::max(worst_z, std::abs(rep.empirical_return_times[j] - 1 / pi[j]) / rep.return_time_stderr[j]);
  }
  std::ostringstream os;
  os << "seed " << seed << ", 10^6 steps: max |empirical - pi| = " << std::setprecision(3) << worst_pi
     << " (< 0.005), max |empirical t - 1/pi| / stderr = " << worst_z << " (<= 3)";
  return {worst_pi < 0.005 && worst_z <= 3.0, os.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"Hahn(0.5, 0.75, 5), m=5 printed example", criterion1},
      {"Jacobi(0.5, 0.75), m=5 printed example", criterion2},
      {"multiple Hahn(0.4, 0.6, 0.75, 10), m=7 printed example and reversal", criterion3},
      {"Jacobi-Pineiro(0.4, 0.6, 0.75), m=7 printed example", criterion4},
      {"property suite over parameter sweeps", criterion5},
      {"degenerate Hermite handling", criterion6},
      {"simulation consistency", criterion7}};
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) which.push_back(i);
  bool all = true;
  for (int k : which) {
    if (k < 1 || k > static_cast<int>(criteria().size())) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    const auto& [name, fn] = criteria()[k - 1];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << name << " -- " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
