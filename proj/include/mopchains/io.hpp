#pragma once

/**
 * @file io.hpp
 * @brief The serialized output document of the command-line front end, its
 * lossless JSON round trip, and CSV / fixed-digit table renderings.
 */

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chains.hpp"
#include "factor.hpp"
#include "families.hpp"
#include "sim.hpp"

namespace mopchains {

using RowMajor = std::vector<std::vector<double>>;

/** @brief One factor of a stochastic factorization as serialized. */
struct FactorEntry {
  std::string name;  ///< Pi, Pi1, Pi2 or Upsilon
  std::string role;  ///< pure-birth or pure-death
  RowMajor matrix;
};

/** @brief Everything emitted by build / analyze / factor / iterate / simulate. */
struct OutputDocument {
  std::string family;
  std::map<std::string, double> params;
  int m{0};
  std::string kind;
  double shift{0};
  double x_max{0};
  RowMajor matrix;
  std::vector<double> steady_state;
  std::vector<double> return_times;
  int period{1};
  bool ergodic{true};
  std::optional<double> gap_ratio;
  std::optional<std::vector<FactorEntry>> factors;
  std::optional<RowMajor> reversal;
  std::vector<std::string> warnings;
  std::map<std::string, double> tolerances;
  std::optional<int> r;                  ///< iterate: matrix holds P^r
  std::optional<SimReport> simulation;   ///< simulate: empirical statistics
};

namespace io {

inline RowMajor to_rows(const Matrix& M) {
  RowMajor out(static_cast<std::size_t>(M.rows()), std::vector<double>(static_cast<std::size_t>(M.cols())));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

inline Matrix from_rows(const RowMajor& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto c = n ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix M(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw Error(ErrorCode::InvalidParams, "ragged matrix in document");
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = rows[i][j];
  }
  return M;
}

/**
 * @brief Fill the analysis fields of a document from a chain.  Factors,
 * iterate and simulation fields are left for the caller.
 */
inline OutputDocument make_document(const FamilySpec& spec, const StochasticChain& ch) {
  OutputDocument d;
  d.family = info(spec.kind).cli_name;
  d.params = spec.params();
  d.m = ch.m;
  d.kind = to_string(ch.kind);
  d.shift = spec.shift;
  d.x_max = ch.x_max;
  d.matrix = to_rows(ch.P);
  const auto a = chains::analyze(ch);
  d.steady_state = a.steady_state;
  d.return_times = a.return_times;
  d.period = a.period;
  d.ergodic = a.ergodic;
  d.gap_ratio = a.gap_ratio;
  d.reversal = to_rows(a.reversal);
  d.warnings = ch.warnings;
  d.tolerances = {{"clamp", chains::kClampTolerance}, {"row_sum_warning", 1e-10}, {"factor_product", 1e-9}};
  return d;
}

inline std::vector<FactorEntry> factor_entries(const StochasticFactorization& f) {
  std::vector<FactorEntry> out;
  for (const auto& s : f.factors) out.push_back({s.name, to_string(s.role), to_rows(s.matrix)});
  return out;
}

/** @brief Doubles as JSON numbers; non-finite values become null. */
inline nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json nums(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline double get_num(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::vector<double> get_nums(const nlohmann::json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

inline nlohmann::json to_json(const SimReport& s) {
  return {{"steps", s.steps},
          {"start_state", s.start_state},
          {"seed", s.seed},
          {"trajectories", s.trajectories},
          {"empirical_distribution", nums(s.empirical_distribution)},
          {"empirical_return_times", nums(s.empirical_return_times)},
          {"return_time_stderr", nums(s.return_time_stderr)},
          {"visit_counts", s.visit_counts},
          {"return_counts", s.return_counts}};
}

inline SimReport sim_from_json(const nlohmann::json& j) {
  SimReport s;
  s.steps = j.at("steps").get<std::uint64_t>();
  s.start_state = j.at("start_state").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.trajectories = j.at("trajectories").get<int>();
  s.empirical_distribution = get_nums(j.at("empirical_distribution"));
  s.empirical_return_times = get_nums(j.at("empirical_return_times"));
  s.return_time_stderr = get_nums(j.at("return_time_stderr"));
  s.visit_counts = j.at("visit_counts").get<std::vector<std::uint64_t>>();
  s.return_counts = j.at("return_counts").get<std::vector<std::uint64_t>>();
  return s;
}

inline nlohmann::json to_json(const OutputDocument& d) {
  nlohmann::json j;
  j["family"] = d.family;
  j["params"] = d.params;
  j["m"] = d.m;
  j["kind"] = d.kind;
  j["shift"] = d.shift;
  j["x_max"] = d.x_max;
  j["matrix"] = d.matrix;
  j["steady_state"] = nums(d.steady_state);
  j["return_times"] = nums(d.return_times);
  j["period"] = d.period;
  j["ergodic"] = d.ergodic;
  j["gap_ratio"] = d.gap_ratio ? num(*d.gap_ratio) : nlohmann::json(nullptr);
  if (d.factors) {
    auto fs = nlohmann::json::array();
    for (const auto& f : *d.factors) fs.push_back({{"name", f.name}, {"role", f.role}, {"matrix", f.matrix}});
    j["factors"] = fs;
  }
  if (d.reversal) j["reversal"] = *d.reversal;
  j["warnings"] = d.warnings;
  j["tolerances"] = d.tolerances;
  if (d.r) j["r"] = *d.r;
  if (d.simulation) j["simulation"] = to_json(*d.simulation);
  return j;
}

inline OutputDocument document_from_json(const nlohmann::json& j) {
  OutputDocument d;
  d.family = j.at("family").get<std::string>();
  d.params = j.at("params").get<std::map<std::string, double>>();
  d.m = j.at("m").get<int>();
  d.kind = j.at("kind").get<std::string>();
  d.shift = j.at("shift").get<double>();
  d.x_max = j.at("x_max").get<double>();
  d.matrix = j.at("matrix").get<RowMajor>();
  d.steady_state = get_nums(j.at("steady_state"));
  d.return_times = get_nums(j.at("return_times"));
  d.period = j.at("period").get<int>();
  d.ergodic = j.at("ergodic").get<bool>();
  if (j.contains("gap_ratio") && !j["gap_ratio"].is_null()) d.gap_ratio = j["gap_ratio"].get<double>();
  if (j.contains("factors")) {
    std::vector<FactorEntry> fs;
    for (const auto& f : j["factors"])
      fs.push_back({f.value("name", std::string()), f.at("role").get<std::string>(), f.at("matrix").get<RowMajor>()});
    d.factors = fs;
  }
  if (j.contains("reversal")) d.reversal = j["reversal"].get<RowMajor>();
  d.warnings = j.at("warnings").get<std::vector<std::string>>();
  d.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
  if (j.contains("r")) d.r = j["r"].get<int>();
  if (j.contains("simulation")) d.simulation = sim_from_json(j["simulation"]);
  return d;
}

/** @brief Serialize with round-trip precision (shortest representation that re-parses exactly). */
inline std::string dump(const OutputDocument& d, int indent = 2) { return to_json(d).dump(indent); }

inline OutputDocument parse(const std::string& text) { return document_from_json(nlohmann::json::parse(text)); }

/**
 * @brief Check that a parsed document is internally consistent: square
 * stochastic matrix of size m (P or P^r), steady state fixed by it and summing
 * to 1, return times reciprocal to it, and factors multiplying back to P.
 */
inline std::vector<std::string> revalidate(const OutputDocument& d, double tol = 1e-9) {
  std::vector<std::string> problems;
  if (static_cast<int>(d.matrix.size()) != d.m) problems.push_back("matrix has wrong number of rows");
  Matrix P;
  try {
    P = from_rows(d.matrix);
  } catch (const Error& e) {
    problems.push_back(e.what());
    return problems;
  }
  if (P.cols() != d.m) problems.push_back("matrix is not square");
  if (!problems.empty()) return problems;
  if (((P.rowwise().sum().array() - 1.0).abs() > tol).any()) problems.push_back("row sums differ from 1");
  if (static_cast<int>(d.steady_state.size()) != d.m || static_cast<int>(d.return_times.size()) != d.m) {
    problems.push_back("steady state / return times have wrong length");
    return problems;
  }
  double s = 0;
  for (double v : d.steady_state) s += v;
  if (std::abs(s - 1) > tol) problems.push_back("steady state does not sum to 1");
  for (int i = 0; i < d.m; ++i)
    if (std::abs(d.return_times[i] * d.steady_state[i] - 1) > tol) problems.push_back("return times are not 1/pi");
  Eigen::Map<const Eigen::RowVectorXd> pi(d.steady_state.data(), d.m);
  if (((pi * P - pi).cwiseAbs().array() > tol).any()) problems.push_back("steady state is not fixed by P");
  if (d.factors && !d.factors->empty() && !d.r) {
    Matrix prod = Matrix::Identity(d.m, d.m);
    for (const auto& f : *d.factors) prod = prod * from_rows(f.matrix);
    if ((prod - P).cwiseAbs().maxCoeff() > tol) problems.push_back("factor product differs from the matrix");
  }
  return problems;
}

/** @brief Matrix as CSV with full (17 significant digit) precision. */
inline std::string to_csv(const RowMajor& M) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& row : M) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
  return os.str();
}

/** @brief Matrix rounded to a fixed number of decimals, space aligned. */
inline std::string format_matrix(const RowMajor& M, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits);
  for (const auto& row : M) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << std::setw(digits + 4) << row[j];
    os << '\n';
  }
  return os.str();
}

inline std::string format_vector(const std::vector<double>& v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits);
  for (std::size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << v[j];
  return os.str();
}

/** @brief Human-readable rendering of a document at the given number of decimals. */
inline std::string to_table(const OutputDocument& d, int digits) {
  std::ostringstream os;
  os << d.family << " (";
  bool first = true;
  for (const auto& [k, v] : d.params) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  os << "), m=" << d.m << ", kind=" << d.kind;
  if (d.shift != 0) os << ", shift=" << d.shift;
  os << "\n";
  os << (d.r ? "P^" + std::to_string(*d.r) : std::string("P")) << ":\n" << format_matrix(d.matrix, digits);
  if (d.factors)
    for (const auto& f : *d.factors) os << f.name << " (" << f.role << "):\n" << format_matrix(f.matrix, digits);
  os << "steady state: " << format_vector(d.steady_state, digits) << "\n";
  os << "return times: " << format_vector(d.return_times, digits) << "\n";
  os << "period: " << d.period << ", ergodic: " << (d.ergodic ? "yes" : "no");
  if (d.gap_ratio) os << ", gap ratio: " << std::setprecision(6) << *d.gap_ratio;
  os << "\n";
  if (d.simulation) {
    const auto& s = *d.simulation;
    os << "simulation: " << s.steps << " steps from state " << s.start_state << ", seed " << s.seed << "\n";
    os << "  empirical distribution: " << format_vector(s.empirical_distribution, digits) << "\n";
    os << "  empirical return times: " << format_vector(s.empirical_return_times, digits) << "\n";
  }
  for (const auto& w : d.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace io
}  // namespace mopchains
