#pragma once

/**
 * @file chains.hpp
 * @brief Stochastic matrices built from truncated recurrence matrices and the
 * chain analyses derived from their spectral data: steady state, expected
 * return times, period, ergodicity, r-step probabilities, time reversal and
 * the geometric convergence ratio.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"
#include "families.hpp"
#include "spectral.hpp"

namespace mopchains {

/** @brief Which recurrence matrix the chain is built from. */
enum class ChainKind { Scalar, TypeII, TypeI };

inline const char* to_string(ChainKind k) {
  switch (k) {
    case ChainKind::Scalar: return "scalar";
    case ChainKind::TypeII: return "II";
    case ChainKind::TypeI: return "I";
  }
  return "?";
}

inline ChainKind chain_kind_from_string(const std::string& s) {
  if (s == "scalar") return ChainKind::Scalar;
  if (s == "II") return ChainKind::TypeII;
  if (s == "I") return ChainKind::TypeI;
  throw Error(ErrorCode::InvalidParams, "kind must be one of scalar, I, II (got '" + s + "')");
}

/**
 * @brief A stochastic matrix P = (1/x_max) sigma^{-1} M sigma with its
 * construction data.  M is J_m (Scalar), T_m (TypeII) or T_m^T (TypeI);
 * sigma is the Perron right vector (Scalar, TypeII) or left vector (TypeI).
 */
struct StochasticChain {
  ChainKind kind{ChainKind::Scalar};
  int m{0};
  Matrix P;
  double x_max{0};
  std::vector<double> sigma;
  SpectralDecomposition spectral;
  RecurrenceBands bands;
  std::optional<FamilySpec> family;  ///< absent for chains built directly from bands
  std::vector<std::string> warnings;

  /** @brief The Perron right (B^(n)(x_max)) and left components, positively normalized. */
  std::vector<double> perron_right() const { return column(spectral.right_table, m - 1); }
  std::vector<double> perron_left() const { return column(spectral.left_table, m - 1); }

 private:
  static std::vector<double> column(const Matrix& t, int k) {
    std::vector<double> v(t.rows());
    for (int i = 0; i < t.rows(); ++i) v[i] = t(i, k);
    const double s = v[0] < 0 ? -1.0 : 1.0;
    for (double& x : v) x *= s;
    return v;
  }
};

namespace chains {

constexpr double kClampTolerance = 1e-12;

/**
 * @brief Build the stochastic matrix from given bands (the family is kept only
 * for reporting).  Checks the sign conditions on the bands, clamps rounding
 * negatives in [-1e-12, 0) with a warning and rejects anything below.
 */
inline StochasticChain build_from_bands(const RecurrenceBands& bands, ChainKind kind,
                                        std::optional<FamilySpec> family = std::nullopt) {
  if (bands.is_multiple == (kind == ChainKind::Scalar))
    throw Error(ErrorCode::InvalidParams, bands.is_multiple ? "multiple families need kind I or II"
                                                            : "scalar families need kind scalar");
  const int m = bands.m;
  for (int n = 0; n < m; ++n)
    if (bands.b[n] < 0)
      throw Error(ErrorCode::NotNonnegative, "b_" + std::to_string(n) + " = " + std::to_string(bands.b[n]) +
                                                 " is negative (a shift may be required)");
  for (int n = 1; n < m; ++n)
    if (bands.cn(n) < 0) throw Error(ErrorCode::NotNonnegative, "c_" + std::to_string(n) + " is negative");
  for (int n = 2; n < m; ++n)
    if (bands.is_multiple && !(bands.dn(n) > 0))
      throw Error(ErrorCode::NotNonnegative, "d_" + std::to_string(n) + " is not positive");

  StochasticChain ch;
  ch.kind = kind;
  ch.m = m;
  ch.bands = bands;
  ch.family = family;
  ch.spectral = spectral::decompose(bands);
  ch.x_max = ch.spectral.zeros.back();
  if (!(ch.x_max > 0))
    throw Error(ErrorCode::NotNonnegative, "largest zero x_max = " + std::to_string(ch.x_max) + " is not positive");

  Matrix M = banded_matrix(bands);
  if (kind == ChainKind::TypeI) M.transposeInPlace();
  ch.sigma = kind == ChainKind::TypeI ? ch.perron_left() : ch.perron_right();
  for (int i = 0; i < m; ++i)
    if (!(ch.sigma[i] > 0))
      throw Error(ErrorCode::NotNonnegative, "Perron vector component " + std::to_string(i + 1) + " is not positive");

  ch.P = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (M(i, j) == 0.0) continue;
      double v = M(i, j) * ch.sigma[j] / (ch.sigma[i] * ch.x_max);
      if (v < 0) {
        if (v < -kClampTolerance)
          throw Error(ErrorCode::NotNonnegative, "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                     ") = " + std::to_string(v));
        ch.warnings.push_back("clamped entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                              std::to_string(v) + " to 0");
        v = 0;
      }
      ch.P(i, j) = v;
    }
  for (int i = 0; i < m; ++i) {
    const double s = ch.P.row(i).sum();
    if (std::abs(s - 1) > 1e-10)
      ch.warnings.push_back("row " + std::to_string(i + 1) + " sums to 1 + " + std::to_string(s - 1));
  }
  return ch;
}

/** @brief Default chain kind for a family: Scalar for scalar families, TypeII otherwise. */
inline ChainKind default_kind(const FamilySpec& s) { return is_multiple(s) ? ChainKind::TypeII : ChainKind::Scalar; }

/** @brief Build P_m, P_{II,m} or P_{I,m} for the family truncated to m states. */
inline StochasticChain build(const FamilySpec& spec, int m, std::optional<ChainKind> kind = std::nullopt) {
  const ChainKind k = kind.value_or(default_kind(spec));
  if (is_multiple(spec) && k == ChainKind::Scalar)
    throw Error(ErrorCode::InvalidParams, "multiple families need kind I or II");
  if (!is_multiple(spec) && k != ChainKind::Scalar)
    throw Error(ErrorCode::InvalidParams, "scalar families need kind scalar");
  auto bands = recurrence_bands(spec, m);
  return build_from_bands(bands, k, spec);
}

/**
 * @brief Steady state from the Perron data: pi_j proportional to
 * right_j * left_j (scalar: p_j(x_max)^2 / h_j), normalized to sum 1.
 */
inline std::vector<double> steady_state(const StochasticChain& ch) {
  auto r = ch.perron_right();
  auto l = ch.perron_left();
  std::vector<double> pi(ch.m);
  for (int j = 0; j < ch.m; ++j) pi[j] = r[j] * l[j];
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= s;
  return pi;
}

/** @brief Steady state by solving pi (P - I) = 0, sum pi = 1 directly (diagnostic). */
inline std::vector<double> steady_state_linear(const Matrix& P) {
  const int m = static_cast<int>(P.rows());
  Matrix A = P.transpose() - Matrix::Identity(m, m);
  A.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1;
  Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  return std::vector<double>(x.data(), x.data() + m);
}

/** @brief Expected return times 1 / pi_j. */
inline std::vector<double> return_times(const StochasticChain& ch) {
  auto pi = steady_state(ch);
  for (double& v : pi) v = 1.0 / v;
  return pi;
}

/** @brief Period of an irreducible chain from its support graph (gcd of cycle lengths). */
inline int graph_period(const Matrix& P) {
  const int m = static_cast<int>(P.rows());
  std::vector<int> level(m, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  int g = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < m; ++v) {
      if (P(u, v) <= 0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

/**
 * @brief Period from the coefficient pattern: any b > 0 gives 1; otherwise
 * the cycle lengths available are 2 (through c) and 3 (through d).
 */
inline int coefficient_period(const RecurrenceBands& r) {
  bool any_b = false, any_c = false, any_d = false;
  for (int n = 0; n < r.m; ++n) any_b |= r.b[n] > 0;
  for (int n = 1; n < r.m; ++n) any_c |= r.cn(n) > 0;
  for (int n = 2; n < r.m; ++n) any_d |= r.dn(n) > 0;
  if (any_b || r.m == 1) return 1;
  if (any_c && any_d) return 1;
  if (any_c) return 2;
  if (any_d) return 3;
  return 1;
}

/** @brief Period; errors with PeriodMismatch if the two classifications disagree. */
inline int period(const StochasticChain& ch) {
  const int a = coefficient_period(ch.bands);
  const int b = graph_period(ch.P);
  if (a != b)
    throw Error(ErrorCode::PeriodMismatch,
                "coefficient period " + std::to_string(a) + " differs from graph period " + std::to_string(b));
  return a;
}

inline bool ergodic(const StochasticChain& ch) { return period(ch) == 1; }

/** @brief r-step transition probabilities from the spectral representation. */
inline Matrix iterated(const StochasticChain& ch, int r) {
  const int m = ch.m;
  if (r < 0) throw Error(ErrorCode::InvalidParams, "r must be nonnegative");
  const auto& sd = ch.spectral;
  // T^r = sum_k x_k^r right_k left_k^T / norm_k, computed with (x_k / x_max)^r.
  Matrix Tr = Matrix::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    const double w = std::pow(sd.zeros[k] / ch.x_max, r) / sd.norm[k];
    Tr += w * sd.right_table.col(k) * sd.left_table.col(k).transpose();
  }
  if (ch.kind == ChainKind::TypeI) Tr.transposeInPlace();
  Matrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = Tr(i, j) * ch.sigma[j] / ch.sigma[i];
  return out;
}

/**
 * @brief Time reversal Q_ij = pi_j P_ji / pi_i.  Scalar chains are reversible
 * (Q = P); the reversal of a type II chain is the type I chain and vice versa.
 */
inline StochasticChain reversal(const StochasticChain& ch) {
  auto pi = steady_state(ch);
  for (int j = 0; j < ch.m; ++j)
    if (!(pi[j] > 0)) throw Error(ErrorCode::DegenerateSteadyState, "steady state has a nonpositive entry");
  StochasticChain q = ch;
  for (int i = 0; i < ch.m; ++i)
    for (int j = 0; j < ch.m; ++j) q.P(i, j) = pi[j] * ch.P(j, i) / pi[i];
  if (ch.kind == ChainKind::TypeII) {
    q.kind = ChainKind::TypeI;
    q.sigma = ch.perron_left();
  } else if (ch.kind == ChainKind::TypeI) {
    q.kind = ChainKind::TypeII;
    q.sigma = ch.perron_right();
  }
  return q;
}

/** @brief Convergence ratio x_{m,m-1} / x_{m,m}. */
inline double gap_ratio(const StochasticChain& ch) {
  if (ch.m < 2) throw Error(ErrorCode::InvalidParams, "gap ratio needs at least two states");
  return ch.spectral.zeros[ch.m - 2] / ch.x_max;
}

/** @brief All analyses of a chain. */
struct ChainAnalysis {
  std::vector<double> steady_state;
  std::vector<double> return_times;
  int period{1};
  bool ergodic{true};
  std::optional<double> gap_ratio;
  Matrix reversal;
};

inline ChainAnalysis analyze(const StochasticChain& ch) {
  ChainAnalysis a;
  a.steady_state = steady_state(ch);
  a.return_times = return_times(ch);
  a.period = period(ch);
  a.ergodic = a.period == 1;
  if (ch.m >= 2) a.gap_ratio = gap_ratio(ch);
  a.reversal = reversal(ch).P;
  return a;
}

}  // namespace chains
}  // namespace mopchains
