#pragma once

/**
 * @file verify.hpp
 * @brief Invariant suite run on one family / truncation: stochasticity,
 * steady state, balance, factorization, closed forms against the recurrence,
 * interlacing, PBF round trip, iterated probabilities and geometric decay.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"
#include "factor.hpp"
#include "families.hpp"
#include "spectral.hpp"

namespace mopchains {

/** @brief Outcome of one property check. */
struct PropertyResult {
  std::string name;
  bool passed{false};
  bool skipped{false};
  double value{0};      ///< measured error (or fitted quantity)
  double tolerance{0};
  std::string detail;
};

/** @brief Tolerances of the suite keyed by property name. */
inline std::map<std::string, double> default_tolerances() {
  return {{"row_sums", 1e-10},       {"steady_state", 1e-10}, {"balance", 1e-10},
          {"factor_product", 1e-9},  {"closed_form", 1e-8},   {"interlacing", 0.0},
          {"pbf_rebuild", 1e-10},    {"iterated", 1e-8},      {"gap_ratio_fit", 0.05},
          {"left_vector", 1e-6}};
}

namespace verify {

/** @brief Max |a - b| over two equally sized matrices. */
inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/** @brief Max |row sum - 1|. */
inline double row_sum_error(const Matrix& P) {
  return (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

/** @brief Max |pi P - pi|. */
inline double fixed_point_error(const Matrix& P, const std::vector<double>& pi) {
  Eigen::Map<const Eigen::RowVectorXd> row(pi.data(), static_cast<Eigen::Index>(pi.size()));
  return (row * P - row).cwiseAbs().maxCoeff();
}

/** @brief Max |pi_i P_ij - pi_j Q_ji| (Q = P checks detailed balance). */
inline double balance_error(const Matrix& P, const Matrix& Q, const std::vector<double>& pi) {
  double e = 0;
  for (int i = 0; i < P.rows(); ++i)
    for (int j = 0; j < P.cols(); ++j) e = std::max(e, std::abs(pi[i] * P(i, j) - pi[j] * Q(j, i)));
  return e;
}

/** @brief Largest gap violation of strict interlacing between degrees n and n+1, n < m (0 if fine). */
inline double interlacing_violation(const FamilySpec& s, int m) {
  std::vector<double> prev;
  double worst = 0;
  for (int n = 1; n <= m; ++n) {
    auto z = spectral::zeros(recurrence_bands(s, n));
    for (std::size_t k = 0; k + 1 < z.size(); ++k) worst = std::max(worst, z[k] - z[k + 1] + 1e-300);
    for (std::size_t k = 0; k < prev.size(); ++k) {
      // z[k] < prev[k] < z[k+1]
      worst = std::max(worst, z[k] - prev[k]);
      worst = std::max(worst, prev[k] - z[k + 1]);
    }
    prev = std::move(z);
  }
  return worst < 0 ? 0 : worst;
}

/**
 * @brief Relative discrepancy between the closed-form polynomials and the
 * recurrence values, at m+1 points spread across [lower, 1.2 x_max].  The
 * error for degree n is normalized by max_x |p_n(x)| over the points.
 */
inline double closed_form_error(const FamilySpec& s, const RecurrenceBands& r, double x_max) {
  const int m = r.m;
  const double lo = r.support_lower ? *r.support_lower : -1.2 * x_max;
  const double hi = 1.2 * x_max;
  std::vector<double> xs;
  for (int k = 0; k <= m; ++k) xs.push_back(lo + (hi - lo) * (k + 0.37) / (m + 1));
  double worst = 0;
  for (int n = 0; n <= m; ++n) {
    double scale = 0, err = 0;
    for (double x : xs) {
      const double rec = spectral::eval_sequence(r, x)[n];
      const double cf = is_multiple(s) ? closed_form_typeII(s, n, x) : closed_form_scalar(s, n, x);
      scale = std::max(scale, std::abs(rec));
      err = std::max(err, std::abs(cf - rec));
    }
    if (scale > 0) worst = std::max(worst, err / scale);
  }
  return worst;
}

/**
 * @brief Multiple families: relative distance between the left eigenvector of
 * T_m at each zero and the type I determinant combination (after scaling).
 */
inline double left_vector_error(const FamilySpec& s, const StochasticChain& ch) {
  const int m = ch.m;
  double worst = 0;
  for (int k = 0; k < m; ++k) {
    const double x = ch.spectral.zeros[k];
    std::vector<double> det(m);
    for (int n = 0; n < m; ++n) det[n] = typeI_determinant(s, n, m, x);
    const auto& v = ch.spectral.left_table.col(k);
    // Best scale in least squares, then relative residual.
    double num = 0, den = 0, vmax = 0;
    for (int n = 0; n < m; ++n) {
      num += det[n] * v(n);
      den += det[n] * det[n];
      vmax = std::max(vmax, std::abs(v(n)));
    }
    const double lambda = den > 0 ? num / den : 0;
    for (int n = 0; n < m; ++n) worst = std::max(worst, std::abs(lambda * det[n] - v(n)) / vmax);
  }
  return worst;
}

/** @brief Max entrywise |spectral P^r - repeated product P^r| over r = 0..r_max. */
inline double iterated_error(const StochasticChain& ch, int r_max) {
  Matrix pw = Matrix::Identity(ch.m, ch.m);
  double worst = 0;
  for (int r = 0; r <= r_max; ++r) {
    worst = std::max(worst, max_abs_diff(chains::iterated(ch, r), pw));
    pw = pw * ch.P;
  }
  return worst;
}

/**
 * @brief Fitted geometric decay rate of the successive differences
 * max|P^{r+1} - P^r| (which decay like |P^r - 1 pi|) and the predicted rate
 * max(|x_1|, |x_{m-1}|) / x_max.  The fit is a least-squares line through the
 * log differences above 1e-11, skipping the transient first quarter.
 */
struct DecayFit {
  double fitted{0};
  double predicted{0};
  int points{0};
};

inline DecayFit decay_fit(const StochasticChain& ch) {
  DecayFit f;
  const int m = ch.m;
  const auto& z = ch.spectral.zeros;
  f.predicted = std::max(std::abs(z[0]), std::abs(z[m - 2])) / ch.x_max;
  std::vector<std::pair<double, double>> pts;
  Matrix pw = ch.P;
  for (int r = 1; r <= 2000; ++r) {
    Matrix nx = pw * ch.P;
    const double d = (nx - pw).cwiseAbs().maxCoeff();
    if (d < 1e-11) break;
    pts.emplace_back(r, std::log(d));
    pw = std::move(nx);
  }
  const std::size_t skip = pts.size() / 4;
  std::vector<std::pair<double, double>> use(pts.begin() + static_cast<std::ptrdiff_t>(skip), pts.end());
  f.points = static_cast<int>(use.size());
  if (use.size() < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : use) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(use.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.fitted = std::exp(slope);
  return f;
}

/**
 * @brief Run every applicable property for the family truncated to m states
 * (and the given kind for multiple families).  Properties that do not apply
 * (no factorization, periodic chain, no closed form) are reported as skipped.
 * Errors thrown while building the chain propagate.
 */
inline std::vector<PropertyResult> run_suite(const FamilySpec& s, int m, std::optional<ChainKind> kind = std::nullopt,
                                             const std::map<std::string, double>& tol_override = {}) {
  auto tol = default_tolerances();
  for (const auto& [k, v] : tol_override) {
    if (!tol.count(k)) throw Error(ErrorCode::InvalidParams, "unknown tolerance '" + k + "'");
    tol[k] = v;
  }
  std::vector<PropertyResult> out;
  auto record = [&](const std::string& name, double value, const std::string& detail = "") {
    PropertyResult p{name, value <= tol[name], false, value, tol[name], detail};
    out.push_back(p);
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    out.push_back(PropertyResult{name, true, true, 0, tol[name], why});
  };

  const auto ch = chains::build(s, m, kind);
  const auto pi = chains::steady_state(ch);
  record("row_sums", row_sum_error(ch.P));
  record("steady_state", fixed_point_error(ch.P, pi));

  if (ch.kind == ChainKind::Scalar) {
    record("balance", balance_error(ch.P, ch.P, pi), "detailed balance");
  } else {
    const auto other = chains::build(s, m, ch.kind == ChainKind::TypeII ? ChainKind::TypeI : ChainKind::TypeII);
    record("balance", balance_error(ch.P, other.P, pi), "cross-kind balance against the other type");
  }

  try {
    const auto fz = factor::stochastic_factors(ch);
    record("factor_product", max_abs_diff(fz.product(), ch.P),
           std::to_string(fz.factors.size()) + (fz.closed_form ? " factors (closed form)" : " factors (numeric)"));
    record("pbf_rebuild", [&] {
      const auto rb = factor::rebuild(fz.a, m, ch.bands.is_multiple);
      double e = 0;
      for (int n = 0; n < m; ++n) e = std::max(e, std::abs(rb.b[n] - ch.bands.b[n]));
      for (int n = 1; n < m; ++n) e = std::max(e, std::abs(rb.cn(n) - ch.bands.cn(n)));
      for (int n = 2; n < m; ++n) e = std::max(e, std::abs(rb.dn(n) - ch.bands.dn(n)));
      return e;
    }());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPBF && e.code() != ErrorCode::ZeroPivot && e.code() != ErrorCode::NonPositivePivot)
      throw;
    skip("factor_product", std::string("no stochastic factorization: ") + e.what());
    skip("pbf_rebuild", "no stochastic factorization");
  }

  record("closed_form", closed_form_error(s, ch.bands, ch.x_max));
  if (is_multiple(s)) record("left_vector", left_vector_error(s, ch), "type I determinants vs left eigenvectors");
  record("interlacing", interlacing_violation(s, m));
  record("iterated", iterated_error(ch, 20), "r = 0..20");

  if (m >= 2 && chains::period(ch) == 1) {
    const auto fit = decay_fit(ch);
    if (fit.points < 2 || fit.predicted < 1e-3) {
      skip("gap_ratio_fit", "convergence too fast to fit");
    } else {
      record("gap_ratio_fit", std::abs(fit.fitted - fit.predicted) / fit.predicted,
             "fitted " + std::to_string(fit.fitted) + " vs predicted " + std::to_string(fit.predicted));
    }
  } else {
    skip("gap_ratio_fit", "periodic or single-state chain");
  }
  return out;
}

/** @brief True if every non-skipped property passed. */
inline bool all_passed(const std::vector<PropertyResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const PropertyResult& p) { return p.passed; });
}

}  // namespace verify
}  // namespace mopchains
