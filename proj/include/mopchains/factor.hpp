#pragma once

/**
 * @file factor.hpp
 * @brief Bidiagonal factorization of banded recurrence matrices
 * (J = L U, T = L1 L2 U) and the derived pure birth / pure death stochastic
 * factorizations of the chains.
 */

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "spectral.hpp"

namespace mopchains {

/** @brief Role of a bidiagonal stochastic factor. */
enum class FactorRole { PureBirth, PureDeath };

inline const char* to_string(FactorRole r) { return r == FactorRole::PureBirth ? "pure-birth" : "pure-death"; }

/** @brief One bidiagonal stochastic factor. */
struct StochasticFactor {
  std::string name;  ///< "Pi", "Upsilon", "Pi1", "Pi2"
  FactorRole role;
  bool lower;  ///< lower bidiagonal (true) or upper bidiagonal (false)
  Matrix matrix;
};

/**
 * @brief Ordered stochastic factors whose product is P.
 * Scalar: [Pi, Upsilon]; TypeII: [Pi1, Pi2, Upsilon]; TypeI: [Upsilon, Pi2, Pi1].
 */
struct StochasticFactorization {
  std::vector<StochasticFactor> factors;
  std::vector<double> a;   ///< PBF coefficients a_1, a_2, ...
  bool closed_form{false};  ///< coefficients taken from the family's closed forms

  Matrix product() const {
    Matrix p = factors.front().matrix;
    for (std::size_t i = 1; i < factors.size(); ++i) p = p * factors[i].matrix;
    return p;
  }
};

namespace factor {

namespace detail {

inline double pivot_scale(const RecurrenceBands& r) { return spectral::max_row_sum(r) + 1.0; }

}  // namespace detail

/**
 * @brief Numeric bidiagonal factorization of the banded matrix.
 *
 * Scalar: Gaussian elimination J = L U (U diagonal a_1, a_3, ..., unit
 * superdiagonal; L subdiagonal a_2, a_4, ...), returning a_1..a_{2m-1}.
 *
 * Multiple: elimination T = L U with L unit lower of bandwidth 2, then the
 * split L = L1 L2.  The split carries one free parameter, fixed by the leading
 * coefficient a_2 (L1[1,0]); by default a_2 = 0, which yields a nonnegative
 * factorization whenever one exists.  Supplying the closed-form a_2
 * reproduces the closed-form coefficients.  Returns a_1..a_{3m-2}.
 *
 * Positivity is not required (callers needing a PBF check it).
 * @throws Error(ZeroPivot) on a vanishing pivot.
 */
inline std::vector<double> numeric_pbf(const RecurrenceBands& r, std::optional<double> leading_a2 = std::nullopt) {
  const int m = r.m;
  const double tiny = 1e-14 * detail::pivot_scale(r);
  auto need = [&](double v, const std::string& what) {
    if (std::abs(v) <= tiny) throw Error(ErrorCode::ZeroPivot, what);
  };
  if (!r.is_multiple) {
    std::vector<double> a(2 * m - 1, 0.0);
    double u = r.b[0];
    a[0] = u;
    for (int i = 1; i < m; ++i) {
      need(u, "zero pivot at row " + std::to_string(i));
      const double l = r.cn(i) / u;
      u = r.b[i] - l;
      a[2 * i - 1] = l;  // a_{2i}
      a[2 * i] = u;      // a_{2i+1}
    }
    return a;
  }
  // Multiple: T = L U with U diag u_i, unit superdiagonal; L[i,i-1] = s_i, L[i,i-2] = t_i.
  std::vector<double> u(m, 0.0), s(m, 0.0), t(m, 0.0);
  for (int i = 0; i < m; ++i) {
    if (i >= 2) {
      need(u[i - 2], "zero pivot at row " + std::to_string(i - 1));
      t[i] = r.dn(i) / u[i - 2];
    }
    if (i >= 1) {
      need(u[i - 1], "zero pivot at row " + std::to_string(i));
      s[i] = (r.cn(i) - t[i]) / u[i - 1];
    }
    u[i] = r.b[i] - s[i];
  }
  // Split L = L1 L2: s_i = p_i + q_i, t_i = p_i q_{i-1}.
  std::vector<double> p(m, 0.0), q(m, 0.0);
  if (m >= 2) {
    p[1] = leading_a2.value_or(0.0);
    q[1] = s[1] - p[1];
    for (int i = 2; i < m; ++i) {
      need(q[i - 1], "zero pivot in the L1 L2 split at row " + std::to_string(i));
      p[i] = t[i] / q[i - 1];
      q[i] = s[i] - p[i];
    }
  }
  std::vector<double> a(3 * m - 2, 0.0);
  for (int i = 0; i < m; ++i) a[3 * i] = u[i];  // a_{3i+1}
  for (int i = 1; i < m; ++i) {
    a[3 * i - 2] = p[i];  // a_{3i-1} = L1[i, i-1]
    a[3 * i - 1] = q[i];  // a_{3i}   = L2[i, i-1]
  }
  return a;
}

/** @brief Multiply the bidiagonal factors of a and extract the bands. */
inline RecurrenceBands rebuild(const std::vector<double>& a, int m, bool is_multiple) {
  const std::size_t want = is_multiple ? 3 * m - 2 : 2 * m - 1;
  if (a.size() != want)
    throw Error(ErrorCode::InvalidParams, "expected " + std::to_string(want) + " coefficients, got " +
                                              std::to_string(a.size()));
  return is_multiple ? mopchains::detail::multiple_from_pbf(a, m) : mopchains::detail::scalar_from_pbf(a, m);
}

/** @brief Dense bidiagonal factors of the coefficients: scalar {L, U}, multiple {L1, L2, U}. */
inline std::vector<Matrix> bidiagonal_factors(const std::vector<double>& a, int m, bool is_multiple) {
  auto A = [&](int k) { return (k >= 1 && k <= static_cast<int>(a.size())) ? a[k - 1] : 0.0; };
  Matrix U = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    U(i, i) = is_multiple ? A(3 * i + 1) : A(2 * i + 1);
    if (i + 1 < m) U(i, i + 1) = 1.0;
  }
  if (!is_multiple) {
    Matrix L = Matrix::Identity(m, m);
    for (int i = 1; i < m; ++i) L(i, i - 1) = A(2 * i);
    return {L, U};
  }
  Matrix L1 = Matrix::Identity(m, m), L2 = Matrix::Identity(m, m);
  for (int i = 1; i < m; ++i) {
    L1(i, i - 1) = A(3 * i - 1);
    L2(i, i - 1) = A(3 * i);
  }
  return {L1, L2, U};
}

/**
 * @brief Turn an exact factorization M = F_1 ... F_k, with M v = x v and v > 0,
 * into stochastic factors: with w_k = v and w_{j-1} = F_j w_j, factor j is
 * diag(w_{j-1})^{-1} F_j diag(w_j).  Since w_0 = M v = x v, the first factor
 * carries the 1/x normalization; the intermediate w's are the D-diagonals.
 */
inline std::vector<Matrix> stochastic_from_factors(const std::vector<Matrix>& F, const std::vector<double>& v) {
  const int m = static_cast<int>(v.size());
  std::vector<Eigen::VectorXd> w(F.size() + 1);
  w[F.size()] = Eigen::Map<const Eigen::VectorXd>(v.data(), m);
  for (std::size_t j = F.size(); j-- > 0;) w[j] = F[j] * w[j + 1];
  std::vector<Matrix> out;
  for (std::size_t j = 0; j < F.size(); ++j) {
    Matrix S = w[j].cwiseInverse().asDiagonal() * F[j] * w[j + 1].asDiagonal();
    out.push_back(S);
  }
  return out;
}

/**
 * @brief Pure birth / pure death stochastic factorization of a chain.
 *
 * Uses the family's closed-form PBF coefficients when available (and checks
 * them against the numeric factorization to 1e-10), otherwise the numeric
 * factorization.  Every factor is checked to be stochastic and the product to
 * reproduce P.
 * @throws Error(NoPBF) when no positive factorization is available;
 *         Error(NonPositivePivot) when a coefficient is not positive.
 */
inline StochasticFactorization stochastic_factors(const StochasticChain& ch) {
  const int m = ch.m;
  const bool mult = ch.bands.is_multiple;
  StochasticFactorization out;

  std::optional<std::vector<double>> closed;
  const bool hermite = ch.family && ch.family->kind == Family::Hermite;
  if (ch.family && !hermite && ch.family->shift == 0 && pbf_flag(*ch.family)) {
    try {
      closed = pbf_coefficients(*ch.family, m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPBF) throw;
    }
  }
  std::vector<double> a;
  if (closed) {
    // Cross-check against the numeric factorization of the actual bands.
    const auto numeric = numeric_pbf(ch.bands, mult && m >= 2 ? std::optional<double>((*closed)[1]) : std::nullopt);
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const double scale = std::max(1.0, std::abs((*closed)[k]));
      if (std::abs(numeric[k] - (*closed)[k]) > 1e-10 * scale)
        throw Error(ErrorCode::NoPBF, "closed-form coefficient a_" + std::to_string(k + 1) +
                                          " disagrees with the numeric factorization");
    }
    a = *closed;
    out.closed_form = true;
  } else {
    if (hermite && ch.family->shift == 0)
      throw Error(ErrorCode::NoPBF, "Hermite has no pure birth/pure death stochastic factorization");
    if (mult && ch.family && !pbf_flag(*ch.family))
      throw Error(ErrorCode::NoPBF, "parameters lie outside the positive bidiagonal factorization band");
    try {
      a = numeric_pbf(ch.bands);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ZeroPivot) throw Error(ErrorCode::NoPBF, std::string("no PBF: ") + e.what());
      throw;
    }
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    // The leading split coefficient of the numeric multiple factorization may be 0.
    const bool may_vanish = mult && !out.closed_form && k == 1;
    if (a[k] < 0 || (a[k] == 0 && !may_vanish))
      throw Error(ErrorCode::NonPositivePivot, "PBF coefficient a_" + std::to_string(k + 1) + " = " +
                                                   std::to_string(a[k]) + " is not positive");
  }
  out.a = a;

  auto F = bidiagonal_factors(a, m, mult);
  std::vector<Matrix> S;
  std::vector<StochasticFactor> named;
  if (ch.kind == ChainKind::TypeI) {
    // T^T = U^T L2^T L1^T with the left Perron vector.
    std::vector<Matrix> Ft = {F[2].transpose(), F[1].transpose(), F[0].transpose()};
    S = stochastic_from_factors(Ft, ch.sigma);
    named = {{"Upsilon", FactorRole::PureDeath, true, S[0]},
             {"Pi2", FactorRole::PureBirth, false, S[1]},
             {"Pi1", FactorRole::PureBirth, false, S[2]}};
  } else {
    S = stochastic_from_factors(F, ch.sigma);
    if (mult)
      named = {{"Pi1", FactorRole::PureBirth, true, S[0]},
               {"Pi2", FactorRole::PureBirth, true, S[1]},
               {"Upsilon", FactorRole::PureDeath, false, S[2]}};
    else
      named = {{"Pi", FactorRole::PureBirth, true, S[0]}, {"Upsilon", FactorRole::PureDeath, false, S[1]}};
  }
  for (auto& f : named) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double& v = f.matrix(i, j);
        if (v < 0 && v >= -chains::kClampTolerance) v = 0;
        if (v < 0) throw Error(ErrorCode::NonPositivePivot, f.name + " has a negative entry");
      }
    for (int i = 0; i < m; ++i)
      if (std::abs(f.matrix.row(i).sum() - 1) > 1e-10)
        throw Error(ErrorCode::NonPositivePivot, f.name + " row " + std::to_string(i + 1) + " is not stochastic");
  }
  out.factors = std::move(named);
  const double err = (out.product() - ch.P).cwiseAbs().maxCoeff();
  if (err > 1e-9) throw Error(ErrorCode::NonPositivePivot, "factor product differs from P by " + std::to_string(err));
  return out;
}

}  // namespace factor
}  // namespace mopchains
