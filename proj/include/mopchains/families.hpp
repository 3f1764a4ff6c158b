#pragma once

/**
 * @file families.hpp
 * @brief Catalog of scalar and multiple orthogonal polynomial families:
 * parameter validation, recurrence coefficients, positive bidiagonal
 * factorization (PBF) coefficients, hypergeometric closed forms and the
 * stepline index mapping.
 *
 * Scalar families satisfy x p_n = p_{n+1} + b_n p_n + c_n p_{n-1}; multiple
 * (type II, stepline) families satisfy
 * x B^(n) = B^(n+1) + b_n B^(n) + c_n B^(n-1) + d_n B^(n-2).
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hyper.hpp"

namespace mopchains {

/** @brief Supported polynomial families. */
enum class Family {
  Hahn,
  Jacobi01,
  Meixner,
  Kravchuk,
  Laguerre,
  Charlier,
  Hermite,
  MultipleHahn,
  JacobiPineiro,
  MultipleMeixnerII,
  MultipleLaguerreI,
};

/** @brief Static description of a family used by the catalog and the CLI. */
struct FamilyInfo {
  Family family;
  const char* cli_name;
  const char* display_name;
  std::vector<std::string> params;
  bool multiple;
  bool discrete;           ///< orthogonal with respect to a discrete weight
  bool nonnegative_support;  ///< support contained in [0, inf)
  const char* domain;
};

inline const std::vector<FamilyInfo>& catalog() {
  static const std::vector<FamilyInfo> table = {
      {Family::Hahn, "hahn", "Hahn", {"alpha", "beta", "N"}, false, true, true,
       "alpha > -1, beta > -1, N in {0,1,2,...}, states <= N"},
      {Family::Jacobi01, "jacobi", "Jacobi on [0,1]", {"alpha", "beta"}, false, false, true,
       "alpha > -1, beta > -1"},
      {Family::Meixner, "meixner", "Meixner", {"beta", "c"}, false, true, true, "beta > 0, 0 < c < 1"},
      {Family::Kravchuk, "kravchuk", "Kravchuk", {"p", "N"}, false, true, true,
       "0 < p < 1, N in {0,1,2,...}, states <= N"},
      {Family::Laguerre, "laguerre", "Laguerre", {"alpha"}, false, false, true, "alpha > -1"},
      {Family::Charlier, "charlier", "Charlier", {"b"}, false, true, true, "b > 0"},
      {Family::Hermite, "hermite", "Hermite", {}, false, false, false, "no parameters"},
      {Family::MultipleHahn, "multiple-hahn", "Multiple Hahn", {"alpha1", "alpha2", "beta", "N"}, true,
       true, true, "alpha1, alpha2, beta > -1, alpha1 - alpha2 not an integer, states <= N"},
      {Family::JacobiPineiro, "jacobi-pineiro", "Jacobi-Pineiro", {"alpha1", "alpha2", "beta"}, true,
       false, true, "alpha1, alpha2, beta > -1, alpha1 - alpha2 not an integer"},
      {Family::MultipleMeixnerII, "multiple-meixner-ii", "Multiple Meixner of the second kind",
       {"beta1", "beta2", "c"}, true, true, true,
       "beta1, beta2 > 0, 0 < c < 1, beta1 - beta2 not an integer"},
      {Family::MultipleLaguerreI, "multiple-laguerre-i", "Multiple Laguerre of the first kind",
       {"alpha1", "alpha2"}, true, false, true, "alpha1, alpha2 > -1, alpha1 - alpha2 not an integer"},
  };
  return table;
}

inline const FamilyInfo& info(Family f) {
  for (const auto& i : catalog())
    if (i.family == f) return i;
  throw Error(ErrorCode::UnsupportedFamily, "unknown family");
}

inline Family family_from_name(const std::string& name) {
  for (const auto& i : catalog())
    if (name == i.cli_name) return i.family;
  throw Error(ErrorCode::InvalidParams, "unknown family '" + name + "'");
}

/** @brief A family together with its parameters and an optional diagonal shift. */
struct FamilySpec {
  Family kind{Family::Hermite};
  double alpha{0}, beta{0}, c{0}, p{0}, b{0};
  double alpha1{0}, alpha2{0}, beta1{0}, beta2{0};
  int N{0};
  double shift{0};  ///< adds shift * Identity to the recurrence matrix

  static FamilySpec hahn(double a, double be, int n) {
    FamilySpec s;
    s.kind = Family::Hahn;
    s.alpha = a;
    s.beta = be;
    s.N = n;
    return s;
  }
  static FamilySpec jacobi01(double a, double be) {
    FamilySpec s;
    s.kind = Family::Jacobi01;
    s.alpha = a;
    s.beta = be;
    return s;
  }
  static FamilySpec meixner(double be, double cc) {
    FamilySpec s;
    s.kind = Family::Meixner;
    s.beta = be;
    s.c = cc;
    return s;
  }
  static FamilySpec kravchuk(double pp, int n) {
    FamilySpec s;
    s.kind = Family::Kravchuk;
    s.p = pp;
    s.N = n;
    return s;
  }
  static FamilySpec laguerre(double a) {
    FamilySpec s;
    s.kind = Family::Laguerre;
    s.alpha = a;
    return s;
  }
  static FamilySpec charlier(double bb) {
    FamilySpec s;
    s.kind = Family::Charlier;
    s.b = bb;
    return s;
  }
  static FamilySpec hermite(double sh = 0) {
    FamilySpec s;
    s.kind = Family::Hermite;
    s.shift = sh;
    return s;
  }
  static FamilySpec multiple_hahn(double a1, double a2, double be, int n) {
    FamilySpec s;
    s.kind = Family::MultipleHahn;
    s.alpha1 = a1;
    s.alpha2 = a2;
    s.beta = be;
    s.N = n;
    return s;
  }
  static FamilySpec jacobi_pineiro(double a1, double a2, double be) {
    FamilySpec s;
    s.kind = Family::JacobiPineiro;
    s.alpha1 = a1;
    s.alpha2 = a2;
    s.beta = be;
    return s;
  }
  static FamilySpec multiple_meixner2(double b1, double b2, double cc) {
    FamilySpec s;
    s.kind = Family::MultipleMeixnerII;
    s.beta1 = b1;
    s.beta2 = b2;
    s.c = cc;
    return s;
  }
  static FamilySpec multiple_laguerre1(double a1, double a2) {
    FamilySpec s;
    s.kind = Family::MultipleLaguerreI;
    s.alpha1 = a1;
    s.alpha2 = a2;
    return s;
  }

  FamilySpec with_shift(double s) const {
    FamilySpec r = *this;
    r.shift = s;
    return r;
  }

  /** @brief Read a named parameter (names as listed in the catalog). */
  double get(const std::string& name) const {
    if (name == "alpha") return alpha;
    if (name == "beta") return beta;
    if (name == "c") return c;
    if (name == "p") return p;
    if (name == "b") return b;
    if (name == "alpha1") return alpha1;
    if (name == "alpha2") return alpha2;
    if (name == "beta1") return beta1;
    if (name == "beta2") return beta2;
    if (name == "N") return N;
    throw Error(ErrorCode::InvalidParams, "unknown parameter '" + name + "'");
  }

  /** @brief Parameters of this family as a name -> value map. */
  std::map<std::string, double> params() const {
    std::map<std::string, double> out;
    for (const auto& n : info(kind).params) out[n] = get(n);
    return out;
  }

  /**
   * @brief Build a spec from a family name and a name -> value map. Unknown
   * or missing parameter names are hard errors.
   */
  static FamilySpec from_params(const std::string& family, const std::map<std::string, double>& kv,
                                double shift = 0) {
    FamilySpec s;
    s.kind = family_from_name(family);
    s.shift = shift;
    const auto& names = info(s.kind).params;
    for (const auto& [k, v] : kv)
      if (std::find(names.begin(), names.end(), k) == names.end())
        throw Error(ErrorCode::InvalidParams,
                    "parameter '" + k + "' is not defined for family '" + family + "'");
    for (const auto& n : names) {
      auto it = kv.find(n);
      if (it == kv.end())
        throw Error(ErrorCode::InvalidParams, "missing parameter '" + n + "' for family '" + family + "'");
      double v = it->second;
      if (n == "N") {
        if (v < 0 || std::round(v) != v)
          throw Error(ErrorCode::InvalidParams, "N must be a nonnegative integer");
        s.N = static_cast<int>(v);
      } else if (n == "alpha") s.alpha = v;
      else if (n == "beta") s.beta = v;
      else if (n == "c") s.c = v;
      else if (n == "p") s.p = v;
      else if (n == "b") s.b = v;
      else if (n == "alpha1") s.alpha1 = v;
      else if (n == "alpha2") s.alpha2 = v;
      else if (n == "beta1") s.beta1 = v;
      else if (n == "beta2") s.beta2 = v;
    }
    return s;
  }
};

inline bool is_multiple(const FamilySpec& s) { return info(s.kind).multiple; }

namespace detail {

inline bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

/** @brief The parameter difference that controls the multiple-family regions. */
inline double multiple_difference(const FamilySpec& s) {
  return s.kind == Family::MultipleMeixnerII ? s.beta1 - s.beta2 : s.alpha1 - s.alpha2;
}

}  // namespace detail

/** @brief Throws InvalidParams if the parameters lie outside the family's domain. */
inline void validate(const FamilySpec& s) {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidParams, what);
  };
  req(std::isfinite(s.shift), "shift must be finite");
  switch (s.kind) {
    case Family::Hahn:
      req(s.alpha > -1 && s.beta > -1, "Hahn requires alpha > -1 and beta > -1");
      req(s.N >= 0, "Hahn requires N >= 0");
      break;
    case Family::Jacobi01:
      req(s.alpha > -1 && s.beta > -1, "Jacobi requires alpha > -1 and beta > -1");
      break;
    case Family::Meixner:
      req(s.beta > 0 && s.c > 0 && s.c < 1, "Meixner requires beta > 0 and 0 < c < 1");
      break;
    case Family::Kravchuk:
      req(s.p > 0 && s.p < 1 && s.N >= 0, "Kravchuk requires 0 < p < 1 and N >= 0");
      break;
    case Family::Laguerre:
      req(s.alpha > -1, "Laguerre requires alpha > -1");
      break;
    case Family::Charlier:
      req(s.b > 0, "Charlier requires b > 0");
      break;
    case Family::Hermite:
      break;
    case Family::MultipleHahn:
      req(s.alpha1 > -1 && s.alpha2 > -1 && s.beta > -1,
          "multiple Hahn requires alpha1, alpha2, beta > -1");
      req(s.N >= 0, "multiple Hahn requires N >= 0");
      req(!detail::is_integer(s.alpha1 - s.alpha2), "alpha1 - alpha2 must not be an integer");
      break;
    case Family::JacobiPineiro:
      req(s.alpha1 > -1 && s.alpha2 > -1 && s.beta > -1,
          "Jacobi-Pineiro requires alpha1, alpha2, beta > -1");
      req(!detail::is_integer(s.alpha1 - s.alpha2), "alpha1 - alpha2 must not be an integer");
      break;
    case Family::MultipleMeixnerII:
      req(s.beta1 > 0 && s.beta2 > 0 && s.c > 0 && s.c < 1,
          "multiple Meixner requires beta1, beta2 > 0 and 0 < c < 1");
      req(!detail::is_integer(s.beta1 - s.beta2), "beta1 - beta2 must not be an integer");
      break;
    case Family::MultipleLaguerreI:
      req(s.alpha1 > -1 && s.alpha2 > -1, "multiple Laguerre requires alpha1, alpha2 > -1");
      req(!detail::is_integer(s.alpha1 - s.alpha2), "alpha1 - alpha2 must not be an integer");
      break;
  }
}

/**
 * @brief True when the (unshifted) recurrence matrix is nonnegative, so the
 * stochastic construction applies.  Always true for the scalar catalog; for
 * multiple families it requires |alpha1 - alpha2| < 1 (resp. beta's).
 */
inline bool nonneg_stochastic(const FamilySpec& s) {
  if (!is_multiple(s)) return true;
  return std::abs(detail::multiple_difference(s)) < 1;
}

/**
 * @brief True when the family has a tabulated positive bidiagonal
 * factorization at these parameters: every scalar family except Hermite;
 * multiple families on the semi-band -1 < alpha1 - alpha2 < 0 (resp. beta's).
 */
inline bool pbf_flag(const FamilySpec& s) {
  if (s.kind == Family::Hermite) return false;
  if (!is_multiple(s)) return true;
  double d = detail::multiple_difference(s);
  return d > -1 && d < 0;
}

/**
 * @brief Truncated recurrence coefficients defining J_m (scalar) or T_m
 * (multiple).  c holds c_1..c_{m-1}; d holds d_2..d_{m-1}.
 */
struct RecurrenceBands {
  int m{0};
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> d;
  bool is_multiple{false};
  /** Lower bracket for the smallest zero, when the support is known to lie above it. */
  std::optional<double> support_lower;

  double bn(int n) const { return b[n]; }
  /** @brief c_n for 1 <= n <= m-1, zero elsewhere. */
  double cn(int n) const { return (n >= 1 && n <= m - 1) ? c[n - 1] : 0.0; }
  /** @brief d_n for 2 <= n <= m-1, zero elsewhere. */
  double dn(int n) const { return (is_multiple && n >= 2 && n <= m - 1) ? d[n - 2] : 0.0; }

  /** @brief Bands of the leading k x k truncation. */
  RecurrenceBands leading(int k) const {
    RecurrenceBands r;
    r.m = k;
    r.is_multiple = is_multiple;
    r.support_lower = support_lower;
    r.b.assign(b.begin(), b.begin() + k);
    r.c.assign(c.begin(), c.begin() + std::max(0, k - 1));
    if (is_multiple) r.d.assign(d.begin(), d.begin() + std::max(0, k - 2));
    return r;
  }
};

/** @brief Stepline (n1, n2) for the type II index n: (0,0),(1,0),(1,1),(2,1),... */
inline std::pair<int, int> stepline_typeII(int n) { return {n - n / 2, n / 2}; }

/** @brief Stepline (n1, n2) for the type I index n: A^(2k) = A_(k+1,k), A^(2k-1) = A_(k,k). */
inline std::pair<int, int> stepline_typeI(int n) {
  if (n % 2 == 0) return {n / 2 + 1, n / 2};
  return {(n + 1) / 2, (n + 1) / 2};
}

namespace detail {

using hyper::pochhammer;

inline double factorial(int k) { return pochhammer(1.0, static_cast<std::size_t>(k)); }

// Auxiliary multiple-Hahn coefficient functions.
inline double mh_A(int n1, int n2, double a1, double a2, double be, double N) {
  if (n1 == 0) return 0.0;
  return n1 * (n1 + n2 + a2 + be) * (n1 + n2 + be) * (N + n1 + a1 + be + 1) /
         ((n1 + 2 * n2 + a2 + be) * (2 * n1 + n2 + a1 + be) * (2 * n1 + n2 + a1 + be + 1));
}
inline double mh_B(int n1, int n2, double a1, double a2, double be, double N) {
  return (n1 + a1 - a2) * (n1 + n2 + a1 + be) * (n1 + n2 + be - 1) * (N - n1 - n2 + 1) /
         ((n1 + 2 * n2 + a2 + be - 1) * (2 * n1 + n2 + a1 + be) * (2 * n1 + n2 + a1 + be - 1));
}
inline double mh_C(int n1, int n2, double a1, double a2, double be, double N) {
  return (n1 + a1) * (n1 + n2 + a1 + be - 1) * (n1 + n2 + a2 + be - 1) * (N - n1 - n2 + 2) /
         ((n1 + 2 * n2 + a2 + be - 2) * (2 * n1 + n2 + a1 + be - 2) * (2 * n1 + n2 + a1 + be - 1));
}
inline double mh_D(int n1, int n2, double a1, double a2, double be) {
  if (n1 == 0 || n2 == 0) return 0.0;
  return n1 * n2 * (n1 + n2 + be) / ((2 * n1 + n2 + a1 + be + 1) * (n1 + 2 * n2 + a2 + be));
}

inline RecurrenceBands empty_bands(int m, bool multiple) {
  RecurrenceBands r;
  r.m = m;
  r.is_multiple = multiple;
  r.b.assign(m, 0.0);
  r.c.assign(std::max(0, m - 1), 0.0);
  if (multiple) r.d.assign(std::max(0, m - 2), 0.0);
  return r;
}

/** @brief Scalar bands from PBF coefficients: b_n = a_{2n} + a_{2n+1}, c_n = a_{2n-1} a_{2n}. */
inline RecurrenceBands scalar_from_pbf(const std::vector<double>& a, int m) {
  auto A = [&](int k) { return k >= 1 ? a[k - 1] : 0.0; };
  RecurrenceBands r = empty_bands(m, false);
  for (int n = 0; n < m; ++n) r.b[n] = A(2 * n) + A(2 * n + 1);
  for (int n = 1; n < m; ++n) r.c[n - 1] = A(2 * n - 1) * A(2 * n);
  return r;
}

/**
 * @brief Multiple bands from the product L1 L2 U of the PBF coefficients
 * (0-based: L1[i+1,i] = a_{3i+2}, L2[i+1,i] = a_{3i+3}, U[i,i] = a_{3i+1}).
 */
inline RecurrenceBands multiple_from_pbf(const std::vector<double>& a, int m) {
  auto A = [&](int k) { return (k >= 1 && k <= static_cast<int>(a.size())) ? a[k - 1] : 0.0; };
  auto u = [&](int i) { return A(3 * i + 1); };
  auto p = [&](int i) { return i >= 1 ? A(3 * i - 1) : 0.0; };  // L1[i, i-1]
  auto q = [&](int i) { return i >= 1 ? A(3 * i) : 0.0; };      // L2[i, i-1]
  RecurrenceBands r = empty_bands(m, true);
  for (int i = 0; i < m; ++i) r.b[i] = u(i) + p(i) + q(i);
  for (int i = 1; i < m; ++i) r.c[i - 1] = (p(i) + q(i)) * u(i - 1) + p(i) * q(i - 1);
  for (int i = 2; i < m; ++i) r.d[i - 2] = p(i) * q(i - 1) * u(i - 2);
  return r;
}

// --- scalar PBF coefficient generators: returns a_1..a_count ---------------

inline std::vector<double> scalar_pbf_raw(const FamilySpec& s, int count) {
  std::vector<double> a(count);
  const double al = s.alpha, be = s.beta, N = s.N;
  for (int k = 1; k <= count; ++k) {
    const int n = k / 2;
    const bool odd = (k % 2) == 1;  // odd: a_{2n+1}; even: a_{2n}
    double v = 0;
    switch (s.kind) {
      case Family::Hahn:
        v = odd ? (N - n) * (al + n + 1) * (al + be + n + 1) / ((al + be + 2 * n + 1) * (al + be + 2 * n + 2))
                : n * (be + n) * (al + be + N + n + 1) / ((al + be + 2 * n) * (al + be + 2 * n + 1));
        if (odd && n == 0) v = N * (al + 1) / (al + be + 2);
        break;
      case Family::Jacobi01:
        v = odd ? (al + n + 1) * (al + be + n + 1) / ((al + be + 2 * n + 1) * (al + be + 2 * n + 2))
                : n * (be + n) / ((al + be + 2 * n) * (al + be + 2 * n + 1));
        if (odd && n == 0) v = (al + 1) / (al + be + 2);
        break;
      case Family::Meixner:
        v = odd ? (be + n) * s.c / (1 - s.c) : n / (1 - s.c);
        break;
      case Family::Kravchuk:
        v = odd ? (N - n) * s.p : n * (1 - s.p);
        break;
      case Family::Laguerre:
        v = odd ? al + n + 1 : n;
        break;
      case Family::Charlier:
        v = odd ? s.b : n;
        break;
      default:
        throw Error(ErrorCode::NoPBF, "family has no scalar PBF");
    }
    a[k - 1] = v;
  }
  return a;
}

// --- multiple PBF coefficient generators: returns a_1..a_count -------------

inline double mh_F(int n, double lo1, double lo2, const FamilySpec& s) {
  return hyper::pfq<double>({double(-n), double(-s.N), s.alpha2 - s.alpha1 - n}, {lo1, lo2}, 1.0);
}

inline double mm_F(int n, double lo, const FamilySpec& s) {
  const double z = s.c / (s.c - 1);
  return hyper::pfq<double>({double(-n), s.beta2 - s.beta1 - n}, {lo}, z);
}

inline std::vector<double> multiple_pbf_raw(const FamilySpec& s, int count) {
  std::vector<double> a(count + 6, 0.0);
  const int groups = count / 6 + 1;
  for (int n = 0; n < groups; ++n) {
    double v[7] = {0, 0, 0, 0, 0, 0, 0};
    switch (s.kind) {
      case Family::MultipleHahn: {
        const double a1 = s.alpha1, a2 = s.alpha2, be = s.beta, N = s.N;
        const double F0 = mh_F(n, -2 * n, a2 + be + n + 2, s);
        const double F1 = mh_F(n + 1, -2 * n - 1, a2 + be + n + 2, s);
        v[1] = (N - 2 * n) * (a1 + 1 + n) * (a1 + be + 2 * n + 1) * (a2 + be + 2 * n + 1) /
               (pochhammer(a1 + be + 3 * n + 1, 2) * (a2 + be + 3 * n + 1));
        v[4] = (N - 2 * n - 1) * (a2 + 1 + n) * (a1 + be + 2 * n + 2) * (a2 + be + 2 * n + 2) /
               ((a1 + be + 3 * n + 3) * pochhammer(a2 + be + 3 * n + 2, 2));
        v[2] = (N - 2 * n) * pochhammer(double(n), n) * (be + 2 * n + 1) * (a2 - a1 + n) * (a2 + be + n + 1) /
               (pochhammer(n + 1.0, n) * (a1 + be + 3 * n + 2) * pochhammer(a2 + be + 3 * n + 1, 2)) *
               mh_F(n, -2 * n + 1, a2 + be + n + 1, s) / F0;
        v[5] = (n + 1) * (N - 2 * n - 1) * (be + 2 * n + 2) * (a1 - a2 + n + 1) * (a1 + be + 2 + n + N) /
               ((2 * n + 1) * pochhammer(a1 + be + 3 * n + 3, 2) * (a2 + be + 3 * n + 3)) * F0 / F1;
        v[3] = (2 * n + 1) * (be + 2 * n + 1) * (a1 + be + 2 * n + 2) * (a2 + be + 2 * n + 2) /
               (pochhammer(a1 + be + 3 * n + 2, 2) * (a2 + be + 3 * n + 2)) * F1 / F0;
        v[6] = 2 * (n + 1) * (be + 2 * n + 2) * (a1 + be + 2 * n + 3) * (a2 + be + 2 * n + 3) * (a2 + be + 2 + n + N) /
               ((a1 + be + 3 * n + 4) * pochhammer(a2 + be + 3 * n + 3, 2) * (a2 + be + n + 2)) *
               mh_F(n + 1, -2 * n - 2, a2 + be + n + 3, s) / F1;
        break;
      }
      case Family::JacobiPineiro: {
        const double a1 = s.alpha1, a2 = s.alpha2, be = s.beta;
        v[1] = (a1 + 1 + n) * (a1 + be + 2 * n + 1) * (a2 + be + 2 * n + 1) /
               (pochhammer(a1 + be + 3 * n + 1, 2) * (a2 + be + 3 * n + 1));
        v[4] = (a2 + 1 + n) * (a1 + be + 2 * n + 2) * (a2 + be + 2 * n + 2) /
               ((a1 + be + 3 * n + 3) * pochhammer(a2 + be + 3 * n + 2, 2));
        v[2] = (be + 2 * n + 1) * (a2 - a1 + n) * (a2 + be + 2 * n + 1) /
               ((a1 + be + 3 * n + 2) * pochhammer(a2 + be + 3 * n + 1, 2));
        v[5] = (n + 1) * (be + 2 * n + 2) * (a2 + be + 2 * n + 2) /
               (pochhammer(a1 + be + 3 * n + 3, 2) * (a2 + be + 3 * n + 3));
        v[3] = (be + 2 * n + 1) * (a1 - a2 + n + 1) * (a1 + be + 2 * n + 2) /
               (pochhammer(a1 + be + 3 * n + 2, 2) * (a2 + be + 3 * n + 2));
        v[6] = (n + 1) * (be + 2 * n + 2) * (a1 + be + 2 * n + 3) /
               ((a1 + be + 3 * n + 4) * pochhammer(a2 + be + 3 * n + 3, 2));
        break;
      }
      case Family::MultipleMeixnerII: {
        const double b1 = s.beta1, b2 = s.beta2, c = s.c;
        const double G0 = mm_F(n, -2 * n, s);
        const double G1 = hyper::pfq<double>({double(-n - 1), b2 - b1 - n - 1}, {-2.0 * n - 1}, c / (c - 1));
        const double G2 = hyper::pfq<double>({double(-n - 1), b2 - b1 - n - 1}, {-2.0 * n - 2}, c / (c - 1));
        v[1] = (b1 + n) * c / (1 - c);
        v[4] = (b2 + n) * c / (1 - c);
        v[2] = pochhammer(double(n), n) * (b2 - b1 + n) * c * mm_F(n, -2 * n + 1, s) /
               (pochhammer(n + 1.0, n) * (1 - c) * G0);
        v[5] = (n + 1) * (b1 - b2 + n + 1) * c * G0 / ((2 * n + 1) * (1 - c) * (1 - c) * G1);
        v[3] = (2 * n + 1) * G1 / G0;
        v[6] = 2 * (n + 1) * G2 / ((1 - c) * G1);
        break;
      }
      case Family::MultipleLaguerreI: {
        const double a1 = s.alpha1, a2 = s.alpha2;
        v[1] = a1 + 1 + n;
        v[4] = a2 + 1 + n;
        v[2] = a2 - a1 + n;
        v[5] = n + 1;
        v[3] = a1 - a2 + n + 1;
        v[6] = n + 1;
        break;
      }
      default:
        throw Error(ErrorCode::NoPBF, "family has no multiple PBF");
    }
    for (int k = 1; k <= 6; ++k)
      if (6 * n + k <= count) a[6 * n + k - 1] = v[k];
  }
  a.resize(count);
  return a;
}

}  // namespace detail

/**
 * @brief Coefficients of the positive bidiagonal factorization of the
 * unshifted recurrence matrix without any positivity check: scalar a_1..a_{2m-1},
 * multiple a_1..a_{3m-2}.  Throws NoPBF for Hermite.
 */
inline std::vector<double> pbf_coefficients_raw(const FamilySpec& s, int m) {
  if (s.kind == Family::Hermite)
    throw Error(ErrorCode::NoPBF, "Hermite has no pure birth/pure death stochastic factorization");
  return is_multiple(s) ? detail::multiple_pbf_raw(s, 3 * m - 2) : detail::scalar_pbf_raw(s, 2 * m - 1);
}

/** @brief Throws TruncationTooLarge if m exceeds the family's finite support. */
inline void check_truncation(const FamilySpec& s, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "number of states must be positive");
  if ((s.kind == Family::Hahn || s.kind == Family::MultipleHahn || s.kind == Family::Kravchuk) && m > s.N)
    throw Error(ErrorCode::TruncationTooLarge,
                "truncation m = " + std::to_string(m) + " exceeds N = " + std::to_string(s.N));
}

/**
 * @brief Tabulated PBF coefficients, all strictly positive.
 *
 * Closed forms describe the unshifted matrix only; a nonzero shift, Hermite,
 * or multiple parameters outside -1 < alpha1 - alpha2 < 0 raise NoPBF (the
 * factor module then falls back to a numeric factorization).
 */
inline std::vector<double> pbf_coefficients(const FamilySpec& s, int m) {
  validate(s);
  check_truncation(s, m);
  if (s.shift != 0)
    throw Error(ErrorCode::NoPBF, "closed-form PBF coefficients are tabulated for the unshifted matrix only");
  if (!pbf_flag(s))
    throw Error(ErrorCode::NoPBF, s.kind == Family::Hermite
                                      ? "Hermite has no pure birth/pure death stochastic factorization"
                                      : "parameters lie outside the positive bidiagonal factorization band");
  auto a = pbf_coefficients_raw(s, m);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k] > 0))
      throw Error(ErrorCode::NoPBF, "PBF coefficient a_" + std::to_string(k + 1) + " is not positive");
  return a;
}

/**
 * @brief Truncated recurrence coefficients of the family, with the shift added
 * to every diagonal entry.
 */
inline RecurrenceBands recurrence_bands(const FamilySpec& s, int m) {
  validate(s);
  check_truncation(s, m);
  const bool mult = is_multiple(s);
  RecurrenceBands r = detail::empty_bands(m, mult);
  const double al = s.alpha, be = s.beta;
  switch (s.kind) {
    case Family::Hahn:
      r = detail::scalar_from_pbf(detail::scalar_pbf_raw(s, 2 * m - 1), m);
      break;
    case Family::Jacobi01: {
      const double ab = al + be;
      for (int n = 0; n < m; ++n)
        r.b[n] = n == 0 ? (al + 1) / (ab + 2)
                        : 0.5 - (be * be - al * al) / (2 * (2 * n + ab) * (2 * n + ab + 2));
      for (int n = 1; n < m; ++n) {
        const double den = (2 * n + ab - 1) * (2 * n + ab) * (2 * n + ab) * (2 * n + ab + 1);
        if (std::abs(den) < 1e-300) {
          auto a = detail::scalar_pbf_raw(s, 2 * n);
          r.c[n - 1] = a[2 * n - 2] * a[2 * n - 1];
        } else {
          r.c[n - 1] = n * (n + al) * (n + be) * (n + ab) / den;
        }
      }
      break;
    }
    case Family::Meixner:
      for (int n = 0; n < m; ++n) r.b[n] = (n + (be + n) * s.c) / (1 - s.c);
      for (int n = 1; n < m; ++n) r.c[n - 1] = n * s.c * (be + n - 1) / ((1 - s.c) * (1 - s.c));
      break;
    case Family::Kravchuk:
      for (int n = 0; n < m; ++n) r.b[n] = (s.N - n) * s.p + n * (1 - s.p);
      for (int n = 1; n < m; ++n) r.c[n - 1] = n * (1 - s.p) * (s.N - n + 1) * s.p;
      break;
    case Family::Laguerre:
      for (int n = 0; n < m; ++n) r.b[n] = 2 * n + al + 1;
      for (int n = 1; n < m; ++n) r.c[n - 1] = n * (n + al);
      break;
    case Family::Charlier:
      for (int n = 0; n < m; ++n) r.b[n] = n + s.b;
      for (int n = 1; n < m; ++n) r.c[n - 1] = n * s.b;
      break;
    case Family::Hermite:
      for (int n = 1; n < m; ++n) r.c[n - 1] = n / 2.0;
      break;
    case Family::MultipleHahn: {
      using detail::mh_A, detail::mh_B, detail::mh_C, detail::mh_D;
      const double a1 = s.alpha1, a2 = s.alpha2, N = s.N;
      for (int n = 0; n < m; ++n) {
        const int k = n / 2;
        if (n % 2 == 0)
          r.b[n] = mh_A(k, k, a1, a2, be, N) + mh_A(k, k, a2, a1 + 1, be, N) +
                   mh_C(k + 1, k + 1, a1, a2, be, N) + mh_D(k, k, a1, a2, be);
        else
          r.b[n] = mh_A(k, k + 1, a2, a1, be, N) + mh_A(k + 1, k, a1, a2 + 1, be, N) +
                   mh_C(k + 1, k + 2, a2, a1, be, N) + mh_D(k, k + 1, a2, a1, be);
      }
      for (int n = 1; n < m; ++n) {
        const int k = n / 2;
        if (n % 2 == 0)
          r.c[n - 1] = (mh_A(k, k, a1, a2, be, N) + mh_A(k, k, a2, a1 + 1, be, N) + mh_D(k, k, a1, a2, be)) *
                           mh_C(k, k + 1, a2, a1, be, N) +
                       mh_A(k, k, a1, a2, be, N) * mh_B(k, k, a1, a2, be, N);
        else
          r.c[n - 1] = (mh_A(k, k + 1, a2, a1, be, N) + mh_A(k + 1, k, a1, a2 + 1, be, N) +
                        mh_D(k, k + 1, a2, a1, be)) *
                           mh_C(k + 1, k + 1, a1, a2, be, N) +
                       mh_A(k, k + 1, a2, a1, be, N) * mh_B(k, k + 1, a2, a1, be, N);
      }
      for (int n = 2; n < m; ++n) {
        const int k = n / 2;
        if (n % 2 == 0)
          r.d[n - 2] = mh_A(k, k, a1, a2, be, N) * mh_B(k, k, a1, a2, be, N) * mh_C(k, k, a1, a2, be, N);
        else
          r.d[n - 2] =
              mh_A(k, k + 1, a2, a1, be, N) * mh_B(k, k + 1, a2, a1, be, N) * mh_C(k, k + 1, a2, a1, be, N);
      }
      break;
    }
    case Family::JacobiPineiro:
      r = detail::multiple_from_pbf(detail::multiple_pbf_raw(s, 3 * m - 2), m);
      break;
    case Family::MultipleMeixnerII: {
      const double b1 = s.beta1, b2 = s.beta2, c = s.c, q = 1 - c;
      for (int n = 0; n < m; ++n) {
        const int k = n / 2;
        r.b[n] = n % 2 == 0 ? 2 * k + c * (b1 + 3 * k) / q : 2 * k + 1 + c * (b2 + 3 * k + 1) / q;
      }
      for (int n = 1; n < m; ++n) {
        const int k = n / 2;
        r.c[n - 1] = n % 2 == 0 ? c * k * (b1 + b2 + 3 * k - 2) / (q * q)
                                : c * ((k + 1) * b1 + k * (b2 + 3 * k + 1)) / (q * q);
      }
      for (int n = 2; n < m; ++n) {
        const int k = n / 2;
        r.d[n - 2] = n % 2 == 0 ? c * c * k * (k + b1 - 1) * (k + b1 - b2) / (q * q * q)
                                : c * c * k * (k + b2 - 1) * (k + b2 - b1) / (q * q * q);
      }
      break;
    }
    case Family::MultipleLaguerreI: {
      const double a1 = s.alpha1, a2 = s.alpha2;
      for (int n = 0; n < m; ++n) {
        const int k = n / 2;
        r.b[n] = n % 2 == 0 ? 3 * k + 1 + a1 : 3 * k + 2 + a2;
      }
      for (int n = 1; n < m; ++n) {
        const int k = n / 2;
        r.c[n - 1] = n % 2 == 0 ? k * (3 * k + a1 + a2) : 3 * k * k + k * (a1 + a2 + 3) + a1 + 1;
      }
      for (int n = 2; n < m; ++n) {
        const int k = n / 2;
        r.d[n - 2] = n % 2 == 0 ? k * (k + a1) * (k + a1 - a2) : k * (k + a2) * (k + a2 - a1);
      }
      break;
    }
  }
  r.m = m;
  r.is_multiple = mult;
  for (double& v : r.b) v += s.shift;
  if (info(s.kind).nonnegative_support) r.support_lower = s.shift;
  return r;
}

// --- closed forms ----------------------------------------------------------

/** @brief Monic scalar polynomial p_n(x) from its hypergeometric representation. */
inline double closed_form_scalar(const FamilySpec& s, int n, double x) {
  validate(s);
  if (is_multiple(s)) throw Error(ErrorCode::UnsupportedFamily, "closed_form_scalar needs a scalar family");
  if ((s.kind == Family::Hahn || s.kind == Family::Kravchuk) && n > s.N)
    throw Error(ErrorCode::TruncationTooLarge, "polynomial degree exceeds N");
  using hyper::pfq, hyper::pochhammer;
  x -= s.shift;
  const double al = s.alpha, be = s.beta, dn = n;
  const auto un = static_cast<std::size_t>(n);
  switch (s.kind) {
    case Family::Hahn:
      return pochhammer(al + 1, un) * pochhammer(-double(s.N), un) / pochhammer(al + be + n + 1, un) *
             pfq<double>({-dn, -x, al + be + n + 1}, {-double(s.N), al + 1}, 1.0);
    case Family::Jacobi01:
      return std::pow(-1.0, n) * pochhammer(al + 1, un) / pochhammer(al + be + n + 1, un) *
             pfq<double>({-dn, al + be + n + 1}, {al + 1}, x);
    case Family::Meixner:
      return std::pow(s.c / (s.c - 1), n) * pochhammer(be, un) *
             pfq<double>({-dn, -x}, {be}, (s.c - 1) / s.c);
    case Family::Kravchuk:
      return std::pow(s.p, n) * pochhammer(-double(s.N), un) * pfq<double>({-dn, -x}, {-double(s.N)}, 1 / s.p);
    case Family::Laguerre:
      return std::pow(-1.0, n) * pochhammer(al + 1, un) * pfq<double>({-dn}, {al + 1}, x);
    case Family::Charlier:
      return std::pow(-s.b, n) * pfq<double>({-dn, -x}, {}, -1 / s.b);
    case Family::Hermite:
      if (x != 0) return std::pow(x, n) * pfq<double>({-dn / 2, -(dn - 1) / 2}, {}, -1 / (x * x));
      // At x = 0 only the constant term of the series survives.
      if (n % 2 == 1) return 0.0;
      return std::pow(-0.25, n / 2) * detail::factorial(n) / detail::factorial(n / 2);
    default:
      break;
  }
  throw Error(ErrorCode::UnsupportedFamily, "no scalar closed form");
}

/** @brief Type II multiple polynomial B_(n1,n2)(x) (monic, unshifted variable). */
inline double typeII_multi_index(const FamilySpec& s, int n1, int n2, double x) {
  using hyper::pochhammer;
  using K = hyper::KdFSpec<double>;
  const auto u1 = static_cast<std::size_t>(n1), u2 = static_cast<std::size_t>(n2);
  const double d1 = n1, d2 = n2;
  switch (s.kind) {
    case Family::MultipleHahn: {
      const double a1 = s.alpha1, a2 = s.alpha2, be = s.beta, N = s.N;
      K k{{-x, a1 + be + n1 + 1},
          {-d2, a1 + n1 + 1, a2 + be + n1 + n2 + 1},
          {-d1},
          {-N, a1 + 1},
          {a2 + 1, a1 + be + n1 + 1},
          {},
          1.0,
          1.0};
      return pochhammer(a1 + 1, u1) * pochhammer(a2 + 1, u2) * pochhammer(-N, u1 + u2) /
             (pochhammer(a1 + be + n1 + n2 + 1, u1) * pochhammer(a2 + be + n1 + n2 + 1, u2)) * hyper::kdf(k);
    }
    case Family::JacobiPineiro: {
      const double a1 = s.alpha1, a2 = s.alpha2, be = s.beta;
      K k{{a1 + be + n1 + 1}, {-d2, a2 + be + n1 + n2 + 1, a1 + n1 + 1}, {-d1}, {a1 + 1}, {a2 + 1, a1 + be + n1 + 1},
          {},  x,  x};
      return std::pow(-1.0, n1 + n2) * pochhammer(a1 + 1, u1) * pochhammer(a2 + 1, u2) /
             (pochhammer(n1 + n2 + a1 + be + 1, u1) * pochhammer(n1 + n2 + a2 + be + 1, u2)) * hyper::kdf(k);
    }
    case Family::MultipleMeixnerII: {
      const double b1 = s.beta1, b2 = s.beta2, c = s.c, z = (c - 1) / c;
      K k{{-x}, {-d1}, {-d2, b1 + n1}, {b1}, {}, {b2}, z, z};
      return std::pow(c / (c - 1), n1 + n2) * pochhammer(b1, u1) * pochhammer(b2, u2) * hyper::kdf(k);
    }
    case Family::MultipleLaguerreI: {
      const double a1 = s.alpha1, a2 = s.alpha2;
      K k{{}, {-d2, a1 + n1 + 1}, {-d1}, {a1 + 1}, {a2 + 1}, {}, x, x};
      return std::pow(-1.0, n1 + n2) * pochhammer(a1 + 1, u1) * pochhammer(a2 + 1, u2) * hyper::kdf(k);
    }
    default:
      break;
  }
  throw Error(ErrorCode::UnsupportedFamily, "no type II closed form");
}

/**
 * @brief Type I multiple polynomial A_(n1,n2),i(x) in the normalization of
 * the literature formulas (components with n_i = 0 vanish identically).
 */
inline double typeI_multi_index(const FamilySpec& s, int n1, int n2, int i, double x) {
  using hyper::pochhammer;
  using K = hyper::KdFSpec<double>;
  const int ni = i == 1 ? n1 : n2;
  const int nh = n1 + n2 - ni;
  if (ni == 0) return 0.0;
  const auto tot = static_cast<std::size_t>(n1 + n2 - 1);
  // (n1+n2-2)!/((n1-1)!(n2-1)!), taken as 1 for the (1,0) and (0,1) indices.
  auto comb = [&]() {
    if (nh == 0) return 1.0;
    return detail::factorial(n1 + n2 - 2) / (detail::factorial(n1 - 1) * detail::factorial(n2 - 1));
  };
  switch (s.kind) {
    case Family::MultipleHahn: {
      const double ai = i == 1 ? s.alpha1 : s.alpha2, ah = i == 1 ? s.alpha2 : s.alpha1;
      const double be = s.beta, N = s.N;
      const int top = s.N + 1 - n1 - n2;
      const double pre = std::pow(-1.0, ni - 1) * detail::factorial(top) * comb() /
                         (pochhammer(be + 1, tot) * pochhammer(ai + be + n1 + n2 + ni, static_cast<std::size_t>(top))) *
                         pochhammer(ah + be + nh + 1, tot) / pochhammer(ai - ah - nh + 1, tot);
      K k{{-ni + 1.0, -N},
          {ai + be + n1 + n2, ai - ah - nh + 1, -x},
          {ah - ai - ni + 1},
          {-n1 - n2 + 2.0, ah + be + nh + 1},
          {ai + 1, -N},
          {},
          1.0,
          1.0};
      return pre * hyper::kdf(k);
    }
    case Family::JacobiPineiro: {
      const double ai = i == 1 ? s.alpha1 : s.alpha2, ah = i == 1 ? s.alpha2 : s.alpha1, be = s.beta;
      const double pre = std::pow(-1.0, n1 + n2 - 1) * pochhammer(s.alpha1 + be + n1 + n2, n1) *
                         pochhammer(s.alpha2 + be + n1 + n2, n2) /
                         (detail::factorial(ni - 1) * pochhammer(ah - ai, nh)) * std::tgamma(ai + be + n1 + n2) /
                         (std::tgamma(be + n1 + n2) * std::tgamma(ai + 1));
      return pre * hyper::pfq<double>({-ni + 1.0, ai + be + n1 + n2, ai - ah - nh + 1}, {ai + 1, ai - ah + 1}, x);
    }
    case Family::MultipleMeixnerII: {
      const double bi = i == 1 ? s.beta1 : s.beta2, bh = i == 1 ? s.beta2 : s.beta1, c = s.c;
      const double pre = std::pow(1 - c, bi + n1 + n2 + ni - 2) / std::pow(c, n1 + n2 - 1) *
                         std::pow(-1.0, ni - 1) * comb() / pochhammer(bi - bh - nh + 1, tot);
      K k{{-ni + 1.0}, {-x, bi - bh - nh + 1}, {bh - bi - ni + 1}, {-n1 - n2 + 2.0}, {bi}, {}, 1.0, c / (c - 1)};
      return pre * hyper::kdf(k);
    }
    case Family::MultipleLaguerreI: {
      const double ai = i == 1 ? s.alpha1 : s.alpha2, ah = i == 1 ? s.alpha2 : s.alpha1;
      const double pre = std::pow(-1.0, n1 + n2 - 1) /
                         (detail::factorial(ni - 1) * std::tgamma(ai + 1) * pochhammer(ah - ai, nh));
      return pre * hyper::pfq<double>({-ni + 1.0, ai - ah - nh + 1}, {ai + 1, ai - ah + 1}, x);
    }
    default:
      break;
  }
  throw Error(ErrorCode::UnsupportedFamily, "no type I closed form");
}

inline void check_multiple(const FamilySpec& s) {
  validate(s);
  if (!is_multiple(s)) throw Error(ErrorCode::UnsupportedFamily, "type II/I closed forms need a multiple family");
}

/** @brief Type II polynomial B^(n)(x) on the stepline. */
inline double closed_form_typeII(const FamilySpec& s, int stepline_n, double x) {
  check_multiple(s);
  if (s.kind == Family::MultipleHahn && stepline_n > s.N)
    throw Error(ErrorCode::TruncationTooLarge, "stepline index exceeds N");
  auto [n1, n2] = stepline_typeII(stepline_n);
  return typeII_multi_index(s, n1, n2, x - s.shift);
}

/** @brief Type I polynomial A^(n)_i(x) on the type I stepline, i in {1, 2}. */
inline double closed_form_typeI(const FamilySpec& s, int stepline_n, int which_weight, double x) {
  check_multiple(s);
  if (which_weight != 1 && which_weight != 2)
    throw Error(ErrorCode::InvalidParams, "which_weight must be 1 or 2");
  auto [n1, n2] = stepline_typeI(stepline_n);
  if (s.kind == Family::MultipleHahn && n1 + n2 > s.N + 1)
    throw Error(ErrorCode::TruncationTooLarge, "type I index exceeds N + 1");
  return typeI_multi_index(s, n1, n2, which_weight, x - s.shift);
}

/**
 * @brief Determinant combination
 * calA_k^(n)(x) = (-1)^k (A_1^(n) A_2^(k) - A_2^(n) A_1^(k)); for fixed k = m
 * and n = 0..m-1 these are the components of the left eigenvector of T_m at a
 * zero of B^(m) (up to a common scale).
 */
inline double typeI_determinant(const FamilySpec& s, int n, int k, double x) {
  const double an1 = closed_form_typeI(s, n, 1, x), an2 = closed_form_typeI(s, n, 2, x);
  const double ak1 = closed_form_typeI(s, k, 1, x), ak2 = closed_form_typeI(s, k, 2, x);
  return (k % 2 == 0 ? 1.0 : -1.0) * (an1 * ak2 - an2 * ak1);
}

/**
 * @brief Normalized orthogonality residual
 * |sum_k k^j p_n(k) w(k)| / sum_k |k^j p_n(k)| w(k) over the discrete support.
 * Finite-support families are summed over {0..N}; Meixner and Charlier until
 * the terms fall below 1e-16 of the running maximum.
 */
inline double verify_discrete_orthogonality(const FamilySpec& s, int n, int j) {
  validate(s);
  if (!info(s.kind).discrete || is_multiple(s))
    throw Error(ErrorCode::UnsupportedFamily, "family does not have a scalar discrete weight");
  if ((s.kind == Family::Hahn || s.kind == Family::Kravchuk) && n > s.N)
    throw Error(ErrorCode::TruncationTooLarge, "polynomial degree exceeds N");
  hyper::KahanSum<double> signed_sum, abs_sum;
  double w = 0;
  // Initial weight w(0) and ratio w(k+1)/w(k); only ratios matter.
  auto ratio = [&](int k) -> double {
    switch (s.kind) {
      case Family::Hahn:
        return (s.alpha + k + 1) * (s.N - k) / ((k + 1) * (s.beta + s.N - k));
      case Family::Kravchuk:
        return (s.N - k) * s.p / ((k + 1) * (1 - s.p));
      case Family::Meixner:
        return (s.beta + k) * s.c / (k + 1);
      case Family::Charlier:
        return s.b / (k + 1);
      default:
        return 0.0;
    }
  };
  w = 1.0;
  const bool finite = s.kind == Family::Hahn || s.kind == Family::Kravchuk;
  double running_max = 0;
  for (int k = 0;; ++k) {
    if (finite && k > s.N) break;
    const double pk = closed_form_scalar(s, n, k + s.shift);
    const double term = std::pow(static_cast<double>(k), j) * pk * w;
    signed_sum.add(term);
    abs_sum.add(std::abs(term));
    running_max = std::max(running_max, std::abs(term));
    if (!finite && ratio(k) < 1 && std::abs(term) < 1e-16 * running_max && k > n + j) break;
    if (!finite && k > 100000) break;
    w *= ratio(k);
  }
  return std::abs(signed_sum.value()) / abs_sum.value();
}

}  // namespace mopchains
