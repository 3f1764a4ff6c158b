#pragma once

/**
 * @file hyper.hpp
 * @brief Terminating hypergeometric kernels: Pochhammer symbols, generalized
 * pFq sums and Kampe de Feriet double sums.
 *
 * Every series handled here terminates because some upper parameter is a
 * nonpositive integer.  Sums are accumulated with Kahan compensation in
 * increasing order of the summation index.
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace mopchains::hyper {

/** @brief Kahan-compensated accumulator. */
template <typename Real>
class KahanSum {
 public:
  void add(Real v) {
    Real y = v - comp_;
    Real t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  Real value() const { return sum_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

/** @brief Rising factorial (x)_n = x(x+1)...(x+n-1), by iterated multiplication. */
template <typename Real>
Real pochhammer(Real x, std::size_t n) {
  Real r{1};
  for (std::size_t i = 0; i < n; ++i) r *= x + static_cast<Real>(i);
  return r;
}

/** @brief If v is a nonpositive integer (within rounding) return k = -v. */
template <typename Real>
std::optional<std::size_t> nonpositive_integer(Real v) {
  Real r = std::round(v);
  if (r <= 0 && std::abs(v - r) <= Real(1e-12) * (1 + std::abs(v)))
    return static_cast<std::size_t>(-r);
  return std::nullopt;
}

/** @brief Smallest termination index among a list of upper parameters. */
template <typename Real>
std::optional<std::size_t> termination_index(const std::vector<Real>& upper) {
  std::optional<std::size_t> best;
  for (Real u : upper)
    if (auto k = nonpositive_integer(u); k && (!best || *k < *best)) best = k;
  return best;
}

/**
 * @brief Terminating generalized hypergeometric series
 * pFq(upper; lower; x) = sum_l prod (upper)_l / prod (lower)_l x^l / l!.
 *
 * @param max_terms optional explicit cap on the number of terms; required
 *        when no upper parameter is a nonpositive integer.
 * @throws Error(NonTerminating) when neither termination nor a cap is given.
 * @throws Error(PoleInLower) when a lower factor vanishes strictly before the
 *         series terminates.
 */
template <typename Real>
Real pfq(const std::vector<Real>& upper, const std::vector<Real>& lower, Real x,
         std::optional<std::size_t> max_terms = std::nullopt) {
  auto term_at = termination_index(upper);
  if (!term_at && !max_terms)
    throw Error(ErrorCode::NonTerminating, "pfq: no nonpositive-integer upper parameter");
  std::size_t last = term_at ? *term_at : *max_terms;
  if (term_at && max_terms && *max_terms < last) last = *max_terms;

  KahanSum<Real> acc;
  Real term{1};
  for (std::size_t l = 0;; ++l) {
    acc.add(term);
    if (l == last || term == Real(0)) break;
    Real num{1}, den{1};
    for (Real u : upper) num *= u + static_cast<Real>(l);
    for (Real c : lower) {
      Real f = c + static_cast<Real>(l);
      if (f == Real(0) || (nonpositive_integer(c) && *nonpositive_integer(c) == l))
        throw Error(ErrorCode::PoleInLower, "pfq: lower parameter vanishes before termination");
      den *= f;
    }
    term = term * num / den * x / static_cast<Real>(l + 1);
  }
  return acc.value();
}

/**
 * @brief Parameter blocks of a Kampe de Feriet double series
 * sum_{l,m} (a)_{l+m}(b)_l(c)_m / ((alpha)_{l+m}(beta)_l(gamma)_m) x^l y^m / (l! m!).
 */
template <typename Real>
struct KdFSpec {
  std::vector<Real> joint_upper;  ///< (a), coupled through l+m
  std::vector<Real> left_upper;   ///< (b), index l
  std::vector<Real> right_upper;  ///< (c), index m
  std::vector<Real> joint_lower;  ///< (alpha)
  std::vector<Real> left_lower;   ///< (beta)
  std::vector<Real> right_lower;  ///< (gamma)
  Real x{0};
  Real y{0};
};

namespace detail {

template <typename Real>
Real ratio_product(const std::vector<Real>& up, const std::vector<Real>& lo, std::size_t k,
                   std::size_t limit, const char* what) {
  Real r{1};
  for (Real u : up) r *= pochhammer(u, k);
  if (r == Real(0)) return r;
  for (Real c : lo) {
    if (auto z = nonpositive_integer(c); z && *z < k && *z < limit)
      throw Error(ErrorCode::PoleInLower, what);
    r /= pochhammer(c, k);
  }
  return r;
}

}  // namespace detail

/**
 * @brief Terminating Kampe de Feriet double sum, accumulated l-major with
 * Kahan compensation.
 *
 * The l range is bounded by the left/joint terminating parameters, the m range
 * by the right/joint ones; terms with a vanishing numerator are skipped before
 * any lower factor is inspected, so a lower pole that coincides with
 * termination is accepted.
 */
template <typename Real>
Real kdf(const KdFSpec<Real>& s) {
  auto jt = termination_index(s.joint_upper);
  auto lt = termination_index(s.left_upper);
  auto rt = termination_index(s.right_upper);
  auto pick = [](std::optional<std::size_t> a, std::optional<std::size_t> b) {
    if (a && b) return std::optional<std::size_t>(std::min(*a, *b));
    return a ? a : b;
  };
  auto lmax = pick(lt, jt);
  auto mmax = pick(rt, jt);
  if (!lmax || !mmax) throw Error(ErrorCode::NonTerminating, "kdf: double sum does not terminate");

  KahanSum<Real> acc;
  Real lfact{1};
  Real xl{1};
  for (std::size_t l = 0; l <= *lmax; ++l) {
    if (l > 0) {
      lfact *= static_cast<Real>(l);
      xl *= s.x;
    }
    Real left = detail::ratio_product(s.left_upper, s.left_lower, l, *lmax + 1,
                                      "kdf: left lower parameter vanishes before termination");
    if (left == Real(0)) continue;
    Real mfact{1};
    Real ym{1};
    for (std::size_t m = 0; m <= *mmax; ++m) {
      if (m > 0) {
        mfact *= static_cast<Real>(m);
        ym *= s.y;
      }
      if (jt && l + m > *jt) break;
      Real right = detail::ratio_product(s.right_upper, s.right_lower, m, *mmax + 1,
                                         "kdf: right lower parameter vanishes before termination");
      if (right == Real(0)) continue;
      std::size_t limit = jt ? *jt + 1 : l + m + 1;
      Real joint = detail::ratio_product(s.joint_upper, s.joint_lower, l + m, limit,
                                         "kdf: joint lower parameter vanishes before termination");
      if (joint == Real(0)) continue;
      acc.add(joint * left * right * xl * ym / (lfact * mfact));
    }
  }
  return acc.value();
}

}  // namespace mopchains::hyper
