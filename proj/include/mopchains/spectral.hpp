#pragma once

/**
 * @file spectral.hpp
 * @brief Recurrence evaluation of polynomial sequences, zeros of the m-th
 * polynomial by interlacing bisection, and right/left eigenvector tables of
 * the truncated banded recurrence matrix.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "families.hpp"

namespace mopchains {

using Matrix = Eigen::MatrixXd;

/** @brief Dense m x m banded matrix J_m (scalar) or T_m (multiple) of the bands. */
inline Matrix banded_matrix(const RecurrenceBands& r) {
  Matrix M = Matrix::Zero(r.m, r.m);
  for (int i = 0; i < r.m; ++i) {
    M(i, i) = r.b[i];
    if (i + 1 < r.m) M(i, i + 1) = 1.0;
    if (i >= 1) M(i, i - 1) = r.cn(i);
    if (i >= 2) M(i, i - 2) = r.dn(i);
  }
  return M;
}

/**
 * @brief Zeros, eigenvector tables and biorthogonality data of a truncated
 * recurrence matrix.  Column k of right_table holds B^(0..m-1)(x_k); column k
 * of left_table holds the left eigenvector components at x_k.
 */
struct SpectralDecomposition {
  std::vector<double> zeros;
  Matrix right_table;
  Matrix left_table;
  std::vector<double> norm;
  double biorthogonality_residual{0};
};

namespace spectral {

/** @brief p_0..p_m (or B^(0)..B^(m)) at x via the recurrence, p_0 = 1. */
inline std::vector<double> eval_sequence(const RecurrenceBands& r, double x) {
  std::vector<double> p(r.m + 1, 0.0);
  p[0] = 1.0;
  for (int n = 0; n < r.m; ++n) {
    double v = (x - r.b[n]) * p[n];
    if (n >= 1) v -= r.cn(n) * p[n - 1];
    if (n >= 2) v -= r.dn(n) * p[n - 2];
    p[n + 1] = v;
  }
  return p;
}

/**
 * @brief Sign of the degree-n polynomial at x, evaluated with periodic
 * rescaling so that large truncations do not overflow.
 */
inline int sign_at(const RecurrenceBands& r, int n, double x) {
  double p2 = 0, p1 = 0, p0 = 1;  // p_{k-2}, p_{k-1}, p_k
  for (int k = 0; k < n; ++k) {
    double v = (x - r.b[k]) * p0;
    if (k >= 1) v -= r.cn(k) * p1;
    if (k >= 2) v -= r.dn(k) * p2;
    p2 = p1;
    p1 = p0;
    p0 = v;
    const double mag = std::max({std::abs(p0), std::abs(p1), std::abs(p2)});
    if (mag > 1e150) {
      p0 /= mag;
      p1 /= mag;
      p2 /= mag;
    }
  }
  return (p0 > 0) - (p0 < 0);
}

/** @brief Maximum absolute row sum of the banded matrix (spectral-radius bound). */
inline double max_row_sum(const RecurrenceBands& r) {
  double best = 0;
  for (int i = 0; i < r.m; ++i) {
    double s = std::abs(r.b[i]) + (i + 1 < r.m ? 1.0 : 0.0) + std::abs(r.cn(i)) + std::abs(r.dn(i));
    best = std::max(best, s);
  }
  return best;
}

/**
 * @brief All zeros of the m-th polynomial, ascending.
 *
 * Zeros of degree n+1 are bracketed by the degree-n zeros augmented with a
 * lower bound (the support minimum, or minus the maximum row sum) and the
 * maximum row sum, then bisected to machine precision on the sign of the
 * recurrence value.
 */
inline std::vector<double> zeros(const RecurrenceBands& r) {
  const double R = max_row_sum(r) + 1e-12;
  const double lo_bound = r.support_lower ? std::min(*r.support_lower, R) : -R;
  const double hi_bound = std::max(R, lo_bound);
  std::vector<double> prev;
  for (int n = 1; n <= r.m; ++n) {
    std::vector<double> edges;
    edges.reserve(prev.size() + 2);
    edges.push_back(lo_bound);
    edges.insert(edges.end(), prev.begin(), prev.end());
    edges.push_back(hi_bound);
    std::vector<double> cur;
    cur.reserve(n);
    for (int k = 0; k < n; ++k) {
      double a = edges[k], b = edges[k + 1];
      int sa = sign_at(r, n, a), sb = sign_at(r, n, b);
      if (sa == 0) {
        cur.push_back(a);
        continue;
      }
      if (sb == 0) {
        cur.push_back(b);
        continue;
      }
      if (sa == sb)
        throw Error(ErrorCode::BracketFailure, "no sign change for degree " + std::to_string(n) +
                                                   " zero " + std::to_string(k + 1) + " in [" +
                                                   std::to_string(a) + ", " + std::to_string(b) + "]");
      // Bisect to machine precision: stop once the midpoint is no longer
      // representable strictly between the endpoints.
      for (int it = 0; it < 2200; ++it) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        const int sm = sign_at(r, n, mid);
        if (sm == 0) {
          a = b = mid;
          break;
        }
        if (sm == sa)
          a = mid;
        else
          b = mid;
      }
      cur.push_back(0.5 * (a + b));
    }
    prev = std::move(cur);
  }
  return prev;
}

/** @brief h-norms h_0 = 1, h_{n+1} = c_{n+1} h_n for scalar bands. */
inline std::vector<double> h_norms(const RecurrenceBands& r) {
  std::vector<double> h(r.m, 1.0);
  for (int n = 1; n < r.m; ++n) h[n] = h[n - 1] * r.cn(n);
  return h;
}

/**
 * @brief Left eigenvector of the banded matrix at the zero x.
 *
 * Scalar: components p_j(x)/h_j.  Multiple: backward recurrence from
 * v_{m-1} = 1, v_m = v_{m+1} = 0, refined by inverse iteration.  The remaining (first-column) equation is
 * used as the eigen-residual check.
 */
inline std::vector<double> left_vector(const RecurrenceBands& r, double x) {
  const int m = r.m;
  std::vector<double> v(m + 2, 0.0);
  if (!r.is_multiple) {
    auto p = eval_sequence(r, x);
    auto h = h_norms(r);
    for (int j = 0; j < m; ++j) v[j] = p[j] / h[j];
  } else {
    v[m - 1] = 1.0;
    for (int j = m - 1; j >= 1; --j) {
      double w = (x - r.b[j]) * v[j];
      if (j + 1 < m) w -= r.cn(j + 1) * v[j + 1];
      if (j + 2 < m) w -= r.dn(j + 2) * v[j + 2];
      v[j - 1] = w;
    }
    // The backward recurrence cancels badly in the leading components; refine
    // with inverse iteration on (M - x I)^T, which is backward stable.
    const Matrix Mt = banded_matrix(r).transpose();
    const double shifted = x + 1e-13 * (1 + std::abs(x));
    Eigen::PartialPivLU<Matrix> lu(Mt - shifted * Matrix::Identity(m, m));
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(v.data(), m);
    for (int it = 0; it < 2; ++it) {
      y = lu.solve(y);
      y /= y(m - 1);
    }
    if (y.allFinite())
      for (int j = 0; j < m; ++j) v[j] = y(j);
  }
  v.resize(m);
  // Residual of v (M - x I), relative to the scale of the terms involved.
  Matrix M = banded_matrix(r);
  Eigen::Map<const Eigen::RowVectorXd> row(v.data(), m);
  Eigen::RowVectorXd res = row * M - x * row;
  const double scale = row.cwiseAbs().maxCoeff() * (M.cwiseAbs().rowwise().sum().maxCoeff() + std::abs(x));
  if (!(res.cwiseAbs().maxCoeff() <= 1e-8 * scale))
    throw Error(ErrorCode::NotAnEigenvalue, "left eigen-residual " + std::to_string(res.cwiseAbs().maxCoeff() / scale) +
                                                " at x = " + std::to_string(x));
  return v;
}

/**
 * @brief Full spectral decomposition; verifies the normalized biorthogonality
 * V U = I (residual stored; an error is raised above 1e-6).
 */
inline SpectralDecomposition decompose(const RecurrenceBands& r) {
  SpectralDecomposition sd;
  const int m = r.m;
  sd.zeros = zeros(r);
  sd.right_table = Matrix::Zero(m, m);
  sd.left_table = Matrix::Zero(m, m);
  sd.norm.assign(m, 0.0);
  for (int k = 0; k < m; ++k) {
    auto p = eval_sequence(r, sd.zeros[k]);
    auto v = left_vector(r, sd.zeros[k]);
    for (int l = 0; l < m; ++l) {
      sd.right_table(l, k) = p[l];
      sd.left_table(l, k) = v[l];
    }
    sd.norm[k] = sd.right_table.col(k).dot(sd.left_table.col(k));
    if (sd.norm[k] == 0.0) throw Error(ErrorCode::BiorthogonalityFailure, "vanishing biorthogonality sum");
  }
  // Normalized check: with u_k = right_k / |right_k| and w_k = left_k / (u_k . left_k),
  // W^T U must be the identity.
  Matrix U = sd.right_table, W = sd.left_table;
  for (int k = 0; k < m; ++k) {
    U.col(k) /= U.col(k).cwiseAbs().maxCoeff();
    W.col(k) /= U.col(k).dot(W.col(k));
  }
  Matrix G = W.transpose() * U;
  double res = (G - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  sd.biorthogonality_residual = res;
  if (!(res <= 1e-6))
    throw Error(ErrorCode::BiorthogonalityFailure, "biorthogonality residual " + std::to_string(res));
  return sd;
}

}  // namespace spectral
}  // namespace mopchains
