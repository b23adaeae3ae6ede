#pragma once

// Closed-form Fock matrix elements and the few special functions the
// measure needs: Laguerre polynomials, terminating 2F1, binomial weights.

#include <Eigen/Dense>
#include <boost/math/special_functions/laguerre.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace nongauss {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// C(n,k) p^k (1-p)^(n-k), evaluated in log space so n in the thousands is safe.
inline double binomial_weight(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_binomial(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

/// Laguerre polynomial L_n(x).
inline double laguerre(int n, double x) {
  if (n < 0) throw std::invalid_argument("laguerre: negative degree");
  return boost::math::laguerre(static_cast<unsigned>(n), x);
}

/// 2F1(-p, -p; 1; x) = sum_k C(p,k)^2 x^k. Terminating, so summed exactly.
inline double hyp2f1_neg_int(int p, double x) {
  if (p < 0) throw std::invalid_argument("hyp2f1_neg_int: p must be >= 0");
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < p; ++k) {
    // ratio of consecutive terms: (p-k)^2 / (k+1)^2 * x
    term *= static_cast<double>(p - k) * (p - k) / ((k + 1.0) * (k + 1.0)) * x;
    sum += term;
  }
  return sum;
}

/// <m|D(alpha)|n> for m < rows, n < cols; exact elements of the untruncated
/// operator D(alpha) = exp(alpha a^dag - alpha^* a).
///
/// Along each diagonal k = |m - n| the magnitude is
///   g_j = sqrt(j!/(j+k)!) x^(k/2) e^(-x/2) L_j^(k)(x),  x = |alpha|^2,  j = min(m, n),
/// generated by the Laguerre degree recurrence in this normalized form, which
/// is stable for all j. A running log scale keeps e^(-x/2) from underflowing.
inline cmat displacement_elements(cplx alpha, int rows, int cols) {
  cmat d = cmat::Zero(rows, cols);
  if (rows == 0 || cols == 0) return d;
  const double x = std::norm(alpha);
  const cplx unit = x > 0.0 ? alpha / std::sqrt(x) : cplx(1.0, 0.0);
  constexpr double rescale = 1e150;

  // lower diagonals (m = n + k) use phase unit^k, upper ones (-unit^*)^k
  auto run_diagonal = [&](int k, bool lower) {
    const int length = lower ? std::min(cols, rows - k) : std::min(rows, cols - k);
    if (length <= 0) return;
    if (x == 0.0) {
      if (k == 0)
        for (int j = 0; j < length; ++j) d(j, j) = 1.0;
      return;
    }
    const cplx phase = std::pow(lower ? unit : -std::conj(unit), k);
    double log_scale = -0.5 * x + 0.5 * k * std::log(x) - 0.5 * std::lgamma(k + 1.0);
    double prev = 0.0;
    double cur = 1.0;  // g_j / exp(log_scale)
    for (int j = 0; j < length; ++j) {
      if (j == 1) {
        prev = cur;
        cur = (1.0 + k - x) / std::sqrt(1.0 + k) * prev;
      } else if (j > 1) {
        const double i = j - 1;
        const double next = (2.0 * i + 1.0 + k - x) * cur / std::sqrt((i + 1.0) * (i + 1.0 + k)) -
                            std::sqrt(i * (i + k) / ((i + 1.0) * (i + k + 1.0))) * prev;
        prev = cur;
        cur = next;
      }
      if (std::abs(cur) > rescale) {
        cur /= rescale;
        prev /= rescale;
        log_scale += std::log(rescale);
      }
      const double g = cur * std::exp(log_scale);
      if (lower) {
        d(j + k, j) = phase * g;
      } else {
        d(j, j + k) = phase * g;
      }
    }
  };
  for (int k = 0; k < rows; ++k) run_diagonal(k, true);
  for (int k = 1; k < cols; ++k) run_diagonal(k, false);
  return d;
}

/// <m|S(zeta)|n> for S(zeta) = exp(zeta (a^dag)^2 / 2 - zeta^* a^2 / 2).
/// Nonzero only for even m - n. Along each diagonal m = n + 2k (real r) the
/// elements obey a normalized Gegenbauer-type recursion in sech r, stable
/// in the forward direction; the start value is the vacuum column. Upper
/// diagonals follow from <m|S(r)|n> = (-1)^k <n|S(r)|m>, and the phase of
/// zeta enters as e^{i (m - n) theta / 2}.
inline cmat squeeze_elements(cplx zeta, int rows, int cols) {
  cmat s = cmat::Zero(rows, cols);
  if (rows == 0 || cols == 0) return s;
  const double r = std::abs(zeta);
  if (r == 0.0) {
    for (int j = 0; j < std::min(rows, cols); ++j) s(j, j) = 1.0;
    return s;
  }
  const double theta = std::arg(zeta);
  const double ch = std::cosh(r);
  const double log_t = std::log(std::tanh(r));
  constexpr double big = 1e150;
  const double log_big = std::log(big);

  auto run_diagonal = [&](int k, bool lower) {
    const int len = lower ? std::min(cols, rows - 2 * k) : std::min(rows, cols - 2 * k);
    if (len <= 0) return;
    const double kk = k;
    double log_scale = -0.5 * std::log(ch) + kk * log_t + 0.5 * std::lgamma(2 * kk + 1) - kk * std::log(2.0) -
                       std::lgamma(kk + 1);
    const double sign = (!lower && k % 2 == 1) ? -1.0 : 1.0;
    const cplx phase = sign * std::polar(1.0, (lower ? 1.0 : -1.0) * kk * theta);
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < len; ++j) {
      if (j == 1) {
        prev = cur;
        cur = std::sqrt(2 * kk + 1) / ch * prev;
      } else if (j > 1) {
        const double i = j - 1;
        const double next = (2 * i + 2 * kk + 1) / (ch * std::sqrt((i + 1) * (i + 2 * kk + 1))) * cur -
                            std::sqrt(i * (i + 2 * kk) / ((i + 1) * (i + 2 * kk + 1))) * prev;
        prev = cur;
        cur = next;
      }
      if (std::abs(cur) > big) {
        cur /= big;
        prev /= big;
        log_scale += log_big;
      }
      const cplx g = phase * (cur * std::exp(log_scale));
      if (lower) {
        s(j + 2 * k, j) = g;
      } else {
        s(j, j + 2 * k) = g;
      }
    }
  };
  for (int k = 0; 2 * k < rows; ++k) run_diagonal(k, true);
  for (int k = 1; 2 * k < cols; ++k) run_diagonal(k, false);
  return s;
}

/// Fock amplitudes of the coherent state |alpha> up to cutoff-1.
inline cvec coherent_amplitudes(cplx alpha, int cutoff) {
  cvec v(cutoff);
  if (cutoff == 0) return v;
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) v(n) = alpha / std::sqrt(double(n)) * v(n - 1);
  return v;
}

/// Geometric populations of the thermal state nu(n_t) up to cutoff-1.
inline rvec thermal_populations(double n_t, int cutoff) {
  rvec p = rvec::Zero(cutoff);
  if (cutoff == 0) return p;
  if (n_t <= 0.0) {
    p(0) = 1.0;
    return p;
  }
  const double ratio = n_t / (1.0 + n_t);
  p(0) = 1.0 / (1.0 + n_t);
  for (int k = 1; k < cutoff; ++k) p(k) = p(k - 1) * ratio;
  return p;
}

}  // namespace nongauss
