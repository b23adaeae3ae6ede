#pragma once

// Characteristic functions chi(lambda) = Tr[rho D(lambda)] and the
// trapezoidal quadrature for Hilbert-Schmidt quantities in phase space:
//   Tr[A B] = (1/pi^n) int chi_A(lambda) chi_B(-lambda) d^{2n} lambda.

#include "nongauss/fock.hpp"
#include "nongauss/gaussian.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/special.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace nongauss {

/// Tr[rho D(lambda_1) (x) ... (x) D(lambda_n)].
inline cplx char_function(const FockState& rho, const std::vector<cplx>& lambda) {
  const ModeShape& shape = rho.shape();
  const int n = shape.modes();
  if (static_cast<int>(lambda.size()) != n) throw Error(ErrorKind::shape_mismatch, "one lambda per mode is required");
  std::vector<cmat> d(n);
  for (int k = 0; k < n; ++k) d[k] = displacement_elements(lambda[k], shape.cutoff(k), shape.cutoff(k));
  if (n == 1) return rho.matrix().cwiseProduct(d[0].transpose()).sum();

  std::vector<std::vector<int>> occ(shape.dim());
  for (Eigen::Index i = 0; i < shape.dim(); ++i) occ[i] = shape.occupation(i);
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < shape.dim(); ++i) {
    for (Eigen::Index j = 0; j < shape.dim(); ++j) {
      const cplx r = rho.matrix()(i, j);
      if (r == cplx(0.0)) continue;
      cplx e = 1.0;
      for (int k = 0; k < n; ++k) e *= d[k](occ[j][k], occ[i][k]);
      acc += r * e;
    }
  }
  return acc;
}

inline cplx char_function(const FockState& rho, cplx lambda) { return char_function(rho, std::vector<cplx>{lambda}); }

/// Gaussian characteristic function exp{-1/2 (Omega L)^T sigma (Omega L) + i X^T Omega L}
/// with L = sqrt(2) (Re lambda_1, Im lambda_1, ...).
inline cplx gaussian_char_function(const rvec& mean, const rmat& cov, const std::vector<cplx>& lambda) {
  const int n = static_cast<int>(mean.size() / 2);
  if (static_cast<int>(lambda.size()) != n) throw Error(ErrorKind::shape_mismatch, "one lambda per mode is required");
  rvec l(2 * n);
  for (int k = 0; k < n; ++k) {
    l(2 * k) = std::sqrt(2.0) * lambda[k].real();
    l(2 * k + 1) = std::sqrt(2.0) * lambda[k].imag();
  }
  const rvec ol = symplectic_form(n) * l;
  return std::exp(cplx(-0.5 * ol.dot(cov * ol), mean.dot(ol)));
}

inline cplx gaussian_char_function(const GaussianSpec& spec, const std::vector<cplx>& lambda) {
  return gaussian_char_function(spec.mean, spec.cov, lambda);
}

inline cplx gaussian_char_function(const GaussianSpec& spec, cplx lambda) {
  return gaussian_char_function(spec, std::vector<cplx>{lambda});
}

/// Uniform grid on [-R, R]^{2n} in (Re lambda_1, Im lambda_1, ...).
struct CharFunctionGrid {
  int modes = 1;
  double range = 6.0;  // R
  double step = 0.05;  // h

  int points_per_axis() const { return 2 * static_cast<int>(std::lround(range / step)) + 1; }

  /// Default grid, widened by max(1, sqrt(2 sigma_max)) for broad states.
  static CharFunctionGrid for_covariance(const rmat& cov) {
    const int n = static_cast<int>(cov.rows() / 2);
    if (n > 2) throw Error(ErrorKind::invalid_dimension, "phase-space quadrature supports one or two modes");
    Eigen::SelfAdjointEigenSolver<rmat> es(cov, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, std::sqrt(2.0 * es.eigenvalues().maxCoeff()));
    return n == 1 ? CharFunctionGrid{1, 6.0 * scale, 0.05 * scale} : CharFunctionGrid{2, 4.0 * scale, 0.1 * scale};
  }

  CharFunctionGrid refined() const { return {modes, range, 0.5 * step}; }
};

struct CharFunctionSamples {
  CharFunctionGrid grid;
  std::vector<cplx> values;  // row-major over the 2n axes
};

/// Calls fn(lambda, weight) at each grid node with trapezoid weights (h^{2n}
/// times 1/2 per boundary axis); tracks the largest |value| on the boundary.
template <class Fn>
void for_each_node(const CharFunctionGrid& grid, Fn&& fn) {
  const int m = grid.points_per_axis();
  const int axes = 2 * grid.modes;
  const double h = grid.step;
  const double start = -h * (m - 1) / 2;
  std::vector<int> idx(axes, 0);
  std::vector<cplx> lambda(grid.modes);
  const double cell = std::pow(h, axes);
  for (;;) {
    double w = cell;
    bool boundary = false;
    for (int a = 0; a < axes; ++a) {
      if (idx[a] == 0 || idx[a] == m - 1) {
        w *= 0.5;
        boundary = true;
      }
    }
    for (int k = 0; k < grid.modes; ++k) lambda[k] = cplx(start + h * idx[2 * k], start + h * idx[2 * k + 1]);
    fn(lambda, w, boundary);
    int a = axes - 1;
    while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
    if (a < 0) break;
  }
}

inline constexpr double grid_coverage_tolerance = 1e-6;

namespace detail {

inline void check_coverage(double boundary_max) {
  if (boundary_max > grid_coverage_tolerance) {
    throw Error(ErrorKind::domain, "phase-space grid too small: |chi| reaches " + std::to_string(boundary_max) +
                                       " on the boundary");
  }
}

}  // namespace detail

/// (1/pi^n) int |chi_rho|^2, which equals mu[rho].
inline double purity_from_char(const FockState& rho, const CharFunctionGrid& grid) {
  double sum = 0.0, boundary_max = 0.0;
  for_each_node(grid, [&](const std::vector<cplx>& l, double w, bool boundary) {
    const cplx c = char_function(rho, l);
    sum += w * std::norm(c);
    if (boundary) boundary_max = std::max(boundary_max, std::abs(c));
  });
  detail::check_coverage(boundary_max);
  return sum / std::pow(std::numbers::pi, grid.modes);
}

/// (1/2)(1/pi^n) int |chi_rho - chi_tau|^2 with tau the moment-matched Gaussian,
/// evaluated analytically on the grid.
inline double phase_space_distance(const FockState& rho, const CharFunctionGrid& grid) {
  if (grid.modes != rho.modes()) throw Error(ErrorKind::shape_mismatch, "grid and state mode counts differ");
  const Moments m = moments(rho);
  double sum = 0.0, boundary_max = 0.0;
  for_each_node(grid, [&](const std::vector<cplx>& l, double w, bool boundary) {
    const cplx a = char_function(rho, l);
    const cplx b = gaussian_char_function(m.mean, m.cov, l);
    sum += w * std::norm(a - b);
    if (boundary) boundary_max = std::max({boundary_max, std::abs(a), std::abs(b)});
  });
  detail::check_coverage(boundary_max);
  return 0.5 * sum / std::pow(std::numbers::pi, grid.modes);
}

inline double phase_space_distance(const FockState& rho) {
  return phase_space_distance(rho, CharFunctionGrid::for_covariance(moments(rho).cov));
}

/// chi sampled on every grid node, in node order.
inline CharFunctionSamples sample_char_function(const FockState& rho, const CharFunctionGrid& grid) {
  CharFunctionSamples s{grid, {}};
  for_each_node(grid, [&](const std::vector<cplx>& l, double, bool) { s.values.push_back(char_function(rho, l)); });
  return s;
}

}  // namespace nongauss
