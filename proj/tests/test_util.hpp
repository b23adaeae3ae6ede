#pragma once

#include "nongauss/nongauss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace nongauss::testing {

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

/// Asymptotic Kolmogorov distribution tail P(D_n > d).
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS statistic against the uniform distribution on [a, b].
inline double ks_uniform(std::vector<double> x, double a, double b) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = (x[i] - a) / (b - a);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double uniform(RandomStream& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng.engine());
}

/// Random 2n x 2n symplectic matrix composed of gate images.
inline rmat random_symplectic(int modes, RandomStream& rng, double max_r = 0.8) {
  auto embed = [&](const rmat& block, int first) {
    rmat m = rmat::Identity(2 * modes, 2 * modes);
    m.block(2 * first, 2 * first, block.rows(), block.cols()) = block;
    return m;
  };
  rmat s = rmat::Identity(2 * modes, 2 * modes);
  for (int layer = 0; layer < 3; ++layer) {
    for (int k = 0; k < modes; ++k) {
      s = embed(squeeze_symplectic(std::polar(uniform(rng, 0.0, max_r), uniform(rng, -3.0, 3.0))), k) * s;
      s = embed(rotation_symplectic(uniform(rng, -3.0, 3.0)), k) * s;
    }
    if (modes == 2) s = beam_splitter_symplectic(uniform(rng, -1.5, 1.5)) * s;
  }
  return s;
}

/// Random physical covariance matrix S diag(nu) S^T.
inline rmat random_covariance(int modes, RandomStream& rng) {
  rvec nu(modes);
  for (int k = 0; k < modes; ++k) nu(k) = 0.5 + uniform(rng, 0.0, 2.0);
  const rmat s = random_symplectic(modes, rng);
  return s * symplectic_diagonal(nu) * s.transpose();
}

}  // namespace nongauss::testing
