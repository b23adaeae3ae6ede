#pragma once

// First and second moments of the quadratures R = (q_1, p_1, ..., q_n, p_n),
// q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)).

#include "nongauss/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace nongauss {

struct Moments {
  rvec mean;  // length 2n
  rmat cov;   // 2n x 2n, vacuum = I/2
  Flags flags;

  int modes() const { return static_cast<int>(mean.size() / 2); }
};

/// Block-diagonal Omega with blocks [[0, 1], [-1, 0]], so [R_k, R_j] = i Omega_kj.
inline rmat symplectic_form(int modes) {
  rmat omega = rmat::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Normally ordered expectations <a_j>, <a_j a_k>, <a_j^dag a_k>. These are
/// exact for the zero-padded state even with truncated ladder operators.
struct LadderExpectations {
  cvec a;     // <a_j>
  cmat aa;    // <a_j a_k>
  cmat adag_a;  // <a_j^dag a_k>
};

inline LadderExpectations ladder_expectations(const FockState& state) {
  const ModeShape& shape = state.shape();
  const int n = shape.modes();
  const cmat& rho = state.matrix();
  const Eigen::Index dim = shape.dim();

  std::vector<std::vector<int>> occ(dim);
  for (Eigen::Index i = 0; i < dim; ++i) occ[i] = shape.occupation(i);
  std::vector<Eigen::Index> stride(n);
  for (int k = 0; k < n; ++k) stride[k] = shape.stride(k);

  LadderExpectations e{cvec::Zero(n), cmat::Zero(n, n), cmat::Zero(n, n)};
  // Tr[rho A] = sum_i sum_l rho(i, l) <l|A|i>
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& oi = occ[i];
    for (int k = 0; k < n; ++k) {
      if (oi[k] == 0) continue;
      const double ak = std::sqrt(double(oi[k]));
      const Eigen::Index lowered = i - stride[k];
      e.a(k) += rho(i, lowered) * ak;
      for (int j = 0; j < n; ++j) {
        // a_j a_k |i>
        const int nj_after = oi[j] - (j == k ? 1 : 0);
        if (nj_after > 0) e.aa(j, k) += rho(i, lowered - stride[j]) * ak * std::sqrt(double(nj_after));
        // a_j^dag a_k |i>
        if (nj_after + 1 < shape.cutoff(j)) {
          e.adag_a(j, k) += rho(i, lowered + stride[j]) * ak * std::sqrt(double(nj_after + 1));
        }
      }
    }
  }
  return e;
}

/// Largest marginal population on the top Fock level of any mode.
inline double top_level_population(const FockState& state) {
  const ModeShape& shape = state.shape();
  double worst = 0.0;
  for (int k = 0; k < shape.modes(); ++k) {
    if (shape.cutoff(k) < 2) continue;
    const Eigen::Index stride = shape.stride(k);
    double pop = 0.0;
    for (Eigen::Index i = 0; i < shape.dim(); ++i) {
      if ((i / stride) % shape.cutoff(k) == shape.cutoff(k) - 1) pop += state.matrix()(i, i).real();
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

inline constexpr double boundary_population_threshold = tol::tail_budget;

inline Moments moments(const FockState& state) {
  const LadderExpectations e = ladder_expectations(state);
  const int n = state.modes();
  const double root2 = std::sqrt(2.0);

  Moments m{rvec(2 * n), rmat(2 * n, 2 * n), state.flags()};
  for (int k = 0; k < n; ++k) {
    m.mean(2 * k) = root2 * e.a(k).real();
    m.mean(2 * k + 1) = root2 * e.a(k).imag();
  }
  for (int j = 0; j < n; ++j) {
    // <a_j^dag a_j> must come out real; anything else means rho is not Hermitian
    detail::checked_real(e.adag_a(j, j), "number expectation");
    for (int k = 0; k < n; ++k) {
      const cplx aa = e.aa(j, k);
      const cplx nn = e.adag_a(j, k);
      const double delta = j == k ? 0.5 : 0.0;
      m.cov(2 * j, 2 * k) = aa.real() + nn.real() + delta;
      m.cov(2 * j + 1, 2 * k + 1) = -aa.real() + nn.real() + delta;
      m.cov(2 * j, 2 * k + 1) = aa.imag() + nn.imag();
      m.cov(2 * k + 1, 2 * j) = m.cov(2 * j, 2 * k + 1);
    }
  }
  m.cov -= m.mean * m.mean.transpose();
  const double asym = (m.cov - m.cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::hermitian) throw Error(ErrorKind::numeric_integrity, "covariance matrix is not symmetric");
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  if (top_level_population(state) > boundary_population_threshold) m.flags.set(Flag::boundary_population);
  return m;
}

inline rvec mean_vector(const FockState& state) { return moments(state).mean; }
inline rmat covariance_matrix(const FockState& state) { return moments(state).cov; }

/// Symplectic eigenvalues nu_1 >= ... >= nu_n of a positive-definite covariance matrix.
inline rvec symplectic_eigenvalues(const rmat& cov) {
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::SelfAdjointEigenSolver<rmat> es(cov);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error(ErrorKind::domain, "covariance matrix is not positive definite");
  const rmat root = es.operatorSqrt();
  const rmat a = root * symplectic_form(n) * root;  // antisymmetric, eigenvalues +-i nu
  Eigen::SelfAdjointEigenSolver<rmat> sq(a.transpose() * a, Eigen::EigenvaluesOnly);
  rvec all = sq.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(all.data(), all.data() + all.size(), std::greater<>());
  rvec nu(n);
  for (int k = 0; k < n; ++k) nu(k) = 0.5 * (all(2 * k) + all(2 * k + 1));
  return nu;
}

}  // namespace nongauss
