#pragma once

// Williamson normal form and Euler (Bloch-Messiah) factorization of real
// symplectic matrices, plus the symplectic images of the standard gates.
//
// Convention: a unitary U realizes the symplectic matrix S when
// U^dag R U = S R, so that sigma[U rho U^dag] = S sigma[rho] S^T.

#include "nongauss/moments.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace nongauss {

struct SymplecticFactorization {
  rmat S;   // sigma = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T
  rvec nu;  // descending
};

struct EulerDecomposition {
  rmat outer;    // orthogonal symplectic O1
  rvec squeeze;  // r_k >= 0, descending
  rmat inner;    // orthogonal symplectic O2
};

inline rmat symplectic_diagonal(const rvec& per_mode) {
  rmat d = rmat::Zero(2 * per_mode.size(), 2 * per_mode.size());
  for (Eigen::Index k = 0; k < per_mode.size(); ++k) {
    d(2 * k, 2 * k) = per_mode(k);
    d(2 * k + 1, 2 * k + 1) = per_mode(k);
  }
  return d;
}

inline rmat squeeze_diagonal(const rvec& r) {
  rmat z = rmat::Zero(2 * r.size(), 2 * r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    z(2 * k, 2 * k) = std::exp(r(k));
    z(2 * k + 1, 2 * k + 1) = std::exp(-r(k));
  }
  return z;
}

/// max |S^T Omega S - Omega|.
inline double symplectic_residual(const rmat& s) {
  const rmat omega = symplectic_form(static_cast<int>(s.rows() / 2));
  return (s.transpose() * omega * s - omega).cwiseAbs().maxCoeff();
}

inline SymplecticFactorization williamson(const rmat& cov) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0) {
    throw Error(ErrorKind::invalid_dimension, "covariance matrix must be 2n x 2n");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::domain, "covariance matrix is not symmetric");
  }
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::SelfAdjointEigenSolver<rmat> es(cov);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::domain, "covariance matrix is not positive definite");
  }
  const rmat root = es.operatorSqrt();
  const rmat inv_root = es.operatorInverseSqrt();
  const rmat omega = symplectic_form(n);
  rmat whitened = inv_root * omega * inv_root;
  whitened = 0.5 * (whitened - whitened.transpose()).eval();

  // An antisymmetric matrix is normal, so its real Schur form is block
  // diagonal with 2x2 blocks [[0, b], [-b, 0]], b = 1/nu.
  Eigen::RealSchur<rmat> schur(whitened);
  rmat q = schur.matrixU();
  const rmat t = q.transpose() * whitened * q;

  std::vector<double> nu(n);
  for (int k = 0; k < n; ++k) {
    double b = 0.5 * (t(2 * k, 2 * k + 1) - t(2 * k + 1, 2 * k));
    if (b < 0.0) {
      q.col(2 * k).swap(q.col(2 * k + 1));
      b = -b;
    }
    nu[k] = 1.0 / b;
  }

  // Modes ordered by descending nu.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nu[a] > nu[b]; });
  rmat k_mat(2 * n, 2 * n);
  rvec nu_sorted(n);
  for (int k = 0; k < n; ++k) {
    k_mat.col(2 * k) = q.col(2 * order[k]);
    k_mat.col(2 * k + 1) = q.col(2 * order[k] + 1);
    nu_sorted(k) = nu[order[k]];
  }

  if (nu_sorted.minCoeff() < 0.5 - 1e-8) {
    throw Error(ErrorKind::domain, "unphysical covariance matrix: symplectic eigenvalue " +
                                       std::to_string(nu_sorted.minCoeff()) + " < 1/2");
  }
  const rmat s = root * k_mat * symplectic_diagonal(nu_sorted.cwiseSqrt().cwiseInverse());
  return {s, nu_sorted};
}

inline EulerDecomposition euler_decompose(const rmat& s) {
  const int n = static_cast<int>(s.rows() / 2);
  if (s.rows() != s.cols() || s.rows() % 2 != 0 || n == 0) {
    throw Error(ErrorKind::invalid_dimension, "symplectic matrix must be 2n x 2n");
  }
  if (symplectic_residual(s) > 1e-8 * std::max(1.0, s.squaredNorm())) {
    throw Error(ErrorKind::domain, "matrix is not symplectic");
  }
  const rmat omega_t = symplectic_form(n).transpose();
  rmat gram = s * s.transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<rmat> es(gram);
  // descending order
  const rvec values = es.eigenvalues().reverse();
  const rmat vectors = es.eigenvectors().rowwise().reverse();

  constexpr double unit_tol = 1e-9;
  int squeezed = 0;
  while (squeezed < n && values(squeezed) > 1.0 + unit_tol) ++squeezed;

  rmat outer = rmat::Zero(2 * n, 2 * n);
  rvec r = rvec::Zero(n);
  for (int k = 0; k < squeezed; ++k) {
    const rvec v = vectors.col(k);
    outer.col(2 * k) = v;
    outer.col(2 * k + 1) = omega_t * v;
    r(k) = 0.5 * std::log(values(k));
  }

  // Unsqueezed modes: symplectic Gram-Schmidt inside the eigenvalue-one subspace.
  const int free_dim = 2 * (n - squeezed);
  if (free_dim > 0) {
    const rmat basis = vectors.middleCols(squeezed, free_dim);
    const rmat projector = basis * basis.transpose();
    int filled = squeezed;
    auto orthogonalize = [&](rvec v) {
      for (int c = 0; c < 2 * filled; ++c) v -= outer.col(c).dot(v) * outer.col(c);
      return v;
    };
    for (int c = 0; c < free_dim && filled < n; ++c) {
      rvec v = orthogonalize(basis.col(c));
      if (v.norm() < 0.5) continue;
      v.normalize();
      rvec w = orthogonalize(projector * (omega_t * v));
      w -= v.dot(w) * v;
      w.normalize();
      outer.col(2 * filled) = v;
      outer.col(2 * filled + 1) = w;
      ++filled;
    }
    if (filled != n) throw Error(ErrorKind::numeric_integrity, "euler_decompose: degenerate subspace lost rank");
  }
  const rmat inner = squeeze_diagonal(-r) * outer.transpose() * s;
  return {outer, r, inner};
}

/// Complex n x n matrix u with U^dag a U = u a for an orthogonal symplectic O.
inline cmat passive_matrix(const rmat& orthosymplectic) {
  const int n = static_cast<int>(orthosymplectic.rows() / 2);
  cmat u(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) u(j, k) = cplx(orthosymplectic(2 * j, 2 * k), orthosymplectic(2 * j + 1, 2 * k));
  return u;
}

// Symplectic images of the gates built in fock.hpp.

/// S(zeta), zeta = r e^{i theta}.
inline rmat squeeze_symplectic(cplx zeta) {
  const double r = std::abs(zeta);
  const double theta = std::arg(zeta);
  const double c = std::cosh(r), s = std::sinh(r);
  rmat m(2, 2);
  m << c + s * std::cos(theta), s * std::sin(theta), s * std::sin(theta), c - s * std::cos(theta);
  return m;
}

/// exp(i phi a^dag a).
inline rmat rotation_symplectic(double phi) {
  rmat m(2, 2);
  m << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return m;
}

/// exp[i theta (a1^dag a2 + a2^dag a1)].
inline rmat beam_splitter_symplectic(double theta) {
  cmat u(2, 2);
  u << std::cos(theta), cplx(0.0, std::sin(theta)), cplx(0.0, std::sin(theta)), std::cos(theta);
  rmat m(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      m(2 * j, 2 * k) = u(j, k).real();
      m(2 * j, 2 * k + 1) = -u(j, k).imag();
      m(2 * j + 1, 2 * k) = u(j, k).imag();
      m(2 * j + 1, 2 * k + 1) = u(j, k).real();
    }
  return m;
}

/// exp(xi a1^dag a2^dag - xi^* a1 a2).
inline rmat two_mode_squeeze_symplectic(cplx xi) {
  const double r = std::abs(xi);
  const double theta = std::arg(xi);
  const double c = std::cosh(r), s = std::sinh(r);
  const double sc = s * std::cos(theta), ss = s * std::sin(theta);
  rmat m = rmat::Zero(4, 4);
  // q1' = c q1 + s(cos q2 + sin p2), p1' = c p1 + s(sin q2 - cos p2), and 1 <-> 2
  m(0, 0) = c;
  m(0, 2) = sc;
  m(0, 3) = ss;
  m(1, 1) = c;
  m(1, 2) = ss;
  m(1, 3) = -sc;
  m(2, 2) = c;
  m(2, 0) = sc;
  m(2, 1) = ss;
  m(3, 3) = c;
  m(3, 0) = ss;
  m(3, 1) = -sc;
  return m;
}

}  // namespace nongauss
