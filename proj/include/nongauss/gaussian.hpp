#pragma once

// Reference Gaussian state with the same first and second moments as a given
// state, described by a synthesis recipe
//
//   tau = D(alpha) U(O1) U(Z) U(O2) [nu(n_1) (x) ... (x) nu(n_k)] U(O2)^dag U(Z)^dag U(O1)^dag D(alpha)^dag
//
// and realized in the Fock basis as tau = A diag(w) A^dag, where the columns of
// A are the images of the thermal number states and w their populations.

#include "nongauss/fock.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/special.hpp"
#include "nongauss/symplectic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace nongauss {

/// D(alpha) S(zeta) nu(n_t) S(zeta)^dag D(alpha)^dag.
struct SingleModeParams {
  cplx alpha;
  cplx zeta;
  double n_t = 0.0;
};

struct GaussianSpec {
  rvec mean;
  rmat cov;
  cvec alpha;    // per-mode displacement
  rmat outer;    // O1
  rvec squeeze;  // r_k
  rmat inner;    // O2
  rvec thermal;  // n_k = nu_k - 1/2
  rvec nu;       // symplectic eigenvalues, descending
  std::optional<SingleModeParams> single;

  int modes() const { return static_cast<int>(mean.size() / 2); }

  rmat symplectic() const { return outer * squeeze_diagonal(squeeze) * inner; }

  rmat reconstructed_cov() const {
    const rmat s = symplectic();
    return s * symplectic_diagonal(nu) * s.transpose();
  }

  /// Tr[tau^2] = prod_k 1/(2 nu_k).
  double purity() const {
    double p = 1.0;
    for (Eigen::Index k = 0; k < nu.size(); ++k) p /= 2.0 * nu(k);
    return p;
  }
};

inline SingleModeParams single_mode_params(const rvec& mean, const rmat& cov) {
  if (mean.size() != 2 || cov.rows() != 2 || cov.cols() != 2) {
    throw Error(ErrorKind::invalid_dimension, "single_mode_params needs one mode");
  }
  const double det = cov.determinant();
  if (det < 0.25 - 1e-8) {
    throw Error(ErrorKind::domain, "unphysical covariance matrix: det " + std::to_string(det) + " < 1/4");
  }
  SingleModeParams out;
  out.alpha = cplx(mean(0), mean(1)) / std::sqrt(2.0);
  out.n_t = std::max(0.0, std::sqrt(std::max(det, 0.25)) - 0.5);
  Eigen::SelfAdjointEigenSolver<rmat> es(cov);
  const double s_min = es.eigenvalues()(0);
  const double s_max = es.eigenvalues()(1);
  const double r = 0.25 * std::log(s_max / s_min);
  if (r > 1e-12) {
    const rvec major = es.eigenvectors().col(1);
    const double phi = std::atan2(major(1), major(0));
    out.zeta = std::polar(r, 2.0 * phi);
  }
  return out;
}

inline SingleModeParams single_mode_params(const Moments& m) { return single_mode_params(m.mean, m.cov); }

inline GaussianSpec gaussian_spec(const rvec& mean, const rmat& cov) {
  if (mean.size() != cov.rows() || cov.rows() != cov.cols() || mean.size() % 2 != 0 || mean.size() == 0) {
    throw Error(ErrorKind::invalid_dimension, "mean and covariance sizes disagree");
  }
  const int n = static_cast<int>(mean.size() / 2);
  const SymplecticFactorization w = williamson(cov);
  const EulerDecomposition e = euler_decompose(w.S);

  GaussianSpec spec;
  spec.mean = mean;
  spec.cov = cov;
  spec.alpha = cvec(n);
  for (int k = 0; k < n; ++k) spec.alpha(k) = cplx(mean(2 * k), mean(2 * k + 1)) / std::sqrt(2.0);
  spec.outer = e.outer;
  spec.squeeze = e.squeeze;
  spec.inner = e.inner;
  spec.nu = w.nu;
  spec.thermal = (w.nu.array() - 0.5).max(0.0).matrix();
  if (n == 1) spec.single = single_mode_params(mean, cov);

  const double residual = (spec.reconstructed_cov() - cov).cwiseAbs().maxCoeff();
  if (residual > 1e-7 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::numeric_integrity, "Gaussian recipe does not reproduce the covariance (residual " +
                                                  std::to_string(residual) + ")");
  }
  return spec;
}

inline GaussianSpec gaussian_spec(const Moments& m) { return gaussian_spec(m.mean, m.cov); }

/// Two-mode squeezed thermal form S2(xi)[nu(N) (x) nu(N)]S2(xi)^dag with zero
/// mean, if the spec has it (within tol).
struct TwoModeSqueezedThermal {
  cplx xi;
  double n_thermal = 0.0;
};

inline std::optional<TwoModeSqueezedThermal> two_mode_squeezed_thermal_params(const GaussianSpec& spec,
                                                                              double tol = 1e-7) {
  if (spec.modes() != 2 || spec.mean.cwiseAbs().maxCoeff() > tol) return std::nullopt;
  if (std::abs(spec.nu(0) - spec.nu(1)) > tol) return std::nullopt;
  const double nu = 0.5 * (spec.nu(0) + spec.nu(1));
  const double ch = 0.5 * (spec.cov(0, 0) + spec.cov(1, 1)) / nu;
  if (ch < 1.0 - tol) return std::nullopt;
  const double r = 0.5 * std::acosh(std::max(1.0, ch));
  const double sc = spec.cov(0, 2) / nu;  // sinh(2r) cos(theta)
  const double ss = spec.cov(0, 3) / nu;  // sinh(2r) sin(theta)
  const cplx xi = r > 0.0 ? std::polar(r, std::atan2(ss, sc)) : cplx(0.0);
  const rmat s = two_mode_squeeze_symplectic(xi);
  if ((nu * s * s.transpose() - spec.cov).cwiseAbs().maxCoeff() > std::sqrt(tol)) return std::nullopt;
  return TwoModeSqueezedThermal{xi, nu - 0.5};
}

// ---------------------------------------------------------------------------
// Fock synthesis

namespace detail {

/// op (rows x cutoff(mode)) applied to `mode` of the columns of m; the mode's
/// cutoff becomes op.rows().
inline std::pair<ModeShape, cmat> act_rect(const ModeShape& shape, int mode, const cmat& op, const cmat& m) {
  const Eigen::Index d_in = shape.cutoff(mode);
  const Eigen::Index d_out = op.rows();
  if (op.cols() != d_in || m.rows() != shape.dim()) throw Error(ErrorKind::shape_mismatch, "act_rect");
  std::vector<int> cutoffs = shape.cutoffs();
  cutoffs[mode] = static_cast<int>(d_out);
  ModeShape out_shape(cutoffs);
  const Eigen::Index inner = shape.stride(mode);
  const Eigen::Index outer = shape.dim() / (d_in * inner);
  cmat out(out_shape.dim(), m.cols());
  const cmat op_t = op.transpose();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index p = 0; p < outer; ++p) {
      Eigen::Map<const cmat> in_block(m.col(c).data() + p * d_in * inner, inner, d_in);
      Eigen::Map<cmat> out_block(out.col(c).data() + p * d_out * inner, inner, d_out);
      out_block.noalias() = in_block * op_t;
    }
  }
  return {std::move(out_shape), std::move(out)};
}

/// Rows needed so that a zero-mean Gaussian marginal with covariance `cov2`
/// leaves at most about `tail` population above them.
inline int gaussian_rows(const rmat& cov2, double tail) {
  Eigen::SelfAdjointEigenSolver<rmat> es(cov2, Eigen::EigenvaluesOnly);
  const double s_max = es.eigenvalues()(1);
  const double q = (s_max - 0.5) / (s_max + 0.5);
  if (q <= 1e-300) return 1;
  return static_cast<int>(std::ceil(std::log(tail) / std::log(q))) + 1;
}

inline int thermal_support(double n_t, double tail) {
  if (n_t < 1e-13) return 1;
  return std::max(2, thermal_cutoff(n_t, tail));
}

inline bool near_identity(const rmat& m) {
  return (m - rmat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < 1e-14;
}

/// Identity-like rows x cols matrix, used to crop or zero-pad one mode.
inline cmat crop(int rows, int cols) { return cmat::Identity(rows, cols); }

inline constexpr double synthesis_tail = 1e-15;

}  // namespace detail

/// Factor A and weights w with tau restricted to `cutoffs` equal to A diag(w) A^dag.
struct GaussianFactor {
  ModeShape shape;
  cmat columns;
  rvec weights;

  cmat density() const { return columns * weights.cast<cplx>().asDiagonal() * columns.adjoint(); }
};

inline GaussianFactor gaussian_factor(const GaussianSpec& spec, const std::vector<int>& cutoffs) {
  const int n = spec.modes();
  if (static_cast<int>(cutoffs.size()) != n) throw Error(ErrorKind::shape_mismatch, "cutoff count vs modes");
  const ModeShape out_shape(cutoffs);

  // Without squeezing or displacement the map conserves total photon number,
  // so nothing above the largest total in `cutoffs` reaches the output.
  const bool number_conserving = spec.squeeze.cwiseAbs().maxCoeff() < 1e-14 && spec.alpha.cwiseAbs().maxCoeff() == 0.0;
  int reach = 1;
  for (int c : cutoffs) reach += c - 1;

  std::vector<int> w_th(n);
  for (int k = 0; k < n; ++k) {
    w_th[k] = detail::thermal_support(spec.thermal(k), detail::synthesis_tail);
    if (number_conserving) w_th[k] = std::min(w_th[k], reach);
  }
  const ModeShape th_shape(w_th);

  rvec weights(th_shape.dim());
  {
    std::vector<rvec> pops(n);
    for (int k = 0; k < n; ++k) pops[k] = thermal_populations(spec.thermal(k), w_th[k]);
    for (Eigen::Index i = 0; i < th_shape.dim(); ++i) {
      const auto occ = th_shape.occupation(i);
      double w = 1.0;
      for (int k = 0; k < n; ++k) w *= pops[k](occ[k]);
      weights(i) = w;
    }
  }

  if (n == 1) {
    const SingleModeParams& p = *spec.single;
    const int rows = cutoffs[0];
    cmat a;
    if (p.alpha == cplx(0.0)) {
      a = squeeze_elements(p.zeta, rows, w_th[0]);
    } else {
      // D(alpha) cannot move number states above `reach` into the first `rows` levels.
      const int reach = static_cast<int>(std::ceil(std::pow(std::sqrt(double(rows)) + std::abs(p.alpha) + 8.0, 2.0)));
      const int mid = std::min(detail::gaussian_rows(spec.cov, 1e-16) + 10, reach);
      a = displacement_elements(p.alpha, rows, mid) * squeeze_elements(p.zeta, mid, w_th[0]);
    }
    return {out_shape, std::move(a), std::move(weights)};
  }

  // Multimode: push the thermal basis columns through O2, Z, O1, D.
  const bool equal_thermal = (spec.thermal.array() - spec.thermal(0)).abs().maxCoeff() < 1e-12;
  const bool apply_inner = !equal_thermal && !detail::near_identity(spec.inner);

  int total = 0;
  for (int k = 0; k < n; ++k) total += w_th[k] - 1;
  ModeShape shape = apply_inner ? ModeShape(std::vector<int>(n, total + 1)) : th_shape;
  cmat m = cmat::Zero(shape.dim(), th_shape.dim());
  for (Eigen::Index i = 0; i < th_shape.dim(); ++i) m(shape.index(th_shape.occupation(i)), i) = 1.0;
  if (apply_inner) m = PassiveUnitary(shape, passive_matrix(spec.inner)).apply_left(m);

  // Working size: largest marginal before and after the outer passive.
  const rmat zo = squeeze_diagonal(spec.squeeze) * spec.inner;
  const rmat pre = zo * symplectic_diagonal(spec.nu) * zo.transpose();
  int mid = 1;
  for (int k = 0; k < n; ++k) {
    mid = std::max(mid, detail::gaussian_rows(pre.block(2 * k, 2 * k, 2, 2), detail::synthesis_tail));
    mid = std::max(mid, detail::gaussian_rows(spec.cov.block(2 * k, 2 * k, 2, 2), detail::synthesis_tail));
  }
  mid += 4;
  if (number_conserving) mid = std::min(mid, reach);

  for (int k = 0; k < n; ++k) {
    auto [next_shape, next] =
        detail::act_rect(shape, k, squeeze_elements(cplx(spec.squeeze(k), 0.0), mid, shape.cutoff(k)), m);
    shape = std::move(next_shape);
    m = std::move(next);
  }
  if (!detail::near_identity(spec.outer)) m = PassiveUnitary(shape, passive_matrix(spec.outer)).apply_left(m);
  for (int k = 0; k < n; ++k) {
    const cmat op = spec.alpha(k) == cplx(0.0) ? detail::crop(cutoffs[k], mid)
                                               : displacement_elements(spec.alpha(k), cutoffs[k], mid);
    auto [next_shape, next] = detail::act_rect(shape, k, op, m);
    shape = std::move(next_shape);
    m = std::move(next);
  }
  return {out_shape, std::move(m), std::move(weights)};
}

/// tau restricted to the given cutoffs, without normalization or validation.
inline cmat gaussian_block(const GaussianSpec& spec, const std::vector<int>& cutoffs) {
  cmat tau = gaussian_factor(spec, cutoffs).density();
  return 0.5 * (tau + tau.adjoint());
}

struct GaussianReference {
  GaussianSpec spec;
  FockState state;
};

inline constexpr int max_single_mode_reference_cutoff = 2000;
inline constexpr int max_multimode_reference_cutoff = 48;

/// Per-mode cutoffs estimated to leave about `tail` of tau outside.
inline std::vector<int> reference_cutoffs(const GaussianSpec& spec, double tail = 1e-12) {
  const int n = spec.modes();
  const int cap = n == 1 ? max_single_mode_reference_cutoff : max_multimode_reference_cutoff;
  std::vector<int> out(n);
  for (int k = 0; k < n; ++k) {
    const int base = detail::gaussian_rows(spec.cov.block(2 * k, 2 * k, 2, 2), tail);
    const double a = std::abs(spec.alpha(k));
    const double rows = a == 0.0 ? base : std::pow(std::sqrt(double(base)) + a + 3.0, 2.0);
    out[k] = std::clamp(static_cast<int>(std::ceil(rows)), 2, cap);
  }
  return out;
}

namespace detail {

inline double max_moment_gap(const Moments& a, const GaussianSpec& spec) {
  return std::max((a.mean - spec.mean).cwiseAbs().maxCoeff(), (a.cov - spec.cov).cwiseAbs().maxCoeff());
}

}  // namespace detail

/// Fock-space tau at the given cutoffs, with the moment audit.
inline FockState synthesize(const GaussianSpec& spec, const std::vector<int>& cutoffs) {
  cmat tau = gaussian_block(spec, cutoffs);
  const double deficit = 1.0 - tau.trace().real();
  if (deficit > tol::max_trace_deficit) {
    throw Error(ErrorKind::synthesis_failure, "reference state loses " + std::to_string(deficit) +
                                                  " of its trace at cutoffs " + ModeShape(cutoffs).to_string());
  }
  Flags flags;
  if (deficit > tol::tail_budget) flags.set(Flag::truncation_guard);
  FockState state = FockState::from_matrix(ModeShape(cutoffs), std::move(tau), flags, Validation::basic);

  const Moments m = moments(state);
  const double gap = detail::max_moment_gap(m, spec);
  if (gap > 1e-5) {
    throw Error(ErrorKind::synthesis_failure,
                "reference moments differ from the target by " + std::to_string(gap));
  }
  if (gap > 1e-6) state.add_flags(Flag::moment_tolerance);
  if (m.flags.test(Flag::boundary_population)) state.add_flags(Flag::boundary_population);
  return state;
}

/// Reference at automatically chosen cutoffs: grows them until the trace
/// deficit is below 1e-12 or the cutoff cap is reached.
inline FockState synthesize(const GaussianSpec& spec) {
  std::vector<int> cutoffs = reference_cutoffs(spec);
  const int cap = spec.modes() == 1 ? max_single_mode_reference_cutoff : max_multimode_reference_cutoff;
  for (;;) {
    cmat tau = gaussian_block(spec, cutoffs);
    const double deficit = 1.0 - tau.trace().real();
    const bool capped = std::all_of(cutoffs.begin(), cutoffs.end(), [&](int d) { return d >= cap; });
    if (deficit <= 1e-12 || capped) break;
    for (int& d : cutoffs) d = std::min(cap, static_cast<int>(std::ceil(1.25 * d)));
  }
  return synthesize(spec, cutoffs);
}

inline GaussianReference reference_gaussian(const FockState& state) {
  GaussianSpec spec = gaussian_spec(moments(state));
  FockState tau = synthesize(spec);
  return {std::move(spec), std::move(tau)};
}

inline GaussianReference reference_gaussian(const FockState& state, const std::vector<int>& cutoffs) {
  GaussianSpec spec = gaussian_spec(moments(state));
  FockState tau = synthesize(spec, cutoffs);
  return {std::move(spec), std::move(tau)};
}

inline GaussianReference reference_gaussian(const FockState& state, int cutoff) {
  return reference_gaussian(state, std::vector<int>(state.modes(), cutoff));
}

/// Gaussian state D(alpha) S(zeta) nu(n_t) S^dag D^dag at one cutoff.
inline FockState single_mode_gaussian(const SingleModeParams& p, int cutoff) {
  if (p.n_t < 0.0) throw Error(ErrorKind::domain, "thermal occupation must be non-negative");
  GaussianSpec spec;
  const double nu = p.n_t + 0.5;
  const rmat s = squeeze_symplectic(p.zeta);
  rvec mean(2);
  mean << std::sqrt(2.0) * p.alpha.real(), std::sqrt(2.0) * p.alpha.imag();
  spec = gaussian_spec(mean, nu * s * s.transpose());
  spec.single = p;
  cmat tau = gaussian_block(spec, {cutoff});
  Flags flags;
  const double deficit = 1.0 - tau.trace().real();
  if (deficit > tol::tail_budget) flags.set(Flag::truncation_guard);
  if (deficit > tol::max_trace_deficit) {
    throw Error(ErrorKind::synthesis_failure, "cutoff " + std::to_string(cutoff) + " too small for the Gaussian state");
  }
  return FockState::from_matrix(ModeShape::single(cutoff), std::move(tau), flags, Validation::basic);
}

/// U rho U^dag for U = D(alpha) S(zeta) exp(i phi a^dag a), single mode, output
/// truncated to out_cutoff. Uses exact matrix elements on an enlarged middle space.
inline FockState apply_gaussian_unitary(const FockState& rho, cplx alpha, cplx zeta, double phi, int out_cutoff) {
  if (rho.modes() != 1) throw Error(ErrorKind::invalid_dimension, "apply_gaussian_unitary is single-mode");
  const int d = rho.shape().cutoff(0);
  const int mid = std::max(out_cutoff, static_cast<int>(std::ceil(std::exp(2.0 * std::abs(zeta)) * (d + 10)))) + 20;
  cvec rotation(d);
  for (int k = 0; k < d; ++k) rotation(k) = std::polar(1.0, phi * k);
  const cmat a = displacement_elements(alpha, out_cutoff, mid) * squeeze_elements(zeta, mid, d) *
                 rotation.asDiagonal();
  cmat out = a * rho.matrix() * a.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return FockState::from_matrix(ModeShape::single(out_cutoff), std::move(out), rho.flags(), Validation::basic);
}

}  // namespace nongauss
