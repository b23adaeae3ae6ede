#pragma once

// Non-Gaussianity delta[rho] = D_HS^2[rho, tau] / mu[rho], with
// D_HS^2 = (mu[rho] + mu[tau] - 2 kappa[rho, tau]) / 2.

#include "nongauss/fock.hpp"
#include "nongauss/gaussian.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <memory>
#include <vector>

namespace nongauss {

inline constexpr double negative_delta_tolerance = 1e-9;
inline constexpr double single_mode_delta_limit = 0.5 + 1e-6;

struct NonGaussianityResult {
  double delta = 0.0;
  double purity_rho = 0.0;
  double purity_tau = 0.0;
  double overlap = 0.0;
  Flags flags;
};

/// Tr[(rho - tau)^2] / 2. Cutoffs may differ; missing entries are zero.
inline double hs_distance_sq(const FockState& rho, const FockState& tau) {
  if (rho.modes() != tau.modes()) throw Error(ErrorKind::shape_mismatch, "hs_distance_sq: mode counts differ");
  const double d = 0.5 * (purity(rho) + purity(tau) - 2.0 * overlap(rho, tau));
  if (d < -1e-10) throw Error(ErrorKind::numeric_integrity, "negative Hilbert-Schmidt distance");
  return std::max(d, 0.0);
}

/// Builds the result from mu[rho], mu[tau], kappa, clamping roundoff negatives.
inline NonGaussianityResult assemble_delta(double mu_rho, double mu_tau, double kappa, Flags flags = {}) {
  NonGaussianityResult r{(mu_rho + mu_tau - 2.0 * kappa) / (2.0 * mu_rho), mu_rho, mu_tau, kappa, flags};
  if (r.delta < 0.0) {
    if (r.delta < -negative_delta_tolerance) {
      throw Error(ErrorKind::numeric_integrity, "negative non-Gaussianity " + std::to_string(r.delta));
    }
    r.delta = 0.0;
  }
  return r;
}

/// Tr[rho B] for a matrix B on the same basis.
inline double trace_product(const cmat& rho, const cmat& b) {
  return detail::checked_real(rho.cwiseProduct(b.transpose()).sum(), "overlap");
}

struct NonGaussianityOptions {
  /// Also synthesize the full reference at automatic cutoffs and check its
  /// purity against the analytic value.
  bool audit_reference = false;
};

/// delta[rho]. The overlap uses tau restricted to rho's cutoffs (exact, since
/// rho vanishes outside them); mu[tau] is the analytic prod 1/(2 nu_k).
inline NonGaussianityResult non_gaussianity(const FockState& rho, const GaussianSpec& spec,
                                            NonGaussianityOptions options = {}) {
  const double mu_rho = purity(rho);
  const double kappa = trace_product(rho.matrix(), gaussian_block(spec, rho.shape().cutoffs()));
  Flags flags = rho.flags();
  if (options.audit_reference) {
    const FockState tau = synthesize(spec);
    const double gap = std::abs(purity(tau) - spec.purity());
    if (gap > 1e-6) {
      throw Error(ErrorKind::synthesis_failure, "reference purity differs from analytic value by " + std::to_string(gap));
    }
    flags |= tau.flags();
  }
  NonGaussianityResult r = assemble_delta(mu_rho, spec.purity(), kappa, flags);
  if (rho.modes() == 1 && r.delta > single_mode_delta_limit) r.flags.set(Flag::above_half);
  return r;
}

inline NonGaussianityResult non_gaussianity(const FockState& rho, NonGaussianityOptions options = {}) {
  const Moments m = moments(rho);
  NonGaussianityResult r = non_gaussianity(rho, gaussian_spec(m), options);
  r.flags |= m.flags;
  return r;
}

/// delta of a tensor product from the factors' mu[rho_k], mu[tau_k], kappa_k.
inline NonGaussianityResult delta_product(const std::vector<NonGaussianityResult>& parts) {
  if (parts.empty()) throw Error(ErrorKind::invalid_dimension, "delta_product needs at least one factor");
  double mu_rho = 1.0, mu_tau = 1.0, kappa = 1.0;
  Flags flags;
  for (const auto& p : parts) {
    mu_rho *= p.purity_rho;
    mu_tau *= p.purity_tau;
    kappa *= p.overlap;
    flags |= p.flags;
  }
  flags.clear(Flag::above_half);
  return assemble_delta(mu_rho, mu_tau, kappa, flags);
}

inline NonGaussianityResult delta_product(const std::vector<FockState>& parts) {
  std::vector<NonGaussianityResult> results;
  results.reserve(parts.size());
  for (const auto& p : parts) results.push_back(non_gaussianity(p));
  return delta_product(results);
}

// ---------------------------------------------------------------------------
// Closed forms

namespace detail {

/// kappa[|p><p|, nu(p)] = p^p / (p+1)^(p+1).
inline double fock_thermal_overlap(int p) {
  if (p == 0) return 1.0;
  return std::exp(p * std::log(double(p)) - (p + 1.0) * std::log(p + 1.0));
}

inline void require_photon_number(int p) {
  if (p < 0) throw Error(ErrorKind::domain, "photon number must be non-negative");
}

inline void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::domain, std::string(name) + " must lie in [0, 1]");
}

}  // namespace detail

inline double delta_fock_analytic(int p) {
  detail::require_photon_number(p);
  return 0.5 * (1.0 + 1.0 / (2.0 * p + 1.0)) - detail::fock_thermal_overlap(p);
}

/// delta[(|p><p|)^(x)n].
inline double delta_fock_multimode(int p, int n) {
  detail::require_photon_number(p);
  if (n < 1) throw Error(ErrorKind::domain, "copy count must be at least 1");
  return 0.5 * (1.0 + std::pow(2.0 * p + 1.0, -n)) - std::pow(detail::fock_thermal_overlap(p), n);
}

/// argmax over n in [1, n_max] of delta_fock_multimode(p, n); smallest n on ties.
inline int optimal_copies(int p, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::domain, "n_max must be at least 1");
  int best = 1;
  double best_value = delta_fock_multimode(p, 1);
  for (int n = 2; n <= n_max; ++n) {
    const double v = delta_fock_multimode(p, n);
    if (v > best_value) {
      best_value = v;
      best = n;
    }
  }
  return best;
}

/// delta of the loss-channel output rho_p(eta) for input |p><p|.
///
/// mu[rho] = (1-eta)^(2p) 2F1(-p,-p;1;eta^2/(1-eta)^2) is summed term by term
/// as sum_l alpha_l^2 with log-space binomial weights, which stays finite for
/// eta -> 1 and p in the thousands.
inline double delta_loss_analytic(int p, double eta) {
  detail::require_photon_number(p);
  detail::require_unit_interval(eta, "eta");
  double mu_rho = 0.0;
  for (int l = 0; l <= p; ++l) {
    const double a = binomial_weight(p, l, eta);
    mu_rho += a * a;
  }
  const double n = p * eta;
  const double mu_tau = 1.0 / (1.0 + 2.0 * n);
  const double kappa = std::exp(p * std::log1p((p - 1.0) * eta) - (p + 1.0) * std::log1p(n));
  return std::max(0.0, (mu_rho + mu_tau - 2.0 * kappa) / (2.0 * mu_rho));
}

/// kappa[|p><p|, D(C) nu(p) D(C)^dag].
inline double overlap_fock_displaced_thermal(int p, cplx c) {
  detail::require_photon_number(p);
  const double c2 = std::norm(c);
  if (p == 0) return std::exp(-c2);
  return std::exp(-c2 / (1.0 + p)) * detail::fock_thermal_overlap(p) * laguerre(p, -c2 / (p * (1.0 + p)));
}

/// kappa[rho_p(eta), D(C) nu(p eta) D(C)^dag].
inline double overlap_loss_displaced_thermal(int p, double eta, cplx c) {
  detail::require_photon_number(p);
  detail::require_unit_interval(eta, "eta");
  const double c2 = std::norm(c);
  const double n = p * eta;
  const double prefactor = std::exp(p * std::log1p((p - 1.0) * eta) - (p + 1.0) * std::log1p(n));
  const double arg = eta * c2 / ((1.0 + n) * (eta * (1.0 - p) - 1.0));
  return prefactor * laguerre(p, arg) * std::exp(-c2 / (1.0 + n));
}

// ---------------------------------------------------------------------------
// Free-mean variant

struct DeltaPrimeResult {
  double delta_prime = 0.0;
  cplx c;            // optimal mean <a> of the reference
  double delta = 0.0;  // constrained value, C = <a>
  int evaluations = 0;
};

/// kappa as a function of the reference mean C, covariance held fixed.
class DisplacedOverlap {
 public:
  DisplacedOverlap(const FockState& rho, const SingleModeParams& params) : rho_(rho.matrix()) {
    rows_ = rho.shape().cutoff(0);
    const int w_th = detail::thermal_support(params.n_t, detail::synthesis_tail);
    rmat cov = squeeze_symplectic(params.zeta) * squeeze_symplectic(params.zeta).transpose() * (params.n_t + 0.5);
    mid_full_ = std::max(detail::gaussian_rows(cov, 1e-16) + 10, w_th);
    squeezed_ = squeeze_elements(params.zeta, mid_full_, w_th);
    weights_ = thermal_populations(params.n_t, w_th);
  }

  double operator()(cplx c) const {
    const int reach = static_cast<int>(std::ceil(std::pow(std::sqrt(double(rows_)) + std::abs(c) + 8.0, 2.0)));
    const int mid = std::min(mid_full_, reach);
    const cmat a = displacement_elements(c, rows_, mid) * squeezed_.topRows(mid);
    const cmat ra = rho_ * a;
    double k = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) k += weights_(j) * a.col(j).dot(ra.col(j)).real();
    return k;
  }

 private:
  cmat rho_;
  int rows_ = 0;
  int mid_full_ = 0;
  cmat squeezed_;
  rvec weights_;
};

struct DeltaPrimeOptions {
  double simplex_size = 1e-8;
  int max_evaluations = 500;
  double initial_step = 0.1;
  // Near the minimum the objective flattens to roundoff before the simplex
  // reaches simplex_size. A simplex below stall_size whose best value moved
  // less than stall_tolerance over stall_iterations is accepted.
  double stall_size = 1e-3;
  double stall_tolerance = 1e-14;
  int stall_iterations = 30;
};

/// min over the reference mean C of D_HS^2[rho, tau'(C)] / mu[rho], with tau'
/// sharing rho's covariance matrix. Single-mode only.
inline DeltaPrimeResult delta_prime(const FockState& rho, DeltaPrimeOptions options = {}) {
  if (rho.modes() != 1) throw Error(ErrorKind::invalid_dimension, "delta_prime is defined for single-mode states");
  const Moments m = moments(rho);
  const SingleModeParams params = single_mode_params(m);
  const double mu_rho = purity(rho);
  const double mu_tau = 1.0 / (2.0 * params.n_t + 1.0);
  const DisplacedOverlap kappa(rho, params);

  struct Context {
    const DisplacedOverlap* kappa;
    double mu_rho, mu_tau;
    int evaluations;
  } ctx{&kappa, mu_rho, mu_tau, 0};

  auto objective = [](const gsl_vector* x, void* data) -> double {
    auto* c = static_cast<Context*>(data);
    ++c->evaluations;
    const double k = (*c->kappa)(cplx(gsl_vector_get(x, 0), gsl_vector_get(x, 1)));
    return (c->mu_rho + c->mu_tau - 2.0 * k) / (2.0 * c->mu_rho);
  };

  // Status codes are checked below; the default handler would abort.
  [[maybe_unused]] static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
  gsl_multimin_function fn{objective, 2, &ctx};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2), gsl_vector_free);
  gsl_vector_set(x.get(), 0, params.alpha.real());
  gsl_vector_set(x.get(), 1, params.alpha.imag());
  gsl_vector_set_all(step.get(), options.initial_step);

  DeltaPrimeResult result;
  result.delta = (mu_rho + mu_tau - 2.0 * kappa(params.alpha)) / (2.0 * mu_rho);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  bool converged = false;
  double anchor = gsl_multimin_fminimizer_minimum(solver.get());
  int stalled = 0;
  while (ctx.evaluations < options.max_evaluations) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, options.simplex_size) == GSL_SUCCESS) {
      converged = true;
      break;
    }
    const double value = gsl_multimin_fminimizer_minimum(solver.get());
    if (anchor - value > options.stall_tolerance) {
      anchor = value;
      stalled = 0;
    } else if (++stalled >= options.stall_iterations && size < options.stall_size) {
      converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(solver.get());
  result.c = cplx(gsl_vector_get(best, 0), gsl_vector_get(best, 1));
  result.delta_prime = std::max(0.0, gsl_multimin_fminimizer_minimum(solver.get()));
  result.evaluations = ctx.evaluations;
  if (!converged) {
    throw ConvergenceError("delta_prime: simplex did not shrink below " + std::to_string(options.simplex_size) +
                               " within " + std::to_string(options.max_evaluations) + " evaluations",
                           result.delta_prime, {result.c.real(), result.c.imag()});
  }
  return result;
}

}  // namespace nongauss
