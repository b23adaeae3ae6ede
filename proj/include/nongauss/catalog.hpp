#pragma once

// Constructors for the standard test states and their default cutoffs.

#include "nongauss/fock.hpp"
#include "nongauss/random.hpp"
#include "nongauss/special.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nongauss {

// Default cutoffs. Each leaves a tail well below the library's trace budget.

inline int recommended_fock_cutoff(int p) { return p + 2; }

inline int recommended_coherent_cutoff(cplx alpha) {
  const double a = std::abs(alpha);
  return std::max(2, static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0)));
}

inline int recommended_cat_cutoff(double alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 6.0 * a + 15.0));
}

inline int recommended_squeezed_cutoff(double r) { return static_cast<int>(std::ceil(10.0 * std::exp(2.0 * r))); }

inline int recommended_thermal_cutoff(double n_t) { return std::max(2, thermal_cutoff(n_t, tol::tail_budget)); }

namespace detail {

inline void require_cutoff(int cutoff, int minimum = 1) {
  if (cutoff < minimum) {
    throw Error(ErrorKind::invalid_dimension, "cutoff must be at least " + std::to_string(minimum));
  }
}

}  // namespace detail

/// (cos phi |alpha> + sin phi |-alpha>) / sqrt(1 + sin(2 phi) exp(-2 alpha^2)).
inline FockState make_cat(double alpha, double phi, int cutoff) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "cat amplitude must be positive");
  detail::require_cutoff(cutoff, 2);
  const double norm = 1.0 + std::sin(2.0 * phi) * std::exp(-2.0 * alpha * alpha);
  if (norm <= 1e-14) throw Error(ErrorKind::domain, "cat superposition has zero norm");
  const cvec ket = (std::cos(phi) * coherent_amplitudes(alpha, cutoff) +
                    std::sin(phi) * coherent_amplitudes(-alpha, cutoff)) /
                   std::sqrt(norm);
  Flags flags;
  if (!displacement_guard_ok(alpha, cutoff)) flags.set(Flag::truncation_guard);
  return FockState::from_ket(ModeShape::single(cutoff), ket, flags);
}

inline FockState make_cat(double alpha, double phi) { return make_cat(alpha, phi, recommended_cat_cutoff(alpha)); }

enum class BellKind { phi, psi };

/// Phi: cos phi |0,0> + sin phi |1,1>.  Psi: cos phi |0,1> + sin phi |1,0>.
inline FockState make_bell_like(BellKind kind, double phi, std::vector<int> cutoffs = {3, 3}) {
  if (cutoffs.size() != 2) throw Error(ErrorKind::invalid_dimension, "Bell-like states have two modes");
  for (int d : cutoffs) detail::require_cutoff(d, 2);
  const ModeShape shape(std::move(cutoffs));
  cvec ket = cvec::Zero(shape.dim());
  if (kind == BellKind::phi) {
    ket(shape.index(std::vector<int>{0, 0})) = std::cos(phi);
    ket(shape.index(std::vector<int>{1, 1})) = std::sin(phi);
  } else {
    ket(shape.index(std::vector<int>{0, 1})) = std::cos(phi);
    ket(shape.index(std::vector<int>{1, 0})) = std::sin(phi);
  }
  return FockState::from_ket(shape, ket);
}

inline FockState make_fock(int p, std::optional<int> cutoff = std::nullopt) {
  return fock_state(p, cutoff.value_or(recommended_fock_cutoff(p)));
}

/// |p>^(x)n.
inline FockState make_fock_copies(int p, int n, std::optional<int> cutoff = std::nullopt) {
  if (n < 1) throw Error(ErrorKind::domain, "copy count must be at least 1");
  const FockState single = make_fock(p, cutoff);
  FockState out = single;
  for (int k = 1; k < n; ++k) out = tensor(out, single);
  return out;
}

/// S(r)|0> from the exact matrix elements of S(r).
inline FockState make_squeezed_vacuum(cplx zeta, std::optional<int> cutoff = std::nullopt) {
  const int d = cutoff.value_or(recommended_squeezed_cutoff(std::abs(zeta)));
  detail::require_cutoff(d, 2);
  Flags flags;
  if (!squeeze_guard_ok(zeta, d)) flags.set(Flag::truncation_guard);
  const cvec ket = squeeze_elements(zeta, d, 1).col(0);
  return FockState::from_ket(ModeShape::single(d), ket, flags);
}

inline FockState make_coherent(cplx alpha, std::optional<int> cutoff = std::nullopt) {
  const int d = cutoff.value_or(recommended_coherent_cutoff(alpha));
  detail::require_cutoff(d);
  Flags flags;
  if (!displacement_guard_ok(alpha, d)) flags.set(Flag::truncation_guard);
  return FockState::from_ket(ModeShape::single(d), coherent_amplitudes(alpha, d), flags);
}

inline FockState make_thermal(double n_t, std::optional<int> cutoff = std::nullopt) {
  if (!(n_t >= 0.0)) throw Error(ErrorKind::domain, "thermal occupation must be non-negative");
  return thermal_state(n_t, cutoff.value_or(recommended_thermal_cutoff(n_t)));
}

enum class Family { fock, fock_copies, cat, bell_phi, bell_psi, squeezed_vacuum, coherent, thermal, random };

inline constexpr std::pair<Family, std::string_view> family_names[] = {
    {Family::fock, "fock"},
    {Family::fock_copies, "fock-copies"},
    {Family::cat, "cat"},
    {Family::bell_phi, "bell-phi"},
    {Family::bell_psi, "bell-psi"},
    {Family::squeezed_vacuum, "squeezed-vacuum"},
    {Family::coherent, "coherent"},
    {Family::thermal, "thermal"},
    {Family::random, "random"},
};

inline std::string_view to_string(Family f) {
  for (const auto& [family, name] : family_names)
    if (family == f) return name;
  return "unknown";
}

inline Family parse_family(std::string_view name) {
  for (const auto& [family, n] : family_names)
    if (n == name) return family;
  throw Error(ErrorKind::validation, "unknown family '" + std::string(name) + "'");
}

/// A catalog state: family tag, its parameters, optional cutoff override.
struct CatalogSpec {
  Family family = Family::fock;
  int p = 1;            // fock, fock-copies
  int n = 1;            // fock-copies
  double alpha = 1.0;   // cat (real, > 0), coherent (real part)
  double alpha_im = 0;  // coherent
  double phi = 0.0;     // cat, bell-*
  double r = 0.0;       // squeezed-vacuum
  double n_t = 0.0;     // thermal
  int d = 1;            // random
  std::uint64_t seed = 0;
  std::optional<int> cutoff;
};

inline void validate(const CatalogSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::validation, msg); };
  switch (spec.family) {
    case Family::fock:
    case Family::fock_copies:
      if (spec.p < 0) fail("p must be a non-negative integer");
      if (spec.family == Family::fock_copies && spec.n < 1) fail("n must be at least 1");
      break;
    case Family::cat:
      if (!(spec.alpha > 0.0)) fail("cat alpha must be positive");
      [[fallthrough]];
    case Family::bell_phi:
    case Family::bell_psi:
      if (!(std::abs(spec.phi) <= std::numbers::pi)) fail("phi must lie in [-pi, pi]");
      break;
    case Family::squeezed_vacuum:
      if (!(spec.r >= 0.0)) fail("r must be non-negative");
      break;
    case Family::coherent:
      if (!std::isfinite(spec.alpha) || !std::isfinite(spec.alpha_im)) fail("alpha must be finite");
      break;
    case Family::thermal:
      if (!(spec.n_t >= 0.0)) fail("n_t must be non-negative");
      break;
    case Family::random:
      if (spec.d < 0 || spec.d > max_random_photon_number) fail("d must lie in [0, 20]");
      break;
  }
  if (spec.cutoff && *spec.cutoff < 1) fail("cutoff must be positive");
}

inline FockState make_state(const CatalogSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case Family::fock: return make_fock(spec.p, spec.cutoff);
    case Family::fock_copies: return make_fock_copies(spec.p, spec.n, spec.cutoff);
    case Family::cat:
      return spec.cutoff ? make_cat(spec.alpha, spec.phi, *spec.cutoff) : make_cat(spec.alpha, spec.phi);
    case Family::bell_phi:
    case Family::bell_psi: {
      const int c = spec.cutoff.value_or(3);
      return make_bell_like(spec.family == Family::bell_phi ? BellKind::phi : BellKind::psi, spec.phi, {c, c});
    }
    case Family::squeezed_vacuum: return make_squeezed_vacuum(spec.r, spec.cutoff);
    case Family::coherent: return make_coherent(cplx(spec.alpha, spec.alpha_im), spec.cutoff);
    case Family::thermal: return make_thermal(spec.n_t, spec.cutoff);
    case Family::random: {
      if (spec.cutoff && *spec.cutoff != spec.d + 1) {
        throw Error(ErrorKind::validation, "random states live on d + 1 levels; cutoff override not supported");
      }
      return random_state(spec.d, spec.seed);
    }
  }
  throw Error(ErrorKind::validation, "unknown family");
}

}  // namespace nongauss
