#pragma once

// Loss channel and inconclusive photon subtraction (IPS).
//
// Loss with transmissivity eta has Kraus operators
//   V_m |n> = sqrt(C(n,m) (1-eta)^m eta^(n-m)) |n-m>.
// IPS mixes the input with vacuum on a beam splitter of transmissivity T and
// keeps the outcome where an on/off detector of efficiency eps clicks on the
// reflected arm. Tracing out the reflected arm, j reflected photons are the
// loss Kraus V_j with eta = T, and they click with probability 1 - (1-eps)^j:
//   rho_click = sum_j (1 - (1-eps)^j) V_j rho V_j^dag.

#include "nongauss/catalog.hpp"
#include "nongauss/fock.hpp"
#include "nongauss/special.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace nongauss {

namespace detail {

inline void require_single_mode(const FockState& rho, const char* what) {
  if (rho.modes() != 1) throw Error(ErrorKind::invalid_dimension, std::string(what) + " acts on one mode");
}

/// sum_m w_m V_m rho V_m^dag with loss Kraus operators V_m (transmissivity eta).
inline cmat weighted_loss_sum(const cmat& rho, double eta, const std::vector<double>& weights) {
  const int d = static_cast<int>(rho.rows());
  // amp(n, m) = sqrt(C(n,m) (1-eta)^m eta^(n-m))
  rmat amp = rmat::Zero(d, d);
  for (int n = 0; n < d; ++n)
    for (int m = 0; m <= n; ++m) amp(n, m) = std::sqrt(binomial_weight(n, m, 1.0 - eta));
  cmat out = cmat::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    if (weights[m] == 0.0) continue;
    for (int j = 0; j + m < d; ++j) {
      const double aj = amp(j + m, m);
      if (aj == 0.0) continue;
      for (int i = 0; i + m < d; ++i) out(i, j) += weights[m] * amp(i + m, m) * aj * rho(i + m, j + m);
    }
  }
  return out;
}

}  // namespace detail

inline FockState loss_apply(const FockState& rho, double eta) {
  detail::require_single_mode(rho, "loss channel");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::domain, "eta must lie in [0, 1]");
  const std::vector<double> ones(rho.shape().cutoff(0), 1.0);
  cmat out = detail::weighted_loss_sum(rho.matrix(), eta, ones);
  out = 0.5 * (out + out.adjoint()).eval();
  const double drift = std::abs(out.trace().real() - rho.trace());
  if (drift > 1e-9) throw Error(ErrorKind::numeric_integrity, "loss channel changed the trace by " + std::to_string(drift));
  return FockState::from_matrix(rho.shape(), std::move(out), rho.flags(), Validation::basic);
}

/// Populations alpha_l = C(p,l) (1-eta)^(p-l) eta^l of the loss output for |p>.
inline std::vector<double> loss_fock_diagonal(int p, double eta) {
  if (p < 0) throw Error(ErrorKind::domain, "photon number must be non-negative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::domain, "eta must lie in [0, 1]");
  std::vector<double> out(p + 1);
  for (int l = 0; l <= p; ++l) out[l] = binomial_weight(p, l, eta);
  return out;
}

inline constexpr double min_click_probability = 1e-12;

struct ConditionalState {
  FockState state;
  double probability = 0.0;
};

/// IPS applied to an arbitrary single-mode input.
inline ConditionalState ips_apply(const FockState& rho, double transmissivity, double efficiency) {
  detail::require_single_mode(rho, "IPS");
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) throw Error(ErrorKind::domain, "T must lie in [0, 1]");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw Error(ErrorKind::domain, "efficiency must lie in (0, 1]");
  const int d = rho.shape().cutoff(0);
  std::vector<double> click(d, 0.0);
  for (int j = 1; j < d; ++j) click[j] = efficiency == 1.0 ? 1.0 : -std::expm1(j * std::log1p(-efficiency));
  cmat out = detail::weighted_loss_sum(rho.matrix(), transmissivity, click);
  const double p = out.trace().real();
  if (!(p > min_click_probability)) {
    throw Error(ErrorKind::conditioning, "click probability " + std::to_string(p) + " is too small to condition on");
  }
  out /= p;
  out = 0.5 * (out + out.adjoint()).eval();
  return {FockState::from_matrix(rho.shape(), std::move(out), rho.flags(), Validation::basic), p};
}

inline int recommended_ips_cutoff(double r) { return std::max(4, recommended_squeezed_cutoff(r)); }

/// IPS output for a squeezed-vacuum input S(r)|0>.
inline ConditionalState ips_state(double r, double transmissivity, double efficiency,
                                  std::optional<int> cutoff = std::nullopt) {
  if (!(r >= 0.0)) throw Error(ErrorKind::domain, "squeezing must be non-negative");
  const FockState input = make_squeezed_vacuum(r, cutoff.value_or(recommended_ips_cutoff(r)));
  return ips_apply(input, transmissivity, efficiency);
}

/// IPS built literally: beam splitter on the two-mode Fock space, on/off
/// POVM on the reflected mode, partial trace. Cost grows as (d1 d2)^3.
inline ConditionalState ips_state_two_mode(double r, double transmissivity, double efficiency, int cutoff_signal,
                                           int cutoff_reflected) {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) throw Error(ErrorKind::domain, "T must lie in [0, 1]");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw Error(ErrorKind::domain, "efficiency must lie in (0, 1]");
  const FockState input = tensor(make_squeezed_vacuum(r, cutoff_signal), fock_state(0, cutoff_reflected));
  const double theta = std::acos(std::sqrt(transmissivity));
  const FockState mixed = two_mode_gate(BeamSplitter{theta}, cutoff_signal, cutoff_reflected).conjugate(input);

  // Pi_on = I - sum_n (1-eps)^n |n><n| on the reflected mode
  const ModeShape& shape = mixed.shape();
  rvec on(shape.dim());
  for (Eigen::Index i = 0; i < shape.dim(); ++i) on(i) = 1.0 - std::pow(1.0 - efficiency, shape.occupation(i)[1]);
  // Tr_2[Pi rho] = Tr_2[sqrt(Pi) rho sqrt(Pi)], which keeps the result Hermitian
  const rvec root = on.cwiseSqrt();
  cmat projected = root.cast<cplx>().asDiagonal() * mixed.matrix() * root.cast<cplx>().asDiagonal();
  const double p = projected.trace().real();
  if (!(p > min_click_probability)) {
    throw Error(ErrorKind::conditioning, "click probability " + std::to_string(p) + " is too small to condition on");
  }
  projected /= p;
  const FockState joint = FockState::from_matrix(shape, std::move(projected), {}, Validation::basic);
  return {partial_trace(joint, {1}), p};
}

enum class ChannelKind { identity, loss, ips };

struct ChannelParams {
  ChannelKind kind = ChannelKind::identity;
  double eta = 1.0;             // loss
  double transmissivity = 1.0;  // ips
  double efficiency = 1.0;      // ips

  static ChannelParams loss(double eta) { return {ChannelKind::loss, eta, 1.0, 1.0}; }
  static ChannelParams ips(double t, double eps) { return {ChannelKind::ips, 1.0, t, eps}; }
};

/// Channel output; IPS outputs are conditioned (normalized).
inline FockState apply_channel(const ChannelParams& ch, const FockState& rho) {
  switch (ch.kind) {
    case ChannelKind::identity: return rho;
    case ChannelKind::loss: return loss_apply(rho, ch.eta);
    case ChannelKind::ips: return ips_apply(rho, ch.transmissivity, ch.efficiency).state;
  }
  throw Error(ErrorKind::domain, "unknown channel");
}

}  // namespace nongauss
