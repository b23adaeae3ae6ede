#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace nongauss;
using nongauss::testing::max_abs;
using nongauss::testing::random_covariance;
using nongauss::testing::random_symplectic;
using nongauss::testing::uniform;

namespace {

constexpr double pi = std::numbers::pi;

/// delta from an explicitly supplied reference state.
double delta_against(const FockState& rho, const FockState& tau) {
  return hs_distance_sq(rho, tau) / purity(rho);
}

/// Psi+ reference built from gates: nu(1) (x) |0>, beam splitter, phase on mode 2.
FockState psi_plus_reference(int d) {
  const auto in = tensor(thermal_state(1.0, d), fock_state(0, d));
  const cmat bs = two_mode_gate(BeamSplitter{pi / 4}, d, d).matrix();
  cmat phase = cmat::Zero(d, d);
  for (int k = 0; k < d; ++k) phase(k, k) = std::polar(1.0, -pi / 2 * k);
  const cmat w = embed_single_mode(in.shape(), 1, phase) * bs;
  cmat out = w * in.matrix() * w.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return FockState::from_matrix(in.shape(), out, {}, Validation::basic);
}

SingleModeParams random_params(RandomStream& rng) {
  return {std::polar(uniform(rng, 0.0, 1.0), uniform(rng, -pi, pi)),
          std::polar(uniform(rng, 0.0, 0.6), uniform(rng, -pi, pi)), uniform(rng, 0.0, 1.0)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Williamson and Euler decompositions

TEST(Williamson, ThermalCovariance) {
  const auto f = williamson(2.5 * rmat::Identity(2, 2));
  EXPECT_NEAR(f.nu(0), 2.5, 1e-14);
  EXPECT_LT(symplectic_residual(f.S), 1e-12);
}

TEST(Williamson, TwoModeSqueezedVacuumIsPure) {
  const rmat s = two_mode_squeeze_symplectic(cplx(0.7, 0.2));
  const auto f = williamson(0.5 * s * s.transpose());
  EXPECT_NEAR(f.nu(0), 0.5, 1e-10);
  EXPECT_NEAR(f.nu(1), 0.5, 1e-10);
}

TEST(Williamson, RecoversRandomSpectra) {
  RandomStream rng(7, "williamson");
  for (int modes : {1, 2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      rvec nu(modes);
      for (int k = 0; k < modes; ++k) nu(k) = 0.5 + uniform(rng, 0.0, 2.0);
      const rmat s = random_symplectic(modes, rng);
      const rmat cov = s * symplectic_diagonal(nu) * s.transpose();
      const auto f = williamson(cov);
      std::sort(nu.data(), nu.data() + modes, std::greater<>());
      EXPECT_LT((f.nu - nu).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT(symplectic_residual(f.S), 1e-9 * std::max(1.0, f.S.squaredNorm()));
      EXPECT_LT(max_abs(f.S * symplectic_diagonal(f.nu) * f.S.transpose() - cov), 1e-9 * cov.norm());
    }
  }
}

TEST(Williamson, ErrorPaths) {
  auto kind_of = [](const rmat& m) {
    try {
      williamson(m);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;  // sentinel: no error
  };
  EXPECT_EQ(kind_of(rmat::Identity(3, 3)), ErrorKind::invalid_dimension);
  rmat asym = rmat::Identity(2, 2);
  asym(0, 1) = 0.3;
  EXPECT_EQ(kind_of(asym), ErrorKind::domain);
  EXPECT_EQ(kind_of(-rmat::Identity(2, 2)), ErrorKind::domain);
  EXPECT_EQ(kind_of(0.3 * rmat::Identity(2, 2)), ErrorKind::domain);
}

TEST(Euler, ReconstructsRandomSymplectics) {
  RandomStream rng(8, "euler");
  for (int modes : {1, 2, 3}) {
    const rmat id = rmat::Identity(2 * modes, 2 * modes);
    for (int trial = 0; trial < 100; ++trial) {
      const rmat s = random_symplectic(modes, rng);
      const auto e = euler_decompose(s);
      EXPECT_LT(max_abs(e.outer * squeeze_diagonal(e.squeeze) * e.inner - s), 1e-9 * s.norm());
      EXPECT_LT(max_abs(e.outer.transpose() * e.outer - id), 1e-9);
      EXPECT_LT(max_abs(e.inner.transpose() * e.inner - id), 1e-8);
      EXPECT_LT(symplectic_residual(e.outer), 1e-9);
      EXPECT_LT(symplectic_residual(e.inner), 1e-8);
      // squeezing parameters are the logs of the largest singular values
      Eigen::JacobiSVD<rmat> svd(s);
      for (int k = 0; k < modes; ++k) EXPECT_NEAR(e.squeeze(k), std::log(svd.singularValues()(k)), 1e-9);
    }
  }
}

TEST(Euler, PassiveMatrixOfBeamSplitter) {
  const auto e = euler_decompose(beam_splitter_symplectic(0.3));
  EXPECT_LT(e.squeeze.cwiseAbs().maxCoeff(), 1e-12);
  const cmat u = passive_matrix(e.outer * e.inner);
  EXPECT_LT(max_abs(u.adjoint() * u - cmat::Identity(2, 2)), 1e-12);
  EXPECT_NEAR(std::abs(u(0, 0)), std::cos(0.3), 1e-12);
}

TEST(Euler, RejectsNonSymplectic) {
  try {
    euler_decompose(2.0 * rmat::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

// ---------------------------------------------------------------------------
// Reference Gaussian

TEST(Reference, FockTwoGivesThermalTwo) {
  const auto ref = reference_gaussian(fock_state(2, 4));
  EXPECT_NEAR(ref.spec.thermal(0), 2.0, 1e-12);
  EXPECT_LT(ref.spec.squeeze.cwiseAbs().maxCoeff(), 1e-12);
  const auto& tau = ref.state;
  const auto nu2 = thermal_state(2.0, tau.shape().cutoff(0));
  EXPECT_LT(max_abs(tau.matrix() - nu2.matrix()), 1e-10);
  EXPECT_NEAR(purity(tau), 0.2, 1e-9);
}

TEST(Reference, PhiBellIsTwoModeSqueezedThermal) {
  const auto rho = make_bell_like(BellKind::phi, 0.4);
  const auto ref = reference_gaussian(rho);
  const auto tms = two_mode_squeezed_thermal_params(ref.spec);
  ASSERT_TRUE(tms.has_value());
  const auto m = moments(ref.state);
  EXPECT_NEAR(m.cov(0, 0), m.cov(2, 2), 1e-9);  // equal local occupations
  EXPECT_NEAR(std::pow(std::sin(0.4), 2), 0.5 * (m.cov(0, 0) + m.cov(1, 1)) - 0.5, 1e-9);
  EXPECT_GT(std::abs(tms->xi), 0.0);
}

TEST(Reference, GaussianRoundTrip) {
  RandomStream rng(3, "round-trip");
  for (int trial = 0; trial < 5; ++trial) {
    const SingleModeParams p = random_params(rng);
    const FockState g = single_mode_gaussian(p, 60);
    const auto ref = reference_gaussian(g, 60);
    EXPECT_LT(max_abs(ref.state.matrix() - g.matrix()), 1e-8);
  }
}

TEST(Reference, TwoModeRoundTrip) {
  RandomStream rng(4, "round-trip-2");
  for (int trial = 0; trial < 3; ++trial) {
    rmat cov = random_covariance(2, rng);
    cov = 0.5 * (cov + cov.transpose()).eval();
    const rvec mean = rvec::Zero(4);
    const GaussianSpec spec = gaussian_spec(mean, cov);
    const auto cut = reference_cutoffs(spec);
    if (std::max(cut[0], cut[1]) >= max_multimode_reference_cutoff) continue;
    const FockState tau = synthesize(spec);
    EXPECT_LT(max_abs(covariance_matrix(tau) - cov), 1e-6);
    EXPECT_NEAR(purity(tau), spec.purity(), 1e-6);
  }
}

TEST(SingleModeParams, RecoversSqueezeAndDisplacement) {
  const cplx zeta = std::polar(0.5, 1.1);
  const cplx alpha(0.3, -0.6);
  const FockState g = single_mode_gaussian({alpha, zeta, 0.4}, 80);
  const auto p = single_mode_params(moments(g));
  EXPECT_NEAR(std::abs(p.alpha - alpha), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(p.zeta - zeta), 0.0, 1e-7);
  EXPECT_NEAR(p.n_t, 0.4, 1e-8);
}

TEST(SingleModeParams, RejectsUnphysicalCovariance) {
  EXPECT_THROW(single_mode_params(rvec::Zero(2), 0.4 * rmat::Identity(2, 2)), Error);
}

// ---------------------------------------------------------------------------
// Measure

TEST(Measure, FockOneValue) {
  const auto r = non_gaussianity(fock_state(1, 3));
  EXPECT_NEAR(r.delta, 5.0 / 12.0, 1e-12);
  EXPECT_NEAR(r.purity_tau, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.overlap, 0.25, 1e-12);
}

TEST(Measure, FockStatesAgainstExplicitThermalReference) {
  for (int p = 1; p <= 10; ++p) {
    const FockState rho = fock_state(p, p + 2);
    const FockState tau = thermal_state(p, thermal_cutoff(p, 1e-14));
    const double oracle = delta_against(rho, tau);
    EXPECT_NEAR(non_gaussianity(rho).delta, oracle, 1e-10) << p;
    EXPECT_NEAR(delta_fock_analytic(p), oracle, 1e-10) << p;
  }
}

TEST(Measure, GaussianStatesHaveZeroDelta) {
  EXPECT_LT(non_gaussianity(make_coherent(cplx(1.0, 0.5))).delta, 1e-10);
  EXPECT_LT(non_gaussianity(make_squeezed_vacuum(0.5)).delta, 1e-10);
  EXPECT_LT(non_gaussianity(make_thermal(0.7)).delta, 1e-8);
}

TEST(Measure, PsiBellAgainstGateBuiltReference) {
  const auto rho = make_bell_like(BellKind::psi, pi / 4);
  const double oracle = delta_against(rho, psi_plus_reference(36));
  const auto r = non_gaussianity(rho);
  EXPECT_NEAR(r.delta, oracle, 1e-8);
  EXPECT_NEAR(r.delta, 5.0 / 12.0, 1e-8);
}

TEST(Measure, AuditedReferenceMatchesAnalyticPurity) {
  NonGaussianityOptions opt;
  opt.audit_reference = true;
  const auto r = non_gaussianity(make_cat(1.0, 0.3), opt);
  EXPECT_GT(r.delta, 0.0);
}

TEST(Measure, HilbertSchmidtDistanceToSelfIsZero) {
  const auto rho = random_state(4, 9);
  EXPECT_NEAR(hs_distance_sq(rho, rho), 0.0, 1e-15);
}

TEST(Measure, NegativeDeltaIsRejected) {
  EXPECT_EQ(assemble_delta(1.0, 1.0, 1.0 + 1e-12).delta, 0.0);
  try {
    assemble_delta(1.0, 1.0, 1.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric_integrity);
  }
}

TEST(Measure, RandomStatesStayBelowHalf) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto r = non_gaussianity(random_state(8, seed));
    EXPECT_GE(r.delta, 0.0);
    EXPECT_LT(r.delta, 0.5 + 1e-6);
    EXPECT_FALSE(r.flags.test(Flag::above_half));
  }
}

TEST(DeltaProduct, MatchesTensorProduct) {
  const auto a = fock_state(1, 3);
  const auto b = make_cat(0.8, 0.2);
  const double direct = non_gaussianity(tensor(a, b)).delta;
  EXPECT_NEAR(delta_product(std::vector<FockState>{a, b}).delta, direct, 1e-10);
}

TEST(DeltaProduct, MultimodeFockClosedForm) {
  const auto f = fock_state(1, 3);
  EXPECT_NEAR(non_gaussianity(tensor(f, f)).delta, delta_fock_multimode(1, 2), 1e-10);
  EXPECT_NEAR(delta_product(std::vector<FockState>(4, fock_state(2, 4))).delta, delta_fock_multimode(2, 4), 1e-10);
}

TEST(DeltaProduct, GaussianFactorLeavesDeltaUnchanged) {
  const auto one = fock_state(1, 3);
  const auto nu3 = make_thermal(3.0);
  const double d = non_gaussianity(one).delta;
  EXPECT_NEAR(delta_product(std::vector<FockState>{one, nu3}).delta, d, 1e-8);
  EXPECT_NEAR(non_gaussianity(tensor(one, nu3)).delta, d, 1e-6);
}

TEST(DeltaProduct, OptimalCopiesIsArgmax) {
  for (int p : {1, 2, 5, 30}) {
    const int n = optimal_copies(p, 10);
    ASSERT_GE(n, 1);
    ASSERT_LE(n, 10);
    for (int k = 1; k <= 10; ++k) EXPECT_GE(delta_fock_multimode(p, n), delta_fock_multimode(p, k));
  }
  EXPECT_THROW(optimal_copies(1, 0), Error);
}

// ---------------------------------------------------------------------------
// Closed forms

TEST(ClosedForm, LossPurityIsTerminatingHypergeometric) {
  // mu = (1-eta)^(2p) sum_k C(p,k)^2 z^k with z = eta^2/(1-eta)^2
  for (int p : {1, 4, 9}) {
    for (double eta : {0.1, 0.3, 0.45}) {
      const double z = eta * eta / ((1 - eta) * (1 - eta));
      double series = 0.0, c = 1.0;
      for (int k = 0; k <= p; ++k) {
        series += c * c * std::pow(z, k);
        c = c * (p - k) / (k + 1);
      }
      const double oracle = std::pow(1 - eta, 2 * p) * series;
      const auto w = loss_fock_diagonal(p, eta);
      double mu = 0.0;
      for (double x : w) mu += x * x;
      EXPECT_NEAR(mu, oracle, 1e-13);
    }
  }
}

TEST(ClosedForm, LossDeltaMatchesNumericChannel) {
  for (int p : {1, 3, 6}) {
    for (double eta : {0.05, 0.3, 0.7, 0.95}) {
      const auto out = loss_apply(fock_state(p, p + 2), eta);
      EXPECT_NEAR(delta_loss_analytic(p, eta), non_gaussianity(out).delta, 1e-10) << p << " " << eta;
    }
  }
}

TEST(ClosedForm, LossEndpoints) {
  EXPECT_NEAR(delta_loss_analytic(3, 1.0), delta_fock_analytic(3), 1e-14);
  EXPECT_NEAR(delta_loss_analytic(3, 0.0), 0.0, 1e-14);
  EXPECT_TRUE(std::isfinite(delta_loss_analytic(1000, 1.0 - 1e-9)));
}

TEST(ClosedForm, DisplacedThermalOverlaps) {
  for (int p : {1, 2, 4}) {
    for (cplx c : {cplx(0.0), cplx(0.4, 0.0), cplx(-0.3, 0.7)}) {
      const auto tau = single_mode_gaussian({c, 0.0, double(p)}, 150);
      EXPECT_NEAR(overlap_fock_displaced_thermal(p, c), overlap(fock_state(p, p + 2), tau), 1e-10);
      const double eta = 0.6;
      const auto lossy = loss_apply(fock_state(p, p + 2), eta);
      const auto tau_l = single_mode_gaussian({c, 0.0, p * eta}, 150);
      EXPECT_NEAR(overlap_loss_displaced_thermal(p, eta, c), overlap(lossy, tau_l), 1e-10);
    }
  }
}

TEST(ClosedForm, DomainErrors) {
  EXPECT_THROW(delta_fock_analytic(-1), Error);
  EXPECT_THROW(delta_loss_analytic(2, 1.5), Error);
}

// ---------------------------------------------------------------------------
// delta_prime

TEST(DeltaPrime, FockStateKeepsZeroMean) {
  const auto r = delta_prime(fock_state(3, 5));
  EXPECT_NEAR(r.delta_prime, r.delta, 1e-9);
  EXPECT_NEAR(r.delta, delta_fock_analytic(3), 1e-10);
  EXPECT_LT(std::abs(r.c), 1e-2);
}

TEST(DeltaPrime, LossOutputAgainstClosedFormGrid) {
  const int p = 2;
  const double eta = 0.5;
  const auto rho = loss_apply(fock_state(p, p + 2), eta);
  const auto r = delta_prime(rho);
  const double mu_rho = purity(rho);
  const double mu_tau = 1.0 / (1.0 + 2.0 * p * eta);
  double grid_min = 1.0;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const cplx c(0.1 * i, 0.1 * j);
      const double k = overlap_loss_displaced_thermal(p, eta, c);
      grid_min = std::min(grid_min, (mu_rho + mu_tau - 2.0 * k) / (2.0 * mu_rho));
    }
  EXPECT_LE(r.delta_prime, grid_min + 1e-9);
  const double at_c = (mu_rho + mu_tau - 2.0 * overlap_loss_displaced_thermal(p, eta, r.c)) / (2.0 * mu_rho);
  EXPECT_NEAR(r.delta_prime, at_c, 1e-9);
}

TEST(DeltaPrime, CatStatesHaveAGap) {
  const auto rho = make_cat(0.5, -0.7);
  const auto r = delta_prime(rho);
  EXPECT_LT(r.delta_prime, r.delta - 0.01);
  // independent evaluation at the reported optimum
  const auto params = single_mode_params(moments(rho));
  const auto tau = single_mode_gaussian({r.c, params.zeta, params.n_t}, 120);
  EXPECT_NEAR(delta_against(rho, tau), r.delta_prime, 1e-8);
  // and no better point on a coarse grid
  for (int i = -8; i <= 8; ++i) {
    const auto t = single_mode_gaussian({cplx(0.1 * i, 0.0), params.zeta, params.n_t}, 120);
    EXPECT_LE(r.delta_prime, delta_against(rho, t) + 1e-9);
  }
}

TEST(DeltaPrime, BudgetExhaustionCarriesBestIterate) {
  DeltaPrimeOptions opt;
  opt.max_evaluations = 5;
  try {
    delta_prime(make_cat(0.5, -0.7), opt);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::convergence);
    EXPECT_EQ(e.best_point().size(), 2u);
    EXPECT_GE(e.best_value(), 0.0);
  }
}

TEST(DeltaPrime, RejectsMultimode) {
  EXPECT_THROW(delta_prime(make_bell_like(BellKind::phi, 0.3)), Error);
}

// ---------------------------------------------------------------------------
// Gaussian states have zero delta; Gaussian unitaries leave delta unchanged

TEST(GaussianInvariance, RandomGaussianStatesHaveZeroDelta) {
  RandomStream rng(11, "zero-delta");
  for (int trial = 0; trial < 50; ++trial) {
    const SingleModeParams p = random_params(rng);
    const auto g = single_mode_gaussian(p, 80);
    EXPECT_LT(non_gaussianity(g).delta, 1e-8) << trial;
  }
}

TEST(GaussianInvariance, RandomTwoModeGaussianStatesHaveZeroDelta) {
  RandomStream rng(12, "zero-delta-2");
  int checked = 0;
  while (checked < 3) {
    rmat cov = random_covariance(2, rng);
    cov = 0.5 * (cov + cov.transpose()).eval();
    const GaussianSpec spec = gaussian_spec(rvec::Zero(4), cov);
    const auto cut = reference_cutoffs(spec);
    if (std::max(cut[0], cut[1]) >= max_multimode_reference_cutoff) continue;
    EXPECT_LT(non_gaussianity(synthesize(spec)).delta, 1e-6);
    ++checked;
  }
}

TEST(GaussianInvariance, NonGaussianStatesArePositive) {
  EXPECT_GT(non_gaussianity(make_cat(1.0, 0.3)).delta, 1e-3);
  EXPECT_GT(non_gaussianity(random_state(3, 4)).delta, 1e-4);
}

TEST(GaussianInvariance, UnitariesPreserveDelta) {
  RandomStream rng(13, "invariance");
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 1 + trial % 4;
    const FockState rho = random_state(d, rng);
    const cplx alpha = std::polar(uniform(rng, 0.0, 1.0), uniform(rng, -pi, pi));
    const cplx zeta = std::polar(uniform(rng, 0.0, 0.5), uniform(rng, -pi, pi));
    const double phi = uniform(rng, -pi, pi);
    const FockState out = apply_gaussian_unitary(rho, alpha, zeta, phi, 120);
    ASSERT_GT(out.trace(), 1.0 - 1e-9);
    EXPECT_NEAR(non_gaussianity(out).delta, non_gaussianity(rho).delta, 1e-7) << trial;
  }
}

// ---------------------------------------------------------------------------
// Channel non-Gaussianity

TEST(MapMeasure, GaussianChannelsGiveZero) {
  SearchBox box;
  box.grid = 3;
  box.refine_rounds = 2;
  EXPECT_LT(map_non_gaussianity(ChannelParams{}, box).delta, 1e-8);
  EXPECT_LT(map_non_gaussianity(ChannelParams::loss(0.6), box).delta, 1e-8);
}

TEST(MapMeasure, IpsIsPositiveAndDominatesGridPoints) {
  SearchBox box;
  box.r_min = 0.1;
  box.grid = 3;
  box.refine_rounds = 3;
  const auto ch = ChannelParams::ips(0.9, 0.9);
  const auto res = map_non_gaussianity(ch, box);
  EXPECT_TRUE(res.flags.test(Flag::lower_bound));
  EXPECT_GT(res.delta, 0.1);
  EXPECT_GE(res.delta, channel_output_delta(ch, 0.0, 0.55, 0.0).value());
  EXPECT_NEAR(channel_output_delta(ch, res.alpha, res.r, res.n_t).value(), res.delta, 1e-12);
}

TEST(MapMeasure, ParallelSearchIsDeterministic) {
  SearchBox box;
  box.r_min = 0.1;
  box.grid = 3;
  box.refine_rounds = 2;
  const auto ch = ChannelParams::ips(0.8, 0.5);
  const auto a = map_non_gaussianity(ch, box, 1);
  const auto b = map_non_gaussianity(ch, box, 3);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.n_t, b.n_t);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(MapMeasure, InvalidBoxIsRejected) {
  SearchBox box;
  box.r_min = 2.0;
  EXPECT_THROW(map_non_gaussianity(ChannelParams{}, box), Error);
}
