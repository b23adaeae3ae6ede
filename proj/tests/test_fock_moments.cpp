#include "test_util.hpp"

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <gtest/gtest.h>

#include <numbers>

using namespace nongauss;
using nongauss::testing::max_abs;

namespace {

constexpr double pi = std::numbers::pi;

/// <m|D(alpha)|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2), m >= n.
cplx displacement_oracle(cplx alpha, int m, int n) {
  const double x = std::norm(alpha);
  if (m >= n) {
    const double pref = std::sqrt(boost::math::factorial<double>(n) / boost::math::factorial<double>(m));
    return pref * std::pow(alpha, m - n) * std::exp(-x / 2) * boost::math::laguerre(n, m - n, x);
  }
  return std::pow(-1.0, n - m) * std::conj(displacement_oracle(alpha, n, m));
}

cmat phase_rotation(const ModeShape& shape, int mode, double phi) {
  const int d = shape.cutoff(mode);
  cmat r = cmat::Zero(d, d);
  for (int k = 0; k < d; ++k) r(k, k) = std::polar(1.0, phi * k);
  return embed_single_mode(shape, mode, r);
}

}  // namespace

// ---------------------------------------------------------------------------
// Shapes and states

TEST(ModeShape, RowMajorIndexWithLastModeFastest) {
  const ModeShape s({3, 4});
  EXPECT_EQ(s.dim(), 12);
  EXPECT_EQ(s.index(std::vector<int>{0, 1}), 1);
  EXPECT_EQ(s.index(std::vector<int>{1, 0}), 4);
  EXPECT_EQ(s.index(std::vector<int>{2, 3}), 11);
  EXPECT_EQ(s.occupation(7), (std::vector<int>{1, 3}));
  EXPECT_EQ(s.stride(0), 4);
  EXPECT_THROW(ModeShape(std::vector<int>{}), Error);
}

TEST(FockState, RejectsNonHermitianMatrix) {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 0.1;
  try {
    FockState::from_matrix(ModeShape::single(2), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
}

TEST(FockState, RejectsTraceDeficitAboveBudget) {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = 0.9;
  EXPECT_THROW(FockState::from_matrix(ModeShape::single(2), m), Error);
}

TEST(FockState, RejectsNegativeEigenvalue) {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  EXPECT_THROW(FockState::from_matrix(ModeShape::single(2), m), Error);
}

TEST(FockState, SmallDeficitIsFlaggedNotRenormalized) {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = 1.0 - 1e-7;
  const auto s = FockState::from_matrix(ModeShape::single(2), m);
  EXPECT_TRUE(s.flags().test(Flag::trace_deficit));
  EXPECT_NEAR(s.trace(), 1.0 - 1e-7, 1e-15);
}

// ---------------------------------------------------------------------------
// ladder

TEST(Ladder, EntriesForCutoffThree) {
  const cmat a = ladder(3).matrix();
  cmat expected = cmat::Zero(3, 3);
  expected(0, 1) = 1.0;
  expected(1, 2) = std::sqrt(2.0);
  EXPECT_LT(max_abs(a - expected), 1e-15);
}

TEST(Ladder, CommutatorIsIdentityAwayFromTopLevel) {
  const cmat a = ladder(50).matrix();
  const cmat c = a * a.adjoint() - a.adjoint() * a;
  EXPECT_LT(max_abs(c.topLeftCorner(49, 49) - cmat::Identity(49, 49)), 1e-12);
}

TEST(Ladder, AnnihilatesVacuum) {
  cvec vac = cvec::Zero(10);
  vac(0) = 1.0;
  EXPECT_LT((ladder(10).matrix() * vac).norm(), 1e-15);
}

TEST(Ladder, RejectsSmallCutoff) {
  try {
    ladder(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_dimension);
  }
}

// ---------------------------------------------------------------------------
// displacement

TEST(Displacement, VacuumAmplitude) {
  // coherent-state series: <0|alpha> = exp(-|alpha|^2 / 2)
  const cmat d = displacement(1.0, 40).matrix();
  EXPECT_NEAR(std::abs(d(0, 0)), std::exp(-0.5), 1e-9);
  EXPECT_NEAR(std::exp(-0.5), 0.606531, 1e-6);
}

TEST(Displacement, ZeroIsIdentity) {
  EXPECT_LT(max_abs(displacement(0.0, 20).matrix() - cmat::Identity(20, 20)), 1e-14);
}

TEST(Displacement, InverseDisplacement) {
  const cplx alpha(0.7, 0.2);
  const cmat p = displacement(alpha, 40).matrix() * displacement(-alpha, 40).matrix();
  EXPECT_LT(max_abs(p.topLeftCorner(36, 36) - cmat::Identity(36, 36)), 1e-8);
}

TEST(Displacement, FirstColumnIsCoherentState) {
  const cplx alpha(0.3, -0.9);
  const cmat d = displacement(alpha, 40).matrix();
  EXPECT_LT((d.col(0) - coherent_amplitudes(alpha, 40)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Displacement, UnitaryAwayFromBoundary) {
  const cmat d = displacement(cplx(1.0, 0.5), 50).matrix();
  const cmat g = d.adjoint() * d;
  EXPECT_LT(max_abs(g.topLeftCorner(45, 45) - cmat::Identity(45, 45)), 1e-8);
}

TEST(Displacement, GuardViolationIsFlagged) {
  EXPECT_TRUE(displacement(3.0, 20).flags().test(Flag::truncation_guard));
  EXPECT_FALSE(displacement(1.0, 40).flags().test(Flag::truncation_guard));
}

TEST(Displacement, ClosedFormMatchesAssociatedLaguerreOracle) {
  for (cplx alpha : {cplx(0.5, 0.0), cplx(-1.3, 0.8), cplx(0.0, 2.5)}) {
    const cmat d = displacement_elements(alpha, 35, 35);
    double err = 0.0;
    for (int m = 0; m < 35; ++m)
      for (int n = 0; n < 35; ++n) err = std::max(err, std::abs(d(m, n) - displacement_oracle(alpha, m, n)));
    EXPECT_LT(err, 1e-12) << alpha;
  }
}

TEST(Displacement, ClosedFormMatchesMatrixExponential) {
  const cplx alpha(0.9, -0.4);
  const cmat e = displacement(alpha, 80).matrix();
  const cmat c = displacement_closed_form(alpha, 80).matrix();
  EXPECT_LT(max_abs(e.topLeftCorner(40, 40) - c.topLeftCorner(40, 40)), 1e-10);
}

TEST(Displacement, LargeAmplitudeElementsStayUnitary) {
  const cmat d = displacement_elements(cplx(4.0, 3.0), 400, 100);
  EXPECT_LT(max_abs(d.adjoint() * d - cmat::Identity(100, 100)), 1e-10);
}

// ---------------------------------------------------------------------------
// squeeze

TEST(Squeeze, ZeroIsIdentity) {
  EXPECT_LT(max_abs(squeeze(0.0, 20).matrix() - cmat::Identity(20, 20)), 1e-14);
}

TEST(Squeeze, VacuumPopulationIsSech) {
  // squeezed-vacuum normalization: |<0|S(r)|0>|^2 = sech r
  const cmat s = squeeze(0.5, 60).matrix();
  EXPECT_NEAR(std::norm(s(0, 0)), 1.0 / std::cosh(0.5), 1e-9);
  EXPECT_NEAR(1.0 / std::cosh(0.5), 0.886819, 1e-6);
}

TEST(Squeeze, OddAmplitudesVanish) {
  const cmat s = squeeze(cplx(0.4, 0.3), 60).matrix();
  for (int n = 1; n < 60; n += 2) EXPECT_EQ(std::abs(s(n, 0)), 0.0);
}

TEST(Squeeze, VacuumAmplitudesFollowGeneratorSign) {
  // exp(r/2 (a^dag^2 - a^2))|0> has amplitudes sqrt(sech r) tanh(r)^n sqrt((2n)!)/(2^n n!)
  const double r = 0.6;
  const cmat s = squeeze(r, 80).matrix();
  for (int n = 0; n < 12; ++n) {
    const double c = std::sqrt(1.0 / std::cosh(r)) * std::pow(std::tanh(r), n) *
                     std::sqrt(boost::math::factorial<double>(2 * n)) /
                     (std::pow(2.0, n) * boost::math::factorial<double>(n));
    EXPECT_NEAR(s(2 * n, 0).real(), c, 1e-10) << n;
  }
}

TEST(Squeeze, ClosedFormMatchesMatrixExponential) {
  for (cplx z : {cplx(0.8, 0.0), std::polar(0.9, 0.7), std::polar(1.2, -2.0)}) {
    const cmat e = squeeze(z, 400).matrix();
    const cmat c = squeeze_elements(z, 80, 80);
    EXPECT_LT(max_abs(e.topLeftCorner(80, 80) - c), 1e-11) << z;
  }
}

TEST(Squeeze, ClosedFormStaysUnitaryAtLargeIndex) {
  const cmat s = squeeze_elements(2.0, 6000, 60);
  EXPECT_LT(max_abs(s.adjoint() * s - cmat::Identity(60, 60)), 1e-10);
  const cmat t = squeeze_elements(cplx(0.0, 0.5), 300, 3000);
  EXPECT_LT(max_abs(t * t.adjoint() - cmat::Identity(300, 300)), 1e-10);
}

TEST(Squeeze, GuardViolationIsFlagged) {
  EXPECT_TRUE(squeeze(1.0, 20).flags().test(Flag::truncation_guard));
  EXPECT_FALSE(squeeze(0.2, 20).flags().test(Flag::truncation_guard));
}

// ---------------------------------------------------------------------------
// two-mode gates

TEST(TwoModeGate, ZeroAngleBeamSplitterIsIdentity) {
  EXPECT_LT(max_abs(two_mode_gate(BeamSplitter{0.0}, 4, 4).matrix() - cmat::Identity(16, 16)), 1e-14);
}

TEST(TwoModeGate, BeamSplitterSingleExcitation) {
  // single-excitation block: exp(i theta sigma_x) |1,0> = cos|1,0> + i sin|0,1>
  const double theta = pi / 4;
  const auto u = two_mode_gate(BeamSplitter{theta}, 4, 4);
  const ModeShape& s = u.shape();
  cvec in = cvec::Zero(16);
  in(s.index(std::vector<int>{1, 0})) = 1.0;
  const cvec out = u.apply(in);
  cvec expected = cvec::Zero(16);
  expected(s.index(std::vector<int>{1, 0})) = std::cos(theta);
  expected(s.index(std::vector<int>{0, 1})) = cplx(0.0, std::sin(theta));
  EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TwoModeGate, TwoModeSqueezerCreatesPairs) {
  const auto u = two_mode_gate(TwoModeSqueeze{cplx(0.3, 0.1)}, 12, 12);
  const ModeShape& s = u.shape();
  const cvec out = u.matrix().col(0);
  double off = 0.0, on = 0.0;
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    const auto occ = s.occupation(i);
    (occ[0] == occ[1] ? on : off) += std::norm(out(i));
  }
  EXPECT_EQ(off, 0.0);
  EXPECT_NEAR(on, 1.0, 1e-8);
}

TEST(TwoModeGate, UnitaryBuildersPreservePurity) {
  const FockState rho = random_state(3, 11);
  const FockState wide = FockState::from_matrix(ModeShape::single(40),
                                                resize_matrix(rho.shape(), rho.matrix(), ModeShape::single(40)));
  const FockState out = squeeze(cplx(0.2, 0.1), 40).conjugate(displacement(cplx(0.3, 0.2), 40).conjugate(wide));
  EXPECT_NEAR(purity(out), purity(rho), 1e-8);
}

// ---------------------------------------------------------------------------
// thermal states

TEST(Thermal, ZeroOccupationIsVacuum) {
  const auto t = thermal_state(0.0, 5);
  cmat expected = cmat::Zero(5, 5);
  expected(0, 0) = 1.0;
  EXPECT_LT(max_abs(t.matrix() - expected), 1e-15);
}

TEST(Thermal, PurityOfUnitOccupation) {
  EXPECT_NEAR(purity(thermal_state(1.0, 80)), 1.0 / 3.0, 1e-8);
}

TEST(Thermal, GeometricDiagonal) {
  const auto t = thermal_state(2.0, 40);
  for (int k = 0; k < 30; ++k) EXPECT_NEAR(t.matrix()(k, k).real(), std::pow(2.0 / 3.0, k) / 3.0, 1e-12);
}

TEST(Thermal, NegativeOccupationIsDomainError) {
  try {
    thermal_state(-0.1, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(Thermal, CutoffMeetsTailBudget) {
  for (double n : {0.3, 1.0, 4.0}) {
    const int d = thermal_cutoff(n);
    EXPECT_LE(std::pow(n / (1 + n), d), tol::tail_budget);
    EXPECT_GT(std::pow(n / (1 + n), d - 1), tol::tail_budget);
  }
}

// ---------------------------------------------------------------------------
// algebra

TEST(Algebra, PurityOfFockState) { EXPECT_NEAR(purity(fock_state(4, 7)), 1.0, 1e-15); }

TEST(Algebra, OverlapFockOneWithThermalOne) {
  EXPECT_NEAR(overlap(fock_state(1, 3), thermal_state(1.0, 60)), 0.25, 1e-12);
}

TEST(Algebra, PartialTraceOfPsiPlus) {
  cvec ket = cvec::Zero(4);
  const ModeShape s({2, 2});
  ket(s.index(std::vector<int>{0, 1})) = 1.0 / std::sqrt(2.0);
  ket(s.index(std::vector<int>{1, 0})) = 1.0 / std::sqrt(2.0);
  const auto rho = FockState::from_ket(s, ket);
  const auto red = partial_trace(rho, {1});
  EXPECT_LT(max_abs(red.matrix() - 0.5 * cmat::Identity(2, 2)), 1e-15);
}

TEST(Algebra, OverlapWithSelfIsPurity) {
  const auto rho = random_state(5, 3);
  EXPECT_EQ(overlap(rho, rho), purity(rho));
}

TEST(Algebra, TensorThenTraceRecoversFirstFactor) {
  const auto a = random_state(3, 1);
  const auto b = random_state(2, 2);
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.shape(), ModeShape({4, 3}));
  EXPECT_LT(max_abs(partial_trace(ab, {1}).matrix() - a.matrix()), 1e-10);
  EXPECT_LT(max_abs(partial_trace(ab, {0}).matrix() - b.matrix()), 1e-10);
}

TEST(Algebra, OverlapAcrossCutoffsPadsWithZeros) {
  EXPECT_NEAR(overlap(fock_state(2, 3), fock_state(2, 10)), 1.0, 1e-15);
}

TEST(Algebra, ShapeMismatchIsAnError) {
  try {
    overlap(fock_state(1, 3), make_bell_like(BellKind::phi, 0.3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape_mismatch);
  }
}

TEST(Algebra, ImaginaryResidueIsNumericIntegrityError) {
  try {
    detail::checked_real(cplx(1.0, 1e-6), "test");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric_integrity);
  }
}

TEST(Algebra, HilbertSchmidtNorm) {
  EXPECT_NEAR(hs_norm(thermal_state(1.0, 80)), std::sqrt(1.0 / 3.0), 1e-8);
}

// ---------------------------------------------------------------------------
// moments

TEST(Moments, Vacuum) {
  const Moments m = moments(fock_state(0, 4));
  EXPECT_LT(m.mean.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(max_abs(m.cov - 0.5 * rmat::Identity(2, 2)), 1e-15);
}

TEST(Moments, CoherentMean) {
  const cplx alpha(1.0, 0.5);
  const rvec x = mean_vector(make_coherent(alpha));
  EXPECT_NEAR(x(0), std::sqrt(2.0) * 1.0, 1e-8);
  EXPECT_NEAR(x(1), std::sqrt(2.0) * 0.5, 1e-8);
}

TEST(Moments, FockStates) {
  for (int p : {1, 3, 6}) {
    const Moments m = moments(fock_state(p, p + 2));
    EXPECT_LT(m.mean.cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(max_abs(m.cov - (p + 0.5) * rmat::Identity(2, 2)), 1e-14);
  }
}

TEST(Moments, SymplecticFormProperties) {
  const rmat o = symplectic_form(3);
  EXPECT_LT(max_abs(o * o + rmat::Identity(6, 6)), 1e-15);
  EXPECT_LT(max_abs(o.transpose() * o - rmat::Identity(6, 6)), 1e-15);
}

TEST(Moments, PsiPlusMatchesMixedThermalReference) {
  // Psi+ has <a_j^dag a_k> = 1/2 for all j, k: one thermal photon in
  // (a1 + a2)/sqrt(2). Built as nu(1) (x) |0> through R(pi/4) and a -pi/2
  // phase on mode 2; both sides computed in the truncated space.
  const auto psi = make_bell_like(BellKind::psi, pi / 4, {3, 3});
  const int d = 36;
  const auto in = tensor(thermal_state(1.0, d), fock_state(0, d));
  const auto bs = two_mode_gate(BeamSplitter{pi / 4}, d, d);
  const cmat w = phase_rotation(in.shape(), 1, -pi / 2) * bs.matrix();
  cmat out = w * in.matrix() * w.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  const auto tau = FockState::from_matrix(in.shape(), out, {}, Validation::basic);
  const Moments a = moments(psi), b = moments(tau);
  EXPECT_LT(max_abs(a.cov - b.cov), 1e-8);
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-8);

  // Same covariance from the symplectic images of the two gates.
  rmat rot2 = rmat::Identity(4, 4);
  rot2.block(2, 2, 2, 2) = rotation_symplectic(-pi / 2);
  const rmat s = rot2 * beam_splitter_symplectic(pi / 4);
  rvec nu(2);
  nu << 1.5, 0.5;
  EXPECT_LT(max_abs(a.cov - s * symplectic_diagonal(nu) * s.transpose()), 1e-12);
}

TEST(Moments, CovarianceTransformsSymplectically) {
  const auto rho = random_state(3, 7);
  const int d = 60;
  const FockState wide =
      FockState::from_matrix(ModeShape::single(d), resize_matrix(rho.shape(), rho.matrix(), ModeShape::single(d)));
  const rmat sigma = covariance_matrix(rho);

  const cplx z = std::polar(0.3, 0.8);
  const FockState sq = squeeze(z, d).conjugate(wide);
  const rmat ss = squeeze_symplectic(z);
  EXPECT_LT(max_abs(covariance_matrix(sq) - ss * sigma * ss.transpose()), 1e-7);

  const FockState disp = displacement(cplx(0.4, -0.3), d).conjugate(wide);
  EXPECT_LT(max_abs(covariance_matrix(disp) - sigma), 1e-7);
  rvec shift(2);
  shift << std::sqrt(2.0) * 0.4, std::sqrt(2.0) * -0.3;
  EXPECT_LT((mean_vector(disp) - mean_vector(rho) - shift).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Moments, BeamSplitterTransformsSymplectically) {
  const auto rho = tensor(random_state(2, 21), random_state(2, 22));
  const int d = 6;  // photon number is conserved, so 4 total photons fit in 6 levels
  const ModeShape wide({d, d});
  const FockState big = FockState::from_matrix(wide, resize_matrix(rho.shape(), rho.matrix(), wide));
  const FockState out = two_mode_gate(BeamSplitter{0.4}, d, d).conjugate(big);
  const rmat s = beam_splitter_symplectic(0.4);
  EXPECT_LT(max_abs(covariance_matrix(out) - s * covariance_matrix(rho) * s.transpose()), 1e-10);
}

TEST(Moments, UncertaintyPrincipleHolds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_GE(symplectic_eigenvalues(covariance_matrix(random_state(6, seed))).minCoeff(), 0.5 - 1e-8);
  }
  EXPECT_GE(symplectic_eigenvalues(covariance_matrix(make_bell_like(BellKind::phi, 0.4))).minCoeff(), 0.5 - 1e-8);
}

TEST(Moments, TopLevelPopulationIsFlagged) {
  EXPECT_TRUE(moments(fock_state(3, 4)).flags.test(Flag::boundary_population));
  EXPECT_FALSE(moments(fock_state(3, 5)).flags.test(Flag::boundary_population));
}
