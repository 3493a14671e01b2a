#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "keller/groundstate.hpp"
#include "keller/random.hpp"
#include "keller/spectral.hpp"
#include "oracles.hpp"

using namespace keller;
using namespace keller::groundstate;

namespace {

const GroundState &line_quartic() {
  static const GroundState gs = solve_ground_state(4.0, 1, Grid::radial(1, 40.0, 8000));
  return gs;
}

const GroundState &cubic_3d() {
  static const GroundState gs = solve_ground_state(4.0, 3, Grid::radial(3, 1500.0, 15000));
  return gs;
}

} // namespace

TEST(Exponents, FromGamma) {
  const Exponents a = exponents_from_gamma(1.5, 1);
  EXPECT_DOUBLE_EQ(a.p, 2.0);
  EXPECT_DOUBLE_EQ(a.q, 4.0);
  EXPECT_DOUBLE_EQ(a.theta, 0.25);
  const Exponents b = exponents_from_gamma(1.0, 2);
  EXPECT_DOUBLE_EQ(b.p, 2.0);
  EXPECT_DOUBLE_EQ(b.q, 4.0);
  EXPECT_DOUBLE_EQ(b.theta, 0.5);
  const Exponents c = exponents_from_gamma(1.0, 3);
  EXPECT_DOUBLE_EQ(c.p, 2.5);
  EXPECT_NEAR(c.q, 10.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.theta, 0.6, 1e-15);
}

TEST(Exponents, FromQRoundTrips) {
  for (int d : {1, 2, 3})
    for (double gamma : {0.75, 1.0, 1.5, 2.5}) {
      const Exponents e = exponents_from_gamma(gamma, d);
      const Exponents f = exponents_from_q(e.q, d);
      EXPECT_NEAR(f.gamma, gamma, 1e-12);
      EXPECT_NEAR(f.theta, e.theta, 1e-12);
    }
}

TEST(Exponents, OutOfRange) {
  EXPECT_THROW(exponents_from_gamma(0.5, 1), InvalidExponentError);
  EXPECT_THROW(exponents_from_gamma(0.0, 3), InvalidExponentError);
  EXPECT_THROW(exponents_from_q(2.0, 1), InvalidExponentError);
  EXPECT_THROW(exponents_from_q(6.0, 3), InvalidExponentError);
  EXPECT_THROW(exponents_from_q(4.0, 0), InvalidExponentError);
}

TEST(KellerProfile, MatchesSechAnsatz) {
  EXPECT_NEAR(keller_profile(4.0, 0.0), oracle::sech_amplitude(), 1e-14);
  EXPECT_NEAR(keller_profile(4.0, 0.0), 0.53496, 1e-5);
  for (double x : {0.3, 1.0, 4.0})
    EXPECT_NEAR(keller_profile(4.0, x), oracle::sech_profile(x), 1e-14);
  const KellerParameters k = keller_parameters(4.0);
  EXPECT_NEAR(k.E, oracle::sech_energy(), 1e-14);
  EXPECT_NEAR(k.norm_q, oracle::sech_norm4(), 1e-14);
  EXPECT_THROW(keller_profile(2.0, 0.0), InvalidExponentError);
}

TEST(KellerProfile, SolvesTheEquationForOtherExponents) {
  // Residual of -Q'' - ||Q||_q^{2-q} Q^{q-1} - E Q by fine central
  // differences, and unit mass by Simpson.
  for (double q : {3.0, 5.0, 6.0}) {
    const KellerParameters k = keller_parameters(q);
    auto Q = [q](double x) { return keller_profile(q, x); };
    const double mass = oracle::simpson([&](double x) { return Q(x) * Q(x); }, -40, 40, 20000);
    EXPECT_NEAR(mass, 1.0, 1e-9) << q;
    const double nq = std::pow(oracle::simpson([&](double x) { return std::pow(Q(x), q); }, -40, 40, 20000), 1 / q);
    EXPECT_NEAR(nq, k.norm_q, 1e-9) << q;
    const double h = 1e-3;
    for (double x : {0.0, 0.7, 2.0}) {
      const double d2 = (Q(x + h) - 2 * Q(x) + Q(x - h)) / (h * h);
      const double r = -d2 - std::pow(nq, 2 - q) * std::pow(Q(x), q - 1) - k.E * Q(x);
      EXPECT_NEAR(r, 0.0, 1e-6) << q << " " << x;
    }
  }
}

TEST(SolveGroundState, LineQuarticMatchesSechOracle) {
  const GroundState &gs = line_quartic();
  EXPECT_NEAR(gs.E, oracle::sech_energy(), 1e-5 * std::abs(oracle::sech_energy()));
  EXPECT_NEAR(gs.norm_q, oracle::sech_norm4(), 1e-6);
  double worst = 0.0;
  for (std::size_t i = 0; i < gs.Q.size(); ++i)
    worst = std::max(worst, std::abs(gs.Q[i] - oracle::sech_profile(gs.grid()->coord(i))));
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(l2_norm(gs.Q), 1.0, 1e-12);
  EXPECT_FALSE(gs.domain_warning);
  EXPECT_EQ(gs.coupling, 1.0);
}

TEST(SolveGroundState, EnergyOfGroundStateIsMinusCPrime) {
  const GroundState &gs = line_quartic();
  EXPECT_NEAR(gns_energy(gs.Q, 4.0), -gs.C_prime, 1e-8);
  EXPECT_NEAR(gs.C_prime, -gs.E, 1e-15);
}

TEST(SolveGroundState, QuotientAtGroundStateIsSharpConstant) {
  const GroundState &gs = line_quartic();
  EXPECT_NEAR(gns_quotient(gs.Q, gs.q, gs.d), gs.S, 1e-8 * gs.S);
  EXPECT_NEAR(c_prime_from_gns(gs.S, gs.theta()), gs.C_prime, 1e-12);
}

TEST(SolveGroundState, ProfileIsPositiveAndDecreasing) {
  for (const GroundState *gs : {&line_quartic(), &cubic_3d()}) {
    for (std::size_t i = 1; i < gs->Q.size(); ++i) {
      ASSERT_GT(gs->Q[i - 1], 0.0);
      ASSERT_LE(gs->Q[i], gs->Q[i - 1]);
    }
    EXPECT_LE(gs->el_residual, 1e-8);
  }
}

TEST(SolveGroundState, CubicThreeDimensionsMatchesShooting) {
  // Q(x) = alpha R(x / P) with -Lap R + R = R^3 gives E = -1/P^2.
  const oracle::Shooting s = oracle::shoot_cubic_3d();
  EXPECT_NEAR(s.R0, 4.3374, 1e-3);
  const GroundState &gs = cubic_3d();
  const double E = -1.0 / (s.P * s.P);
  EXPECT_LT(gs.E, 0.0);
  EXPECT_NEAR(gs.E, E, 1e-4 * std::abs(E));
  // Shape: Q(r)/Q(0) against R(r/P)/R(0).
  for (double r : {0.5 * s.P, 2.0 * s.P, 4.0 * s.P}) {
    const double ref = s.R[std::size_t(std::lround(r / s.P / s.dr))] / s.R0;
    const double got = gs.grid()->interpolate(gs.Q.values(), r) / gs.grid()->interpolate(gs.Q.values(), 0.0);
    EXPECT_NEAR(got, ref, 2e-4) << r;
  }
}

TEST(GnsEnergy, SechTrialFunction) {
  // psi = sech / sqrt(2): int psi'^2 = 1/3, ||psi||_4^2 = (1/4 * 4/3)^{1/2}.
  auto g = Grid::radial(1, 30.0, 6000);
  auto psi = GridFunction::sample(g, [](double x) { return 1.0 / (std::sqrt(2.0) * std::cosh(x)); });
  EXPECT_NEAR(l2_norm(psi), 1.0, 1e-10);
  EXPECT_NEAR(gns_energy(psi, 4.0), 1.0 / 3.0 - 1.0 / std::sqrt(3.0), 1e-6);
  EXPECT_THROW(gns_energy(GridFunction::zeros(g), 4.0), DegenerateInputError);
}

TEST(GnsEnergy, SpreadBumpStaysAboveMinimum) {
  const GroundState &gs = line_quartic();
  for (double w : {2.0, 5.0, 10.0}) {
    auto psi = GridFunction::sample(gs.grid(), [w](double x) { return std::exp(-x * x / (2 * w * w)); });
    psi = psi * (1.0 / l2_norm(psi));
    const double e = gns_energy(psi, 4.0);
    EXPECT_GE(e, -gs.C_prime) << w;
    // Unit Gaussian of width w: 1/(2 w^2) - (2 pi)^{-1/4} w^{-1/2}, tending to 0 as w grows.
    EXPECT_NEAR(e, 0.5 / (w * w) - std::pow(2 * std::numbers::pi, -0.25) / std::sqrt(w), 1e-5) << w;
  }
}

TEST(GnsInequality, RandomProfilesRespectTheSharpConstants) {
  const GroundState &gs = line_quartic();
  random::Rng rng(17);
  for (int k = 0; k < 40; ++k) {
    auto psi = random::smooth_field(rng, gs.grid(), 0.3 + 0.2 * (k % 10));
    psi = psi + GridFunction::sample(gs.grid(), [](double x) { return std::exp(-x * x); }) * 0.1 * (k % 3);
    if (l2_norm(psi) == 0.0)
      continue;
    psi = psi * (1.0 / l2_norm(psi));
    EXPECT_GE(gns_energy(psi, 4.0), -gs.C_prime - 1e-10) << k;
    EXPECT_GE(gns_quotient(psi, 4.0, 1), gs.S * (1.0 - 1e-10)) << k;
  }
}

TEST(GnsQuotient, ScaleAndDilationInvariant) {
  auto g = Grid::radial(3, 40.0, 4000);
  auto a = GridFunction::sample(g, [](double r) { return std::exp(-r * r / 4.0); });
  auto b = GridFunction::sample(g, [](double r) { return 7.0 * std::exp(-r * r); });
  EXPECT_NEAR(gns_quotient(a, 10.0 / 3.0, 3), gns_quotient(b, 10.0 / 3.0, 3), 1e-4);
}

TEST(OptimalPotential, SechScaleGivesPoschlTeller) {
  const GroundState &gs = line_quartic();
  auto line = Grid::line(20.0, 4000);
  const double k = oracle::sech_k();
  const GridFunction W = optimal_potential(gs, line, 1.0 / k, 1.5);
  for (std::size_t i = 0; i < line->size(); i += 97) {
    const double c = std::cosh(line->coord(i) - 1.5);
    ASSERT_NEAR(W[i], -2.0 / (c * c), 2e-5) << i;
  }
  EXPECT_NEAR(spectral::lowest_eigenpair(W).lambda, -1.0, 1e-5);
}

TEST(OptimalPotential, UnitScaleHasGroundEnergyE) {
  const GroundState &gs = line_quartic();
  const GridFunction W = optimal_potential(gs, gs.grid(), 1.0);
  EXPECT_NEAR(spectral::lowest_eigenpair(W).lambda, gs.E, 1e-9);
  EXPECT_THROW(optimal_potential(gs, gs.grid(), 1.0, 0.5), UnsupportedShiftError);
  EXPECT_THROW(optimal_potential(gs, gs.grid(), 0.0), PreconditionError);
}

TEST(KellerConstant, LineBothRoutes) {
  const KellerConstant c = keller_constant(1.5, 1, line_quartic());
  EXPECT_NEAR(c.via_energy, oracle::keller_c_line(), 1e-5 * oracle::keller_c_line());
  EXPECT_NEAR(c.via_potential, oracle::keller_c_line(), 1e-5 * oracle::keller_c_line());
  EXPECT_LT(c.mismatch, 1e-6);
  EXPECT_THROW(keller_constant(1.0, 1, line_quartic()), InvalidExponentError);
}

TEST(KellerConstant, ThreeDimensionsStableUnderRefinement) {
  const double q = exponents_from_gamma(1.0, 3).q;
  const GroundState a = solve_ground_state(q, 3, Grid::radial(3, 300.0, 10000));
  const GroundState b = solve_ground_state(q, 3, Grid::radial(3, 300.0, 20000));
  const KellerConstant ca = keller_constant(1.0, 3, a);
  const KellerConstant cb = keller_constant(1.0, 3, b);
  EXPECT_GT(cb.via_energy, 0.0);
  EXPECT_LT(cb.mismatch, 1e-6);
  EXPECT_NEAR(ca.via_energy, cb.via_energy, 1e-4 * cb.via_energy);
}

TEST(Virial, NormFromEnergy) {
  const VirialCheck v = virial_norm_check(line_quartic());
  EXPECT_NEAR(v.norm_q, 0.66090, 1e-5);
  EXPECT_LT(v.mismatch, 1e-6);
  EXPECT_LT(virial_norm_check(cubic_3d()).mismatch, 1e-5);
}

TEST(SolveGroundState, NormIsGridInvariant) {
  const GroundState coarse = solve_ground_state(4.0, 1, Grid::radial(1, 40.0, 4000));
  EXPECT_NEAR(coarse.norm_q, line_quartic().norm_q, 1e-6);
}

TEST(SolveGroundState, SmallBoxRaisesDomainWarning) {
  const GroundState gs = solve_ground_state(4.0, 1, Grid::radial(1, 6.0, 600));
  EXPECT_TRUE(gs.domain_warning);
}

TEST(SolveCoupled, DilationLawForTheMultiplier) {
  // Coupling s rescales lengths by s^{1/(2 - 2 theta)}, so E scales by its square.
  const GroundState &gs = line_quartic();
  const GroundState c = solve_coupled(gs, 0.5);
  const double b = std::pow(0.5, 1.0 / (2.0 - 2.0 * gs.theta()));
  EXPECT_NEAR(c.E, gs.E * b * b, 1e-5 * std::abs(gs.E));
}

TEST(ProfileOn, RecoversNodesAndRejectsRadialShift) {
  const GroundState &gs = line_quartic();
  const GridFunction same = profile_on(gs, gs.grid());
  for (std::size_t i = 0; i < gs.Q.size(); ++i)
    ASSERT_NEAR(same[i], gs.Q[i], 1e-15);
  const GridFunction line = profile_on(gs, Grid::line(20.0, 8000));
  EXPECT_NEAR(integrate(pointwise_product(line, line)), 1.0, 1e-9);
  EXPECT_THROW(profile_on(gs, gs.grid(), 1.0), UnsupportedShiftError);
}
