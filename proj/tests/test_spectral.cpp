#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "keller/spectral.hpp"
#include "oracles.hpp"

using namespace keller;
using namespace keller::spectral;

namespace {

GridFunction sech2_well(const GridPtr &g, double depth, double shift = 0.0) {
  return GridFunction::sample(g, [=](double x) {
    const double c = std::cosh(x - shift);
    return -depth / (c * c);
  });
}

} // namespace

TEST(LowestEigenpair, PoschlTellerDepthTwo) {
  // Second-order error at h = 0.01 is about 4e-6; h = 0.005 brings it under 1e-6.
  EXPECT_NEAR(lowest_eigenpair(sech2_well(Grid::line(20.0, 4000), 2.0)).lambda, -1.0, 5e-6);
  auto g = Grid::line(20.0, 8000);
  const EigenPair ep = lowest_eigenpair(sech2_well(g, 2.0));
  EXPECT_NEAR(ep.lambda, -1.0, 1e-6);
  EXPECT_LE(ep.residual, 1e-8);
  EXPECT_NEAR(l2_norm(ep.psi), 1.0, 1e-12);
  // Ground state of -2 sech^2 is sech / sqrt(2).
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    worst = std::max(worst, std::abs(ep.psi[i] - 1.0 / (std::sqrt(2.0) * std::cosh(g->coord(i)))));
  EXPECT_LT(worst, 1e-5);
}

TEST(LowestEigenpair, PoschlTellerFamily) {
  auto g = Grid::line(20.0, 4000);
  for (double depth : {0.5, 1.0, 3.5, 6.0})
    EXPECT_NEAR(lowest_eigenpair(sech2_well(g, depth)).lambda, oracle::poschl_teller(depth),
                2e-5 * (1.0 + depth))
        << depth;
}

TEST(LowestEigenpair, HarmonicOscillator) {
  auto g = Grid::line(20.0, 4000);
  const auto V = GridFunction::sample(g, [](double x) { return x * x; });
  EXPECT_NEAR(lowest_eigenpair(V).lambda, 1.0, 1e-4);
}

TEST(LowestEigenpair, HarmonicOscillatorThreeDimensionsPerChannel) {
  // -Lap + r^2 in three dimensions: 3 + 2 ell for the lowest state in channel ell.
  auto g = Grid::radial(3, 10.0, 2000);
  const auto V = GridFunction::sample(g, [](double r) { return r * r; });
  for (int ell : {0, 1, 2})
    EXPECT_NEAR(lowest_eigenpair(V, ell).lambda, 3.0 + 2.0 * ell, 1e-4) << ell;
}

TEST(LowestEigenpair, FreeBoxModeShrinksWithBox) {
  for (double L : {5.0, 10.0, 20.0}) {
    auto g = Grid::line(L, 40 * std::size_t(L));
    const double lam = lowest_eigenpair(GridFunction::zeros(g)).lambda;
    EXPECT_NEAR(lam, std::pow(std::numbers::pi / (2.0 * L), 2), 1e-3 / L) << L;
  }
}

TEST(LowestEigenpair, ConvergenceIsSecondOrder) {
  double err[3];
  std::size_t n = 1000;
  for (double &e : err) {
    auto g = Grid::line(20.0, n);
    e = std::abs(lowest_eigenpair(sech2_well(g, 2.0)).lambda + 1.0);
    n *= 2;
  }
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.8);
  EXPECT_NEAR(err[1] / err[2], 4.0, 0.8);
}

TEST(LowestEigenpair, TranslationInvariance) {
  auto g = Grid::line(20.0, 4000);
  const double a = lowest_eigenpair(sech2_well(g, 2.0)).lambda;
  const double b = lowest_eigenpair(sech2_well(g, 2.0, 3.0)).lambda;
  EXPECT_NEAR(a, b, 1e-8);
}

TEST(LowestEigenpair, GroundStateIsPositive) {
  auto g = Grid::line(20.0, 2000);
  const EigenPair ep = lowest_eigenpair(sech2_well(g, 2.0, 1.5));
  for (double v : ep.psi.values())
    ASSERT_GE(v, -1e-12);
}

TEST(LowestEigenpair, BadTolerance) {
  EXPECT_THROW(lowest_eigenpair(GridFunction::zeros(Grid::line(5.0, 100)), 0, 0.0), PreconditionError);
}

TEST(RayleighQuotient, HarmonicOscillatorGaussian) {
  auto g = Grid::line(20.0, 4000);
  const auto V = GridFunction::sample(g, [](double x) { return x * x; });
  const auto psi = GridFunction::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  EXPECT_NEAR(rayleigh_quotient(psi, V), 1.0, 1e-4);
}

TEST(RayleighQuotient, FreeOperatorIsNonnegative) {
  auto g = Grid::line(10.0, 500);
  const auto psi = GridFunction::sample(g, [](double x) { return std::exp(-std::abs(x)) * std::cos(3 * x); });
  EXPECT_GE(rayleigh_quotient(psi, GridFunction::zeros(g)), 0.0);
}

TEST(RayleighQuotient, EqualsEigenvalueAtGroundState) {
  auto g = Grid::line(20.0, 2000);
  const auto V = sech2_well(g, 2.0);
  const EigenPair ep = lowest_eigenpair(V);
  EXPECT_NEAR(rayleigh_quotient(ep.psi, V), ep.lambda, 1e-10);
}

TEST(RayleighQuotient, ZeroThrows) {
  auto g = Grid::line(10.0, 500);
  EXPECT_THROW(rayleigh_quotient(GridFunction::zeros(g), GridFunction::zeros(g)), DegenerateInputError);
}

TEST(LambdaOfPotential, ClampsAtZero) {
  auto g = Grid::line(10.0, 500);
  EXPECT_EQ(lambda_of_potential(GridFunction::zeros(g)), 0.0);
  EXPECT_EQ(lambda_of_potential(GridFunction::sample(g, [](double x) { return 1.0 + x * x; })), 0.0);
  EXPECT_NEAR(lambda_of_potential(sech2_well(Grid::line(20.0, 8000), 2.0)), -1.0, 1e-6);
}

TEST(LambdaOfPotential, MonotoneInThePotential) {
  auto g = Grid::line(20.0, 2000);
  double prev = 0.0;
  for (double depth : {0.5, 1.0, 2.0, 4.0}) {
    const double lam = lambda_of_potential(sech2_well(g, depth));
    EXPECT_LT(lam, prev) << depth;
    prev = lam;
  }
}

TEST(LowestEigenvalues, PoschlTellerBoundStates) {
  // -6 sech^2 (nu = 2) binds -4 and -1.
  auto g = Grid::line(20.0, 4000);
  const auto ev = lowest_eigenvalues(sech2_well(g, 6.0), 0, 2);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], -4.0, 1e-4);
  EXPECT_NEAR(ev[1], -1.0, 1e-4);
}
