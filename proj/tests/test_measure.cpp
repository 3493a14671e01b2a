#include <cmath>

#include <gtest/gtest.h>

#include "keller/measure.hpp"

using namespace keller;

namespace {

MeasurePtr halves() { return std::make_shared<const WeightedMeasure>(std::vector<double>{0.5, 0.5}); }

} // namespace

TEST(WeightedMeasure, RejectsNonPositiveWeights) {
  EXPECT_THROW(WeightedMeasure({1.0, 0.0}), PreconditionError);
  EXPECT_THROW(WeightedMeasure({}), PreconditionError);
  EXPECT_THROW(WeightedMeasure({1.0, NAN}), PreconditionError);
}

TEST(WeightedMeasure, MidpointCarriesLebesgueMass) {
  EXPECT_NEAR(WeightedMeasure::midpoint(-1.0, 3.0, 7)->total_mass(), 4.0, 1e-14);
}

TEST(MeasFunction, RejectsWrongLengthAndNonFinite) {
  EXPECT_THROW(MeasFunction::real(halves(), {1.0}), DimensionError);
  EXPECT_THROW(MeasFunction::real(halves(), {1.0, INFINITY}), PreconditionError);
}

TEST(LpNorm, ConstantOnProbabilitySpaceIsOne) {
  const auto f = MeasFunction::constant(WeightedMeasure::uniform(5), 1.0);
  EXPECT_NEAR(lp_norm(f, 3.0), 1.0, 1e-15);
}

TEST(LpNorm, ZeroFunction) {
  EXPECT_EQ(lp_norm(MeasFunction::constant(halves(), 0.0), 2.5), 0.0);
}

TEST(LpNorm, TwoAtomHandValue) {
  EXPECT_NEAR(lp_norm(MeasFunction::real(halves(), {1.0, 2.0}), 2.0), std::sqrt(2.5), 1e-15);
}

TEST(LpNorm, ComplexModulus) {
  const auto f = MeasFunction(halves(), {complex(3, 4), complex(0, -5)});
  EXPECT_NEAR(lp_norm(f, 4.0), 5.0, 1e-14);
}

TEST(LpNorm, LargeExponentDoesNotOverflow) {
  const auto f = MeasFunction::real(halves(), {1e200, 1e200});
  EXPECT_NEAR(lp_norm(f, 6.0) / 1e200, 1.0, 1e-12);
}

TEST(LpNorm, ExponentBelowOneThrows) {
  EXPECT_THROW(lp_norm(MeasFunction::constant(halves(), 1.0), 0.5), InvalidExponentError);
}

TEST(Pairing, Examples) {
  const auto mu = WeightedMeasure::uniform(4);
  EXPECT_NEAR(std::abs(pairing(MeasFunction::constant(mu, 1.0), MeasFunction::constant(mu, 1.0)) - 1.0),
              0.0, 1e-15);
  const complex z = pairing(MeasFunction::constant(mu, complex(0, 1)), MeasFunction::constant(mu, 1.0));
  EXPECT_NEAR(z.real(), 0.0, 1e-15);
  EXPECT_NEAR(z.imag(), 1.0, 1e-15);
  const auto m2 = halves();
  EXPECT_EQ(pairing(MeasFunction::real(m2, {1, -1}), MeasFunction::real(m2, {1, 1})), complex{});
}

TEST(Pairing, IsBilinearNotSesquilinear) {
  const auto mu = WeightedMeasure::uniform(1);
  const auto i = MeasFunction::constant(mu, complex(0, 1));
  EXPECT_NEAR(pairing(i, i).real(), -1.0, 1e-15);
}

TEST(Pairing, MeasureMismatchThrows) {
  EXPECT_THROW(pairing(MeasFunction::constant(halves(), 1.0), MeasFunction::constant(halves(), 1.0)),
               DimensionError);
}

TEST(DualityMap, NonnegativeUnitInputGivesPower) {
  const double p = 3.0;
  auto mu = std::make_shared<const WeightedMeasure>(std::vector<double>{0.3, 0.7, 1.1});
  auto f = MeasFunction::real(mu, {0.2, 1.5, 0.4});
  f = f * complex(1.0 / lp_norm(f, p));
  const auto D = duality_map(f, p);
  for (std::size_t i = 0; i < f.size(); ++i)
    EXPECT_NEAR(std::abs(D[i] - std::pow(f[i].real(), p - 1.0)), 0.0, 1e-14);
}

TEST(DualityMap, ExponentTwoIsConjugation) {
  auto mu = WeightedMeasure::uniform(3);
  auto f = MeasFunction(mu, {complex(1, 2), complex(-0.5, 0.1), complex(0, -3)});
  f = f * complex(1.0 / lp_norm(f, 2.0));
  const auto D = duality_map(f, 2.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    EXPECT_NEAR(std::abs(D[i] - std::conj(f[i])), 0.0, 1e-15);
}

TEST(DualityMap, UnitPairingAndDualNorm) {
  const double p = 2.5;
  auto mu = std::make_shared<const WeightedMeasure>(std::vector<double>{0.2, 0.9, 0.4, 1.3});
  const auto f = MeasFunction(mu, {complex(1, -1), complex(0.3, 2), complex(0, 0), complex(-2, 0.5)});
  const auto D = duality_map(f, p);
  const complex z = pairing(f, D);
  EXPECT_NEAR(z.real(), lp_norm(f, p), 1e-13);
  EXPECT_NEAR(z.imag(), 0.0, 1e-13);
  EXPECT_NEAR(lp_norm(D, p / (p - 1.0)), 1.0, 1e-13);
  EXPECT_EQ(D[2], complex{});
}

TEST(DualityMap, Errors) {
  EXPECT_THROW(duality_map(MeasFunction::constant(halves(), 0.0), 2.0), DegenerateInputError);
  EXPECT_THROW(duality_map(MeasFunction::constant(halves(), 1.0), 1.0), InvalidExponentError);
}

TEST(ConjugateExponent, Values) {
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(3.0), 1.5);
  EXPECT_THROW(conjugate_exponent(1.0), InvalidExponentError);
}
