#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "vortex/error.hpp"
#include "vortex/quadrature.hpp"

namespace vortex {
namespace {

constexpr double kPi = std::numbers::pi;

CorrelationModel3D blackbody() {
  return build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
}

TEST(Quadrature, UpShiftGivesReconnectionRate) {
  const CorrelationModel3D m = blackbody();
  const ContourConstants c = contour_constants(m);
  const QuadratureResult up = contour_integral(c, {}, ContourShift::up);
  const double R = rates_3d(m.moments).reconnection;
  EXPECT_NEAR(up.value, R, 1e-6 * R);
  EXPECT_LT(std::abs(up.imaginary_part), 1e-6);
  EXPECT_GT(up.evaluations, 0u);
}

TEST(Quadrature, ShiftDifferenceIsOriginResidue) {
  const ContourConstants c = contour_constants(blackbody());
  const double up = contour_integral(c, {}, ContourShift::up).value;
  const double down = contour_integral(c, {}, ContourShift::down).value;
  EXPECT_NEAR(down - up, -kPi * c.Q * (1.0 / c.a + 1.0 / (2.0 * c.b)), 1e-6);
}

TEST(Quadrature, PrincipalValueIsAverageOfShifts) {
  const ContourConstants c = contour_constants(blackbody());
  const double up = contour_integral(c, {}, ContourShift::up).value;
  const double down = contour_integral(c, {}, ContourShift::down).value;
  const QuadratureResult pv = contour_integral(c, {}, ContourShift::principal);
  EXPECT_NEAR(pv.value, 0.5 * (up + down), 1e-6);
}

TEST(Quadrature, ZeroQGivesZero) {
  const ContourConstants c{0.0, 1.0, -1.0, true};
  for (auto s : {ContourShift::up, ContourShift::down, ContourShift::principal}) {
    EXPECT_EQ(contour_integral(c, {}, s).value, 0.0);
  }
}

TEST(Quadrature, ResultIsIndependentOfOffset) {
  const ContourConstants c = contour_constants(blackbody());
  const double R = rates_from_residues(c).reconnection;
  for (double eps : {0.01, 0.1, 1.0 / 3.0}) {
    ContourSpec spec;
    spec.epsilon = eps;
    EXPECT_NEAR(contour_integral(c, spec, ContourShift::up).value, R, 1e-6 * R) << eps;
    EXPECT_NEAR(contour_integral(c, spec, ContourShift::down).value,
                rates_from_residues(c).birth_plus_death(), 1e-6 * R)
        << eps;
  }
}

TEST(Quadrature, OffsetCrossingSingularityIsRejected) {
  const ContourConstants c = contour_constants(blackbody());
  ContourSpec spec;
  spec.epsilon = 1.0;
  EXPECT_THROW(contour_integral(c, spec, ContourShift::up), InvalidInput);
  spec.epsilon = 1.5;
  EXPECT_THROW(contour_integral(c, spec, ContourShift::down), InvalidInput);
}

TEST(Quadrature, RefinementChangeStaysWithinErrorEstimate) {
  const ContourConstants c = contour_constants(blackbody());
  ContourSpec coarse;
  coarse.tolerance = 1e-6;
  ContourSpec fine;
  fine.tolerance = 1e-11;
  for (auto s : {ContourShift::up, ContourShift::down}) {
    const QuadratureResult a = contour_integral(c, coarse, s);
    const QuadratureResult b = contour_integral(c, fine, s);
    EXPECT_LE(std::abs(a.value - b.value), a.error_estimate + 1e-12);
  }
}

TEST(Quadrature, SimpsonRuleAgrees) {
  const ContourConstants c = contour_constants(blackbody());
  ContourSpec spec;
  spec.rule = QuadratureRule::adaptive_simpson;
  spec.tolerance = 1e-8;
  const double R = rates_from_residues(c).reconnection;
  EXPECT_NEAR(contour_integral(c, spec, ContourShift::up).value, R, 1e-6 * R);
}

TEST(Quadrature, IntegrandStartsAtZeroBracket) {
  const ContourConstants c = contour_constants(blackbody());
  // near v = 0 the bracket is O(v), so the integrand stays finite
  const auto small = contour_integrand(c, {1e-9, 1e-9});
  EXPECT_TRUE(std::isfinite(small.real()));
  EXPECT_TRUE(std::isfinite(small.imag()));
}

TEST(Quadrature, ReducedIntegral3DBlackbody) {
  const CorrelationModel3D m = blackbody();
  const double total = rates_3d(m.moments).total();
  for (auto form : {ReducedForm::mu_r, ReducedForm::r_collapsed}) {
    const QuadratureResult q = reduced_integral_3d(m, 1e-8, form);
    EXPECT_NEAR(q.value, total, 1e-5 * total);
  }
}

TEST(Quadrature, ReducedIntegral3DIsIndependentOfPinnedAngle) {
  const CorrelationModel3D m = blackbody();
  const double total = rates_3d(m.moments).total();
  for (double theta : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR(reduced_integral_3d(m, 1e-8, ReducedForm::r_collapsed, theta).value, total,
                1e-5 * total);
  }
}

TEST(Quadrature, ReducedIntegral3DModulus) {
  const double k = 1.0, w = 1.0;
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(MonochromaticModulus{k, w}, Dimension::three)));
  const double R = 3.0 * w * k * k * k / (20.0 * kPi * kPi);
  const double expected = R * (1.0 + 1.0 - 5.0 / (3.0 * std::sqrt(3.0)));
  EXPECT_NEAR(reduced_integral_3d(m).value, expected, 1e-4 * expected);
}

TEST(Quadrature, ReducedIntegralsVanishWhenRigid) {
  EXPECT_EQ(reduced_integral_3d(build_3d(moments(
                                    Spectrum(Monochromatic{1.0, 1.0}, Dimension::three))))
                .value,
            0.0);
  EXPECT_EQ(reduced_integral_2d(
                build_2d(moments(Spectrum(Monochromatic{1.0, 1.0}, Dimension::two))))
                .value,
            0.0);
}

TEST(Quadrature, ReducedIntegral2DSpecialDispersion) {
  const CorrelationModel2D m =
      build_2d(moments(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two)));
  const double expected = 2.0 / (3.0 * kPi * kPi * std::sqrt(15.0));
  EXPECT_NEAR(reduced_integral_2d(m).value, expected, 1e-6 * expected);
}

TEST(Quadrature, ReducedIntegral2DRandomTimeSymmetric) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5; ++i) {
    const CorrelationModel2D m =
        build_2d(moments(test::random_rings(rng, Dimension::two, true)));
    const double expected = rate_2d(m.moments).pair_events;
    EXPECT_NEAR(reduced_integral_2d(m).value, expected, 1e-6 * expected);
  }
}

TEST(Quadrature, ReducedIntegral2DRandomGeneral) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 5; ++i) {
    const CorrelationModel2D m = build_2d(moments(test::random_rings(rng, Dimension::two)));
    const double expected = rate_2d(m.moments).pair_events;
    const QuadratureResult q = reduced_integral_2d(m);
    EXPECT_NEAR(q.value, expected, 1e-6 * expected);
    EXPECT_LE(std::abs(q.value - expected), q.error_estimate + 1e-12 * expected);
  }
}

}  // namespace
}  // namespace vortex
