#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "vortex/error.hpp"
#include "vortex/mc_oracle.hpp"
#include "vortex/rates.hpp"

namespace vortex {
namespace {

constexpr double kPi = std::numbers::pi;

McConfig config(std::uint64_t n, std::uint64_t seed, unsigned workers = 1) {
  McConfig c;
  c.n_samples = n;
  c.seed = seed;
  c.n_workers = workers;
  return c;
}

TEST(MonteCarlo, SpecialDispersionToTwoDigits) {
  const CorrelationModel2D m =
      build_2d(moments(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two)));
  const McEstimate e = mc_rate_2d(m, config(1'000'000, 1));
  const double exact = 2.0 / (3.0 * kPi * kPi * std::sqrt(15.0));
  EXPECT_LE(std::abs(e.value - exact), 4.0 * e.standard_error);
  EXPECT_LT(std::abs(e.value - exact) / exact, 1e-2);
  EXPECT_EQ(e.n, 1'000'000u);
}

TEST(MonteCarlo, RigidFieldGivesZero) {
  const McEstimate e2 = mc_rate_2d(
      build_2d(moments(Spectrum(Monochromatic{1.0, 1.0}, Dimension::two))), config(1000, 1));
  EXPECT_EQ(e2.value, 0.0);
  const McEstimate e3 = mc_rate_3d(
      build_3d(moments(Spectrum(Monochromatic{1.0, 1.0}, Dimension::three))), config(1000, 1));
  EXPECT_EQ(e3.value, 0.0);
}

TEST(MonteCarlo, RandomTwoDimensionalSpectra) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 3; ++i) {
    const CorrelationModel2D m = build_2d(moments(test::random_rings(rng, Dimension::two)));
    const McEstimate e = mc_rate_2d(m, config(200'000, 10 + i));
    EXPECT_LE(std::abs(e.value - rate_2d(m.moments).pair_events), 4.0 * e.standard_error);
  }
}

TEST(MonteCarlo, BlackbodySplit) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
  const McEstimate e = mc_rate_3d(m, config(1'000'000, 2));
  const EventRates cf = rates_3d(m.moments);
  ASSERT_TRUE(e.split.has_value());
  EXPECT_LE(std::abs(e.value - cf.total()), 4.0 * e.standard_error);
  EXPECT_LE(std::abs(e.split->reconnection - cf.reconnection), 4.0 * e.split->reconnection_stderr);
  EXPECT_LE(std::abs(e.split->birth_death - cf.birth_plus_death()),
            4.0 * e.split->birth_death_stderr);
  EXPECT_LT(std::abs(e.split->reconnection - cf.reconnection) / cf.reconnection, 1e-2);
}

TEST(MonteCarlo, TotalIsSumOfPartition) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
  const McEstimate e = mc_rate_3d(m, config(100'000, 3));
  EXPECT_NEAR(e.value, e.split->reconnection + e.split->birth_death, 1e-12 * e.value);
  EXPECT_NEAR(e.split->birth_death,
              e.split->loops_positive_velocity + e.split->loops_negative_velocity,
              1e-12 * e.value);
}

TEST(MonteCarlo, ModulusSplitRatio) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(MonochromaticModulus{1.0, 1.0}, Dimension::three)));
  const McEstimate e = mc_rate_3d(m, config(1'000'000, 4));
  const EventRates cf = rates_3d(m.moments);
  EXPECT_LE(std::abs(e.split->birth_death - cf.birth_plus_death()),
            4.0 * e.split->birth_death_stderr);
  EXPECT_NEAR(e.split->birth_death / e.split->reconnection, 0.03775, 0.01);
}

TEST(MonteCarlo, StandardErrorShrinksAsRootN) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
  const double s1 = mc_rate_3d(m, config(50'000, 5)).standard_error;
  const double s4 = mc_rate_3d(m, config(200'000, 5)).standard_error;
  EXPECT_NEAR(s4 / s1, 0.5, 0.1);
}

TEST(MonteCarlo, BitwiseReproducibleAcrossWorkers) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
  McConfig a = config(150'000, 9, 1);
  a.batch = 10'000;
  McConfig b = a;
  b.n_workers = 3;
  const McEstimate ea = mc_rate_3d(m, a), eb = mc_rate_3d(m, b);
  EXPECT_EQ(ea.value, eb.value);
  EXPECT_EQ(ea.standard_error, eb.standard_error);
  EXPECT_EQ(ea.split->reconnection, eb.split->reconnection);
  McConfig c = a;
  c.seed = 10;
  EXPECT_NE(mc_rate_3d(m, c).value, ea.value);
}

TEST(MonteCarlo, RejectsZeroSamples) {
  const CorrelationModel2D m =
      build_2d(moments(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two)));
  EXPECT_THROW(mc_rate_2d(m, config(0, 1)), InvalidInput);
}

TEST(Normalization, TwoDimensionalExample) {
  EXPECT_NEAR(normalization_check_2d({1.0, 1.0, 1.0, -1.0, 2.0, 0.0}), 1.0, 1e-6);
}

TEST(Normalization, ProportionalFormsAreDegenerate) {
  EXPECT_THROW(normalization_check_2d({1.0, 2.0, 3.0, 2.0, 4.0, 6.0}), InvalidInput);
  EXPECT_THROW(normalization_check_3d({1.0, 0.5, 2.0, 1.0, 3.0, 2.0, 1.0, 4.0, 2.0, 6.0}),
               InvalidInput);
}

TEST(Normalization, RandomThreeDimensionalForms) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  int done = 0;
  while (done < 10) {
    const LocalForm3D c{nd(rng), nd(rng), nd(rng), nd(rng), nd(rng),
                        nd(rng), nd(rng), nd(rng), nd(rng), nd(rng)};
    try {
      EXPECT_NEAR(normalization_check_3d(c), 1.0, 1e-5);
      ++done;
    } catch (const InvalidInput&) {
    }
  }
}

TEST(AxisFixing, GradientIdentityAndDensity) {
  const CorrelationModel2D m =
      build_2d(moments(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two)));
  const AxisFixingReport r = axis_fixing_check(m, config(1'000'000, 6));
  EXPECT_NEAR(r.gradient_rhs, r.gradient_lhs, 1e-12 * r.gradient_lhs);
  EXPECT_NEAR(r.density_pinned, r.density_closed, 1e-12 * r.density_closed);
  EXPECT_LE(std::abs(r.density_mc - r.density_closed), 4.0 * r.density_mc_stderr);
}

TEST(AxisFixing, MonochromaticDensity) {
  RingMixture rm{{{1.0, 1.0, 1.0}, {1.0, 1.0, -1.0}}};  // k = 1 with motion
  const CorrelationModel2D m = build_2d(moments(Spectrum(rm, Dimension::two)));
  const AxisFixingReport r = axis_fixing_check(m, config(10'000, 6));
  EXPECT_NEAR(r.density_closed, 1.0 / (4.0 * kPi), 1e-15);
}

}  // namespace
}  // namespace vortex
