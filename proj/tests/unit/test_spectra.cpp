#include <gtest/gtest.h>

#include <cmath>

#include "vortex/error.hpp"
#include "vortex/spectra.hpp"

namespace vortex {
namespace {

double zeta(double s) { return std::riemann_zeta(s); }

TEST(Spectra, MonochromaticShellHasUnitMoments) {
  const SpectralMoments m = moments(Spectrum(Monochromatic{1.0, 1.0}, Dimension::three));
  EXPECT_DOUBLE_EQ(m.k2, 1.0);
  EXPECT_DOUBLE_EQ(m.k4, 1.0);
  EXPECT_DOUBLE_EQ(m.w1, 1.0);
  EXPECT_DOUBLE_EQ(m.w2, 1.0);
  EXPECT_DOUBLE_EQ(m.wk2, 1.0);
}

TEST(Spectra, BlackbodyComponentMomentsMatchZetaRatios) {
  const SpectralMoments m = moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three));
  const ComponentMoments c = component_moments(m);
  EXPECT_NEAR(c.kx2, 20.0 / 3.0 * zeta(6) / zeta(4), 1e-12);
  EXPECT_NEAR(c.kx4, 168.0 * zeta(8) / zeta(4), 1e-10);
  EXPECT_NEAR(m.w1, 4.0 * zeta(5) / zeta(4), 1e-12);
  EXPECT_NEAR(m.w2, 20.0 * zeta(6) / zeta(4), 1e-12);
}

TEST(Spectra, BlackbodyScalesWithTemperatureAndSpeed) {
  const SpectralMoments a = moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three));
  const SpectralMoments b = moments(Spectrum(Blackbody{2.0, 0.5}, Dimension::three));
  // k scales by W/c = 4, omega by W = 2
  EXPECT_NEAR(b.k2, 16.0 * a.k2, 1e-9 * b.k2);
  EXPECT_NEAR(b.w2, 4.0 * a.w2, 1e-9 * b.w2);
  EXPECT_NEAR(b.wk2, 32.0 * a.wk2, 1e-9 * b.wk2);
}

TEST(Spectra, SymmetricRingsHaveZeroMeanFrequency) {
  RingMixture rm{{{0.5, 1.0, 1.0}, {0.5, 1.0, -1.0}}};
  const SpectralMoments m = moments(Spectrum(rm, Dimension::three));
  EXPECT_DOUBLE_EQ(m.w1, 0.0);
  EXPECT_DOUBLE_EQ(m.w2, 1.0);
  EXPECT_DOUBLE_EQ(m.k2, 1.0);
}

TEST(Spectra, ComponentMomentsFollowIsotropy) {
  SpectralMoments m3;
  m3.dimension = Dimension::three;
  m3.k2 = 3.0;
  m3.k4 = 5.0;
  EXPECT_DOUBLE_EQ(component_moments(m3).kx2, 1.0);
  EXPECT_DOUBLE_EQ(component_moments(m3).kx4, 1.0);
  SpectralMoments m2;
  m2.dimension = Dimension::two;
  m2.k2 = 2.0;
  m2.k4 = 8.0 / 3.0;
  EXPECT_DOUBLE_EQ(component_moments(m2).kx2, 1.0);
  EXPECT_DOUBLE_EQ(component_moments(m2).kx4, 1.0);
  const ComponentMoments mono =
      component_moments(moments(Spectrum(Monochromatic{1.0, 1.0}, Dimension::three)));
  EXPECT_DOUBLE_EQ(mono.kx2, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mono.kx4, 1.0 / 5.0);
}

SpectralMoments from_components(double kx2, double kx4) {
  SpectralMoments m;
  m.dimension = Dimension::three;
  m.k2 = 3.0 * kx2;
  m.k4 = 5.0 * kx4;
  m.w1 = 0.0;
  m.w2 = 1.0;
  return m;
}

TEST(Spectra, ValidationAcceptsKurtosisAboveShellBound) {
  EXPECT_TRUE(validate(from_components(1.0 / 3.0, 0.21)).empty());
}

TEST(Spectra, ValidationRejectsKurtosisBelowShellBound) {
  const auto v = validate(from_components(1.0 / 3.0, 0.19));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, MomentViolation::Code::kurtosis_below_bound);
  EXPECT_THROW(require_valid(from_components(1.0 / 3.0, 0.19)), InvalidInput);
}

TEST(Spectra, ValidationRejectsNegativeFrequencyVariance) {
  SpectralMoments m = from_components(1.0 / 3.0, 0.21);
  m.w1 = 2.0;
  m.w2 = 1.0;
  const auto v = validate(m);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].code, MomentViolation::Code::negative_frequency_variance);
}

TEST(Spectra, ValidationRejectsNonFiniteAndNonPositive) {
  SpectralMoments m = from_components(1.0 / 3.0, 0.21);
  m.k2 = NAN;
  EXPECT_FALSE(validate(m).empty());
  m = from_components(1.0 / 3.0, 0.21);
  m.f2 = 0.0;
  EXPECT_FALSE(validate(m).empty());
}

TEST(Spectra, WavenumberAndFrequencyScaling) {
  RingMixture base{{{1.0, 1.0, 0.5}, {2.0, 1.7, -1.2}}};
  const double lam = 1.7, mu = 0.6;
  RingMixture scaled = base;
  for (auto& r : scaled.rings) {
    r.k *= lam;
    r.omega *= mu;
  }
  const SpectralMoments a = moments(Spectrum(base, Dimension::three));
  const SpectralMoments b = moments(Spectrum(scaled, Dimension::three));
  EXPECT_NEAR(b.k2, lam * lam * a.k2, 1e-12);
  EXPECT_NEAR(b.k4, std::pow(lam, 4) * a.k4, 1e-11);
  EXPECT_NEAR(b.w1, mu * a.w1, 1e-12);
  EXPECT_NEAR(b.w2, mu * mu * a.w2, 1e-12);
  EXPECT_NEAR(b.wk2, lam * lam * mu * a.wk2, 1e-12);
}

TEST(Spectra, IntensityRescalingOnlyChangesFieldVariance) {
  RingMixture a{{{1.0, 1.0, 0.5}, {2.0, 1.7, -1.2}}};
  RingMixture b = a;
  for (auto& r : b.rings) r.weight *= 7.5;
  const SpectralMoments ma = moments(Spectrum(a, Dimension::three, 1.0));
  const SpectralMoments mb = moments(Spectrum(b, Dimension::three, 3.0));
  EXPECT_DOUBLE_EQ(ma.k2, mb.k2);
  EXPECT_DOUBLE_EQ(ma.wk2, mb.wk2);
  EXPECT_DOUBLE_EQ(mb.f2, 3.0);
}

TEST(Spectra, ModulusSpectrumIsTimeReversalSymmetric) {
  const SpectralMoments m =
      moments(Spectrum(MonochromaticModulus{2.0, 3.0}, Dimension::three));
  EXPECT_DOUBLE_EQ(m.w1, 0.0);
  EXPECT_DOUBLE_EQ(m.wk2, 0.0);
  EXPECT_DOUBLE_EQ(m.w2, 9.0);
  EXPECT_FALSE(is_time_rigid(m));
}

TEST(Spectra, MonochromaticIsRigid) {
  EXPECT_TRUE(is_time_rigid(moments(Spectrum(Monochromatic{1.0, 2.0}, Dimension::two))));
}

TEST(Spectra, SpecialDispersionMoments) {
  const SpectralMoments m = moments(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two));
  EXPECT_NEAR(m.k2, 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(m.k4, 8.0 / 15.0, 1e-14);
  EXPECT_NEAR(m.w2, 1.0 / 3.0, 1e-14);
  EXPECT_THROW(Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::three), InvalidInput);
}

TEST(Spectra, TabulatedUniformDensity) {
  Tabulated tb;
  tb.omega_grid = {0.0, 1.0, 2.0};
  tb.k_grid = {0.0, 1.0, 2.0};
  tb.phi.assign(3, std::vector<double>(3, 1.0));
  const SpectralMoments m = moments(Spectrum(tb, Dimension::three));
  // trapezoid sums on three nodes: (0 + 2 + 4) / 2 over (1 + 2 + 1) / 2
  EXPECT_NEAR(m.k2, 1.5, 1e-12);
  EXPECT_NEAR(m.w1, 1.0, 1e-12);
  EXPECT_NEAR(m.wk2, 1.5, 1e-12);
}

TEST(Spectra, ConstructorRejectsBadParameters) {
  EXPECT_THROW(Spectrum(Blackbody{-1.0, 1.0}, Dimension::three), InvalidInput);
  EXPECT_THROW(Spectrum(Monochromatic{1.0, 1.0}, Dimension::three, 0.0), InvalidInput);
  EXPECT_THROW(Spectrum(RingMixture{}, Dimension::three), InvalidInput);
  EXPECT_THROW(dimension_from_int(4), InvalidInput);
}

}  // namespace
}  // namespace vortex
