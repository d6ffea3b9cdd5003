#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vortex/error.hpp"
#include "vortex/field_sim.hpp"

namespace vortex {
namespace {

constexpr double kPi = std::numbers::pi;

Spectrum special_2d() { return Spectrum(SpecialDispersion{1.0, 1.0}, Dimension::two); }
Spectrum blackbody_3d() { return Spectrum(Blackbody{1.0, 1.0}, Dimension::three); }

TEST(FieldSim, AmplitudesMatchFieldVariance) {
  const Spectrum s(SpecialDispersion{1.0, 1.0}, Dimension::two, 2.5);
  const FieldRealization f = synthesize(s, 300, 4);
  EXPECT_NEAR(f.field_variance(), 2.5, 1e-12);
  EXPECT_EQ(f.waves().size(), 300u);
  EXPECT_FALSE(f.gaussianity_warning());
  EXPECT_TRUE(synthesize(s, 20, 4).gaussianity_warning());
}

TEST(FieldSim, SampledWavesFollowSpectrum) {
  const FieldRealization f = synthesize(special_2d(), 4000, 5);
  double k2 = 0.0, w2 = 0.0;
  for (const PlaneWave& w : f.waves()) {
    EXPECT_EQ(w.k(2), 0.0);
    EXPECT_NEAR(w.k.squaredNorm() + w.omega * w.omega, 1.0, 1e-12);
    k2 += w.k.squaredNorm();
    w2 += w.omega * w.omega;
  }
  EXPECT_NEAR(k2 / 4000.0, 2.0 / 3.0, 0.02);
  EXPECT_NEAR(w2 / 4000.0, 1.0 / 3.0, 0.02);
}

TEST(FieldSim, SingleFrequencyFieldHasNoEvents) {
  const Spectrum s(Monochromatic{1.0, 1.0}, Dimension::two);
  const FieldRealization f = synthesize(s, 100, 6);
  const Eigen::Vector3d r(0.3, -1.2, 0.0);
  EXPECT_NEAR(std::norm(f.psi(r, 0.0)), std::norm(f.psi(r, 7.3)), 1e-9);
  SpacetimeBox box;
  box.hi = Eigen::Vector3d(6.0, 6.0, 0.0);
  box.t1 = 3.0;
  GridSpec g{0.3, 0.5};
  EXPECT_TRUE(find_events_2d(f, box, g).events.empty());
}

TEST(FieldSim, JetMatchesFiniteDifferences) {
  const FieldRealization f = synthesize(blackbody_3d(), 60, 7);
  const Eigen::Vector3d r(0.4, -0.2, 1.1);
  const double t = 0.7, h = 1e-5;
  const FieldJet j = f.jet(r, t);
  auto fg = [&](const Eigen::Vector3d& p, double s) { return f.jet(p, s); };
  EXPECT_NEAR(j.f, f.psi(r, t).real(), 1e-12);
  EXPECT_NEAR(j.g, f.psi(r, t).imag(), 1e-12);
  EXPECT_NEAR(j.ft, (fg(r, t + h).f - fg(r, t - h).f) / (2 * h), 1e-6);
  EXPECT_NEAR(j.gt, (fg(r, t + h).g - fg(r, t - h).g) / (2 * h), 1e-6);
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d e = h * Eigen::Vector3d::Unit(i);
    const FieldJet jp = fg(r + e, t), jm = fg(r - e, t);
    EXPECT_NEAR(j.grad_f(i), (jp.f - jm.f) / (2 * h), 1e-6);
    EXPECT_NEAR(j.grad_g(i), (jp.g - jm.g) / (2 * h), 1e-6);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(j.hess_f(k, i), (jp.grad_f(k) - jm.grad_f(k)) / (2 * h), 1e-5);
      EXPECT_NEAR(j.hess_g(k, i), (jp.grad_g(k) - jm.grad_g(k)) / (2 * h), 1e-5);
    }
    EXPECT_NEAR(j.grad_ft(i), (fg(r, t + h).grad_f(i) - fg(r, t - h).grad_f(i)) / (2 * h), 1e-5);
    EXPECT_NEAR(j.grad_gt(i), (fg(r, t + h).grad_g(i) - fg(r, t - h).grad_g(i)) / (2 * h), 1e-5);
  }
}

TEST(FieldSim, PhaseRotationMultipliesField) {
  const FieldRealization f = synthesize(special_2d(), 50, 8);
  const FieldRealization g = f.phase_rotated(0.9);
  const Eigen::Vector3d r(1.0, 2.0, 0.0);
  const auto expected = std::polar(1.0, 0.9) * f.psi(r, 0.4);
  EXPECT_NEAR(std::abs(g.psi(r, 0.4) - expected), 0.0, 1e-12);
}

class EventFinder2D : public ::testing::Test {
 protected:
  void SetUp() override {
    field_ = synthesize(special_2d(), 200, 11);
    const SpectralMoments m = moments(special_2d());
    box_ = default_box(m, 3.0, 1.0);
    grid_ = default_grid(m);
    search_ = find_events_2d(*field_, box_, grid_);
  }
  std::optional<FieldRealization> field_;
  SpacetimeBox box_;
  GridSpec grid_;
  EventSearch search_;
};

TEST_F(EventFinder2D, FindsConvergedTangencies) {
  ASSERT_FALSE(search_.events.empty());
  for (const EventRecord& e : search_.events) {
    EXPECT_TRUE(box_.contains(e.location, e.time, Dimension::two));
    EXPECT_LT(std::abs(e.f_residual), 1e-8);
    EXPECT_LT(std::abs(e.g_residual), 1e-8);
    EXPECT_LT(e.tangency_residual, 1e-6);
    const FieldJet j = field_->jet(e.location, e.time);
    EXPECT_LT(std::abs(j.f) + std::abs(j.g), 1e-8);
  }
}

TEST_F(EventFinder2D, EventsAreSortedAndDistinct) {
  for (std::size_t i = 1; i < search_.events.size(); ++i) {
    const EventRecord& a = search_.events[i - 1];
    const EventRecord& b = search_.events[i];
    EXPECT_LE(a.time, b.time);
    const double d = (a.location - b.location).norm();
    EXPECT_FALSE(d < 1e-7 && std::abs(a.time - b.time) < 1e-9);
  }
}

TEST_F(EventFinder2D, ClassificationAgreesWithLocalSign) {
  for (const EventRecord& e : search_.events) {
    EXPECT_TRUE(e.kind == EventKind::pair_creation || e.kind == EventKind::pair_annihilation);
    if (!e.counted_in_disc) {
      EXPECT_EQ(e.kind == EventKind::pair_creation, e.classifier < 0.0);
    }
  }
}

TEST_F(EventFinder2D, ZeroCountChangesByTwoAcrossEvent) {
  // count vortices in a small box around isolated events just before and after
  int checked = 0;
  for (const EventRecord& e : search_.events) {
    bool isolated = true;
    for (const EventRecord& o : search_.events) {
      if (&o == &e) continue;
      if ((o.location - e.location).norm() < 0.5 && std::abs(o.time - e.time) < 0.2) {
        isolated = false;
      }
    }
    if (!isolated) continue;
    SpacetimeBox local;
    local.lo = e.location - Eigen::Vector3d(0.1, 0.1, 0.0);
    local.hi = e.location + Eigen::Vector3d(0.1, 0.1, 0.0);
    const double dt = 1e-4;
    const auto before = count_vortices_2d(*field_, local, e.time - dt, 0.002);
    const auto after = count_vortices_2d(*field_, local, e.time + dt, 0.002);
    if (e.kind == EventKind::pair_creation) {
      EXPECT_EQ(after, before + 2) << e.time;
    } else {
      EXPECT_EQ(before, after + 2) << e.time;
    }
    if (++checked == 5) break;
  }
  EXPECT_GT(checked, 0);
}

TEST_F(EventFinder2D, PhaseRotationLeavesEventsUnchanged) {
  const EventSearch rotated = find_events_2d(field_->phase_rotated(1.3), box_, grid_);
  ASSERT_EQ(rotated.events.size(), search_.events.size());
  for (std::size_t i = 0; i < rotated.events.size(); ++i) {
    EXPECT_LT((rotated.events[i].location - search_.events[i].location).norm(), 1e-6);
    EXPECT_NEAR(rotated.events[i].time, search_.events[i].time, 1e-6);
    EXPECT_EQ(rotated.events[i].kind, search_.events[i].kind);
  }
}

TEST(FieldSim, ThreeDimensionalEventsAreTangencies) {
  const Spectrum s = blackbody_3d();
  const SpectralMoments m = moments(s);
  const FieldRealization f = synthesize(s, 150, 12);
  SpacetimeBox box = default_box(m, 1.0, 0.5);
  const EventSearch r = find_events_3d(f, box, default_grid(m));
  ASSERT_FALSE(r.events.empty());
  for (const EventRecord& e : r.events) {
    const FieldJet j = f.jet(e.location, e.time);
    EXPECT_LT(std::abs(j.f) + std::abs(j.g), 1e-8);
    const double cross = j.grad_f.cross(j.grad_g).norm() / (j.grad_f.norm() * j.grad_g.norm());
    EXPECT_LT(cross, 1e-6);
    EXPECT_EQ(e.kind == EventKind::reconnection, e.classifier < 0.0);
  }
}

TEST(FieldSim, VortexCountMatchesWindingParity) {
  const FieldRealization f = synthesize(special_2d(), 200, 13);
  SpacetimeBox box = default_box(moments(special_2d()), 4.0, 1.0);
  const auto coarse = count_vortices_2d(f, box, 0.0, 0.1);
  const auto fine = count_vortices_2d(f, box, 0.0, 0.05);
  EXPECT_GT(coarse, 0u);
  EXPECT_NEAR(static_cast<double>(coarse), static_cast<double>(fine), 0.05 * fine + 2);
}

TEST(FieldSim, SimulationIndependentOfWorkers) {
  const Spectrum s = special_2d();
  SimulationConfig cfg;
  cfg.realizations = 3;
  cfg.n_waves = 100;
  cfg.seed = 21;
  cfg.box = default_box(moments(s), 2.0, 1.0);
  cfg.grid = default_grid(moments(s));
  const SimulationReport a = simulate(s, cfg);
  cfg.n_workers = 3;
  const SimulationReport b = simulate(s, cfg);
  EXPECT_EQ(a.creations, b.creations);
  EXPECT_EQ(a.annihilations, b.annihilations);
  EXPECT_EQ(a.vortex_density, b.vortex_density);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].location, b.events[i].location);
    EXPECT_EQ(a.events[i].realization, b.events[i].realization);
  }
  EXPECT_EQ(a.realizations, 3u);
  EXPECT_NEAR(a.measure, 3.0 * cfg.box.measure(Dimension::two), 1e-9);
}

TEST(FieldSim, RejectsInvalidInput) {
  EXPECT_THROW(synthesize(special_2d(), 1, 0), InvalidInput);
  const FieldRealization f = synthesize(special_2d(), 50, 1);
  SpacetimeBox box;
  GridSpec bad{0.0, 0.1};
  EXPECT_THROW(find_events_2d(f, box, bad), InvalidInput);
  SpacetimeBox inverted;
  inverted.t1 = -1.0;
  EXPECT_THROW(find_events_2d(f, inverted, GridSpec{}), InvalidInput);
  SimulationConfig cfg;
  cfg.realizations = 0;
  EXPECT_THROW(simulate(special_2d(), cfg), InvalidInput);
}

TEST(FieldSim, DefaultGridResolvesWavelength) {
  for (const Spectrum& s : {special_2d(), blackbody_3d()}) {
    const SpectralMoments m = moments(s);
    const GridSpec g = default_grid(m);
    EXPECT_LE(g.spacing, 0.25 * 2.0 * kPi / std::sqrt(m.k2));
    EXPECT_GT(g.time_step, 0.0);
  }
}

}  // namespace
}  // namespace vortex
