#include "vortex/rates.hpp"

#include <cmath>
#include <numbers>

#include "vortex/error.hpp"

namespace vortex {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(RateMethod m) {
  switch (m) {
    case RateMethod::closed_form: return "closed_form";
    case RateMethod::contour_residue: return "contour_residue";
    case RateMethod::quadrature: return "quadrature";
    case RateMethod::monte_carlo: return "monte_carlo";
    case RateMethod::simulation: return "simulation";
  }
  return "unknown";
}

double EventRates::total() const {
  return dimension == Dimension::three ? reconnection + birth + death : pair_events;
}

std::string EventRates::units() const {
  return dimension == Dimension::three ? "length^-3 time^-1" : "length^-2 time^-1";
}

EventRates rate_2d(const SpectralMoments& m) {
  if (m.dimension != Dimension::two) throw InvalidInput("rate_2d needs two-dimensional moments");
  require_valid(m);
  EventRates r;
  r.dimension = Dimension::two;
  r.method = RateMethod::closed_form;
  if (is_time_rigid(m)) return r;
  const ComponentMoments c = component_moments(m);
  r.pair_events = m.frequency_stddev() * std::sqrt(c.kx4 - c.kx2 * c.kx2) / (kPi * kPi);
  r.birth = r.death = 0.5 * r.pair_events;
  return r;
}

EventRates rates_3d(const SpectralMoments& m) {
  if (m.dimension != Dimension::three) {
    throw InvalidInput("rates_3d needs three-dimensional moments");
  }
  require_valid(m);
  EventRates r;
  r.dimension = Dimension::three;
  r.method = RateMethod::closed_form;
  if (is_time_rigid(m)) return r;
  const ComponentMoments c = component_moments(m);
  const double var = m.frequency_variance();
  r.reconnection = std::sqrt(c.kx4 * c.kx4 * c.kx4 * var /
                             (3.0 * c.kx2 * (c.kx4 - c.kx2 * c.kx2))) /
                   (2.0 * kPi * kPi);
  const double loop = 0.5 * r.reconnection -
                      3.0 / (8.0 * kPi * kPi) * std::sqrt(c.kx2 * c.kx2 * c.kx2 * var);
  r.birth = r.death = loop;
  return r;
}

ContourConstants contour_constants(const CorrelationModel3D& model) {
  ContourConstants c;
  if (model.degenerate) {
    c.degenerate = true;
    return c;
  }
  if (model.Gtt() == 0.0) throw NumericalFailure("Gamma_t,t vanishes");
  c.Q = model.Q;
  c.a = model.a;
  c.b = model.b;
  const SpectralMoments& m = model.moments;
  const double simple = 3.0 * m.frequency_stddev() /
                        (4.0 * kPi * kPi * kPi * std::sqrt(component_moments(m).kx2)) / m.f2;
  if (std::abs(c.Q - simple) > 1e-10 * std::abs(simple)) {
    throw NumericalFailure("contour prefactor Q disagrees with its moment form");
  }
  return c;
}

EventRates rates_from_residues(const ContourConstants& c) {
  EventRates r;
  r.dimension = Dimension::three;
  r.method = RateMethod::contour_residue;
  if (c.degenerate || c.Q == 0.0) return r;
  if (!(c.a > 0.0) || !(c.b < 0.0) || c.Q < 0.0) {
    throw InvalidInput("residue route needs a > 0, b < 0, Q >= 0");
  }
  r.reconnection = kPi * c.Q / (c.a * std::sqrt(1.0 - c.a / c.b));
  const double loops = r.reconnection - kPi * c.Q * (1.0 / c.a + 1.0 / (2.0 * c.b));
  r.birth = r.death = 0.5 * loops;
  return r;
}

double loop_to_reconnection_ratio(const EventRates& r) {
  return r.reconnection > 0.0 ? r.birth_plus_death() / r.reconnection : 0.0;
}

}  // namespace vortex
