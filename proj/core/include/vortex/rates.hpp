#pragma once

#include <optional>
#include <string>

#include "vortex/gaussian_model.hpp"
#include "vortex/spectra.hpp"

namespace vortex {

enum class RateMethod { closed_form, contour_residue, quadrature, monte_carlo, simulation };

std::string to_string(RateMethod m);

/// Event rates per unit volume and time (3D) or per unit area and time (2D).
/// In 2D, pair_events counts creations plus annihilations and birth/death
/// are the creation and annihilation rates. In 3D, pair_events is unused.
struct EventRates {
  Dimension dimension = Dimension::three;
  RateMethod method = RateMethod::closed_form;
  double reconnection = 0.0;
  double birth = 0.0;
  double death = 0.0;
  double pair_events = 0.0;
  std::optional<double> standard_error;  // of the headline total, when statistical

  double birth_plus_death() const { return birth + death; }
  /// Sum of every event type: R + B + D in 3D, the pair-event rate in 2D.
  double total() const;
  /// "length^-3 time^-1" or "length^-2 time^-1".
  std::string units() const;
};

EventRates rate_2d(const SpectralMoments& m);
EventRates rates_3d(const SpectralMoments& m);

struct ContourConstants {
  double Q = 0.0;
  double a = 0.0;
  double b = 0.0;
  bool degenerate = false;  // Q = 0, every rate vanishes
};

/// a, b and Q from the inverse correlation matrix. Throws NumericalFailure if
/// Q disagrees with its moment form 3 sigma_omega / (4 pi^3 sqrt(kx2) <f^2>)
/// beyond 1e-10 relative.
ContourConstants contour_constants(const CorrelationModel3D& model);

/// Rates from the residues at the pole ia and at the origin.
EventRates rates_from_residues(const ContourConstants& c);

/// Closed form ratio (birth + death) / reconnection; lies in
/// [1 - 5 / (3 sqrt 3), 1).
double loop_to_reconnection_ratio(const EventRates& r);

}  // namespace vortex
