#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/rates.hpp"
#include "vortex/spectra.hpp"

namespace vortex {

/// One term a cos(k.r - omega t + phase) of f; g carries the matching sine.
struct PlaneWave {
  double amplitude = 0.0;
  Eigen::Vector3d k = Eigen::Vector3d::Zero();  // k(2) = 0 in two dimensions
  double omega = 0.0;
  double phase = 0.0;
};

/// Field values and derivatives at one spacetime point.
struct FieldJet {
  double f = 0.0, g = 0.0;
  double ft = 0.0, gt = 0.0;
  Eigen::Vector3d grad_f = Eigen::Vector3d::Zero();
  Eigen::Vector3d grad_g = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hess_f = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d hess_g = Eigen::Matrix3d::Zero();
  Eigen::Vector3d grad_ft = Eigen::Vector3d::Zero();  // d/dt of grad f
  Eigen::Vector3d grad_gt = Eigen::Vector3d::Zero();
};

/// psi = f + i g as a finite sum of plane waves.
class FieldRealization {
 public:
  FieldRealization(Dimension dimension, std::vector<PlaneWave> waves, std::uint64_t seed = 0);

  Dimension dimension() const { return dimension_; }
  const std::vector<PlaneWave>& waves() const { return waves_; }
  std::uint64_t seed() const { return seed_; }
  /// Sum of a^2 / 2, the single-point variance of f.
  double field_variance() const;
  /// Fewer than 50 waves: single-point statistics are visibly non-Gaussian.
  bool gaussianity_warning() const { return waves_.size() < 50; }

  std::complex<double> psi(const Eigen::Vector3d& r, double t) const;
  FieldJet jet(const Eigen::Vector3d& r, double t) const;

  /// psi -> exp(i alpha) psi.
  FieldRealization phase_rotated(double alpha) const;

 private:
  Dimension dimension_;
  std::vector<PlaneWave> waves_;
  std::uint64_t seed_;
};

/// Draws n_waves plane waves with (k, omega) sampled in proportion to the
/// spectrum's intensity, isotropic directions, uniform phases and equal
/// amplitudes sqrt(2 <f^2> / n_waves). Throws InvalidInput for n_waves < 2.
FieldRealization synthesize(const Spectrum& spectrum, std::size_t n_waves, std::uint64_t seed);

/// Axis-aligned box; z bounds are ignored in two dimensions.
struct SpacetimeBox {
  Eigen::Vector3d lo = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi = Eigen::Vector3d::Ones();
  double t0 = 0.0;
  double t1 = 1.0;

  /// Area (2D) or volume (3D) times duration.
  double measure(Dimension d) const;
  bool contains(const Eigen::Vector3d& r, double t, Dimension d) const;
};

struct GridSpec {
  double spacing = 0.25;
  double time_step = 0.25;
};

/// Spacing 1/20 of 2 pi / sqrt(k2), fine enough that the merge window rarely
/// swallows one of a close pair of events; time step so the typical vortex
/// moves about a spacing.
GridSpec default_grid(const SpectralMoments& m);

struct FinderOptions {
  double tolerance = 1e-9;    // on |f|, |g| relative to the field rms
  double tangency_tolerance = 1e-7;
  int max_iterations = 40;
  double trust_cells = 1.0;   // Newton step limit in grid cells per axis
  double max_drift_cells = 3.0;
  double merge_cells = 0.5;        // roots closer than this in space (cells)
  double merge_time_steps = 0.25;  // and in time (steps) are merged
};

enum class EventKind { birth, death, reconnection, pair_creation, pair_annihilation };
std::string to_string(EventKind k);

struct EventRecord {
  Eigen::Vector3d location = Eigen::Vector3d::Zero();
  double time = 0.0;
  EventKind kind = EventKind::reconnection;
  double f_residual = 0.0;
  double g_residual = 0.0;
  double tangency_residual = 0.0;  // |grad f x grad g| / (|grad f| |grad g|)
  int iterations = 0;
  /// 3D: relative curvature determinant (negative for reconnection).
  /// 2D: relative curvature times closing speed (negative for creation).
  double classifier = 0.0;
  bool counted_in_disc = false;  // 2D: classified by counting nearby zeros
  std::size_t realization = 0;
};

struct EventSearch {
  std::vector<EventRecord> events;  // sorted by (t, x, y, z)
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t duplicates = 0;
  std::size_t discarded = 0;
  std::size_t ambiguous = 0;  // distinct roots lost to merging
};

/// Tangency events f = g = 0, f_x g_y - f_y g_x = 0 inside the box.
EventSearch find_events_2d(const FieldRealization& field, const SpacetimeBox& box,
                           const GridSpec& grid, const FinderOptions& opt = {});

/// Tangency events f = g = 0, grad f x grad g = 0 inside the box.
EventSearch find_events_3d(const FieldRealization& field, const SpacetimeBox& box,
                           const GridSpec& grid, const FinderOptions& opt = {});

/// Number of vortex points in the box's xy-rectangle at time t, from the
/// phase winding around each plaquette of a grid with the given spacing.
std::size_t count_vortices_2d(const FieldRealization& field, const SpacetimeBox& box, double t,
                              double spacing);

struct SimulationConfig {
  std::size_t realizations = 50;
  std::size_t n_waves = 200;
  std::uint64_t seed = 0;
  SpacetimeBox box;
  GridSpec grid;
  FinderOptions finder;
  unsigned n_workers = 1;
  bool keep_events = true;
};

/// Box of `wavelengths` wavelengths 2 pi / sqrt(k2) per side and `periods`
/// times 2 pi / sigma_omega in duration (one unit of time if rigid).
SpacetimeBox default_box(const SpectralMoments& m, double wavelengths, double periods);

/// Defaults sized for statistically useful counts in a few minutes on one
/// core: 50 realizations of a 5-wavelength square over 2 periods in 2D, 8
/// realizations of a 2-wavelength cube over 1 period in 3D, 200 waves.
SimulationConfig default_simulation(const Spectrum& spectrum, std::uint64_t seed = 0);

struct SimulationReport {
  Dimension dimension = Dimension::three;
  std::size_t realizations = 0;
  double measure = 0.0;  // summed area (volume) times duration
  std::size_t reconnections = 0;
  std::size_t births = 0;
  std::size_t deaths = 0;
  std::size_t creations = 0;
  std::size_t annihilations = 0;
  std::size_t disc_classified = 0;
  EventRates rates;             // counts / measure
  double total_rate_stderr = 0.0;  // Poisson
  double reconnection_stderr = 0.0;
  double loop_stderr = 0.0;
  double loop_ratio = 0.0;  // (births + deaths) / reconnections
  double loop_ratio_stderr = 0.0;
  double vortex_density = 0.0;  // 2D, per unit area
  double vortex_density_stderr = 0.0;
  std::size_t seeds = 0;
  std::size_t duplicates = 0;
  std::size_t discarded = 0;
  std::size_t ambiguous = 0;
  std::vector<EventRecord> events;
};

/// Runs realizations in parallel; realization r uses a seed derived from
/// (seed, r), so the report does not depend on the worker count.
SimulationReport simulate(const Spectrum& spectrum, const SimulationConfig& cfg);

}  // namespace vortex
