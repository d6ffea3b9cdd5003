#pragma once

#include <string>
#include <variant>
#include <vector>

namespace vortex {

enum class Dimension : int { two = 2, three = 3 };

constexpr int to_int(Dimension d) { return static_cast<int>(d); }
Dimension dimension_from_int(int d);

/// All waves share wavenumber k0 and angular frequency omega0.
struct Monochromatic {
  double k0 = 1.0;
  double omega0 = 1.0;
};

/// Wavenumber k0 with frequencies +omega0 and -omega0 in equal proportion.
struct MonochromaticModulus {
  double k0 = 1.0;
  double omega0 = 1.0;
};

/// Thermal spectrum omega k^2 / (exp(omega/W) - 1) dk on the dispersion
/// omega = c k. The same radial density is used in two and three dimensions.
struct Blackbody {
  double W = 1.0;
  double c = 1.0;
};

struct Ring {
  double weight = 0.0;  // intensity
  double k = 0.0;
  double omega = 0.0;
};

struct RingMixture {
  std::vector<Ring> rings;
};

/// Density Phi(omega_i, k_j) sampled on a rectilinear grid. Phi carries every
/// density factor already, so moments are plain trapezoid ratios over
/// d(omega) dk.
struct Tabulated {
  std::vector<double> omega_grid;
  std::vector<double> k_grid;
  std::vector<std::vector<double>> phi;  // phi[i][j] at (omega_grid[i], k_grid[j])
};

/// Two-dimensional waves on k_x^2 + k_y^2 + (omega/c)^2 = k0^2, i.e. a
/// snapshot-like projection of a three-dimensional monochromatic shell with
/// the vertical wavevector component read as omega/c.
struct SpecialDispersion {
  double k0 = 1.0;
  double c = 1.0;
};

using SpectrumKind =
    std::variant<Monochromatic, MonochromaticModulus, Blackbody, RingMixture, Tabulated,
                 SpecialDispersion>;

/// An isotropic, stationary power spectrum together with the field variance
/// <f^2> it is normalized to. Construction validates the parameters.
class Spectrum {
 public:
  Spectrum(SpectrumKind kind, Dimension dimension, double field_variance = 1.0);

  const SpectrumKind& kind() const { return kind_; }
  Dimension dimension() const { return dimension_; }
  double field_variance() const { return field_variance_; }
  std::string kind_name() const;

 private:
  SpectrumKind kind_;
  Dimension dimension_;
  double field_variance_;
};

/// Intensity-weighted, normalized moments of the spectrum.
struct SpectralMoments {
  Dimension dimension = Dimension::three;
  double k2 = 0.0;   // mean k^2
  double k4 = 0.0;   // mean k^4
  double w1 = 0.0;   // mean omega
  double w2 = 0.0;   // mean omega^2
  double wk2 = 0.0;  // mean omega k^2
  double f2 = 1.0;   // <f^2>

  double frequency_variance() const { return w2 - w1 * w1; }
  double frequency_stddev() const;
};

/// Moments of one Cartesian wavevector component.
struct ComponentMoments {
  double kx2 = 0.0;
  double kx4 = 0.0;
};

SpectralMoments moments(const Spectrum& spectrum);

ComponentMoments component_moments(const SpectralMoments& m);

/// Mean of omega k_x^2 (k2 and wk2 convert with the same isotropy factor).
double component_wk2(const SpectralMoments& m);

struct MomentViolation {
  enum class Code {
    non_finite,
    negative_wavenumber_moment,
    negative_frequency_variance,
    kurtosis_below_bound,
    nonpositive_field_variance,
  };
  Code code;
  std::string detail;
};

/// Empty iff every moment invariant holds (relative tolerance 1e-12).
std::vector<MomentViolation> validate(const SpectralMoments& m);

/// Throws InvalidInput listing every violation.
void require_valid(const SpectralMoments& m);

/// True when the frequency variance vanishes (relative to w2): the vortex
/// pattern is rigid and every event rate is exactly zero.
bool is_time_rigid(const SpectralMoments& m);

}  // namespace vortex
