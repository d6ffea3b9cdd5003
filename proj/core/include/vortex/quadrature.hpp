#pragma once

#include <complex>
#include <cstddef>

#include "vortex/gaussian_model.hpp"
#include "vortex/rates.hpp"

namespace vortex {

enum class QuadratureRule { tanh_sinh, adaptive_simpson };
enum class ContourShift { up, down, principal };

/// Integration of the fused contour integrand along a line parallel to the
/// real axis. epsilon is relative to the singularity on the shifted side:
/// the line sits at Im v = epsilon * a (up) or Im v = -epsilon * |b| (down).
struct ContourSpec {
  double epsilon = 0.1;
  double cutoff = 0.0;     // |Re v| truncation; 0 picks one from the tail bound
  int n_points = 0;        // cap on nodes per segment; 0 means no cap
  QuadratureRule rule = QuadratureRule::tanh_sinh;
  double tolerance = 1e-8;  // absolute
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // refinement change plus truncated tail bound
  std::size_t evaluations = 0;
  double imaginary_part = 0.0;  // should vanish; reported for diagnostics
};

/// Up gives the reconnection rate, down the birth plus death rate, principal
/// their average (half the total rate). Throws InvalidInput if epsilon >= 1
/// (the line would cross the pole or the branch point) and NumericalFailure
/// if the cutoff leaves a tail larger than the tolerance.
QuadratureResult contour_integral(const ContourConstants& c, const ContourSpec& spec,
                                  ContourShift shift);

/// The integrand itself, with the square root continued from its value 1 at
/// v = 0 along the shifted line.
std::complex<double> contour_integrand(const ContourConstants& c, std::complex<double> v);

enum class ReducedForm {
  mu_r,        // two-fold integral over mu and r
  r_collapsed  // r integrated in closed form, one-fold over mu r^2
};

/// Total rate R + B + D from the reduced integral, evaluated directly from the
/// Gaussian integral over the eight free second-order variables at a fixed
/// angle theta of the pinned gradient pair (f_z, g_z).
QuadratureResult reduced_integral_3d(const CorrelationModel3D& model, double rel_tol = 1e-8,
                                     ReducedForm form = ReducedForm::mu_r, double theta = 0.3);

/// Pair-event rate from the two-fold (mu, mu') integral.
QuadratureResult reduced_integral_2d(const CorrelationModel2D& model, double rel_tol = 1e-7);

}  // namespace vortex
