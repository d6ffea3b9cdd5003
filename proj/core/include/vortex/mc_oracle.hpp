#pragma once

#include <cstdint>
#include <optional>

#include "vortex/gaussian_model.hpp"

namespace vortex {

/// Samples are drawn in chunks of `batch`; chunk i uses an RNG stream derived
/// from (seed, i) and chunks are reduced in index order, so the estimate is
/// bitwise identical for every worker count.
struct McConfig {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned n_workers = 1;
  std::uint64_t batch = 1u << 16;
};

struct McSplit {
  double reconnection = 0.0;
  double reconnection_stderr = 0.0;
  double birth_death = 0.0;
  double birth_death_stderr = 0.0;
  // Loop-event sub-population split by the sign of f_z g_t - f_t g_z.
  double loops_positive_velocity = 0.0;
  double loops_positive_velocity_stderr = 0.0;
  double loops_negative_velocity = 0.0;
  double loops_negative_velocity_stderr = 0.0;
};

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t n = 0;
  std::optional<McSplit> split;  // 3D only
};

/// Pair-event rate: delta functions of f, g, f_x, g_x become density factors,
/// (f_t, f_xx, g_t, g_xx) are drawn conditioned on f = g = 0.
McEstimate mc_rate_2d(const CorrelationModel2D& model, const McConfig& cfg);

/// Total R + B + D with the saddle/bowl split by the sign of the relative
/// curvature determinant (negative means reconnection).
McEstimate mc_rate_3d(const CorrelationModel3D& model, const McConfig& cfg);

/// Coefficients of the local forms f = F_xx x^2/2 + F_y y + F_t t and the same
/// for g, in the frame where the contours touch along x.
struct LocalForm2D {
  double Fxx, Fy, Ft, Gxx, Gy, Gt;
};

/// f = (F_xx x^2 + 2 F_xy x y + F_yy y^2)/2 + F_z z + F_t t and likewise for g.
struct LocalForm3D {
  double Fxx, Fxy, Fyy, Fz, Ft, Gxx, Gxy, Gyy, Gz, Gt;
};

/// Weighted count of the tangency events of one rotated, translated copy of
/// the local form, averaged over rotations. Equals 1. Throws InvalidInput on
/// degenerate coefficients.
double normalization_check_2d(const LocalForm2D& c);
double normalization_check_3d(const LocalForm3D& c, int n_angle = 64);

struct AxisFixingReport {
  double gradient_lhs = 0.0;  // <|grad f|^2>
  double gradient_rhs = 0.0;  // pi p(f_x = 0) E|f_y|^3
  double density_closed = 0.0;  // <f_x^2> / (2 pi <f^2>)
  double density_pinned = 0.0;  // pi p(f)p(g)p(f_x) <f_y^2> <|g_x|>
  double density_mc = 0.0;
  double density_mc_stderr = 0.0;
};

AxisFixingReport axis_fixing_check(const CorrelationModel2D& model, const McConfig& cfg);

}  // namespace vortex
