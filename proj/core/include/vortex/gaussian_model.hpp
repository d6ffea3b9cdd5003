#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/spectra.hpp"

namespace vortex {

/// Single-point correlations of the field and its derivatives. The six
/// independent constants determine every entry of the correlation matrix.
struct CorrelationEntries {
  Dimension dimension = Dimension::three;
  double ff = 0.0;     // <f^2>
  double tt = 0.0;     // <f_t^2>
  double xx = 0.0;     // <f_xx^2>
  double fgt = 0.0;    // <f g_t>
  double ffxx = 0.0;   // <f f_xx>
  double ftgxx = 0.0;  // <f_t g_xx>

  double fx2() const { return -ffxx; }          // <f_x^2>
  double fxy2() const { return xx / 3.0; }      // <f_xy^2>
  double fxxfyy() const { return xx / 3.0; }    // <f_xx f_yy>

  /// Every entry keyed by a readable pair label such as "f_t g_xx". Entries
  /// that vanish by parity or phase averaging are included with value 0.
  std::map<std::string, double> labelled() const;
};

CorrelationEntries correlation_entries(const SpectralMoments& m);

/// Ordering (f, f_t, f_xx, g, g_t, g_xx).
struct CorrelationModel2D {
  enum Index { F = 0, FT, FXX, G, GT, GXX };
  SpectralMoments moments;
  CorrelationEntries entries;
  Eigen::Matrix<double, 6, 6> corr;
  Eigen::Matrix<double, 6, 6> gamma;  // inverse; NaN when degenerate
  double gamma_x = 0.0;               // 1 / <f_x^2>
  bool degenerate = false;            // zero frequency variance
};

/// Ordering (f, f_t, f_xx, f_yy, g, g_t, g_xx, g_yy).
struct CorrelationModel3D {
  enum Index { F = 0, FT, FXX, FYY, G, GT, GXX, GYY };
  SpectralMoments moments;
  CorrelationEntries entries;
  Eigen::Matrix<double, 8, 8> corr;
  Eigen::Matrix<double, 8, 8> Gamma;  // inverse; NaN when degenerate
  double Gamma_x = 0.0;               // 1 / <f_x^2>
  double Gamma_xy = 0.0;              // 1 / <f_xy^2>
  double a = 0.0;
  double b = 0.0;
  double D = 0.0;
  double Q = 0.0;
  bool degenerate = false;

  double Gxxxx() const { return Gamma(FXX, FXX); }
  double Gxxyy() const { return Gamma(FXX, FYY); }
  double Gtt() const { return Gamma(FT, FT); }
  double Gtxx() const { return Gamma(FT, GXX); }
};

/// Throws InvalidInput when the moments are invalid or the correlation
/// matrix is not positive definite for a reason other than a vanishing
/// frequency variance (which is flagged as degenerate instead).
CorrelationModel2D build_2d(const SpectralMoments& m);
CorrelationModel3D build_3d(const SpectralMoments& m);

/// Inverse entries in closed form.
struct InverseEntries2D {
  double g00, gtt, gxxxx, g0xx, g0t, gtxx, gx;
  double sqrt_det;  // square root of the correlation determinant
};

struct InverseEntries3D {
  double G00, Gtt, Gxxxx, Gxxyy, G0xx, G0t, Gtxx, Gx, Gxy;
  double sqrt_det;
};

InverseEntries2D closed_form_inverse_2d(const CorrelationEntries& e);
InverseEntries3D closed_form_inverse_3d(const CorrelationEntries& e);

/// One closed-form inverse entry that disagrees with the numeric inverse.
struct InverseDiscrepancy {
  std::string name;  // e.g. "Gamma_0_0"
  double closed_form;
  double numeric;
  double relative_error;
};

/// Compares every closed-form inverse entry with the numeric inverse and
/// returns those whose relative error exceeds rel_tol.
std::vector<InverseDiscrepancy> closed_form_discrepancies(const CorrelationModel2D& model,
                                                          double rel_tol = 1e-9);
std::vector<InverseDiscrepancy> closed_form_discrepancies(const CorrelationModel3D& model,
                                                          double rel_tol = 1e-9);

/// max |corr * inverse - I|.
double inverse_residual(const CorrelationModel2D& model);
double inverse_residual(const CorrelationModel3D& model);

/// sqrt(det Gamma) / D. Equals 1 / <f^2>.
double jacobi_ratio(const CorrelationModel3D& model);

}  // namespace vortex
