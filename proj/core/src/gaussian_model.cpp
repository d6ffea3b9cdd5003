#include "vortex/gaussian_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vortex/error.hpp"

namespace vortex {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <int N>
void set_sym(Eigen::Matrix<double, N, N>& m, int i, int j, double v) {
  m(i, j) = v;
  m(j, i) = v;
}

template <int N>
bool positive_definite(const Eigen::Matrix<double, N, N>& m) {
  Eigen::LDLT<Eigen::Matrix<double, N, N>> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const auto d = ldlt.vectorD();
  const double scale = m.diagonal().cwiseAbs().maxCoeff();
  for (int i = 0; i < N; ++i) {
    if (!(d(i) > kPivotTol * scale)) return false;
  }
  return true;
}

double rel_err(double x, double ref) {
  const double scale = std::max(std::abs(ref), 1e-300);
  return std::abs(x - ref) / scale;
}

}  // namespace

std::map<std::string, double> CorrelationEntries::labelled() const {
  std::map<std::string, double> out;
  out["f f"] = ff;
  out["g g"] = ff;
  out["f_t f_t"] = tt;
  out["g_t g_t"] = tt;
  out["f_xx f_xx"] = xx;
  out["g_xx g_xx"] = xx;
  out["f f_xx"] = ffxx;
  out["g g_xx"] = ffxx;
  out["f g_t"] = fgt;
  out["f_t g"] = -fgt;
  out["f_t g_xx"] = ftgxx;
  out["f_xx g_t"] = -ftgxx;
  out["f_x f_x"] = fx2();
  out["g_x g_x"] = fx2();
  out["f_xy f_xy"] = fxy2();
  out["f g"] = 0.0;
  out["f f_t"] = 0.0;
  out["f_t f_xx"] = 0.0;
  out["f g_xx"] = 0.0;
  out["f_t g_t"] = 0.0;
  out["f_xx g_xx"] = 0.0;
  if (dimension == Dimension::three) {
    out["f_yy f_yy"] = xx;
    out["g_yy g_yy"] = xx;
    out["f_xx f_yy"] = fxxfyy();
    out["g_xx g_yy"] = fxxfyy();
    out["f f_yy"] = ffxx;
    out["g g_yy"] = ffxx;
    out["f_t g_yy"] = ftgxx;
    out["f_yy g_t"] = -ftgxx;
    out["f_y f_y"] = fx2();
    out["f_z f_z"] = fx2();
    out["f_xx g_yy"] = 0.0;
  }
  return out;
}

CorrelationEntries correlation_entries(const SpectralMoments& m) {
  const ComponentMoments c = component_moments(m);
  CorrelationEntries e;
  e.dimension = m.dimension;
  e.ff = m.f2;
  e.tt = m.f2 * m.w2;
  e.xx = m.f2 * c.kx4;
  e.fgt = -m.f2 * m.w1;
  e.ffxx = -m.f2 * c.kx2;
  e.ftgxx = -m.f2 * component_wk2(m);
  return e;
}

CorrelationModel2D build_2d(const SpectralMoments& m) {
  if (m.dimension != Dimension::two) throw InvalidInput("build_2d needs two-dimensional moments");
  require_valid(m);
  using M = CorrelationModel2D;
  M model;
  model.moments = m;
  model.entries = correlation_entries(m);
  const CorrelationEntries& e = model.entries;
  auto& C = model.corr;
  C.setZero();
  set_sym<6>(C, M::F, M::F, e.ff);
  set_sym<6>(C, M::G, M::G, e.ff);
  set_sym<6>(C, M::FT, M::FT, e.tt);
  set_sym<6>(C, M::GT, M::GT, e.tt);
  set_sym<6>(C, M::FXX, M::FXX, e.xx);
  set_sym<6>(C, M::GXX, M::GXX, e.xx);
  set_sym<6>(C, M::F, M::FXX, e.ffxx);
  set_sym<6>(C, M::G, M::GXX, e.ffxx);
  set_sym<6>(C, M::F, M::GT, e.fgt);
  set_sym<6>(C, M::FT, M::G, -e.fgt);
  set_sym<6>(C, M::FT, M::GXX, e.ftgxx);
  set_sym<6>(C, M::FXX, M::GT, -e.ftgxx);
  model.gamma_x = 1.0 / e.fx2();

  if (is_time_rigid(m)) {
    model.degenerate = true;
    model.gamma.setConstant(kNaN);
    return model;
  }
  if (!positive_definite<6>(C)) {
    throw InvalidInput("2D correlation matrix is not positive definite");
  }
  model.gamma = C.inverse();
  return model;
}

CorrelationModel3D build_3d(const SpectralMoments& m) {
  if (m.dimension != Dimension::three) {
    throw InvalidInput("build_3d needs three-dimensional moments");
  }
  require_valid(m);
  using M = CorrelationModel3D;
  M model;
  model.moments = m;
  model.entries = correlation_entries(m);
  const CorrelationEntries& e = model.entries;
  auto& C = model.corr;
  C.setZero();
  for (int base : {0, 4}) {
    set_sym<8>(C, base + M::F, base + M::F, e.ff);
    set_sym<8>(C, base + M::FT, base + M::FT, e.tt);
    set_sym<8>(C, base + M::FXX, base + M::FXX, e.xx);
    set_sym<8>(C, base + M::FYY, base + M::FYY, e.xx);
    set_sym<8>(C, base + M::FXX, base + M::FYY, e.fxxfyy());
    set_sym<8>(C, base + M::F, base + M::FXX, e.ffxx);
    set_sym<8>(C, base + M::F, base + M::FYY, e.ffxx);
  }
  set_sym<8>(C, M::F, M::GT, e.fgt);
  set_sym<8>(C, M::FT, M::G, -e.fgt);
  set_sym<8>(C, M::FT, M::GXX, e.ftgxx);
  set_sym<8>(C, M::FT, M::GYY, e.ftgxx);
  set_sym<8>(C, M::FXX, M::GT, -e.ftgxx);
  set_sym<8>(C, M::FYY, M::GT, -e.ftgxx);
  model.Gamma_x = 1.0 / e.fx2();
  model.Gamma_xy = 1.0 / e.fxy2();

  if (is_time_rigid(m)) {
    model.degenerate = true;
    model.Gamma.setConstant(kNaN);
    model.a = model.b = model.D = kNaN;
    model.Q = 0.0;
    return model;
  }
  if (!positive_definite<8>(C)) {
    throw InvalidInput("3D correlation matrix is not positive definite");
  }
  model.Gamma = C.inverse();
  const double sxx = model.Gxxxx() + model.Gxxyy();
  const double time_part = model.Gtt() * sxx - 2.0 * model.Gtxx() * model.Gtxx();
  model.a = model.Gxxxx() - model.Gxxyy();
  model.b = -(sxx - 2.0 * model.Gtxx() * model.Gtxx() / model.Gtt());
  model.D = time_part * model.a;
  model.Q = 3.0 * std::sqrt(model.Gamma_x) * std::sqrt(sxx) /
            (4.0 * std::pow(std::numbers::pi, 3) * e.ff * std::sqrt(time_part));
  return model;
}

InverseEntries2D closed_form_inverse_2d(const CorrelationEntries& e) {
  const double ff = e.ff, tt = e.tt, xx = e.xx, fgt = e.fgt, ffxx = e.ffxx, ftgxx = e.ftgxx;
  const double sd = ff * tt * xx - tt * ffxx * ffxx - xx * fgt * fgt - ff * ftgxx * ftgxx -
                    2.0 * ffxx * fgt * ftgxx;
  if (sd == 0.0 || !std::isfinite(sd)) throw InvalidInput("2D correlation determinant is zero");
  InverseEntries2D r{};
  r.g00 = (tt * xx - ftgxx * ftgxx) / sd;
  r.gtt = (ff * xx - ffxx * ffxx) / sd;
  r.gxxxx = (ff * tt - fgt * fgt) / sd;
  r.g0xx = (-tt * ffxx - fgt * ftgxx) / sd;
  r.g0t = (-xx * fgt - ffxx * ftgxx) / sd;
  r.gtxx = (-ffxx * fgt - ff * ftgxx) / sd;
  r.gx = -1.0 / ffxx;
  r.sqrt_det = sd;
  return r;
}

// Transcribed term by term; see closed_form_discrepancies for how these are
// checked against the numeric inverse.
InverseEntries3D closed_form_inverse_3d(const CorrelationEntries& e) {
  const double ff = e.ff, tt = e.tt, xx = e.xx, fgt = e.fgt, ffxx = e.ffxx, ftgxx = e.ftgxx;
  const double sd = 2.0 / 9.0 * xx *
                    (6.0 * tt * ffxx * ffxx + 12.0 * fgt * ffxx * ftgxx +
                     6.0 * ff * ftgxx * ftgxx + 4.0 * fgt * fgt * xx - 4.0 * ff * tt * xx);
  if (sd == 0.0 || !std::isfinite(sd)) throw InvalidInput("3D correlation determinant is zero");
  const double ff4 = ff * ff * ff * ff;
  const double den = 9.0 * sd;
  InverseEntries3D r{};
  r.G00 = 4.0 * ff4 * xx * (2.0 * tt * xx - 3.0 * ftgxx * ftgxx) / den;
  r.G0xx = 6.0 * ff4 * xx * (ffxx * tt + fgt * ftgxx) / den;
  r.G0t = 4.0 * ff4 * xx * (3.0 * ffxx * ftgxx + 2.0 * fgt * xx) / den;
  r.Gtt = 4.0 * ff4 * xx * (3.0 * ffxx * ffxx - 2.0 * ff * xx) / den;
  r.Gtxx = 6.0 * ff4 * xx * (fgt * ffxx + ff * ftgxx) / den;
  r.Gxxxx = 9.0 * ff4 *
            (tt * ffxx * ffxx + 2.0 * fgt * ffxx * ftgxx + ff * ftgxx * ftgxx +
             xx * (fgt * fgt - ff * tt)) /
            den;
  r.Gxxyy = -3.0 * ff4 *
            (3.0 * tt * ffxx * ffxx + 6.0 * fgt * ffxx * ftgxx + 3.0 * ff * ftgxx * ftgxx +
             xx * (fgt * fgt - ff * tt)) /
            den;
  r.Gx = -1.0 / ffxx;
  r.Gxy = 3.0 / xx;
  r.sqrt_det = sd;
  return r;
}

std::vector<InverseDiscrepancy> closed_form_discrepancies(const CorrelationModel2D& model,
                                                          double rel_tol) {
  std::vector<InverseDiscrepancy> out;
  if (model.degenerate) return out;
  using M = CorrelationModel2D;
  const InverseEntries2D r = closed_form_inverse_2d(model.entries);
  const auto& g = model.gamma;
  const double sqrt_det = std::sqrt(model.corr.determinant());
  const std::pair<const char*, std::pair<double, double>> items[] = {
      {"gamma_0_0", {r.g00, g(M::F, M::F)}},
      {"gamma_t_t", {r.gtt, g(M::FT, M::FT)}},
      {"gamma_xx_xx", {r.gxxxx, g(M::FXX, M::FXX)}},
      {"gamma_0_xx", {r.g0xx, g(M::F, M::FXX)}},
      {"gamma_0_t", {r.g0t, g(M::F, M::GT)}},
      {"gamma_t_xx", {r.gtxx, g(M::FT, M::GXX)}},
      {"gamma_x_x", {r.gx, model.gamma_x}},
      {"sqrt_det", {r.sqrt_det, sqrt_det}},
  };
  for (const auto& [name, v] : items) {
    const double err = rel_err(v.first, v.second);
    if (!(err <= rel_tol)) out.push_back({name, v.first, v.second, err});
  }
  return out;
}

std::vector<InverseDiscrepancy> closed_form_discrepancies(const CorrelationModel3D& model,
                                                          double rel_tol) {
  std::vector<InverseDiscrepancy> out;
  if (model.degenerate) return out;
  using M = CorrelationModel3D;
  const InverseEntries3D r = closed_form_inverse_3d(model.entries);
  const auto& G = model.Gamma;
  const double sqrt_det = std::sqrt(model.corr.determinant());
  const std::pair<const char*, std::pair<double, double>> items[] = {
      {"Gamma_0_0", {r.G00, G(M::F, M::F)}},
      {"Gamma_t_t", {r.Gtt, G(M::FT, M::FT)}},
      {"Gamma_xx_xx", {r.Gxxxx, G(M::FXX, M::FXX)}},
      {"Gamma_xx_yy", {r.Gxxyy, G(M::FXX, M::FYY)}},
      {"Gamma_0_xx", {r.G0xx, G(M::F, M::FXX)}},
      {"Gamma_0_t", {r.G0t, G(M::F, M::GT)}},
      {"Gamma_t_xx", {r.Gtxx, G(M::FT, M::GXX)}},
      {"Gamma_x_x", {r.Gx, model.Gamma_x}},
      {"Gamma_xy_xy", {r.Gxy, model.Gamma_xy}},
      {"sqrt_det", {r.sqrt_det, sqrt_det}},
  };
  for (const auto& [name, v] : items) {
    const double err = rel_err(v.first, v.second);
    if (!(err <= rel_tol)) out.push_back({name, v.first, v.second, err});
  }
  return out;
}

double inverse_residual(const CorrelationModel2D& model) {
  if (model.degenerate) return kNaN;
  return (model.corr * model.gamma - Eigen::Matrix<double, 6, 6>::Identity())
      .cwiseAbs()
      .maxCoeff();
}

double inverse_residual(const CorrelationModel3D& model) {
  if (model.degenerate) return kNaN;
  return (model.corr * model.Gamma - Eigen::Matrix<double, 8, 8>::Identity())
      .cwiseAbs()
      .maxCoeff();
}

double jacobi_ratio(const CorrelationModel3D& model) {
  return std::sqrt(model.Gamma.determinant()) / model.D;
}

}  // namespace vortex
