#include "vortex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "vortex/error.hpp"
#include "vortex/integrators.hpp"

namespace vortex {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// log(1 + z) without cancellation for small |z|.
cplx log1p_c(cplx z) {
  const double re = z.real();
  const double im = z.imag();
  const double mod2m1 = 2.0 * re + re * re + im * im;  // |1 + z|^2 - 1
  return {0.5 * std::log1p(mod2m1), std::atan2(im, 1.0 + re)};
}

// Re(exp(z) - 1) without cancellation for small |z|.
double re_expm1_c(cplx z) {
  const double s = std::sin(0.5 * z.imag());
  return std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s;
}

int level_cap(int n_points) {
  if (n_points <= 0) return 12;
  // a tanh-sinh level L uses about 8 * 2^L + 1 nodes
  int level = 3;
  while (level < 12 && 8 * (1 << (level + 1)) + 1 <= n_points) ++level;
  return level;
}

struct LineIntegral {
  cplx value;
  double error = 0.0;
  std::size_t evaluations = 0;
};

LineIntegral integrate_line(const ContourConstants& c, const ContourSpec& spec, double delta,
                            double cutoff) {
  auto f = [&](double x) { return contour_integrand(c, cplx(x, delta)); };
  const double s = 20.0 * std::max({c.a, std::abs(c.b), std::abs(delta)});
  std::vector<std::pair<double, double>> segments;
  if (cutoff <= s) {
    segments = {{-cutoff, 0.0}, {0.0, cutoff}};
  } else {
    segments = {{-cutoff, -s}, {-s, 0.0}, {0.0, s}, {s, cutoff}};
  }
  const double seg_tol = 0.1 * spec.tolerance / static_cast<double>(segments.size());
  LineIntegral out;
  for (const auto& [lo, hi] : segments) {
    if (spec.rule == QuadratureRule::tanh_sinh) {
      auto r = integrate::tanh_sinh(f, lo, hi, seg_tol, 0.0, level_cap(spec.n_points));
      out.value += r.value;
      out.error += r.error;
      out.evaluations += r.evaluations;
    } else {
      auto r = integrate::adaptive_simpson(f, lo, hi, seg_tol, 40);
      out.value += r.value;
      out.error += r.error;
      out.evaluations += r.evaluations;
    }
  }
  return out;
}

}  // namespace

cplx contour_integrand(const ContourConstants& c, cplx v) {
  // Bracket 1 - 1/z with z = (1 - v/(ia)) sqrt(1 - v/(ib)), kept fused as
  // (z - 1)/z and with z - 1 expanded so that no cancellation occurs near 0.
  const cplx ia = kI * c.a;
  const cplx ib = kI * c.b;
  const cplx q = 1.0 - v / ib;
  // On a line Im v = delta with delta > b, Re q = 1 - delta/b > 0, so the
  // principal root is the continuation of the root from v = 0.
  const cplx s = std::sqrt(q);
  const cplx zm1 = (-v / ia) * s + (-v / ib) / (s + 1.0);
  const cplx z = 1.0 + zm1;
  return 0.5 * c.Q * zm1 / (z * v * v);
}

QuadratureResult contour_integral(const ContourConstants& c, const ContourSpec& spec,
                                  ContourShift shift) {
  QuadratureResult res;
  if (c.degenerate || c.Q == 0.0) return res;
  if (!(c.a > 0.0) || !(c.b < 0.0)) throw InvalidInput("contour integral needs a > 0 and b < 0");
  if (!(spec.epsilon > 0.0) || !(spec.epsilon < 1.0)) {
    throw InvalidInput("contour offset epsilon must lie in (0, 1); the line would cross a "
                       "singularity");
  }
  if (!(spec.tolerance > 0.0)) throw InvalidInput("contour tolerance must be > 0");

  // Beyond |Re v| = X the bracket is 1 - O(|v|^-3/2); the 1/v^2 part is added
  // exactly and the rest is bounded by tail_bound(X).
  const double tail_coef = c.Q * c.a * std::sqrt(std::abs(c.b)) / 2.5;
  auto tail_bound = [&](double X) { return tail_coef * std::pow(X, -2.5); };
  double X = spec.cutoff;
  if (X <= 0.0) {
    X = std::pow(tail_coef / (0.1 * spec.tolerance), 0.4);
    X = std::max(X, 50.0 * std::max(c.a, std::abs(c.b)));
  }
  const double tail_err = tail_bound(X);
  if (tail_err > spec.tolerance) {
    throw NumericalFailure("contour cutoff too small: tail bound exceeds tolerance");
  }

  auto one_line = [&](double delta) {
    LineIntegral li = integrate_line(c, spec, delta, X);
    li.value += c.Q * X / (X * X + delta * delta);
    li.error += tail_err;
    return li;
  };

  if (shift == ContourShift::principal) {
    const LineIntegral up = one_line(spec.epsilon * c.a);
    const LineIntegral down = one_line(-spec.epsilon * std::abs(c.b));
    res.value = 0.5 * (up.value.real() + down.value.real());
    res.imaginary_part = 0.5 * (up.value.imag() + down.value.imag());
    res.error_estimate = 0.5 * (up.error + down.error);
    res.evaluations = up.evaluations + down.evaluations;
    return res;
  }
  const double delta =
      shift == ContourShift::up ? spec.epsilon * c.a : -spec.epsilon * std::abs(c.b);
  const LineIntegral li = one_line(delta);
  res.value = li.value.real();
  res.imaginary_part = li.value.imag();
  res.error_estimate = li.error;
  res.evaluations = li.evaluations;
  return res;
}

namespace {

// Spectrum of the whitened phase matrix and projected velocity vector of the
// reduced three-dimensional integral at one angle of the pinned gradients.
struct Reduced3DSetup {
  Eigen::Matrix<double, 8, 1> kappa;
  Eigen::Matrix<double, 8, 1> c2;  // squared components of the whitened vector
  double S0 = 0.0;
  double K = 0.0;  // T(0, r) / r
  double kappa_max = 0.0;
};

Reduced3DSetup setup_reduced_3d(const CorrelationModel3D& model, double theta) {
  using M = CorrelationModel3D;
  enum { FT = 0, FXX, FYY, GT, GXX, GYY, FXY, GXY };
  const int idx[6] = {M::FT, M::FXX, M::FYY, M::GT, M::GXX, M::GYY};
  Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Zero();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) A(i, j) = model.Gamma(idx[i], idx[j]);
  }
  A(FXY, FXY) = model.Gamma_xy;
  A(GXY, GXY) = model.Gamma_xy;

  const double fz = std::cos(theta);
  const double gz = std::sin(theta);
  Eigen::Matrix<double, 8, 1> p = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 1> r = p, s = p, w = p;
  p(GXX) = fz;  // f_z g_xx - f_xx g_z
  p(FXX) = -gz;
  r(GYY) = fz;  // f_z g_yy - f_yy g_z
  r(FYY) = -gz;
  s(GXY) = fz;  // f_z g_xy - f_xy g_z
  s(FXY) = -gz;
  w(FT) = -gz;  // f_z g_t - f_t g_z
  w(GT) = fz;
  const Eigen::Matrix<double, 8, 8> C =
      p * r.transpose() + r * p.transpose() - 2.0 * s * s.transpose();

  Eigen::LLT<Eigen::Matrix<double, 8, 8>> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalFailure("reduced integral: A not positive");
  const Eigen::Matrix<double, 8, 8> L = llt.matrixL();
  const Eigen::Matrix<double, 8, 8> Linv = L.inverse();
  const Eigen::Matrix<double, 8, 8> Ct = Linv * C * Linv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> eig(0.5 * (Ct + Ct.transpose()));
  Reduced3DSetup out;
  out.kappa = eig.eigenvalues();
  const Eigen::Matrix<double, 8, 1> cv = eig.eigenvectors().transpose() * (Linv * w);
  out.c2 = cv.array().square();
  out.S0 = out.c2.sum();
  const double sqrt_det_A = L.diagonal().prod();
  out.K = std::pow(2.0 * kPi, 4) / sqrt_det_A * std::sqrt(2.0 / kPi) * std::sqrt(out.S0);
  out.kappa_max = out.kappa.cwiseAbs().maxCoeff();
  return out;
}

// -Re(T(x)/T(0) - 1) / x^2 as a function of x = mu r^2.
double reduced_kernel_3d(const Reduced3DSetup& st, double x) {
  cplx dS{0.0, 0.0};
  cplx logdet{0.0, 0.0};
  for (int j = 0; j < 8; ++j) {
    const double k = st.kappa(j);
    if (std::abs(k) <= 1e-14 * st.kappa_max) continue;
    const double y = x * k;
    // i y / (1 - i y) = (i y - y^2) / (1 + y^2)
    dS += st.c2(j) * cplx(-y * y, y) / (1.0 + y * y);
    logdet += log1p_c(cplx(0.0, -y));
  }
  const cplx L = 0.5 * log1p_c(dS / st.S0) - 0.5 * logdet;
  return -re_expm1_c(L) / (x * x);
}

}  // namespace

QuadratureResult reduced_integral_3d(const CorrelationModel3D& model, double rel_tol,
                                     ReducedForm form, double theta) {
  QuadratureResult res;
  if (model.degenerate) return res;
  const Reduced3DSetup st = setup_reduced_3d(model, theta);
  const double Gx = model.Gamma_x;
  const double pref = 2.0 * kPi * Gx * Gx * Gx * model.Gamma_xy *
                      std::sqrt(model.Gamma.determinant()) / std::pow(2.0 * kPi, 8);
  const double xscale = 1.0 / st.kappa_max;

  if (form == ReducedForm::r_collapsed) {
    auto J = integrate::exp_sinh([&](double x) { return reduced_kernel_3d(st, x); }, xscale, 0.0,
                                 0.1 * rel_tol);
    const double r_moment = 2.0 * kPi * 3.0 * std::sqrt(kPi / 2.0) * std::pow(Gx, -2.5);
    const double factor = pref * (2.0 / kPi) * st.K * r_moment;
    res.value = factor * J.value;
    res.error_estimate = std::abs(factor) * J.error;
    res.evaluations = J.evaluations;
    return res;
  }

  std::size_t evals = 0;
  double worst_inner_rel = 0.0;
  auto inner = [&](double r) {
    const double r2 = r * r;
    auto g = [&](double mu) { return reduced_kernel_3d(st, mu * r2) * r2 * r2; };
    auto res_mu = integrate::exp_sinh(g, xscale / r2, 0.0, 0.05 * rel_tol);
    evals += res_mu.evaluations;
    if (res_mu.value != 0.0) {
      worst_inner_rel = std::max(worst_inner_rel, res_mu.error / std::abs(res_mu.value));
    }
    return (2.0 / kPi) * st.K * r * res_mu.value;
  };
  auto outer = [&](double r) {
    const double e = std::exp(-0.5 * Gx * r * r);
    if (e == 0.0) return 0.0;
    return e * inner(r) * 2.0 * kPi * r;
  };
  auto R = integrate::exp_sinh(outer, 1.0 / std::sqrt(Gx), 0.0, rel_tol);
  res.value = pref * R.value;
  res.error_estimate = std::abs(pref) * R.error + std::abs(res.value) * worst_inner_rel;
  res.evaluations = evals;
  return res;
}

QuadratureResult reduced_integral_2d(const CorrelationModel2D& model, double rel_tol) {
  QuadratureResult res;
  if (model.degenerate) return res;
  using M = CorrelationModel2D;
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  enum { FY = 0, GY, FT, FXX, GT, GXX };
  const int idx[4] = {M::FT, M::FXX, M::GT, M::GXX};
  Mat6 A = Mat6::Zero();
  A(FY, FY) = model.gamma_x;
  A(GY, GY) = model.gamma_x;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) A(2 + i, 2 + j) = model.gamma(idx[i], idx[j]);
  }
  auto add_sym = [](Mat6& m, int i, int j, double v) {
    m(i, j) += v;
    m(j, i) += v;
  };
  Mat6 C1 = Mat6::Zero();  // f_y g_t - f_t g_y
  add_sym(C1, FY, GT, 1.0);
  add_sym(C1, FT, GY, -1.0);
  Mat6 C2 = Mat6::Zero();  // f_xx g_y - f_y g_xx
  add_sym(C2, FXX, GY, 1.0);
  add_sym(C2, FY, GXX, -1.0);

  Eigen::LLT<Mat6> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalFailure("reduced 2D integral: A not positive");
  const Mat6 L = llt.matrixL();
  const Mat6 Linv = L.inverse();
  Mat6 C1t = Linv * C1 * Linv.transpose();
  Mat6 C2t = Linv * C2 * Linv.transpose();
  Eigen::SelfAdjointEigenSolver<Mat6> e1(C1t, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat6> e2(C2t, Eigen::EigenvaluesOnly);
  const double s1 = e1.eigenvalues().cwiseAbs().maxCoeff();
  const double s2 = e2.eigenvalues().cwiseAbs().maxCoeff();
  C1t /= s1;
  C2t /= s2;
  const Eigen::Matrix<double, 6, 1> k1 = e1.eigenvalues() / s1;
  const Eigen::Matrix<double, 6, 1> k2 = e2.eigenvalues() / s2;

  auto log_t = [](const Eigen::Matrix<double, 6, 1>& kap) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j < 6; ++j) acc += log1p_c(cplx(0.0, -kap(j)));
    return -0.5 * acc;
  };
  // Below this the mixed second difference loses digits to rounding; the
  // integrand is even and smooth in both variables, so it is frozen there.
  constexpr double kFloor = 3e-4;
  std::size_t evals = 0;
  auto G = [&](double mu, double mup) {
    mu = std::max(mu, kFloor);
    mup = std::max(mup, kFloor);
    const double e10 = re_expm1_c(log_t(mu * k2));
    const double e01 = re_expm1_c(log_t(mup * k1));
    Eigen::SelfAdjointEigenSolver<Mat6> ep(mup * C1t + mu * C2t, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat6> em(-mup * C1t + mu * C2t, Eigen::EigenvaluesOnly);
    evals += 1;
    // L(mu, -mu') for the first factor pairs with L(0, -mu'), whose real part
    // equals that of L(0, mu').
    const double sum = re_expm1_c(log_t(ep.eigenvalues())) +
                       re_expm1_c(log_t(em.eigenvalues())) - 2.0 * e10 - 2.0 * e01;
    return sum / (mu * mu * mup * mup);
  };
  double worst_inner_rel = 0.0;
  auto inner = [&](double mu) {
    auto r = integrate::exp_sinh([&](double mup) { return G(mu, mup); }, 1.0, 0.0,
                                 0.05 * rel_tol);
    if (r.value != 0.0) worst_inner_rel = std::max(worst_inner_rel, r.error / std::abs(r.value));
    return r.value;
  };
  auto outer = integrate::exp_sinh(inner, 1.0, 0.0, rel_tol);
  const double T00 = std::pow(2.0 * kPi, 3) / L.diagonal().prod();
  const double pref = kPi * model.gamma_x * model.gamma_x *
                      std::sqrt(model.gamma.determinant()) / std::pow(2.0 * kPi, 5) * T00 *
                      (2.0 / (kPi * kPi)) * s1 * s2;
  res.value = pref * outer.value;
  // the frozen corner contributes a bias of order kFloor^2 relative
  res.error_estimate = std::abs(pref) * outer.error +
                       std::abs(res.value) * (worst_inner_rel + kFloor * kFloor);
  res.evaluations = evals;
  return res;
}

}  // namespace vortex
