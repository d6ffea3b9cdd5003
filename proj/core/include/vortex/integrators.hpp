#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <type_traits>

namespace vortex::integrate {

template <class T>
struct Result {
  T value{};
  double error = 0.0;  // |I_L - I_{L-1}| for the double-exponential rules
  std::size_t evaluations = 0;
  int levels = 0;
  bool converged = false;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

// Refines a trapezoid sum over t in [t_lo, t_hi] by halving h until two
// successive levels agree to max(abs_tol, rel_tol * |I|).
template <class T, class Node>
Result<T> refine(Node&& node, double t_lo, double t_hi, double abs_tol, double rel_tol,
                 int max_level, int min_level) {
  Result<T> r;
  double h = 1.0;
  T sum{};
  for (double t = 0.0; t <= t_hi; t += h) sum += node(t);
  for (double t = -h; t >= t_lo; t -= h) sum += node(t);
  r.evaluations = static_cast<std::size_t>(std::floor(t_hi) + std::floor(-t_lo) + 1);
  T prev = sum * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_hi; t += 2.0 * h) {
      sum += node(t);
      ++r.evaluations;
    }
    for (double t = -h; t >= t_lo; t -= 2.0 * h) {
      sum += node(t);
      ++r.evaluations;
    }
    const T cur = sum * h;
    r.error = magnitude(cur - prev);
    r.value = cur;
    r.levels = level;
    prev = cur;
    if (level >= min_level && r.error <= std::max(abs_tol, rel_tol * magnitude(cur))) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace detail

/// Tanh-sinh rule on [a, b]. Nodes cluster double-exponentially at both
/// endpoints, which are never evaluated.
template <class F>
auto tanh_sinh(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
               int max_level = 12) {
  using T = std::decay_t<decltype(f(a))>;
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  const double half = 0.5 * (b - a);
  auto node = [&](double t) -> T {
    const double u = kHalfPi * std::sinh(t);
    const double cu = std::cosh(u);
    const double w = half * kHalfPi * std::cosh(t) / (cu * cu);
    // distance to the nearer endpoint, computed without cancellation
    const double d = half * 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);
    if (d <= 0.0 || w == 0.0) return T{};
    const double x = t >= 0.0 ? b - d : a + d;
    return f(x) * w;
  };
  return detail::refine<T>(node, -4.0, 4.0, abs_tol, rel_tol, max_level, 3);
}

/// Exp-sinh rule on [0, inf) with x = scale * exp(pi/2 sinh t). Suited to
/// integrands decaying at least like x^-1.5.
template <class F>
auto exp_sinh(F&& f, double scale, double abs_tol, double rel_tol = 0.0, int max_level = 12) {
  using T = std::decay_t<decltype(f(scale))>;
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  auto node = [&](double t) -> T {
    const double x = scale * std::exp(kHalfPi * std::sinh(t));
    const double w = x * kHalfPi * std::cosh(t);
    if (x <= 0.0 || !std::isfinite(x) || !std::isfinite(w)) return T{};
    return f(x) * w;
  };
  return detail::refine<T>(node, -4.5, 3.7, abs_tol, rel_tol, max_level, 3);
}

namespace detail {

template <class T, class F>
T simpson_step(F& f, double a, double b, const T& fa, const T& fm, const T& fb,
               const T& whole, double tol, int depth, Result<T>& r) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  r.evaluations += 2;
  const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const T diff = left + right - whole;
  if (depth <= 0 || magnitude(diff) <= 15.0 * tol) {
    r.error += magnitude(diff) / 15.0;
    if (depth <= 0 && magnitude(diff) > 15.0 * tol) r.converged = false;
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, r) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, r);
}

}  // namespace detail

/// Adaptive Simpson rule with Richardson correction; error is the summed
/// local estimate.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
  using T = std::decay_t<decltype(f(a))>;
  Result<T> r;
  r.converged = true;
  const double m = 0.5 * (a + b);
  const T fa = f(a);
  const T fm = f(m);
  const T fb = f(b);
  r.evaluations = 3;
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  r.value = detail::simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, r);
  return r;
}

}  // namespace vortex::integrate
