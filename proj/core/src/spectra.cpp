#include "vortex/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vortex/error.hpp"

namespace vortex {

namespace {

constexpr double kRelTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidInput(std::string(name) + " must be finite and >= 0");
  }
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw InvalidInput(std::string(name) + " must be finite and > 0");
  }
}

void check_strictly_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.size() < 2) {
    throw InvalidInput(std::string(name) + " needs at least two points");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvalidInput(std::string(name) + " has non-finite entries");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidInput(std::string(name) + " must be strictly increasing");
    }
  }
}

void check_kind(const SpectrumKind& kind, Dimension dim) {
  std::visit(
      Overloaded{
          [](const Monochromatic& s) {
            require_finite_nonnegative(s.k0, "k0");
            if (!std::isfinite(s.omega0)) throw InvalidInput("omega0 must be finite");
          },
          [](const MonochromaticModulus& s) {
            require_finite_nonnegative(s.k0, "k0");
            if (!std::isfinite(s.omega0)) throw InvalidInput("omega0 must be finite");
          },
          [](const Blackbody& s) {
            require_positive(s.W, "W");
            require_positive(s.c, "c");
          },
          [](const RingMixture& s) {
            if (s.rings.empty()) throw InvalidInput("ring mixture is empty");
            bool any_positive = false;
            for (const Ring& r : s.rings) {
              require_finite_nonnegative(r.weight, "ring weight");
              require_finite_nonnegative(r.k, "ring wavenumber");
              if (!std::isfinite(r.omega)) throw InvalidInput("ring frequency must be finite");
              any_positive = any_positive || r.weight > 0.0;
            }
            if (!any_positive) throw InvalidInput("ring mixture has no positive weight");
          },
          [](const Tabulated& s) {
            check_strictly_increasing(s.omega_grid, "omega_grid");
            check_strictly_increasing(s.k_grid, "k_grid");
            if (s.k_grid.front() < 0.0) throw InvalidInput("k_grid must be >= 0");
            if (s.phi.size() != s.omega_grid.size()) {
              throw InvalidInput("phi must have one row per omega_grid entry");
            }
            bool any_positive = false;
            for (const auto& row : s.phi) {
              if (row.size() != s.k_grid.size()) {
                throw InvalidInput("phi rows must have one entry per k_grid entry");
              }
              for (double v : row) {
                require_finite_nonnegative(v, "phi");
                any_positive = any_positive || v > 0.0;
              }
            }
            if (!any_positive) throw InvalidInput("tabulated spectrum is identically zero");
          },
          [dim](const SpecialDispersion& s) {
            if (dim != Dimension::two) {
              throw InvalidInput("special_dispersion is a two-dimensional spectrum");
            }
            require_positive(s.k0, "k0");
            require_positive(s.c, "c");
          },
      },
      kind);
}

// Trapezoid moments over a tabulated (omega, k) grid.
SpectralMoments tabulated_moments(const Tabulated& t) {
  const std::size_t nw = t.omega_grid.size();
  const std::size_t nk = t.k_grid.size();
  double s0 = 0, sk2 = 0, sk4 = 0, sw1 = 0, sw2 = 0, swk2 = 0;
  for (std::size_t i = 0; i < nw; ++i) {
    const double dw_lo = i > 0 ? t.omega_grid[i] - t.omega_grid[i - 1] : 0.0;
    const double dw_hi = i + 1 < nw ? t.omega_grid[i + 1] - t.omega_grid[i] : 0.0;
    const double ww = 0.5 * (dw_lo + dw_hi);
    const double w = t.omega_grid[i];
    for (std::size_t j = 0; j < nk; ++j) {
      const double dk_lo = j > 0 ? t.k_grid[j] - t.k_grid[j - 1] : 0.0;
      const double dk_hi = j + 1 < nk ? t.k_grid[j + 1] - t.k_grid[j] : 0.0;
      const double mass = ww * 0.5 * (dk_lo + dk_hi) * t.phi[i][j];
      const double k = t.k_grid[j];
      const double kk = k * k;
      s0 += mass;
      sk2 += mass * kk;
      sk4 += mass * kk * kk;
      sw1 += mass * w;
      sw2 += mass * w * w;
      swk2 += mass * w * kk;
    }
  }
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw InvalidInput("tabulated spectrum is not normalizable on its grid");
  }
  SpectralMoments m;
  m.k2 = sk2 / s0;
  m.k4 = sk4 / s0;
  m.w1 = sw1 / s0;
  m.w2 = sw2 / s0;
  m.wk2 = swk2 / s0;
  return m;
}

// Mean of k^n for the density k^3 / (exp(c k / W) - 1), in units of (W/c)^n.
double blackbody_k_moment(int n) {
  return std::tgamma(n + 4.0) * std::riemann_zeta(n + 4.0) /
         (std::tgamma(4.0) * std::riemann_zeta(4.0));
}

}  // namespace

Dimension dimension_from_int(int d) {
  if (d == 2) return Dimension::two;
  if (d == 3) return Dimension::three;
  throw InvalidInput("dimension must be 2 or 3, got " + std::to_string(d));
}

Spectrum::Spectrum(SpectrumKind kind, Dimension dimension, double field_variance)
    : kind_(std::move(kind)), dimension_(dimension), field_variance_(field_variance) {
  require_positive(field_variance_, "field variance <f^2>");
  check_kind(kind_, dimension_);
}

std::string Spectrum::kind_name() const {
  return std::visit(Overloaded{
                        [](const Monochromatic&) { return std::string("monochromatic"); },
                        [](const MonochromaticModulus&) {
                          return std::string("monochromatic_modulus");
                        },
                        [](const Blackbody&) { return std::string("blackbody"); },
                        [](const RingMixture&) { return std::string("ring_mixture"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                        [](const SpecialDispersion&) {
                          return std::string("special_dispersion");
                        },
                    },
                    kind_);
}

double SpectralMoments::frequency_stddev() const {
  return std::sqrt(std::max(0.0, frequency_variance()));
}

SpectralMoments moments(const Spectrum& spectrum) {
  SpectralMoments m = std::visit(
      Overloaded{
          [](const Monochromatic& s) {
            SpectralMoments r;
            const double kk = s.k0 * s.k0;
            r.k2 = kk;
            r.k4 = kk * kk;
            r.w1 = s.omega0;
            r.w2 = s.omega0 * s.omega0;
            r.wk2 = s.omega0 * kk;
            return r;
          },
          [](const MonochromaticModulus& s) {
            SpectralMoments r;
            const double kk = s.k0 * s.k0;
            r.k2 = kk;
            r.k4 = kk * kk;
            r.w1 = 0.0;
            r.w2 = s.omega0 * s.omega0;
            r.wk2 = 0.0;
            return r;
          },
          [](const Blackbody& s) {
            SpectralMoments r;
            const double L = s.W / s.c;  // wavenumber scale
            r.k2 = blackbody_k_moment(2) * L * L;
            r.k4 = blackbody_k_moment(4) * L * L * L * L;
            r.w1 = s.c * blackbody_k_moment(1) * L;
            r.w2 = s.c * s.c * r.k2;
            r.wk2 = s.c * blackbody_k_moment(3) * L * L * L;
            return r;
          },
          [](const RingMixture& s) {
            double s0 = 0, sk2 = 0, sk4 = 0, sw1 = 0, sw2 = 0, swk2 = 0;
            for (const Ring& ring : s.rings) {
              const double kk = ring.k * ring.k;
              s0 += ring.weight;
              sk2 += ring.weight * kk;
              sk4 += ring.weight * kk * kk;
              sw1 += ring.weight * ring.omega;
              sw2 += ring.weight * ring.omega * ring.omega;
              swk2 += ring.weight * ring.omega * kk;
            }
            SpectralMoments r;
            r.k2 = sk2 / s0;
            r.k4 = sk4 / s0;
            r.w1 = sw1 / s0;
            r.w2 = sw2 / s0;
            r.wk2 = swk2 / s0;
            return r;
          },
          [](const Tabulated& s) { return tabulated_moments(s); },
          [](const SpecialDispersion& s) {
            // cos(theta) = u uniform on [-1, 1]; horizontal k^2 = k0^2 (1 - u^2),
            // omega = c k0 u.
            SpectralMoments r;
            const double kk = s.k0 * s.k0;
            r.k2 = 2.0 / 3.0 * kk;
            r.k4 = 8.0 / 15.0 * kk * kk;
            r.w1 = 0.0;
            r.w2 = s.c * s.c * kk / 3.0;
            r.wk2 = 0.0;
            return r;
          },
      },
      spectrum.kind());
  m.dimension = spectrum.dimension();
  m.f2 = spectrum.field_variance();
  return m;
}

ComponentMoments component_moments(const SpectralMoments& m) {
  if (m.dimension == Dimension::three) return {m.k2 / 3.0, m.k4 / 5.0};
  return {m.k2 / 2.0, 3.0 * m.k4 / 8.0};
}

double component_wk2(const SpectralMoments& m) {
  return m.dimension == Dimension::three ? m.wk2 / 3.0 : m.wk2 / 2.0;
}

std::vector<MomentViolation> validate(const SpectralMoments& m) {
  using Code = MomentViolation::Code;
  std::vector<MomentViolation> out;
  for (double v : {m.k2, m.k4, m.w1, m.w2, m.wk2, m.f2}) {
    if (!std::isfinite(v)) {
      out.push_back({Code::non_finite, "moments contain a non-finite value"});
      return out;
    }
  }
  if (!(m.k2 > 0.0) || !(m.k4 > 0.0)) {
    out.push_back({Code::negative_wavenumber_moment, "k2 and k4 must be > 0"});
  }
  const double w_scale = std::max(m.w2, m.w1 * m.w1);
  if (m.w2 - m.w1 * m.w1 < -kRelTol * w_scale) {
    std::ostringstream os;
    os << "frequency variance w2 - w1^2 = " << (m.w2 - m.w1 * m.w1) << " < 0";
    out.push_back({Code::negative_frequency_variance, os.str()});
  }
  // k4 >= k2^2 in both dimensions: 3D kx4 >= (9/5) kx2^2, 2D kx4 >= (3/2) kx2^2.
  if (m.k4 < m.k2 * m.k2 * (1.0 - kRelTol)) {
    const ComponentMoments c = component_moments(m);
    const double bound = m.dimension == Dimension::three ? 9.0 / 5.0 : 3.0 / 2.0;
    std::ostringstream os;
    os << "kx4 = " << c.kx4 << " below the isotropic bound " << bound << " * kx2^2 = "
       << bound * c.kx2 * c.kx2;
    out.push_back({Code::kurtosis_below_bound, os.str()});
  }
  if (!(m.f2 > 0.0)) {
    out.push_back({Code::nonpositive_field_variance, "<f^2> must be > 0"});
  }
  return out;
}

void require_valid(const SpectralMoments& m) {
  const auto violations = validate(m);
  if (violations.empty()) return;
  std::string msg = "invalid spectral moments:";
  for (const auto& v : violations) msg += " [" + v.detail + "]";
  throw InvalidInput(msg);
}

bool is_time_rigid(const SpectralMoments& m) {
  return m.frequency_variance() <= kRelTol * std::max(m.w2, m.w1 * m.w1);
}

}  // namespace vortex
