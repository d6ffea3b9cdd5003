#include "vortex/field_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vortex/error.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct KOmega {
  double k;
  double omega;
};

// Draws (k, omega) in proportion to the spectrum's intensity.
class SpectrumSampler {
 public:
  explicit SpectrumSampler(const Spectrum& s) : spectrum_(s) {
    std::visit(Overloaded{
                   [&](const RingMixture& rm) {
                     std::vector<double> w;
                     for (const Ring& r : rm.rings) w.push_back(r.weight);
                     discrete_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
                   },
                   [&](const Blackbody&) {
                     // k^3 / (exp(k) - 1) = sum_n k^3 exp(-n k): Gamma(4, 1/n) with
                     // mixture weights proportional to 1/n^4
                     std::vector<double> w;
                     for (int n = 1; n <= 400; ++n) w.push_back(std::pow(n, -4.0));
                     discrete_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
                   },
                   [&](const Tabulated& tb) {
                     std::vector<double> w;
                     for (std::size_t i = 0; i + 1 < tb.omega_grid.size(); ++i) {
                       for (std::size_t j = 0; j + 1 < tb.k_grid.size(); ++j) {
                         const double area = (tb.omega_grid[i + 1] - tb.omega_grid[i]) *
                                             (tb.k_grid[j + 1] - tb.k_grid[j]);
                         w.push_back(area * 0.25 *
                                     (tb.phi[i][j] + tb.phi[i + 1][j] + tb.phi[i][j + 1] +
                                      tb.phi[i + 1][j + 1]));
                       }
                     }
                     discrete_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
                   },
                   [](const auto&) {},
               },
               spectrum_.kind());
  }

  KOmega operator()(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return std::visit(
        Overloaded{
            [&](const Monochromatic& s) { return KOmega{s.k0, s.omega0}; },
            [&](const MonochromaticModulus& s) {
              return KOmega{s.k0, uni(rng) < 0.5 ? s.omega0 : -s.omega0};
            },
            [&](const Blackbody& s) {
              const double n = static_cast<double>(discrete_(rng) + 1);
              std::gamma_distribution<double> gam(4.0, 1.0 / n);
              const double k = gam(rng) * s.W / s.c;
              return KOmega{k, s.c * k};
            },
            [&](const RingMixture& rm) {
              const Ring& r = rm.rings[discrete_(rng)];
              return KOmega{r.k, r.omega};
            },
            [&](const Tabulated& tb) {
              const std::size_t cell = discrete_(rng);
              const std::size_t nk = tb.k_grid.size() - 1;
              const std::size_t i = cell / nk, j = cell % nk;
              const double w = tb.omega_grid[i] + uni(rng) * (tb.omega_grid[i + 1] - tb.omega_grid[i]);
              const double k = tb.k_grid[j] + uni(rng) * (tb.k_grid[j + 1] - tb.k_grid[j]);
              return KOmega{k, w};
            },
            [&](const SpecialDispersion& s) {
              const double u = 2.0 * uni(rng) - 1.0;
              return KOmega{s.k0 * std::sqrt(std::max(0.0, 1.0 - u * u)), s.c * s.k0 * u};
            },
        },
        spectrum_.kind());
  }

 private:
  const Spectrum& spectrum_;
  std::discrete_distribution<std::size_t> discrete_;
};

}  // namespace

FieldRealization::FieldRealization(Dimension dimension, std::vector<PlaneWave> waves,
                                   std::uint64_t seed)
    : dimension_(dimension), waves_(std::move(waves)), seed_(seed) {
  if (dimension_ == Dimension::two) {
    for (auto& w : waves_) w.k(2) = 0.0;
  }
}

double FieldRealization::field_variance() const {
  double s = 0.0;
  for (const auto& w : waves_) s += 0.5 * w.amplitude * w.amplitude;
  return s;
}

std::complex<double> FieldRealization::psi(const Eigen::Vector3d& r, double t) const {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& w : waves_) acc += std::polar(w.amplitude, w.k.dot(r) - w.omega * t + w.phase);
  return acc;
}

FieldJet FieldRealization::jet(const Eigen::Vector3d& r, double t) const {
  FieldJet j;
  for (const auto& w : waves_) {
    const double chi = w.k.dot(r) - w.omega * t + w.phase;
    const double ac = w.amplitude * std::cos(chi);
    const double as = w.amplitude * std::sin(chi);
    j.f += ac;
    j.g += as;
    j.grad_f -= as * w.k;
    j.grad_g += ac * w.k;
    j.ft += w.omega * as;
    j.gt -= w.omega * ac;
    const Eigen::Matrix3d kk = w.k * w.k.transpose();
    j.hess_f -= ac * kk;
    j.hess_g -= as * kk;
    j.grad_ft += (w.omega * ac) * w.k;
    j.grad_gt += (w.omega * as) * w.k;
  }
  return j;
}

FieldRealization FieldRealization::phase_rotated(double alpha) const {
  std::vector<PlaneWave> w = waves_;
  for (auto& p : w) p.phase += alpha;
  return FieldRealization(dimension_, std::move(w), seed_);
}

FieldRealization synthesize(const Spectrum& spectrum, std::size_t n_waves, std::uint64_t seed) {
  if (n_waves < 2) throw InvalidInput("synthesize needs at least two plane waves");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SpectrumSampler sampler(spectrum);
  const Dimension dim = spectrum.dimension();
  const double amp = std::sqrt(2.0 * spectrum.field_variance() / static_cast<double>(n_waves));
  std::vector<PlaneWave> waves;
  waves.reserve(n_waves);
  for (std::size_t i = 0; i < n_waves; ++i) {
    const KOmega ko = sampler(rng);
    Eigen::Vector3d n;
    if (dim == Dimension::two) {
      const double a = 2.0 * kPi * uni(rng);
      n << std::cos(a), std::sin(a), 0.0;
    } else {
      const double u = 2.0 * uni(rng) - 1.0;
      const double a = 2.0 * kPi * uni(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      n << s * std::cos(a), s * std::sin(a), u;
    }
    PlaneWave w;
    w.amplitude = amp;
    w.k = ko.k * n;
    w.omega = ko.omega;
    w.phase = 2.0 * kPi * uni(rng);
    waves.push_back(w);
  }
  return FieldRealization(dim, std::move(waves), seed);
}

double SpacetimeBox::measure(Dimension d) const {
  double m = (hi(0) - lo(0)) * (hi(1) - lo(1)) * (t1 - t0);
  if (d == Dimension::three) m *= hi(2) - lo(2);
  return m;
}

bool SpacetimeBox::contains(const Eigen::Vector3d& r, double t, Dimension d) const {
  const int n = d == Dimension::three ? 3 : 2;
  for (int i = 0; i < n; ++i) {
    if (r(i) < lo(i) || r(i) >= hi(i)) return false;
  }
  return t >= t0 && t < t1;
}

GridSpec default_grid(const SpectralMoments& m) {
  const double wavelength = 2.0 * kPi / std::sqrt(m.k2);
  GridSpec g;
  g.spacing = wavelength / 20.0;
  const double sigma = m.frequency_stddev();
  // vortex speeds are of order sigma / sqrt(k2)
  g.time_step = sigma > 0.0 ? g.spacing * std::sqrt(m.k2) / sigma : 1.0;
  return g;
}

SpacetimeBox default_box(const SpectralMoments& m, double wavelengths, double periods) {
  const double wavelength = 2.0 * kPi / std::sqrt(m.k2);
  const double sigma = m.frequency_stddev();
  SpacetimeBox b;
  b.lo.setZero();
  b.hi = Eigen::Vector3d::Constant(wavelengths * wavelength);
  if (m.dimension == Dimension::two) b.hi(2) = 0.0;
  b.t0 = 0.0;
  b.t1 = sigma > 0.0 ? periods * 2.0 * kPi / sigma : 1.0;
  return b;
}

SimulationConfig default_simulation(const Spectrum& spectrum, std::uint64_t seed) {
  const SpectralMoments m = moments(spectrum);
  SimulationConfig cfg;
  cfg.seed = seed;
  cfg.grid = default_grid(m);
  if (spectrum.dimension() == Dimension::two) {
    cfg.realizations = 50;
    cfg.box = default_box(m, 5.0, 2.0);
  } else {
    cfg.realizations = 8;
    cfg.box = default_box(m, 2.0, 1.0);
  }
  return cfg;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::birth: return "birth";
    case EventKind::death: return "death";
    case EventKind::reconnection: return "reconnection";
    case EventKind::pair_creation: return "pair_creation";
    case EventKind::pair_annihilation: return "pair_annihilation";
  }
  return "unknown";
}

}  // namespace vortex
