#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "vortex/error.hpp"
#include "vortex/field_sim.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;
// roots closer than this many cells are the same root seen from two seeds
constexpr double kSameRoot = 1e-3;

// Regular grid of nodes origin + h * (i, j, m).
struct Lattice {
  Eigen::Vector3d origin;
  double h = 0.0;
  int n[3] = {1, 1, 1};
  std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int m) const {
    return (static_cast<std::size_t>(m) * n[1] + j) * n[0] + i;
  }
};

// psi at every lattice node at time t, accumulated one wave at a time from
// per-axis phasors.
void evaluate_slice(const FieldRealization& field, const Lattice& lat, double t,
                    std::vector<cplx>& out) {
  out.assign(lat.size(), cplx(0.0, 0.0));
  std::vector<cplx> ex(lat.n[0]), ey(lat.n[1]), ez(lat.n[2]);
  for (const PlaneWave& w : field.waves()) {
    for (int i = 0; i < lat.n[0]; ++i) ex[i] = std::polar(1.0, w.k(0) * (lat.origin(0) + lat.h * i));
    for (int j = 0; j < lat.n[1]; ++j) ey[j] = std::polar(1.0, w.k(1) * (lat.origin(1) + lat.h * j));
    for (int m = 0; m < lat.n[2]; ++m) ez[m] = std::polar(1.0, w.k(2) * (lat.origin(2) + lat.h * m));
    const cplx base = std::polar(w.amplitude, w.phase - w.omega * t);
    for (int m = 0; m < lat.n[2]; ++m) {
      const cplx bz = base * ez[m];
      for (int j = 0; j < lat.n[1]; ++j) {
        const cplx byz = bz * ey[j];
        cplx* row = out.data() + lat.index(0, j, m);
        for (int i = 0; i < lat.n[0]; ++i) row[i] += byz * ex[i];
      }
    }
  }
}

std::uint8_t sign_bits(cplx z) {
  return static_cast<std::uint8_t>((z.real() > 0.0 ? 1 : 0) | (z.imag() > 0.0 ? 2 : 0));
}

double tangency(const FieldJet& j) {
  const double nf = j.grad_f.norm(), ng = j.grad_g.norm();
  if (nf == 0.0 || ng == 0.0) return 1.0;
  return j.grad_f.cross(j.grad_g).norm() / (nf * ng);
}

struct Candidate {
  Eigen::Vector3d r;
  double t;
  FieldJet jet;
  int iterations;
  double quality;  // smaller is better
};

// Damped Newton for the tangency system from one seed. Unknowns are
// (x, y, t) in 2D and (x, y, z, t) in 3D.
template <int N>
bool newton_tangency(const FieldRealization& field, Eigen::Vector3d r, double t,
                     const GridSpec& grid, const FinderOptions& opt, double rms,
                     Candidate& out) {
  Eigen::Matrix<double, N, 1> scale;
  for (int i = 0; i < N - 1; ++i) scale(i) = grid.spacing;
  scale(N - 1) = grid.time_step;
  const Eigen::Vector3d r0 = r;
  const double t0 = t;
  FieldJet j = field.jet(r, t);
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const double tan_res = tangency(j);
    if (std::abs(j.f) <= opt.tolerance * rms && std::abs(j.g) <= opt.tolerance * rms &&
        tan_res <= opt.tangency_tolerance) {
      out = {r, t, j, it, std::max(std::abs(j.f), std::abs(j.g)) / rms + tan_res};
      return true;
    }
    if (it == opt.max_iterations) break;
    Eigen::Matrix<double, N, 1> F;
    Eigen::Matrix<double, N, N> Jac;
    if constexpr (N == 3) {
      const double fx = j.grad_f(0), fy = j.grad_f(1), gx = j.grad_g(0), gy = j.grad_g(1);
      const auto& Hf = j.hess_f;
      const auto& Hg = j.hess_g;
      F << j.f, j.g, fx * gy - fy * gx;
      Jac << fx, fy, j.ft, gx, gy, j.gt,
          Hf(0, 0) * gy + fx * Hg(1, 0) - Hf(1, 0) * gx - fy * Hg(0, 0),
          Hf(0, 1) * gy + fx * Hg(1, 1) - Hf(1, 1) * gx - fy * Hg(0, 1),
          j.grad_ft(0) * gy + fx * j.grad_gt(1) - j.grad_ft(1) * gx - fy * j.grad_gt(0);
    } else {
      // drop the cross-product component along the largest gradient component;
      // the three satisfy grad f . (grad f x grad g) = 0
      int drop = 0;
      j.grad_f.cwiseAbs().maxCoeff(&drop);
      const Eigen::Vector3d c = j.grad_f.cross(j.grad_g);
      int rows[2], nr = 0;
      for (int i = 0; i < 3; ++i) {
        if (i != drop) rows[nr++] = i;
      }
      F(0) = j.f;
      F(1) = j.g;
      Jac.row(0) << j.grad_f.transpose(), j.ft;
      Jac.row(1) << j.grad_g.transpose(), j.gt;
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector3d dgf = k < 3 ? Eigen::Vector3d(j.hess_f.col(k)) : j.grad_ft;
        const Eigen::Vector3d dgg = k < 3 ? Eigen::Vector3d(j.hess_g.col(k)) : j.grad_gt;
        const Eigen::Vector3d dc = dgf.cross(j.grad_g) + j.grad_f.cross(dgg);
        Jac(2, k) = dc(rows[0]);
        Jac(3, k) = dc(rows[1]);
      }
      F(2) = c(rows[0]);
      F(3) = c(rows[1]);
    }
    Eigen::PartialPivLU<Eigen::Matrix<double, N, N>> lu(Jac);
    Eigen::Matrix<double, N, 1> step = -lu.solve(F);
    if (!step.allFinite()) return false;
    const double size = (step.array() / scale.array()).abs().maxCoeff();
    // a seed whose first full step leaves the drift window belongs to a root
    // that nearer cells will seed
    if (it == 0 && size > opt.max_drift_cells) return false;
    if (size > opt.trust_cells) step *= opt.trust_cells / size;
    for (int i = 0; i < N - 1; ++i) r(i) += step(i);
    t += step(N - 1);
    j = field.jet(r, t);
    double drift = std::abs(t - t0) / grid.time_step;
    for (int i = 0; i < N - 1; ++i) drift = std::max(drift, std::abs(r(i) - r0(i)) / grid.spacing);
    if (drift > opt.max_drift_cells) return false;
  }
  return false;
}

// Keeps one representative per cluster of roots within the merge window.
// Merging two roots that are not the same point is counted as ambiguous.
std::vector<Candidate> deduplicate(std::vector<Candidate> c, const GridSpec& grid,
                                   const FinderOptions& opt, EventSearch& stats) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return a.t < b.t; });
  std::vector<Candidate> kept, lost;
  for (const Candidate& cand : c) {
    bool merged = false;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
      if (cand.t - it->t > opt.merge_time_steps * grid.time_step) break;
      const double dr = (cand.r - it->r).cwiseAbs().maxCoeff();
      if (dr <= opt.merge_cells * grid.spacing) {
        const bool distinct =
            dr > kSameRoot * grid.spacing || cand.t - it->t > kSameRoot * grid.time_step;
        const Candidate loser = cand.quality < it->quality ? *it : cand;
        if (cand.quality < it->quality) *it = cand;
        if (distinct) {
          const bool seen = std::any_of(lost.begin(), lost.end(), [&](const Candidate& q) {
            return (q.r - loser.r).cwiseAbs().maxCoeff() <= kSameRoot * grid.spacing &&
                   std::abs(q.t - loser.t) <= kSameRoot * grid.time_step;
          });
          if (!seen) lost.push_back(loser);
        }
        merged = true;
        break;
      }
    }
    if (merged) {
      ++stats.duplicates;
    } else {
      kept.push_back(cand);
    }
  }
  stats.ambiguous += lost.size();
  return kept;
}

void sort_events(std::vector<EventRecord>& ev) {
  std::sort(ev.begin(), ev.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.time != b.time) return a.time < b.time;
    for (int i = 0; i < 3; ++i) {
      if (a.location(i) != b.location(i)) return a.location(i) < b.location(i);
    }
    return false;
  });
}

void check_grid(const SpacetimeBox& box, const GridSpec& grid, Dimension d) {
  if (!(grid.spacing > 0.0) || !(grid.time_step > 0.0)) {
    throw InvalidInput("grid spacing and time step must be > 0");
  }
  const int n = d == Dimension::three ? 3 : 2;
  for (int i = 0; i < n; ++i) {
    if (!(box.hi(i) > box.lo(i))) throw InvalidInput("box must have positive extent");
  }
  if (!(box.t1 > box.t0)) throw InvalidInput("box must have positive duration");
}

Lattice padded_lattice(const SpacetimeBox& box, double h, Dimension d, int pad) {
  Lattice lat;
  lat.h = h;
  const int n = d == Dimension::three ? 3 : 2;
  lat.origin.setZero();
  for (int i = 0; i < n; ++i) {
    lat.origin(i) = box.lo(i) - pad * h;
    lat.n[i] = static_cast<int>(std::ceil((box.hi(i) - box.lo(i)) / h)) + 2 * pad + 1;
  }
  return lat;
}

// Collects Newton roots seeded from every spacetime cell whose corners see
// both f and g change sign.
template <int N>
std::vector<Candidate> scan_and_solve(const FieldRealization& field, const SpacetimeBox& box,
                                      const GridSpec& grid, const FinderOptions& opt,
                                      EventSearch& stats) {
  const Dimension dim = field.dimension();
  const Lattice lat = padded_lattice(box, grid.spacing, dim, 2);
  const double rms = std::sqrt(field.field_variance());
  const int nt = static_cast<int>(std::ceil((box.t1 - box.t0) / grid.time_step)) + 3;
  const double tstart = box.t0 - grid.time_step;
  std::vector<cplx> psi;
  std::vector<std::uint8_t> prev, cur;
  std::vector<Candidate> found;
  const int nzc = N == 4 ? lat.n[2] - 1 : 1;
  for (int l = 0; l < nt; ++l) {
    const double t = tstart + l * grid.time_step;
    evaluate_slice(field, lat, t, psi);
    cur.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) cur[i] = sign_bits(psi[i]);
    if (l > 0) {
      for (int m = 0; m < nzc; ++m) {
        for (int jy = 0; jy + 1 < lat.n[1]; ++jy) {
          for (int ix = 0; ix + 1 < lat.n[0]; ++ix) {
            std::uint8_t all = 3, any = 0;
            const int mz = N == 4 ? 2 : 1;
            for (int dm = 0; dm < mz; ++dm) {
              for (int dj = 0; dj < 2; ++dj) {
                for (int di = 0; di < 2; ++di) {
                  const std::size_t k = lat.index(ix + di, jy + dj, m + dm);
                  all &= prev[k] & cur[k];
                  any |= prev[k] | cur[k];
                }
              }
            }
            if ((all ^ any) != 3) continue;  // both f and g change sign
            ++stats.seeds;
            Eigen::Vector3d r = lat.origin;
            r(0) += (ix + 0.5) * lat.h;
            r(1) += (jy + 0.5) * lat.h;
            if (N == 4) r(2) += (m + 0.5) * lat.h;
            Candidate c;
            if (newton_tangency<N>(field, r, t - 0.5 * grid.time_step, grid, opt, rms, c) &&
                box.contains(c.r, c.t, dim)) {
              ++stats.converged;
              found.push_back(c);
            } else {
              ++stats.discarded;
            }
          }
        }
      }
    }
    std::swap(prev, cur);
  }
  return found;
}

// Zeros of (f, g) at fixed t near `center`, from Newton started at `seeds`.
int count_zeros_near(const FieldRealization& field, const Eigen::Vector3d& center, double t,
                     double radius, const std::vector<Eigen::Vector3d>& seeds, double rms) {
  std::vector<Eigen::Vector3d> roots;
  for (Eigen::Vector3d r : seeds) {
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
      const FieldJet j = field.jet(r, t);
      if (std::abs(j.f) <= 1e-11 * rms && std::abs(j.g) <= 1e-11 * rms) {
        ok = true;
        break;
      }
      Eigen::Matrix2d J;
      J << j.grad_f(0), j.grad_f(1), j.grad_g(0), j.grad_g(1);
      Eigen::Vector2d step = -J.partialPivLu().solve(Eigen::Vector2d(j.f, j.g));
      if (!step.allFinite()) break;
      const double n = step.norm();
      if (n > 0.5 * radius) step *= 0.5 * radius / n;
      r.head<2>() += step;
      if ((r - center).norm() > 2.0 * radius) break;
    }
    if (!ok || (r - center).norm() > radius) continue;
    bool fresh = true;
    for (const auto& q : roots) fresh = fresh && (q - r).norm() > 1e-3 * radius;
    if (fresh) roots.push_back(r);
  }
  return static_cast<int>(roots.size());
}

}  // namespace

EventSearch find_events_2d(const FieldRealization& field, const SpacetimeBox& box,
                           const GridSpec& grid, const FinderOptions& opt) {
  if (field.dimension() != Dimension::two) throw InvalidInput("find_events_2d needs a 2D field");
  check_grid(box, grid, Dimension::two);
  EventSearch out;
  std::vector<Candidate> found = scan_and_solve<3>(field, box, grid, opt, out);
  found = deduplicate(std::move(found), grid, opt, out);
  const double rms = std::sqrt(field.field_variance());
  for (const Candidate& c : found) {
    const FieldJet& j = c.jet;
    // frame: n along grad f, s along the common tangent
    const Eigen::Vector3d n = j.grad_f.normalized();
    const Eigen::Vector3d s(-n(1), n(0), 0.0);
    const double fn = j.grad_f.dot(n), gn = j.grad_g.dot(n);
    const double fss = s.dot(j.hess_f * s), gss = s.dot(j.hess_g * s);
    const double K = gn * fss - fn * gss;  // relative curvature
    const double V = gn * j.ft - fn * j.gt;  // closing speed
    // g_n f - f_n g = K s^2 / 2 + V t: a pair exists for t with V t / K < 0
    EventRecord e;
    e.location = c.r;
    e.time = c.t;
    e.f_residual = std::abs(j.f);
    e.g_residual = std::abs(j.g);
    e.tangency_residual = tangency(j);
    e.iterations = c.iterations;
    e.classifier = K * V;
    bool creation_local = K * V < 0.0;
    e.kind = creation_local ? EventKind::pair_creation : EventKind::pair_annihilation;
    if (K != 0.0 && V != 0.0) {
      const double s_target = 0.1 * grid.spacing;
      const double dt = s_target * s_target * std::abs(K) / (2.0 * std::abs(V));
      const double radius = 3.0 * s_target;
      const std::vector<Eigen::Vector3d> seeds = {c.r + s_target * s, c.r - s_target * s};
      const int before = count_zeros_near(field, c.r, c.t - dt, radius, seeds, rms);
      const int after = count_zeros_near(field, c.r, c.t + dt, radius, seeds, rms);
      if (before == 0 && after == 2) {
        e.kind = EventKind::pair_creation;
        e.counted_in_disc = true;
      } else if (before == 2 && after == 0) {
        e.kind = EventKind::pair_annihilation;
        e.counted_in_disc = true;
      }
    }
    out.events.push_back(e);
  }
  sort_events(out.events);
  return out;
}

EventSearch find_events_3d(const FieldRealization& field, const SpacetimeBox& box,
                           const GridSpec& grid, const FinderOptions& opt) {
  if (field.dimension() != Dimension::three) {
    throw InvalidInput("find_events_3d needs a 3D field");
  }
  check_grid(box, grid, Dimension::three);
  EventSearch out;
  std::vector<Candidate> found = scan_and_solve<4>(field, box, grid, opt, out);
  found = deduplicate(std::move(found), grid, opt, out);
  for (const Candidate& c : found) {
    const FieldJet& j = c.jet;
    // frame with z along the common normal
    const Eigen::Vector3d n = j.grad_f.normalized();
    Eigen::Vector3d helper = std::abs(n(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = n.cross(helper).normalized();
    const Eigen::Vector3d e2 = n.cross(e1);
    const double fz = j.grad_f.dot(n), gz = j.grad_g.dot(n);
    auto in_plane = [&](const Eigen::Matrix3d& H) {
      Eigen::Matrix2d m;
      m << e1.dot(H * e1), e1.dot(H * e2), e2.dot(H * e1), e2.dot(H * e2);
      return m;
    };
    const Eigen::Matrix2d Hf = in_plane(j.hess_f), Hg = in_plane(j.hess_g);
    const double p = fz * Hg(0, 0) - Hf(0, 0) * gz;
    const double q = fz * Hg(1, 1) - Hf(1, 1) * gz;
    const double sx = fz * Hg(0, 1) - Hf(0, 1) * gz;
    const double e33 = p * q - sx * sx;
    EventRecord e;
    e.location = c.r;
    e.time = c.t;
    e.f_residual = std::abs(j.f);
    e.g_residual = std::abs(j.g);
    e.tangency_residual = tangency(j);
    e.iterations = c.iterations;
    e.classifier = e33;
    if (e33 < 0.0) {
      e.kind = EventKind::reconnection;
    } else {
      // g_z f - f_z g = s^T K s / 2 + V t; the loop exists where V t and
      // tr K have opposite signs
      const Eigen::Matrix2d K = gz * Hf - fz * Hg;
      const double V = gz * j.ft - fz * j.gt;
      e.kind = K.trace() * V < 0.0 ? EventKind::birth : EventKind::death;
    }
    out.events.push_back(e);
  }
  sort_events(out.events);
  return out;
}

std::size_t count_vortices_2d(const FieldRealization& field, const SpacetimeBox& box, double t,
                              double spacing) {
  if (!(spacing > 0.0)) throw InvalidInput("spacing must be > 0");
  Lattice lat;
  lat.origin = box.lo;
  lat.origin(2) = 0.0;
  const double lx = box.hi(0) - box.lo(0), ly = box.hi(1) - box.lo(1);
  if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidInput("box must have positive extent");
  const int nx = std::max(1, static_cast<int>(std::ceil(lx / spacing)));
  const int ny = std::max(1, static_cast<int>(std::ceil(ly / spacing)));
  // square plaquettes tiling the box up to rounding of the last row
  lat.h = std::min(lx / nx, ly / ny);
  lat.n[0] = static_cast<int>(std::floor(lx / lat.h + 1e-9)) + 1;
  lat.n[1] = static_cast<int>(std::floor(ly / lat.h + 1e-9)) + 1;
  lat.n[2] = 1;
  std::vector<cplx> psi;
  evaluate_slice(field, lat, t, psi);
  std::size_t count = 0;
  for (int j = 0; j + 1 < lat.n[1]; ++j) {
    for (int i = 0; i + 1 < lat.n[0]; ++i) {
      const cplx a = psi[lat.index(i, j, 0)], b = psi[lat.index(i + 1, j, 0)];
      const cplx c = psi[lat.index(i + 1, j + 1, 0)], d = psi[lat.index(i, j + 1, 0)];
      const double w = std::arg(b * std::conj(a)) + std::arg(c * std::conj(b)) +
                       std::arg(d * std::conj(c)) + std::arg(a * std::conj(d));
      count += static_cast<std::size_t>(std::abs(std::lround(w / (2.0 * kPi))));
    }
  }
  return count;
}

SimulationReport simulate(const Spectrum& spectrum, const SimulationConfig& cfg) {
  if (cfg.realizations < 1) throw InvalidInput("realizations must be >= 1");
  const Dimension dim = spectrum.dimension();
  struct PerRealization {
    EventSearch search;
    double density = 0.0;
  };
  std::vector<PerRealization> parts(cfg.realizations);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < cfg.realizations && !failed; r = next++) {
      try {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                          static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        const std::uint64_t rseed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        const FieldRealization field = synthesize(spectrum, cfg.n_waves, rseed);
        PerRealization& p = parts[r];
        if (dim == Dimension::two) {
          p.search = find_events_2d(field, cfg.box, cfg.grid, cfg.finder);
          const double area = (cfg.box.hi(0) - cfg.box.lo(0)) * (cfg.box.hi(1) - cfg.box.lo(1));
          // average over a few slices to cut the spatial sampling noise
          constexpr int kSlices = 4;
          double count = 0.0;
          for (int k = 0; k < kSlices; ++k) {
            const double tk = cfg.box.t0 + (k + 0.5) / kSlices * (cfg.box.t1 - cfg.box.t0);
            count += static_cast<double>(count_vortices_2d(field, cfg.box, tk, cfg.grid.spacing));
          }
          p.density = count / (kSlices * area);
        } else {
          p.search = find_events_3d(field, cfg.box, cfg.grid, cfg.finder);
        }
        for (auto& e : p.search.events) e.realization = r;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, cfg.n_workers), cfg.realizations));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SimulationReport rep;
  rep.dimension = dim;
  rep.realizations = cfg.realizations;
  rep.measure = cfg.box.measure(dim) * static_cast<double>(cfg.realizations);
  double dsum = 0.0, dsq = 0.0;
  for (auto& p : parts) {
    rep.seeds += p.search.seeds;
    rep.duplicates += p.search.duplicates;
    rep.discarded += p.search.discarded;
    rep.ambiguous += p.search.ambiguous;
    for (const auto& e : p.search.events) {
      switch (e.kind) {
        case EventKind::reconnection: ++rep.reconnections; break;
        case EventKind::birth: ++rep.births; break;
        case EventKind::death: ++rep.deaths; break;
        case EventKind::pair_creation: ++rep.creations; break;
        case EventKind::pair_annihilation: ++rep.annihilations; break;
      }
      if (e.counted_in_disc) ++rep.disc_classified;
    }
    dsum += p.density;
    dsq += p.density * p.density;
    if (cfg.keep_events) {
      rep.events.insert(rep.events.end(), p.search.events.begin(), p.search.events.end());
    }
  }
  rep.rates.dimension = dim;
  rep.rates.method = RateMethod::simulation;
  const double V = rep.measure;
  if (dim == Dimension::two) {
    const double n = static_cast<double>(rep.creations + rep.annihilations);
    rep.rates.birth = static_cast<double>(rep.creations) / V;
    rep.rates.death = static_cast<double>(rep.annihilations) / V;
    rep.rates.pair_events = n / V;
    rep.total_rate_stderr = std::sqrt(n) / V;
    const double R = static_cast<double>(cfg.realizations);
    rep.vortex_density = dsum / R;
    if (cfg.realizations > 1) {
      const double var = std::max(0.0, (dsq / R - rep.vortex_density * rep.vortex_density) *
                                           R / (R - 1.0));
      rep.vortex_density_stderr = std::sqrt(var / R);
    }
  } else {
    const double nr = static_cast<double>(rep.reconnections);
    const double nl = static_cast<double>(rep.births + rep.deaths);
    rep.rates.reconnection = nr / V;
    rep.rates.birth = static_cast<double>(rep.births) / V;
    rep.rates.death = static_cast<double>(rep.deaths) / V;
    rep.total_rate_stderr = std::sqrt(nr + nl) / V;
    rep.reconnection_stderr = std::sqrt(nr) / V;
    rep.loop_stderr = std::sqrt(nl) / V;
    if (nr > 0.0) {
      rep.loop_ratio = nl / nr;
      rep.loop_ratio_stderr = nl > 0.0 ? rep.loop_ratio * std::sqrt(1.0 / nl + 1.0 / nr) : 0.0;
    }
  }
  rep.rates.standard_error = rep.total_rate_stderr;
  return rep;
}

}  // namespace vortex
