#include "vortex/mc_oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vortex/error.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

// Sum and sum of squares of up to five per-sample quantities.
struct Accumulator {
  std::array<double, 5> sum{};
  std::array<double, 5> sq{};
  void add(int i, double v) {
    sum[i] += v;
    sq[i] += v * v;
  }
};

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

// Runs kernel(rng, count, acc) over all chunks and reduces in chunk order.
template <class Kernel>
Accumulator run_chunks(const McConfig& cfg, Kernel&& kernel) {
  if (cfg.n_samples < 1) throw InvalidInput("n_samples must be >= 1");
  if (cfg.batch < 1) throw InvalidInput("batch must be >= 1");
  const std::uint64_t n_chunks = (cfg.n_samples + cfg.batch - 1) / cfg.batch;
  std::vector<Accumulator> parts(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t i = next++; i < n_chunks; i = next++) {
      const std::uint64_t count = std::min(cfg.batch, cfg.n_samples - i * cfg.batch);
      auto rng = chunk_rng(cfg.seed, i);
      kernel(rng, count, parts[i]);
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, cfg.n_workers), n_chunks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  Accumulator total;
  for (const auto& p : parts) {
    for (int i = 0; i < 5; ++i) {
      total.sum[i] += p.sum[i];
      total.sq[i] += p.sq[i];
    }
  }
  return total;
}

std::pair<double, double> mean_stderr(const Accumulator& a, int i, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double mean = a.sum[i] / nn;
  if (n < 2) return {mean, 0.0};
  const double var = std::max(0.0, (a.sq[i] / nn - mean * mean) * nn / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

// Square-root factor B (B B^T = S) of the covariance of the unpinned block
// conditioned on the pinned variables being zero. Symmetric eigen-square-root
// so positive semidefinite blocks are fine.
template <int N>
Eigen::MatrixXd conditional_factor(const Eigen::Matrix<double, N, N>& corr,
                                   const std::vector<int>& free, const std::vector<int>& pinned) {
  const int nf = static_cast<int>(free.size());
  const int np = static_cast<int>(pinned.size());
  Eigen::MatrixXd S11(nf, nf), S12(nf, np), S22(np, np);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) S11(i, j) = corr(free[i], free[j]);
    for (int j = 0; j < np; ++j) S12(i, j) = corr(free[i], pinned[j]);
  }
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) S22(i, j) = corr(pinned[i], pinned[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S22);
  if (llt.info() != Eigen::Success) throw NumericalFailure("singular conditioning block");
  Eigen::MatrixXd Sc = S11 - S12 * llt.solve(S12.transpose());
  Sc = 0.5 * (Sc + Sc.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sc);
  const Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * ev.asDiagonal();
}

}  // namespace

McEstimate mc_rate_2d(const CorrelationModel2D& model, const McConfig& cfg) {
  McEstimate est;
  est.n = cfg.n_samples;
  if (cfg.n_samples < 1) throw InvalidInput("n_samples must be >= 1");
  if (model.degenerate) return est;
  using M = CorrelationModel2D;
  const Eigen::MatrixXd B = conditional_factor<6>(model.corr, {M::FT, M::FXX, M::GT, M::GXX},
                                                  {M::F, M::G});
  const double f2 = model.entries.ff;
  const double sx2 = model.entries.fx2();
  const double sx = std::sqrt(sx2);
  const double pref = kPi / (2.0 * kPi * f2) / (2.0 * kPi * sx2);
  auto kernel = [&](std::mt19937_64& rng, std::uint64_t count, Accumulator& acc) {
    std::normal_distribution<double> nd;
    Eigen::Vector4d z;
    for (std::uint64_t s = 0; s < count; ++s) {
      for (int i = 0; i < 4; ++i) z(i) = nd(rng);
      const Eigen::Vector4d v = B * z;
      const double ft = v(0), fxx = v(1), gt = v(2), gxx = v(3);
      const double fy = sx * nd(rng);
      const double gy = sx * nd(rng);
      acc.add(0, pref * std::abs(fy * gt - ft * gy) * std::abs(fxx * gy - fy * gxx));
    }
  };
  const Accumulator acc = run_chunks(cfg, kernel);
  std::tie(est.value, est.standard_error) = mean_stderr(acc, 0, cfg.n_samples);
  return est;
}

McEstimate mc_rate_3d(const CorrelationModel3D& model, const McConfig& cfg) {
  McEstimate est;
  est.n = cfg.n_samples;
  if (cfg.n_samples < 1) throw InvalidInput("n_samples must be >= 1");
  if (model.degenerate) {
    est.split = McSplit{};
    return est;
  }
  using M = CorrelationModel3D;
  const Eigen::MatrixXd B = conditional_factor<8>(
      model.corr, {M::FT, M::FXX, M::FYY, M::GT, M::GXX, M::GYY}, {M::F, M::G});
  const double f2 = model.entries.ff;
  const double sx2 = model.entries.fx2();
  const double sx = std::sqrt(sx2);
  const double sxy = std::sqrt(model.entries.fxy2());
  const double pref = 2.0 * kPi / (2.0 * kPi * f2) / std::pow(2.0 * kPi * sx2, 2);
  auto kernel = [&](std::mt19937_64& rng, std::uint64_t count, Accumulator& acc) {
    std::normal_distribution<double> nd;
    Eigen::Matrix<double, 6, 1> z;
    for (std::uint64_t s = 0; s < count; ++s) {
      for (int i = 0; i < 6; ++i) z(i) = nd(rng);
      const Eigen::Matrix<double, 6, 1> v = B * z;
      const double ft = v(0), fxx = v(1), fyy = v(2), gt = v(3), gxx = v(4), gyy = v(5);
      const double fz = sx * nd(rng);
      const double gz = sx * nd(rng);
      const double fxy = sxy * nd(rng);
      const double gxy = sxy * nd(rng);
      const double vel = fz * gt - ft * gz;
      const double sxyc = fz * gxy - fxy * gz;
      const double e33 = (fz * gxx - fxx * gz) * (fz * gyy - fyy * gz) - sxyc * sxyc;
      const double w = pref * std::abs(vel) * std::abs(e33);
      acc.add(0, w);
      acc.add(1, e33 < 0.0 ? w : 0.0);
      acc.add(2, e33 > 0.0 ? w : 0.0);
      acc.add(3, e33 > 0.0 && vel > 0.0 ? w : 0.0);
      acc.add(4, e33 > 0.0 && vel < 0.0 ? w : 0.0);
    }
  };
  const Accumulator acc = run_chunks(cfg, kernel);
  std::tie(est.value, est.standard_error) = mean_stderr(acc, 0, cfg.n_samples);
  McSplit sp;
  std::tie(sp.reconnection, sp.reconnection_stderr) = mean_stderr(acc, 1, cfg.n_samples);
  std::tie(sp.birth_death, sp.birth_death_stderr) = mean_stderr(acc, 2, cfg.n_samples);
  std::tie(sp.loops_positive_velocity, sp.loops_positive_velocity_stderr) =
      mean_stderr(acc, 3, cfg.n_samples);
  std::tie(sp.loops_negative_velocity, sp.loops_negative_velocity_stderr) =
      mean_stderr(acc, 4, cfg.n_samples);
  est.split = sp;
  return est;
}

double normalization_check_2d(const LocalForm2D& c) {
  const double scale = std::max({std::abs(c.Fxx), std::abs(c.Fy), std::abs(c.Ft),
                                 std::abs(c.Gxx), std::abs(c.Gy), std::abs(c.Gt)});
  const double tiny = 1e-12 * scale * scale;
  if (!(scale > 0.0) || std::abs(c.Fy * c.Gt - c.Ft * c.Gy) <= tiny ||
      std::abs(c.Fxx * c.Gy - c.Fy * c.Gxx) <= tiny) {
    throw InvalidInput("degenerate local form: zero closing speed or parallel contours");
  }
  // The deltas of f, g, f_x, g_x fix x = y = t = 0 and a rotation theta in
  // {0, pi} of the local frame; r = R(theta) r'.
  double total = 0.0;
  for (double th : {0.0, kPi}) {
    const double cs = std::cos(th), sn = std::sin(th);
    Eigen::Matrix2d R;
    R << cs, -sn, sn, cs;
    Eigen::Matrix2d dR;
    dR << -sn, -cs, cs, -sn;
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    double w_vel = 0.0, w_curv = 0.0;
    std::array<Eigen::Vector2d, 2> grad;
    std::array<Eigen::Matrix2d, 2> hess;
    const double lin[2] = {c.Fy, c.Gy};
    const double quad[2] = {c.Fxx, c.Gxx};
    const double tco[2] = {c.Ft, c.Gt};
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2d l(0.0, lin[k]);
      const Eigen::Matrix2d H = Eigen::Vector2d(quad[k], 0.0).asDiagonal();
      grad[k] = R * l;
      hess[k] = R * H * R.transpose();
      J.row(k) << grad[k](0), grad[k](1), tco[k], 0.0;
      J.row(2 + k) << hess[k](0, 0), hess[k](0, 1), 0.0, (dR * l)(0);
    }
    w_vel = std::abs(grad[0](1) * c.Gt - c.Ft * grad[1](1));
    w_curv = std::abs(hess[0](0, 0) * grad[1](1) - grad[0](1) * hess[1](0, 0));
    total += w_vel * w_curv / std::abs(J.determinant());
  }
  return kPi * total / (2.0 * kPi);
}

namespace {

Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}
Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}
Eigen::Matrix3d drot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return m;
}
Eigen::Matrix3d drot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return m;
}

}  // namespace

double normalization_check_3d(const LocalForm3D& c, int n_angle) {
  if (n_angle < 4) throw InvalidInput("n_angle must be >= 4");
  const double vel = c.Fz * c.Gt - c.Ft * c.Gz;
  const double p = c.Fz * c.Gxx - c.Fxx * c.Gz;
  const double q = c.Fz * c.Gyy - c.Fyy * c.Gz;
  const double s = c.Fz * c.Gxy - c.Fxy * c.Gz;
  const double e33 = p * q - s * s;
  const double scale = std::max({std::abs(c.Fxx), std::abs(c.Fxy), std::abs(c.Fyy),
                                 std::abs(c.Fz), std::abs(c.Ft), std::abs(c.Gxx),
                                 std::abs(c.Gxy), std::abs(c.Gyy), std::abs(c.Gz),
                                 std::abs(c.Gt)});
  if (!(scale > 0.0) || std::abs(vel) <= 1e-12 * scale * scale ||
      std::abs(e33) <= 1e-12 * std::pow(scale, 4)) {
    throw InvalidInput("degenerate local form: zero closing speed or degenerate curvature");
  }
  // Chart R = R0 Rz(alpha) Ry(beta) Rz(gamma), u = cos(beta); R0 moves the
  // roots (normal along +-z) to beta = pi/2, away from the chart poles.
  const Eigen::Matrix3d R0 = rot_y(kPi / 2.0);
  const Eigen::Vector3d lf(0.0, 0.0, c.Fz), lg(0.0, 0.0, c.Gz);
  Eigen::Matrix3d Hf, Hg;
  Hf << c.Fxx, c.Fxy, 0, c.Fxy, c.Fyy, 0, 0, 0, 0;
  Hg << c.Gxx, c.Gxy, 0, c.Gxy, c.Gyy, 0, 0, 0, 0;
  double total = 0.0;
  for (int j = 0; j < n_angle; ++j) {
    const double gam = 2.0 * kPi * j / n_angle;
    for (double sgn : {1.0, -1.0}) {
      const Eigen::Vector3d tgt = sgn * (R0.transpose() * Eigen::Vector3d::UnitZ());
      const double beta = std::acos(std::clamp(tgt(2), -1.0, 1.0));
      const double alpha = std::atan2(tgt(1), tgt(0));
      const Eigen::Matrix3d R = R0 * rot_z(alpha) * rot_y(beta) * rot_z(gam);
      const Eigen::Matrix3d dRa = R0 * drot_z(alpha) * rot_y(beta) * rot_z(gam);
      const double dbeta_du = -1.0 / std::sin(beta);
      const Eigen::Matrix3d dRu = R0 * rot_z(alpha) * drot_y(beta) * rot_z(gam) * dbeta_du;
      const Eigen::Vector3d gf = R * lf, gg = R * lg;
      const Eigen::Matrix3d Hfl = R * Hf * R.transpose(), Hgl = R * Hg * R.transpose();
      const Eigen::Vector3d dgf_a = dRa * lf, dgg_a = dRa * lg;
      const Eigen::Vector3d dgf_u = dRu * lf, dgg_u = dRu * lg;
      // rows f, g, f_x, g_x, f_y, g_y; columns x, y, z, t, alpha, u
      Eigen::Matrix<double, 6, 6> J = Eigen::Matrix<double, 6, 6>::Zero();
      J.row(0) << gf.transpose(), c.Ft, 0.0, 0.0;
      J.row(1) << gg.transpose(), c.Gt, 0.0, 0.0;
      for (int comp = 0; comp < 2; ++comp) {
        J.row(2 + 2 * comp) << Hfl.row(comp), 0.0, dgf_a(comp), dgf_u(comp);
        J.row(3 + 2 * comp) << Hgl.row(comp), 0.0, dgg_a(comp), dgg_u(comp);
      }
      const double fz = gf(2), gz = gg(2);
      const double pl = fz * Hgl(0, 0) - Hfl(0, 0) * gz;
      const double ql = fz * Hgl(1, 1) - Hfl(1, 1) * gz;
      const double sl = fz * Hgl(0, 1) - Hfl(0, 1) * gz;
      const double w = std::abs(fz * c.Gt - c.Ft * gz) * std::abs(pl * ql - sl * sl);
      total += w / std::abs(J.determinant()) * (2.0 * kPi / n_angle);
    }
  }
  return 2.0 * kPi * total / (8.0 * kPi * kPi);
}

AxisFixingReport axis_fixing_check(const CorrelationModel2D& model, const McConfig& cfg) {
  AxisFixingReport r;
  const double f2 = model.entries.ff;
  const double s2 = model.entries.fx2();
  const double s = std::sqrt(s2);
  const double p0x = 1.0 / std::sqrt(2.0 * kPi * s2);
  const double abs3 = 2.0 * std::sqrt(2.0 / kPi) * s2 * s;  // E|X|^3
  r.gradient_lhs = 2.0 * s2;
  r.gradient_rhs = kPi * p0x * abs3;
  r.density_closed = s2 / (2.0 * kPi * f2);
  const double pfg = 1.0 / (2.0 * kPi * f2);
  r.density_pinned = kPi * pfg * p0x * s2 * std::sqrt(2.0 / kPi) * s;
  auto kernel = [&](std::mt19937_64& rng, std::uint64_t count, Accumulator& acc) {
    std::normal_distribution<double> nd;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double fy = s * nd(rng);
      const double gx = s * nd(rng);
      acc.add(0, kPi * pfg * p0x * fy * fy * std::abs(gx));
    }
  };
  const Accumulator acc = run_chunks(cfg, kernel);
  std::tie(r.density_mc, r.density_mc_stderr) = mean_stderr(acc, 0, cfg.n_samples);
  return r;
}

}  // namespace vortex
