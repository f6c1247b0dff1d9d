// SPDX-License-Identifier: Apache-2.0
#include "bp/monte_carlo.hpp"

#include "bp/error.hpp"
#include "bp/model_spaces.hpp"
#include "bp/sampling.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace bp {
namespace {

double bump(double t) {
  if (!(t < 1.0)) return 0.0;
  const double a = 1.0 - t * t;
  return a * a;
}

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0); }
double unit_sphere_area(int d) {  // of S^{d−1} in R^d
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

int point_count(BPMode mode, int n) {
  switch (mode) {
    case BPMode::Full: return n + 1;
    case BPMode::Antipodal: return 2;
    case BPMode::Hyperplane: return n;
  }
  return 0;
}

struct Moments {
  double sum = 0.0;
  double sq = 0.0;
};

struct Sides {
  Moments lhs, rhs;
};

struct Setup {
  const ManifoldSpec* m;
  MCConfig cfg;
  int n;
  int points;
  double rho_x;     // chart radius of the lhs sampling ball
  double rho_z;     // chart radius of the center ball
  double lhs_scale; // vol(chart ball)^points
  double rhs_scale;
  BPOptions options;
};

double sample_lhs(const Setup& s, Rng& rng) {
  std::vector<Vec> xs;
  double w = s.lhs_scale;
  for (int i = 0; i < s.points; ++i) {
    Vec x = random_in_ball(rng, s.n, s.rho_x);
    w *= std::sqrt(metric_at(*s.m, ChartPoint{x}).determinant());
    xs.push_back(std::move(x));
  }
  const double f = mc_test_function(*s.m, xs, s.cfg.region);
  return f == 0.0 ? 0.0 : f * w;
}

double sample_rhs(const Setup& s, Rng& rng) {
  const int n = s.n;
  BPConfiguration c;
  c.mode = s.cfg.mode;
  c.r = rng.uniform() * s.cfg.region.ball_radius;
  c.z.coords = random_in_ball(rng, n, s.rho_z);
  double w = s.rhs_scale * std::sqrt(metric_at(*s.m, c.z).determinant());
  std::vector<Vec> coords;
  if (c.mode == BPMode::Hyperplane) {
    const Vec v = random_unit(rng, n);
    for (int i = 0; i < n; ++i) {
      Vec u = random_unit(rng, n);
      u -= u.dot(v) * v;
      coords.push_back(u.normalized());
    }
    coords.push_back(v);
  } else {
    for (int i = 0; i < direction_count(c.mode, n); ++i) coords.push_back(random_unit(rng, n));
  }
  if (!(c.r > 0.0)) return 0.0;
  // ψ vanishes outside the center ball, φ beyond R: only the Jacobian can be costly.
  c.directions = directions_at(*s.m, c.z, coords);
  JacobianEvaluation ev;
  try {
    ev = evaluate_phi(*s.m, c, s.options);
  } catch (const Error& e) {
    if (e.code() == Errc::DegenerateSimplex) return 0.0;  // null set
    throw;
  }
  const double f = mc_test_function(*s.m, ev.points, s.cfg.region);
  return f == 0.0 ? 0.0 : f * ev.value * w;
}

Sides run_shard(const Setup& s, long shard, long begin, long end) {
  Sides out;
  Rng lrng(s.cfg.seed, static_cast<std::uint64_t>(shard), 0);
  Rng rrng(s.cfg.seed, static_cast<std::uint64_t>(shard), 1);
  for (long i = begin; i < end; ++i) {
    const double a = sample_lhs(s, lrng);
    out.lhs.sum += a;
    out.lhs.sq += a * a;
    const double b = sample_rhs(s, rrng);
    out.rhs.sum += b;
    out.rhs.sq += b * b;
  }
  return out;
}

}  // namespace

int worker_limit(int requested) {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BP_NUM_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return std::max(1, requested > 0 ? std::min(requested, cap) : cap);
}

double mc_test_function(const ManifoldSpec& m, std::span<const Vec> points, const MCRegion& region) {
  const auto ball = circumscribed_ball(m, points);
  if (!ball) return 0.0;
  const double phi = bump(ball->radius / region.ball_radius);
  if (phi == 0.0) return 0.0;
  const double psi = bump(model_distance(m, ball->center, Vec::Zero(m.dim())) / region.center_radius);
  if (psi == 0.0) return 0.0;
  double arg = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int j = 0; j < points[i].size(); ++j) arg += (0.7 + 0.3 * static_cast<double>(i) - 0.2 * j) * points[i][j];
  const double f = phi * psi * (1.0 + 0.5 * std::sin(arg));
  if (!std::isfinite(f)) throw Error(Errc::NonFiniteTestFunction, "test function is not finite");
  return f;
}

MCResult mc_measure_equality(const ManifoldSpec& m, const MCConfig& cfg) {
  if (!m.is_builtin())
    throw Error(Errc::Unsupported, "measure-equality check needs a closed-form inverse; built-in manifolds only");
  if (cfg.samples < 1 || cfg.shard_size < 1) throw Error(Errc::InvalidConfiguration, "sample counts must be positive");
  const int n = m.dim();
  const MCRegion& reg = cfg.region;
  if (!(reg.center_radius > 0.0 && reg.ball_radius > 0.0))
    throw Error(Errc::InvalidConfiguration, "region radii must be positive");
  if (m.kind() == ManifoldKind::Sphere && !(m.k() * reg.ball_radius < std::numbers::pi / 2 &&
                                            m.k() * (reg.center_radius + reg.ball_radius) < 0.9 * std::numbers::pi))
    throw Error(Errc::RegionEscapesChart, "region is too large for the sphere's stereographic chart");

  Setup s{&m, cfg, n, point_count(cfg.mode, n), 0.0, 0.0, 0.0, 0.0, {}};
  s.options.integrator = cfg.integrator;
  s.rho_x = chart_radius(m, reg.center_radius + reg.ball_radius);
  s.rho_z = chart_radius(m, reg.center_radius);
  if (!(m.domain().margin(Vec::Zero(n)) > s.rho_x))
    throw Error(Errc::RegionEscapesChart, "sampling region is not inside the chart domain");
  s.lhs_scale = std::pow(unit_ball_volume(n) * std::pow(s.rho_x, n), s.points);
  const double zvol = unit_ball_volume(n) * std::pow(s.rho_z, n);
  double dirs = 1.0;
  switch (cfg.mode) {
    case BPMode::Full: dirs = std::pow(unit_sphere_area(n), n + 1); break;
    case BPMode::Antipodal: dirs = unit_sphere_area(n); break;
    // (z, r, v, u) and (z, r, −v, u) give the same tuple.
    case BPMode::Hyperplane: dirs = unit_sphere_area(n) * std::pow(unit_sphere_area(n - 1), n) / 2.0; break;
  }
  s.rhs_scale = reg.ball_radius * zvol * dirs;

  const long shards = (cfg.samples + cfg.shard_size - 1) / cfg.shard_size;
  std::vector<Sides> parts(static_cast<std::size_t>(shards));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&]() {
    while (!failed) {
      const long sh = next++;
      if (sh >= shards) return;
      const long begin = sh * cfg.shard_size;
      const long end = std::min(cfg.samples, begin + cfg.shard_size);
      try {
        parts[static_cast<std::size_t>(sh)] = run_shard(s, sh, begin, end);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const int workers = std::min<long>(worker_limit(cfg.workers), shards);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Merge in shard order so the result does not depend on scheduling.
  Sides total;
  for (const Sides& p : parts) {
    total.lhs.sum += p.lhs.sum;
    total.lhs.sq += p.lhs.sq;
    total.rhs.sum += p.rhs.sum;
    total.rhs.sq += p.rhs.sq;
  }
  const double N = static_cast<double>(cfg.samples);
  auto finish = [&](const Moments& mo, double& mean, double& se) {
    mean = mo.sum / N;
    const double var = std::max(0.0, mo.sq / N - mean * mean) * N / std::max(1.0, N - 1.0);
    se = std::sqrt(var / N);
  };
  MCResult out;
  finish(total.lhs, out.lhs, out.se_lhs);
  finish(total.rhs, out.rhs, out.se_rhs);
  const double comb = std::sqrt(out.se_lhs * out.se_lhs + out.se_rhs * out.se_rhs);
  out.z_score = comb > 0.0 ? std::abs(out.lhs - out.rhs) / comb : (out.lhs == out.rhs ? 0.0 : INFINITY);
  out.samples = cfg.samples;
  out.shards = shards;
  return out;
}

}  // namespace bp
