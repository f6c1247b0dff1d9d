// SPDX-License-Identifier: Apache-2.0
#include "bp/oracle.hpp"

#include "bp/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace bp {

Vec angle_map(const Vec& theta, int d) {
  Vec c(d);
  double prod = 1.0;
  for (int j = 0; j < d - 1; ++j) {
    c[j] = prod * std::cos(theta[j]);
    prod *= std::sin(theta[j]);
  }
  c[d - 1] = prod;
  return c;
}

double angle_density(const Vec& theta, int d) {
  double s = 1.0;
  for (int j = 0; j + 2 < d; ++j) s *= std::pow(std::sin(theta[j]), d - 2 - j);
  return s;
}

namespace {

Vec base_angles(int d) {
  Vec t = Vec::Constant(std::max(d - 1, 0), std::numbers::pi / 2);
  if (d >= 2) t[d - 2] = std::numbers::pi / 4;
  return t;
}

// Householder reflection with Q a = b for unit a, b.
MatX reflection(const Vec& a, const Vec& b) {
  const int d = static_cast<int>(a.size());
  MatX Q = MatX::Identity(d, d);
  const VecX w = a - b;
  if (w.norm() > 1e-14) Q -= 2.0 * w * w.transpose() / w.squaredNorm();
  return Q;
}

// One direction on S^{d−1}: c = Q S(θ).
struct AngleChart {
  int d = 0;
  MatX Q;

  explicit AngleChart(const Vec& base) : d(static_cast<int>(base.size())) {
    Q = reflection(angle_map(base_angles(d), d), base);
  }
  Vec point(const Vec& theta) const { return Vec(Q * angle_map(theta, d)); }
};

// Orthonormal basis of c⊥ (columns) by Gram–Schmidt of the standard basis
// without index `skip`; smooth in c near a base point where |c_skip| is largest.
MatX complement(const Vec& c, int skip) {
  const int n = static_cast<int>(c.size());
  MatX F(n, n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    if (j == skip) continue;
    VecX w = VecX::Unit(n, j);
    w -= w.dot(c) * VecX(c);
    for (int q = 0; q < col; ++q) w -= w.dot(F.col(q)) * F.col(q);
    F.col(col++) = w.normalized();
  }
  return F;
}

struct Parametrization {
  const ManifoldSpec* m;
  BPMode mode;
  int n;
  std::vector<AngleChart> charts;  // one per parametrized direction
  int skip = 0;                    // hyperplane complement index
  IntegratorConfig integrator;

  int param_count() const {
    int p = 1 + n;
    for (const auto& c : charts) p += c.d - 1;
    return p;
  }

  // Unit directions in frame coordinates and the product of chart densities.
  std::vector<Vec> directions(const VecX& P, double& sigma, double pole) const {
    int off = 1 + n;
    std::vector<Vec> cs;
    sigma = 1.0;
    for (const auto& ch : charts) {
      const Vec th = P.segment(off, ch.d - 1);
      off += ch.d - 1;
      const double s = angle_density(th, ch.d);
      if (!(s >= pole)) throw Error(Errc::SingularParametrization, "direction is at an angle-chart pole");
      sigma *= s;
      cs.push_back(ch.point(th));
    }
    if (mode != BPMode::Hyperplane) return cs;
    // cs = [c_v, d_0, ..., d_{n−1}]
    const Vec cv = cs[0];
    const MatX F = complement(cv, skip);
    std::vector<Vec> out;
    for (int i = 0; i < n; ++i) out.push_back(Vec(F * cs[static_cast<std::size_t>(i + 1)]));
    return out;
  }

  // Output coordinates (x_0, x_1, ...) stacked.
  VecX map(const VecX& P, double* weight, double pole) const {
    const double r = P[0];
    const Vec z = P.segment(1, n);
    double sigma = 1.0;
    const std::vector<Vec> cs = directions(P, sigma, pole);
    const ChartPoint zp{z};
    const OrthonormalFrame E = orthonormal_frame(*m, zp);
    std::vector<Vec> velocities;
    if (mode == BPMode::Antipodal) {
      const Vec u = from_frame(E, cs[0]);
      velocities = {u, -u};
    } else {
      for (const Vec& c : cs) velocities.push_back(from_frame(E, c));
    }
    VecX X(static_cast<Eigen::Index>(velocities.size()) * n);
    double vol = 1.0;
    for (std::size_t i = 0; i < velocities.size(); ++i) {
      const FlowResult f = integrate_flow(*m, z, velocities[i], r, {}, {}, integrator);
      X.segment(static_cast<Eigen::Index>(i) * n, n) = f.end.position.coords;
      if (weight) vol *= std::sqrt(metric_at(*m, f.end.position).determinant());
    }
    if (weight) *weight = vol / (std::sqrt(metric_at(*m, zp).determinant()) * sigma);
    return X;
  }

  static Vec from_frame(const OrthonormalFrame& E, const Vec& c) { return E.vectors * c; }
};

}  // namespace

double fd_jacobian_oracle(const ManifoldSpec& m, const BPConfiguration& cfg, const OracleConfig& oc) {
  if (!(oc.fd_step >= 1e-8 && oc.fd_step <= 1e-2))
    throw Error(Errc::InvalidConfiguration, "fd_step must lie in [1e-8, 1e-2]");
  validate(m, cfg);
  const int n = m.dim();
  const double h = oc.fd_step;
  if (m.domain().margin(cfg.z.coords) < 10.0 * h)
    throw Error(Errc::PointOutsideChart, "center is too close to the chart boundary for finite differencing");
  if (!(cfg.r > 10.0 * h)) throw Error(Errc::InvalidConfiguration, "radius too small for the finite-difference step");

  const Mat g = metric_at(m, cfg.z);
  const OrthonormalFrame E = orthonormal_frame(m, cfg.z);

  Parametrization par{&m, cfg.mode, n, {}, 0, oc.integrator};
  VecX P0(1 + n);
  P0[0] = cfg.r;
  P0.segment(1, n) = cfg.z.coords;
  std::vector<Vec> base_dirs;
  if (cfg.mode == BPMode::Hyperplane) {
    const Vec cv = E.coordinates(g, cfg.directions.back());
    cv.cwiseAbs().maxCoeff(&par.skip);
    par.charts.emplace_back(cv);
    const MatX F = complement(cv, par.skip);
    for (int i = 0; i < n; ++i) {
      const Vec d = F.transpose() * E.coordinates(g, cfg.directions[static_cast<std::size_t>(i)]);
      par.charts.emplace_back(Vec(d.normalized()));
    }
  } else {
    for (const Vec& u : cfg.directions) par.charts.emplace_back(E.coordinates(g, u));
  }
  for (const auto& ch : par.charts) {
    const Vec th = base_angles(ch.d);
    VecX grown(P0.size() + th.size());
    grown << P0, th;
    P0 = grown;
  }
  const int np = par.param_count();

  // Same step count on every perturbed evaluation.
  const double speed = 1.0;
  par.integrator.fixed_steps = static_cast<int>(step_count(speed * cfg.r, oc.integrator));

  double weight = 0.0;
  const VecX X0 = par.map(P0, &weight, oc.pole_threshold);
  if (X0.size() != np) throw Error(Errc::InvalidConfiguration, "parameter and output dimensions differ");
  MatX Jm(np, np);
  for (int j = 0; j < np; ++j) {
    VecX Pp = P0, Pm = P0;
    Pp[j] += h;
    Pm[j] -= h;
    Jm.col(j) = (par.map(Pp, nullptr, oc.pole_threshold) - par.map(Pm, nullptr, oc.pole_threshold)) / (2.0 * h);
  }
  return std::abs(Jm.partialPivLu().determinant()) * weight;
}

}  // namespace bp
