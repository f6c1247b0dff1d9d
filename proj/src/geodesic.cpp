// SPDX-License-Identifier: Apache-2.0
#include "bp/geodesic.hpp"

#include "bp/error.hpp"

#include <cmath>

namespace bp {
namespace {

struct Layout {
  int n;
  int transported;
  int jacobi;

  int size() const { return n * (2 + transported + 2 * jacobi); }
  int pos() const { return 0; }
  int vel() const { return n; }
  int frame(int a) const { return n * (2 + a); }
  int jac(int b) const { return n * (2 + transported + 2 * b); }
  int jac_d(int b) const { return jac(b) + n; }
};

// Γ^k_ij a^i b^j
inline void contract(const Christoffel& G, int n, const double* a, const double* b, double* out) {
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ai = a[i];
      for (int j = 0; j < n; ++j) s += G(k, i, j) * ai * b[j];
    }
    out[k] = s;
  }
}

void rhs(const ManifoldSpec& m, const Layout& L, const VecX& y, VecX& dy) {
  const int n = L.n;
  const Vec x = y.segment(L.pos(), n);
  const LocalGeometry geo = local_geometry(m, x, L.jacobi > 0);
  const double* v = y.data() + L.vel();
  double tmp[kMaxDim];

  for (int k = 0; k < n; ++k) dy[L.pos() + k] = v[k];
  contract(geo.gamma, n, v, v, tmp);
  for (int k = 0; k < n; ++k) dy[L.vel() + k] = -tmp[k];

  for (int a = 0; a < L.transported; ++a) {
    contract(geo.gamma, n, v, y.data() + L.frame(a), tmp);
    for (int k = 0; k < n; ++k) dy[L.frame(a) + k] = -tmp[k];
  }

  if (L.jacobi == 0) return;
  // Q^k_i = R^k_{ijl} v^j v^l, so R(J,v)v = Q J.
  double Q[kMaxDim][kMaxDim];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += geo.curvature(k, i, j, l) * v[j] * v[l];
      Q[k][i] = s;
    }
  for (int b = 0; b < L.jacobi; ++b) {
    const double* J = y.data() + L.jac(b);
    const double* W = y.data() + L.jac_d(b);
    contract(geo.gamma, n, v, J, tmp);
    for (int k = 0; k < n; ++k) dy[L.jac(b) + k] = W[k] - tmp[k];
    contract(geo.gamma, n, v, W, tmp);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += Q[k][i] * J[i];
      dy[L.jac_d(b) + k] = -s - tmp[k];
    }
  }
}

std::string exit_message(double t) { return "geodesic left the chart domain at t = " + std::to_string(t); }

}  // namespace

long step_count(double arc_length, const IntegratorConfig& cfg) {
  if (cfg.fixed_steps > 0) return cfg.fixed_steps;
  const double want = std::ceil(cfg.steps_per_unit * arc_length);
  if (!std::isfinite(want) || want > static_cast<double>(cfg.max_steps)) {
    throw Error(Errc::StepCountOverflow, "trajectory of arc length " + std::to_string(arc_length) + " needs more than " +
                                             std::to_string(cfg.max_steps) + " steps");
  }
  return std::max<long>(cfg.min_steps, static_cast<long>(want));
}

FlowResult integrate_flow(const ManifoldSpec& m, const Vec& z, const Vec& v, double t,
                          std::span<const Vec> transport, std::span<const JacobiInit> jacobi,
                          const IntegratorConfig& cfg) {
  const int n = m.dim();
  if (v.size() != n) throw Error(Errc::DimensionMismatch, "velocity has the wrong dimension");
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::InvalidConfiguration, "integration time must be >= 0");
  if (cfg.fixed_steps > cfg.max_steps) throw Error(Errc::StepCountOverflow, "fixed step count exceeds max_steps");

  const Layout L{n, static_cast<int>(transport.size()), static_cast<int>(jacobi.size())};
  VecX y(L.size());
  y.segment(L.pos(), n) = z;
  y.segment(L.vel(), n) = v;
  for (int a = 0; a < L.transported; ++a) y.segment(L.frame(a), n) = transport[static_cast<std::size_t>(a)];
  for (int b = 0; b < L.jacobi; ++b) {
    y.segment(L.jac(b), n) = jacobi[static_cast<std::size_t>(b)].value;
    y.segment(L.jac_d(b), n) = jacobi[static_cast<std::size_t>(b)].derivative;
  }

  const Mat g0 = metric_at(m, ChartPoint{z});
  const double speed0 = std::sqrt(inner(g0, v, v));
  const double arc = speed0 * t;
  const long N = t > 0.0 ? step_count(arc, cfg) : 0;
  const double h = N > 0 ? t / static_cast<double>(N) : 0.0;

  const ChartDomain& dom = m.domain();
  auto check = [&](const VecX& s, double when) {
    const Vec x = s.segment(L.pos(), n);
    if (!dom.contains(x)) throw LeftChartDomain(when, exit_message(when));
  };

  VecX k1(L.size()), k2(L.size()), k3(L.size()), k4(L.size()), tmp(L.size());
  for (long s = 0; s < N; ++s) {
    const double t0 = h * static_cast<double>(s);
    rhs(m, L, y, k1);
    tmp = y + 0.5 * h * k1;
    check(tmp, t0 + 0.5 * h);
    rhs(m, L, tmp, k2);
    tmp = y + 0.5 * h * k2;
    check(tmp, t0 + 0.5 * h);
    rhs(m, L, tmp, k3);
    tmp = y + h * k3;
    check(tmp, t0 + h);
    rhs(m, L, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(y, t0 + h);
  }

  FlowResult out;
  out.end.position.coords = y.segment(L.pos(), n);
  out.end.velocity = y.segment(L.vel(), n);
  out.end.t = t;
  out.steps = N;
  for (int a = 0; a < L.transported; ++a) out.transported.push_back(y.segment(L.frame(a), n));
  for (int b = 0; b < L.jacobi; ++b) {
    out.jacobi.push_back(y.segment(L.jac(b), n));
    out.jacobi_derivative.push_back(y.segment(L.jac_d(b), n));
  }
  if (speed0 > 0.0 && N > 0) {
    const Mat g1 = metric_at(m, out.end.position);
    const double speed1 = std::sqrt(inner(g1, out.end.velocity, out.end.velocity));
    out.speed_drift = std::abs(speed1 - speed0) / speed0;
    if (cfg.tolerance > 0.0 && out.speed_drift > cfg.tolerance * std::max(arc, 1.0)) {
      throw Error(Errc::IntegratorDrift, "relative speed drift " + std::to_string(out.speed_drift) +
                                             " exceeds tolerance over arc length " + std::to_string(arc));
    }
  }
  return out;
}

ChartPoint exp_map(const ManifoldSpec& m, const ChartPoint& z, const TangentVector& v, double t,
                   const IntegratorConfig& cfg) {
  return integrate_flow(m, z.coords, v.components, t, {}, {}, cfg).end.position;
}

TangentVector parallel_transport(const ManifoldSpec& m, const GeodesicState& start, const Vec& u0, double t,
                                 const IntegratorConfig& cfg) {
  const Vec vs[] = {u0};
  FlowResult r = integrate_flow(m, start.position.coords, start.velocity, t, vs, {}, cfg);
  return TangentVector{r.end.position, r.transported[0]};
}

JacobiState jacobi_field(const ManifoldSpec& m, const GeodesicState& start, const Vec& j0, const Vec& j0p, double t,
                         const IntegratorConfig& cfg) {
  const JacobiInit init[] = {{j0, j0p}};
  FlowResult r = integrate_flow(m, start.position.coords, start.velocity, t, {}, init, cfg);
  return JacobiState{TangentVector{r.end.position, r.jacobi[0]}, r.jacobi_derivative[0]};
}

}  // namespace bp
