// SPDX-License-Identifier: Apache-2.0
#include "bp/model_spaces.hpp"

#include "bp/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace bp {
namespace {

void require_builtin(const ManifoldSpec& m) {
  if (!m.is_builtin()) throw Error(Errc::Unsupported, "closed-form model geometry is only available for built-in kinds");
}

}  // namespace

VecX embed(const ManifoldSpec& m, const Vec& x) {
  require_builtin(m);
  const int n = m.dim();
  const double k = m.k();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return VecX(x);
    case ManifoldKind::Sphere: {
      const Vec y = k * x;
      const double q = y.squaredNorm();
      VecX X(n + 1);
      X.head(n) = 2.0 * y / (1.0 + q);
      X[n] = (q - 1.0) / (1.0 + q);
      return X / k;
    }
    case ManifoldKind::Hyperbolic: {
      const Vec y = k * x;
      const double q = y.squaredNorm();
      VecX X(n + 1);
      X[0] = (1.0 + q) / (1.0 - q);
      X.tail(n) = 2.0 * y / (1.0 - q);
      return X / k;
    }
    case ManifoldKind::Custom: break;
  }
  return {};
}

Vec chart_from_embedding(const ManifoldSpec& m, const VecX& X) {
  require_builtin(m);
  const int n = m.dim();
  const double k = m.k();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return Vec(X);
    case ManifoldKind::Sphere: {
      const VecX Y = k * X;
      return Vec(Y.head(n) / (1.0 - Y[n]) / k);
    }
    case ManifoldKind::Hyperbolic: {
      const VecX Y = k * X;
      return Vec(Y.tail(n) / (1.0 + Y[0]) / k);
    }
    case ManifoldKind::Custom: break;
  }
  return {};
}

double ambient_inner(const ManifoldSpec& m, const VecX& a, const VecX& b) {
  if (m.kind() == ManifoldKind::Hyperbolic) return a.tail(a.size() - 1).dot(b.tail(b.size() - 1)) - a[0] * b[0];
  return a.dot(b);
}

double model_distance(const ManifoldSpec& m, const Vec& a, const Vec& b) {
  require_builtin(m);
  const double k = m.k();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return (a - b).norm();
    case ManifoldKind::Sphere: {
      const double c = k * k * ambient_inner(m, embed(m, a), embed(m, b));
      return std::acos(std::clamp(c, -1.0, 1.0)) / k;
    }
    case ManifoldKind::Hyperbolic: {
      const double c = -k * k * ambient_inner(m, embed(m, a), embed(m, b));
      return std::acosh(std::max(1.0, c)) / k;
    }
    case ManifoldKind::Custom: break;
  }
  return 0.0;
}

double chart_radius(const ManifoldSpec& m, double rho) {
  require_builtin(m);
  const double k = m.k();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return rho;
    case ManifoldKind::Sphere: return std::tan(k * rho / 2.0) / k;
    case ManifoldKind::Hyperbolic: return std::tanh(k * rho / 2.0) / k;
    case ManifoldKind::Custom: break;
  }
  return 0.0;
}

std::optional<CircumscribedBall> circumscribed_ball(const ManifoldSpec& m, std::span<const Vec> points) {
  require_builtin(m);
  const int count = static_cast<int>(points.size());
  if (count < 2) throw Error(Errc::DimensionMismatch, "need at least two points");
  const double k = m.k();

  if (m.kind() == ManifoldKind::Euclidean) {
    // Z = X_0 + E a with 2 Eᵀ E a = (|e_j|²)_j.
    const int n = m.dim();
    MatX E(n, count - 1);
    for (int j = 1; j < count; ++j) E.col(j - 1) = points[static_cast<std::size_t>(j)] - points[0];
    const MatX G = E.transpose() * E;
    const auto lu = G.fullPivLu();
    if (lu.rank() < count - 1) return std::nullopt;
    const VecX a = lu.solve(0.5 * G.diagonal());
    const Vec z = points[0] + E * a;
    return CircumscribedBall{z, (z - points[0]).norm()};
  }

  std::vector<VecX> X;
  for (const Vec& p : points) X.push_back(embed(m, p));
  MatX G(count, count);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) G(i, j) = ambient_inner(m, X[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(j)]);
  const auto lu = G.fullPivLu();
  if (lu.rank() < count) return std::nullopt;
  const VecX c = lu.solve(VecX::Ones(count));
  VecX Z = VecX::Zero(X[0].size());
  for (int j = 0; j < count; ++j) Z += c[j] * X[static_cast<std::size_t>(j)];
  const double zz = ambient_inner(m, Z, Z);

  if (m.kind() == ManifoldKind::Sphere) {
    if (!(zz > 0.0)) return std::nullopt;
    // <Z, X_i> is the same positive number for all i: the nearer of the two centers.
    Z /= k * std::sqrt(zz);
    if (std::abs(k * Z[m.dim()] - 1.0) < 1e-12) return std::nullopt;  // center at the chart's missing pole
    const double cr = k * k * ambient_inner(m, Z, X[0]);
    return CircumscribedBall{chart_from_embedding(m, Z), std::acos(std::clamp(cr, -1.0, 1.0)) / k};
  }
  // Hyperbolic: the center must be timelike; Z' has <Z', X_i> > 0 so it is past-directed.
  if (!(zz < 0.0)) return std::nullopt;
  Z = -Z / (k * std::sqrt(-zz));
  const double ch = -k * k * ambient_inner(m, Z, X[0]);
  return CircumscribedBall{chart_from_embedding(m, Z), std::acosh(std::max(1.0, ch)) / k};
}

}  // namespace bp
