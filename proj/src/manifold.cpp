// SPDX-License-Identifier: Apache-2.0
#include "bp/manifold.hpp"

#include "bp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bp {
namespace {

// g, ∂_l g and ∂_l∂_m g at one point, flat storage indexed like the tensors.
struct MetricJet {
  int n = 0;
  double g[kMaxDim][kMaxDim]{};
  double dg[kMaxDim][kMaxDim][kMaxDim]{};                 // [l][i][j]
  double ddg[kMaxDim][kMaxDim][kMaxDim][kMaxDim]{};       // [l][m][i][j]
};

std::string coords_text(const Vec& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

// Conformal built-ins: g = c δ with c = 4 / D², D = 1 + s k² |x|².
void conformal_jet(const ManifoldSpec& m, const Vec& x, int order, MetricJet& jet) {
  const int n = m.dim();
  const double s = m.kind() == ManifoldKind::Sphere ? 1.0 : -1.0;
  const double k2 = m.k() * m.k();
  const double D = 1.0 + s * k2 * x.squaredNorm();
  const double D3 = D * D * D;
  const double c = 4.0 / (D * D);
  double dc[kMaxDim];
  for (int l = 0; l < n; ++l) dc[l] = -16.0 * s * k2 * x[l] / D3;
  for (int i = 0; i < n; ++i) {
    jet.g[i][i] = c;
    for (int l = 0; l < n; ++l) jet.dg[l][i][i] = dc[l];
  }
  if (order < 2) return;
  const double D4 = D3 * D;
  for (int l = 0; l < n; ++l)
    for (int mm = 0; mm < n; ++mm) {
      const double ddc = (l == mm ? -16.0 * s * k2 / D3 : 0.0) + 96.0 * k2 * k2 * x[l] * x[mm] / D4;
      for (int i = 0; i < n; ++i) jet.ddg[l][mm][i][i] = ddc;
    }
}

void automatic_jet(const ManifoldSpec& m, const Vec& x, int order, MetricJet& jet) {
  const int n = m.dim();
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Expression& e = m.entry(i, j);
      if (order >= 2) {
        const Jet<2> v = evaluate_jet2(e, xs);
        jet.g[i][j] = jet.g[j][i] = v.v;
        for (int l = 0; l < n; ++l) {
          jet.dg[l][i][j] = jet.dg[l][j][i] = v.d[l];
          for (int mm = 0; mm < n; ++mm) jet.ddg[l][mm][i][j] = jet.ddg[l][mm][j][i] = v.hess(l, mm);
        }
      } else {
        const Jet<1> v = evaluate_jet1(e, xs);
        jet.g[i][j] = jet.g[j][i] = v.v;
        for (int l = 0; l < n; ++l) jet.dg[l][i][j] = jet.dg[l][j][i] = v.d[l];
      }
    }
}

void plain_metric(const ManifoldSpec& m, const Vec& x, double out[kMaxDim][kMaxDim]) {
  const int n = m.dim();
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out[i][j] = out[j][i] = evaluate(m.entry(i, j), xs);
}

// Central differences: first derivatives with h = max(1e-5, 1e-5|x_l|), second
// derivatives with a coarser H = max(1e-4, 1e-4|x_l|) to keep roundoff at 1e-8.
void finite_difference_jet(const ManifoldSpec& m, const Vec& x, int order, MetricJet& jet) {
  const int n = m.dim();
  double h[kMaxDim], H[kMaxDim];
  double reach = 0.0;
  for (int l = 0; l < n; ++l) {
    h[l] = std::max(1e-5, 1e-5 * std::abs(x[l]));
    H[l] = std::max(1e-4, 1e-4 * std::abs(x[l]));
    reach = std::max(reach, order >= 2 ? 2.0 * H[l] : h[l]);
  }
  if (m.domain().margin(x) < reach) {
    throw Error(Errc::DifferentiationStepTooLarge,
                "finite-difference stencil at " + coords_text(x) + " leaves the chart domain");
  }
  plain_metric(m, x, jet.g);
  double gp[kMaxDim][kMaxDim], gm[kMaxDim][kMaxDim];
  for (int l = 0; l < n; ++l) {
    Vec y = x;
    y[l] = x[l] + h[l];
    plain_metric(m, y, gp);
    y[l] = x[l] - h[l];
    plain_metric(m, y, gm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jet.dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h[l]);
  }
  if (order < 2) return;
  double g1[kMaxDim][kMaxDim], g2[kMaxDim][kMaxDim], g3[kMaxDim][kMaxDim], g4[kMaxDim][kMaxDim];
  for (int l = 0; l < n; ++l) {
    Vec y = x;
    y[l] = x[l] + H[l];
    plain_metric(m, y, gp);
    y[l] = x[l] - H[l];
    plain_metric(m, y, gm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        jet.ddg[l][l][i][j] = (gp[i][j] - 2.0 * jet.g[i][j] + gm[i][j]) / (H[l] * H[l]);
    for (int q = l + 1; q < n; ++q) {
      Vec z = x;
      z[l] = x[l] + H[l], z[q] = x[q] + H[q];
      plain_metric(m, z, g1);
      z[q] = x[q] - H[q];
      plain_metric(m, z, g2);
      z[l] = x[l] - H[l];
      plain_metric(m, z, g4);
      z[q] = x[q] + H[q];
      plain_metric(m, z, g3);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          jet.ddg[l][q][i][j] = jet.ddg[q][l][i][j] =
              (g1[i][j] - g2[i][j] - g3[i][j] + g4[i][j]) / (4.0 * H[l] * H[q]);
    }
  }
}

void metric_jet(const ManifoldSpec& m, const Vec& x, int order, MetricJet& jet) {
  jet.n = m.dim();
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      for (int i = 0; i < jet.n; ++i) jet.g[i][i] = 1.0;
      return;
    case ManifoldKind::Sphere:
    case ManifoldKind::Hyperbolic: conformal_jet(m, x, order, jet); return;
    case ManifoldKind::Custom:
      if (m.derivatives() == Derivatives::Automatic)
        automatic_jet(m, x, order, jet);
      else
        finite_difference_jet(m, x, order, jet);
      return;
  }
}

Vec require_dim(const ManifoldSpec& m, const Vec& x) {
  if (x.size() != m.dim()) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(m.dim()) + " chart coordinates, got " +
                                             std::to_string(x.size()));
  }
  return x;
}

}  // namespace

ChartDomain ChartDomain::ball(Vec center, double radius) {
  ChartDomain d;
  d.type = Type::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

ChartDomain ChartDomain::box(Vec lower, Vec upper) {
  ChartDomain d;
  d.type = Type::Box;
  d.lower = std::move(lower);
  d.upper = std::move(upper);
  return d;
}

bool ChartDomain::contains(const Vec& x) const { return x.allFinite() && margin(x) > 0.0; }

double ChartDomain::margin(const Vec& x) const {
  switch (type) {
    case Type::Unbounded: return std::numeric_limits<double>::infinity();
    case Type::Ball: return radius - (x - center).norm();
    case Type::Box: {
      double mg = std::numeric_limits<double>::infinity();
      for (int i = 0; i < x.size(); ++i) mg = std::min({mg, x[i] - lower[i], upper[i] - x[i]});
      return mg;
    }
  }
  return 0.0;
}

ManifoldSpec ManifoldSpec::euclidean(int n) {
  if (n < 2 || n > kMaxDim) throw Error(Errc::InvalidConfiguration, "dimension must be in [2, 6]");
  ManifoldSpec m;
  m.kind_ = ManifoldKind::Euclidean;
  m.n_ = n;
  return m;
}

ManifoldSpec ManifoldSpec::sphere(int n, double k) {
  ManifoldSpec m = euclidean(n);
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(Errc::InvalidConfiguration, "sphere requires k > 0");
  m.kind_ = ManifoldKind::Sphere;
  m.k_ = k;
  // Stereographic chart from the north pole; |x| = 4/k is 2 atan(4) ≈ 152° from the south pole.
  m.domain_ = ChartDomain::ball(Vec::Zero(n), 4.0 / k);
  return m;
}

ManifoldSpec ManifoldSpec::hyperbolic(int n, double k) {
  ManifoldSpec m = euclidean(n);
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(Errc::InvalidConfiguration, "hyperbolic space requires k > 0");
  m.kind_ = ManifoldKind::Hyperbolic;
  m.k_ = k;
  m.domain_ = ChartDomain::ball(Vec::Zero(n), 0.99 / k);
  return m;
}

ManifoldSpec ManifoldSpec::custom(int n, std::span<const std::string> entries, ChartDomain domain,
                                  Derivatives derivatives) {
  ManifoldSpec m = euclidean(n);
  m.kind_ = ManifoldKind::Custom;
  m.k_ = 0.0;
  const std::size_t expected = static_cast<std::size_t>(n * (n + 1) / 2);
  if (entries.size() != expected) {
    throw Error(Errc::InvalidConfiguration,
                "custom metric needs " + std::to_string(expected) + " entries, got " + std::to_string(entries.size()));
  }
  for (const auto& src : entries) m.entries_.push_back(parse_expression(src, n));
  if (domain.type == ChartDomain::Type::Ball && (domain.center.size() != n || !(domain.radius > 0.0)))
    throw Error(Errc::InvalidConfiguration, "ball chart domain needs an n-dimensional center and radius > 0");
  if (domain.type == ChartDomain::Type::Box) {
    if (domain.lower.size() != n || domain.upper.size() != n || !(domain.lower.array() < domain.upper.array()).all())
      throw Error(Errc::InvalidConfiguration, "box chart domain needs lower < upper in every coordinate");
  }
  m.domain_ = std::move(domain);
  m.derivatives_ = derivatives;
  return m;
}

const Expression& ManifoldSpec::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Row i of the upper triangle starts after i rows of decreasing length.
  const int offset = i * n_ - i * (i - 1) / 2;
  return entries_.at(static_cast<std::size_t>(offset + (j - i)));
}

std::optional<double> ManifoldSpec::constant_curvature() const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return 0.0;
    case ManifoldKind::Sphere: return k_ * k_;
    case ManifoldKind::Hyperbolic: return -k_ * k_;
    case ManifoldKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Hyperbolic: return "hyperbolic";
    case ManifoldKind::Custom: return "custom";
  }
  return "?";
}

void require_in_chart(const ManifoldSpec& m, const Vec& x) {
  require_dim(m, x);
  if (!m.domain().contains(x)) throw Error(Errc::PointOutsideChart, "point " + coords_text(x) + " is outside the chart domain");
}

LocalGeometry local_geometry(const ManifoldSpec& m, const Vec& x, bool with_curvature) {
  require_in_chart(m, x);
  const int n = m.dim();
  LocalGeometry out;
  out.n = n;
  out.gamma = Christoffel(n);
  out.curvature = Tensor4(n);

  if (m.kind() == ManifoldKind::Euclidean) {
    out.g = Mat::Identity(n, n);
    out.ginv = out.g;
    return out;
  }

  MetricJet jet;
  metric_jet(m, x, with_curvature ? 2 : 1, jet);
  out.g.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.g(i, j) = jet.g[i][j];
  out.ginv = out.g.ldlt().solve(Mat::Identity(n, n));

  // Christoffel symbols of the first kind Γ_{k,ij} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij).
  double first[kMaxDim][kMaxDim][kMaxDim];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        first[k][i][j] = first[k][j][i] = 0.5 * (jet.dg[i][j][k] + jet.dg[j][i][k] - jet.dg[k][i][j]);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += out.ginv(k, q) * first[q][i][j];
        out.gamma(k, i, j) = out.gamma(k, j, i) = s;
      }
  if (!with_curvature) return out;

  // ∂_l Γ^k_ij = ∂_l g^{kq} Γ_{q,ij} + g^{kq} ∂_l Γ_{q,ij}, with ∂_l g^{-1} = −g^{-1} ∂_l g g^{-1}.
  double dgamma[kMaxDim][kMaxDim][kMaxDim][kMaxDim];  // [l][k][i][j]
  for (int l = 0; l < n; ++l) {
    Mat dg(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg(a, b) = jet.dg[l][a][b];
    const Mat dginv = -out.ginv * dg * out.ginv;
    double dfirst[kMaxDim][kMaxDim][kMaxDim];
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dfirst[q][i][j] = 0.5 * (jet.ddg[l][i][j][q] + jet.ddg[l][j][i][q] - jet.ddg[l][q][i][j]);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += dginv(k, q) * first[q][i][j] + out.ginv(k, q) * dfirst[q][i][j];
          dgamma[l][k][i][j] = dgamma[l][k][j][i] = s;
        }
  }

  // R^m_{ijl} = ∂_iΓ^m_{jl} − ∂_jΓ^m_{il} + Γ^p_{jl}Γ^m_{ip} − Γ^p_{il}Γ^m_{jp}; antisymmetric in (i, j).
  for (int mm = 0; mm < n; ++mm)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = dgamma[i][mm][j][l] - dgamma[j][mm][i][l];
          for (int p = 0; p < n; ++p)
            s += out.gamma(p, j, l) * out.gamma(mm, i, p) - out.gamma(p, i, l) * out.gamma(mm, j, p);
          out.curvature(mm, i, j, l) = s;
          out.curvature(mm, j, i, l) = -s;
        }
  return out;
}

Mat metric_at(const ManifoldSpec& m, const ChartPoint& p) {
  require_in_chart(m, p.coords);
  const int n = m.dim();
  Mat g(n, n);
  if (m.kind() == ManifoldKind::Custom) {
    double raw[kMaxDim][kMaxDim];
    plain_metric(m, p.coords, raw);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = raw[i][j];
    return g;
  }
  MetricJet jet;
  metric_jet(m, p.coords, 0, jet);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = jet.g[i][j];
  return g;
}

std::vector<Mat> metric_gradient_at(const ManifoldSpec& m, const ChartPoint& p) {
  require_in_chart(m, p.coords);
  const int n = m.dim();
  MetricJet jet;
  metric_jet(m, p.coords, 1, jet);
  std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(l)](i, j) = jet.dg[l][i][j];
  return out;
}

Christoffel christoffel_at(const ManifoldSpec& m, const ChartPoint& p) {
  return local_geometry(m, p.coords, false).gamma;
}

Tensor4 riemann_mixed_at(const ManifoldSpec& m, const ChartPoint& p) {
  return local_geometry(m, p.coords, true).curvature;
}

Tensor4 riemann_at(const ManifoldSpec& m, const ChartPoint& p) {
  const LocalGeometry geo = local_geometry(m, p.coords, true);
  const int n = m.dim();
  Tensor4 low(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += geo.g(k, q) * geo.curvature(q, i, j, l);
          low(i, j, k, l) = s;
        }
  return low;
}

double inner(const Mat& g, const Vec& a, const Vec& b) { return a.dot(g * b); }

namespace {

// <R(u,w)w, u> from the mixed tensor.
double curvature_form(const LocalGeometry& geo, const Vec& u, const Vec& w) {
  const int n = geo.n;
  Vec Rwwu = Vec::Zero(n);  // R(u,w)w
  for (int mm = 0; mm < n; ++mm) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += geo.curvature(mm, i, j, l) * u[i] * w[j] * w[l];
    Rwwu[mm] = s;
  }
  return inner(geo.g, Rwwu, u);
}

}  // namespace

double sectional_curvature(const ManifoldSpec& m, const ChartPoint& p, const Vec& u, const Vec& w,
                           const CoreTolerances& tol) {
  const LocalGeometry geo = local_geometry(m, p.coords, true);
  const double uu = inner(geo.g, u, u), ww = inner(geo.g, w, w), uw = inner(geo.g, u, w);
  const double gram = uu * ww - uw * uw;
  if (!(gram > tol.degenerate_plane * std::max(1.0, uu * ww))) {
    throw Error(Errc::DegeneratePlane, "tangent vectors span a degenerate plane (Gram determinant " +
                                           std::to_string(gram) + ")");
  }
  return curvature_form(geo, u, w) / gram;
}

double ricci_curvature(const ManifoldSpec& m, const ChartPoint& p, const Vec& u, const CoreTolerances& tol) {
  const LocalGeometry geo = local_geometry(m, p.coords, true);
  const double norm = std::sqrt(inner(geo.g, u, u));
  if (!(std::abs(norm - 1.0) <= tol.unit_norm))
    throw Error(Errc::NonUnitVector, "Ricci curvature needs a unit vector, got norm " + std::to_string(norm));
  // Trace of X -> R(X,u)u.
  const int n = geo.n;
  double s = 0.0;
  for (int mm = 0; mm < n; ++mm)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) s += geo.curvature(mm, mm, j, l) * u[j] * u[l];
  return s;
}

OrthonormalFrame orthonormal_frame(const ManifoldSpec& m, const ChartPoint& p, std::span<const Vec> leading,
                                   const std::optional<Vec>& trailing, const std::optional<Mat>& candidates,
                                   const CoreTolerances& tol) {
  const Mat g = metric_at(m, p);
  const int n = m.dim();

  std::vector<Vec> fixed(leading.begin(), leading.end());
  if (trailing) fixed.push_back(*trailing);
  if (static_cast<int>(fixed.size()) > n)
    throw Error(Errc::RankDeficiency, "more prescribed vectors than the dimension");
  for (std::size_t a = 0; a < fixed.size(); ++a) {
    if (fixed[a].size() != n) throw Error(Errc::DimensionMismatch, "prescribed vector has the wrong dimension");
    for (std::size_t b = 0; b <= a; ++b) {
      const double target = a == b ? 1.0 : 0.0;
      if (!(std::abs(inner(g, fixed[a], fixed[b]) - target) <= tol.orthonormal)) {
        throw Error(Errc::PrescribedVectorsNotOrthonormal,
                    "prescribed vectors " + std::to_string(b) + " and " + std::to_string(a) + " are not orthonormal");
      }
    }
  }

  const Mat cand = candidates ? *candidates : Mat(Mat::Identity(n, n));
  if (cand.rows() != n) throw Error(Errc::DimensionMismatch, "candidate vectors have the wrong dimension");
  const int needed = n - static_cast<int>(fixed.size());
  std::vector<Vec> basis = fixed;
  std::vector<Vec> fresh;
  for (int c = 0; c < cand.cols() && static_cast<int>(fresh.size()) < needed; ++c) {
    Vec w = cand.col(c);
    const double scale = std::sqrt(inner(g, w, w));
    if (!(scale > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& e : basis) w -= inner(g, w, e) * e;
    const double len = std::sqrt(inner(g, w, w));
    if (len <= tol.rank * scale) continue;
    w /= len;
    basis.push_back(w);
    fresh.push_back(w);
  }
  if (static_cast<int>(fresh.size()) < needed)
    throw Error(Errc::RankDeficiency, "prescribed vectors and candidates do not span the tangent space");

  OrthonormalFrame frame;
  frame.base = p;
  frame.vectors.resize(n, n);
  int col = 0;
  for (const Vec& v : leading) frame.vectors.col(col++) = v;
  for (const Vec& v : fresh) frame.vectors.col(col++) = v;
  if (trailing) frame.vectors.col(col++) = *trailing;
  return frame;
}

}  // namespace bp
