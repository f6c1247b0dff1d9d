// SPDX-License-Identifier: Apache-2.0
#include "bp/bp_jacobian.hpp"

#include "bp/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace bp {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double det(const MatX& a) { return a.rows() == 0 ? 1.0 : a.partialPivLu().determinant(); }

struct Projection {
  MatX values;  // <rows_a(r), J_b(r)>
  Vec endpoint;
};

// One geodesic with the given transported rows and Jacobi fields.
Projection project(const ManifoldSpec& m, const Vec& z, const Vec& velocity, const std::vector<Vec>& rows,
                   const std::vector<JacobiInit>& fields, double r, const IntegratorConfig& cfg) {
  const FlowResult f = integrate_flow(m, z, velocity, r, rows, fields, cfg);
  const Mat g = metric_at(m, f.end.position);
  Projection p;
  p.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fields.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < fields.size(); ++b)
      p.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          inner(g, f.transported[a], f.jacobi[b]);
  p.endpoint = f.end.position.coords;
  return p;
}

std::vector<Vec> frame_tail(const OrthonormalFrame& frame) {
  std::vector<Vec> rows;
  for (int a = 1; a < frame.size(); ++a) rows.push_back(frame.vector(a));
  return rows;
}

void require_frame_start(const Mat& g, const OrthonormalFrame& frame, const Vec& u, const CoreTolerances& tol = {}) {
  if (frame.size() != u.size() || (frame.vector(0) - u).norm() > tol.orthonormal * std::max(1.0, std::sqrt(inner(g, u, u))))
    throw Error(Errc::InvalidConfiguration, "frame must start with the direction vector");
}

OrthonormalFrame shared_frame(const ManifoldSpec& m, const ChartPoint& z, const BPOptions& opt,
                              const std::optional<Vec>& trailing = std::nullopt) {
  return orthonormal_frame(m, z, {}, trailing, opt.frame_candidates, opt.core);
}

OrthonormalFrame direction_frame(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const BPOptions& opt,
                                 const std::optional<Vec>& trailing = std::nullopt) {
  const Vec lead[] = {u};
  return orthonormal_frame(m, z, lead, trailing, opt.frame_candidates, opt.core);
}

// Coordinates of the directions in the common frame whose last vector is v,
// with the v component dropped.
std::vector<Vec> hyperplane_coords(const Mat& g, const OrthonormalFrame& common, std::span<const Vec> dirs) {
  const int n = common.size();
  std::vector<Vec> out;
  for (const Vec& u : dirs) out.push_back(common.coordinates(g, u).head(n - 1));
  return out;
}

void require_nondegenerate(double delta, const BPOptions& opt) {
  if (!(delta > opt.degenerate_simplex))
    throw Error(Errc::DegenerateSimplex, "directions span a degenerate simplex (volume " + std::to_string(delta) + ")");
}

}  // namespace

std::string_view to_string(BPMode mode) {
  switch (mode) {
    case BPMode::Full: return "full";
    case BPMode::Antipodal: return "antipodal";
    case BPMode::Hyperplane: return "hyperplane";
  }
  return "?";
}

BPMode parse_mode(std::string_view name) {
  if (name == "full") return BPMode::Full;
  if (name == "antipodal") return BPMode::Antipodal;
  if (name == "hyperplane") return BPMode::Hyperplane;
  throw Error(Errc::InvalidConfiguration, "unknown mode '" + std::string(name) + "'");
}

int direction_count(BPMode mode, int n) {
  switch (mode) {
    case BPMode::Full: return n + 1;
    case BPMode::Antipodal: return 1;
    case BPMode::Hyperplane: return n + 1;
  }
  return 0;
}

double simplex_volume(std::span<const Vec> points) {
  if (points.size() < 2) throw Error(Errc::DimensionMismatch, "a simplex needs at least two vertices");
  const int d = static_cast<int>(points[0].size());
  const int dim = static_cast<int>(points.size()) - 1;
  for (const Vec& p : points)
    if (p.size() != d) throw Error(Errc::DimensionMismatch, "simplex vertices have different dimensions");
  if (dim > d) throw Error(Errc::DimensionMismatch, "too many vertices for the ambient dimension");
  MatX E(d, dim);
  for (int j = 0; j < dim; ++j) E.col(j) = points[static_cast<std::size_t>(j + 1)] - points[0];
  double vol;
  if (dim == d) {
    vol = std::abs(det(E));
  } else {
    vol = std::sqrt(std::max(0.0, det(E.transpose() * E)));
  }
  return vol / factorial(dim);
}

void validate(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  const int n = m.dim();
  if (!(cfg.r > 0.0) || !std::isfinite(cfg.r)) throw Error(Errc::InvalidConfiguration, "radius must be positive");
  if (cfg.z.coords.size() != n) throw Error(Errc::DimensionMismatch, "center has the wrong dimension");
  require_in_chart(m, cfg.z.coords);
  const int want = direction_count(cfg.mode, n);
  if (static_cast<int>(cfg.directions.size()) != want) {
    throw Error(Errc::InvalidConfiguration, std::string(to_string(cfg.mode)) + " mode needs " + std::to_string(want) +
                                                " directions, got " + std::to_string(cfg.directions.size()));
  }
  const Mat g = metric_at(m, cfg.z);
  for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
    const Vec& u = cfg.directions[i];
    if (u.size() != n) throw Error(Errc::DimensionMismatch, "direction has the wrong dimension");
    const double norm = std::sqrt(inner(g, u, u));
    if (!(std::abs(norm - 1.0) <= opt.core.unit_norm))
      throw Error(Errc::NonUnitVector, "direction " + std::to_string(i) + " has norm " + std::to_string(norm));
  }
  if (cfg.mode == BPMode::Hyperplane) {
    const Vec& v = cfg.directions.back();
    for (int i = 0; i < n; ++i) {
      const double c = inner(g, v, cfg.directions[static_cast<std::size_t>(i)]);
      if (!(std::abs(c) <= opt.core.orthonormal))
        throw Error(Errc::InvalidConfiguration, "direction " + std::to_string(i) + " is not orthogonal to the normal");
    }
  }
}

Mat matrix_B(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame, double r,
             const IntegratorConfig& cfg, int sign) {
  require_frame_start(metric_at(m, z), frame, u);
  const double s = sign >= 0 ? 1.0 : -1.0;
  std::vector<JacobiInit> fields;
  for (int a = 1; a < frame.size(); ++a) fields.push_back({Vec::Zero(u.size()), s * frame.vector(a)});
  return project(m, z.coords, s * u, frame_tail(frame), fields, r, cfg).values;
}

Mat matrix_A_antipodal(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame,
                       double r, int sign, const IntegratorConfig& cfg) {
  require_frame_start(metric_at(m, z), frame, u);
  const double s = sign >= 0 ? 1.0 : -1.0;
  std::vector<JacobiInit> fields;
  for (int a = 1; a < frame.size(); ++a) fields.push_back({frame.vector(a), Vec::Zero(u.size())});
  return project(m, z.coords, s * u, frame_tail(frame), fields, r, cfg).values;
}

HyperplaneBlocks matrix_A_column_and_C(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const Vec& v,
                                       const OrthonormalFrame& frame, const Vec& u_coords, double r,
                                       const IntegratorConfig& cfg) {
  const int n = m.dim();
  require_frame_start(metric_at(m, z), frame, u);
  if ((frame.vector(n - 1) - v).norm() > 1e-10 * std::max(1.0, v.norm()))
    throw Error(Errc::InvalidConfiguration, "frame must end with the normal vector");
  if (u_coords.size() != n - 1) throw Error(Errc::DimensionMismatch, "u coordinates must have n-1 entries");
  const Vec zero = Vec::Zero(n);
  std::vector<JacobiInit> fields = {{v, zero}, {zero, v}};
  for (int a = 1; a < n - 1; ++a) fields.push_back({zero, frame.vector(a)});
  const MatX P = project(m, z.coords, u, frame_tail(frame), fields, r, cfg).values;
  HyperplaneBlocks out;
  out.a_column = P.col(0);
  // J̄_m'(0) = −u^m v, so by linearity J̄_m = −u^m J̃_v.
  out.C = -P.col(1) * u_coords.transpose();
  out.B = P.rightCols(n - 2);
  return out;
}

RawBlocks raw_blocks(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame,
                     const OrthonormalFrame& common, double r, const IntegratorConfig& cfg) {
  const int n = m.dim();
  require_frame_start(metric_at(m, z), frame, u);
  const Vec zero = Vec::Zero(n);
  std::vector<Vec> rows;
  for (int a = 0; a < n; ++a) rows.push_back(frame.vector(a));
  std::vector<JacobiInit> fields;
  for (int c = 0; c < n; ++c) fields.push_back({common.vector(c), zero});
  for (int a = 1; a < n; ++a) fields.push_back({zero, frame.vector(a)});
  const MatX P = project(m, z.coords, u, rows, fields, r, cfg).values;
  return RawBlocks{P.leftCols(n), P.rightCols(n - 1)};
}

JacobianEvaluation evaluate_phi(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  validate(m, cfg, opt);
  const int n = m.dim();
  const Mat g = metric_at(m, cfg.z);
  const Vec zero = Vec::Zero(n);
  JacobianEvaluation out;

  switch (cfg.mode) {
    case BPMode::Full: {
      const OrthonormalFrame E = shared_frame(m, cfg.z, opt);
      std::vector<Vec> coords;
      for (const Vec& u : cfg.directions) coords.push_back(E.coordinates(g, u));
      out.simplex_volume = simplex_volume(coords);
      require_nondegenerate(out.simplex_volume, opt);
      double value = factorial(n) * out.simplex_volume;
      for (const Vec& u : cfg.directions) {
        const OrthonormalFrame V = direction_frame(m, cfg.z, u, opt);
        std::vector<JacobiInit> fields;
        for (int a = 1; a < n; ++a) fields.push_back({zero, V.vector(a)});
        const Projection p = project(m, cfg.z.coords, u, frame_tail(V), fields, cfg.r, opt.integrator);
        value *= std::abs(det(p.values));
        out.blocks.push_back(p.values);
        out.points.push_back(p.endpoint);
      }
      out.value = value;
      return out;
    }
    case BPMode::Antipodal: {
      const Vec& u = cfg.directions[0];
      const OrthonormalFrame V = direction_frame(m, cfg.z, u, opt);
      MatX D(2 * (n - 1), 2 * (n - 1));
      for (int i = 0; i < 2; ++i) {
        const double s = i == 0 ? 1.0 : -1.0;
        std::vector<JacobiInit> fields;
        for (int a = 1; a < n; ++a) fields.push_back({V.vector(a), zero});
        for (int a = 1; a < n; ++a) fields.push_back({zero, s * V.vector(a)});
        const Projection p = project(m, cfg.z.coords, s * u, frame_tail(V), fields, cfg.r, opt.integrator);
        D.middleRows(i * (n - 1), n - 1) = p.values;
        out.points.push_back(p.endpoint);
      }
      out.simplex_volume = 2.0;
      out.value = 2.0 * std::abs(det(D));
      out.blocks.push_back(D);
      return out;
    }
    case BPMode::Hyperplane: {
      const Vec& v = cfg.directions.back();
      const std::span<const Vec> us(cfg.directions.data(), static_cast<std::size_t>(n));
      const OrthonormalFrame common = shared_frame(m, cfg.z, opt, v);
      const std::vector<Vec> coords = hyperplane_coords(g, common, us);
      out.simplex_volume = simplex_volume(coords);
      require_nondegenerate(out.simplex_volume, opt);
      const int size = n * (n - 1);
      MatX D = MatX::Zero(size, size);
      for (int i = 0; i < n; ++i) {
        const Vec& u = us[static_cast<std::size_t>(i)];
        const OrthonormalFrame V = direction_frame(m, cfg.z, u, opt, v);
        std::vector<JacobiInit> fields = {{v, zero}, {zero, v}};
        for (int a = 1; a < n - 1; ++a) fields.push_back({zero, V.vector(a)});
        const Projection p = project(m, cfg.z.coords, u, frame_tail(V), fields, cfg.r, opt.integrator);
        const int row = i * (n - 1);
        D.block(row, 0, n - 1, 1) = p.values.col(0);
        D.block(row, 1, n - 1, n - 1) = -p.values.col(1) * coords[static_cast<std::size_t>(i)].transpose();
        D.block(row, n + i * (n - 2), n - 1, n - 2) = p.values.rightCols(n - 2);
        out.points.push_back(p.endpoint);
      }
      out.value = factorial(n - 1) * out.simplex_volume * std::abs(det(D));
      out.blocks.push_back(D);
      return out;
    }
  }
  return out;
}

double jacobian_phi_n(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  if (cfg.mode != BPMode::Full) throw Error(Errc::InvalidConfiguration, "expected a full-mode configuration");
  return evaluate_phi(m, cfg, opt).value;
}

double jacobian_phi_1(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  if (cfg.mode != BPMode::Antipodal) throw Error(Errc::InvalidConfiguration, "expected an antipodal configuration");
  return evaluate_phi(m, cfg, opt).value;
}

double jacobian_phi_nm1(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  if (cfg.mode != BPMode::Hyperplane) throw Error(Errc::InvalidConfiguration, "expected a hyperplane configuration");
  return evaluate_phi(m, cfg, opt).value;
}

double closed_form_jacobian(ManifoldKind kind, double k, int n, double r, double delta) {
  return closed_form_jacobian(BPMode::Full, kind, k, n, r, delta);
}

double closed_form_jacobian(BPMode mode, ManifoldKind kind, double k, int n, double r, double delta) {
  if (!(r > 0.0)) throw Error(Errc::RadiusOutOfRange, "radius must be positive");
  double s = r, c = 1.0;
  switch (kind) {
    case ManifoldKind::Euclidean: break;
    case ManifoldKind::Sphere:
      if (!(k * r < std::numbers::pi / 2))
        throw Error(Errc::RadiusOutOfRange, "sphere closed form needs k r < pi/2, got " + std::to_string(k * r));
      s = std::sin(k * r) / k;
      c = std::cos(k * r);
      break;
    case ManifoldKind::Hyperbolic:
      s = std::sinh(k * r) / k;
      c = std::cosh(k * r);
      break;
    case ManifoldKind::Custom: throw Error(Errc::Unsupported, "no closed form for custom manifolds");
  }
  switch (mode) {
    case BPMode::Full: return factorial(n) * delta * std::pow(s, n * n - 1);
    case BPMode::Antipodal: return std::pow(2.0, n) * std::pow(c * s, n - 1);
    case BPMode::Hyperplane: {
      const double lead = factorial(n - 1) * delta;
      return lead * lead * c * std::pow(s, n * n - n - 1);
    }
  }
  return 0.0;
}

ExpansionPrediction expansion_phi_n(const ManifoldSpec& m, const ChartPoint& z, std::span<const Vec> dirs,
                                    const BPOptions& opt) {
  const int n = m.dim();
  if (static_cast<int>(dirs.size()) != n + 1) throw Error(Errc::InvalidConfiguration, "full mode needs n+1 directions");
  const Mat g = metric_at(m, z);
  const OrthonormalFrame E = shared_frame(m, z, opt);
  std::vector<Vec> coords;
  double ric = 0.0;
  for (const Vec& u : dirs) {
    coords.push_back(E.coordinates(g, u));
    ric += ricci_curvature(m, z, u, opt.core);
  }
  const double delta = simplex_volume(coords);
  require_nondegenerate(delta, opt);
  const double lead = factorial(n) * delta;
  return {n * n - 1, lead, n * n + 1, -lead * ric / 6.0};
}

ExpansionPrediction expansion_phi_1(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const BPOptions& opt) {
  const int n = m.dim();
  const double lead = std::pow(2.0, n);
  return {n - 1, lead, n + 1, -lead * (2.0 / 3.0) * ricci_curvature(m, z, u, opt.core)};
}

HyperplaneExpansion expansion_phi_nm1(const ManifoldSpec& m, const ChartPoint& z, const Vec& v,
                                      std::span<const Vec> dirs, const BPOptions& opt) {
  const int n = m.dim();
  if (static_cast<int>(dirs.size()) != n) throw Error(Errc::InvalidConfiguration, "hyperplane mode needs n directions u_i");
  const Mat g = metric_at(m, z);
  const OrthonormalFrame common = shared_frame(m, z, opt, v);
  const std::vector<Vec> coords = hyperplane_coords(g, common, dirs);

  HyperplaneExpansion out;
  out.delta.resize(n, n);
  out.k_printed.resize(n, n);
  out.k_derived.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec& u = dirs[static_cast<std::size_t>(i)];
    const double K = sectional_curvature(m, z, u, v, opt.core);
    out.ricci_v_sum += ricci_curvature(m, z, u, opt.core) - K;
    const Vec& c = coords[static_cast<std::size_t>(i)];
    out.delta(i, 0) = 1.0;
    out.delta.row(i).tail(n - 1) = -c.transpose();
    out.k_printed(i, 0) = out.k_derived(i, 0) = K / 2.0;
    out.k_printed.row(i).tail(n - 1) = c.transpose() * (K / 6.0);
    out.k_derived.row(i).tail(n - 1) = -c.transpose() * (K / 6.0);
  }
  out.det_delta = det(out.delta);
  if (!(std::abs(out.det_delta) > opt.singular_delta))
    throw Error(Errc::SingularDelta, "matrix Delta is singular (det " + std::to_string(out.det_delta) + ")");
  const auto lu = out.delta.partialPivLu();
  out.trace_printed = lu.solve(out.k_printed).trace();
  out.trace_derived = lu.solve(out.k_derived).trace();

  const double lead = out.det_delta * out.det_delta;
  const int p = n * (n - 1) - 1;
  out.printed = {p, lead, p + 2, -lead * (out.ricci_v_sum + out.trace_printed)};
  out.derived = {p, lead, p + 2, -lead * (out.ricci_v_sum / 6.0 + out.trace_derived)};
  return out;
}

ExpansionPrediction expansion_for(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt) {
  switch (cfg.mode) {
    case BPMode::Full: return expansion_phi_n(m, cfg.z, cfg.directions, opt);
    case BPMode::Antipodal: return expansion_phi_1(m, cfg.z, cfg.directions.at(0), opt);
    case BPMode::Hyperplane: {
      const std::span<const Vec> us(cfg.directions.data(), cfg.directions.size() - 1);
      return expansion_phi_nm1(m, cfg.z, cfg.directions.back(), us, opt).derived;
    }
  }
  return {};
}

}  // namespace bp
