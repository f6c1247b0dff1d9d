// SPDX-License-Identifier: Apache-2.0
#pragma once

// Single-chart Riemannian manifolds: metric, connection, curvature, frames.
//
// Curvature convention: R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z, so that
// K(u,w) = <R(u,w)w, u> / |u∧w|² is +k² on the sphere of radius 1/k and the
// Jacobi equation reads J'' + R(J,γ')γ' = 0.

#include "bp/metric_dsl.hpp"
#include "bp/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bp {

enum class ManifoldKind { Euclidean, Sphere, Hyperbolic, Custom };

/// How metric derivatives of custom manifolds are obtained. Built-in kinds
/// always use closed forms.
enum class Derivatives { Automatic, FiniteDifference };

struct ChartDomain {
  enum class Type { Unbounded, Ball, Box };

  Type type = Type::Unbounded;
  Vec center;  // Ball
  double radius = 0.0;
  Vec lower;  // Box
  Vec upper;

  static ChartDomain unbounded() { return {}; }
  static ChartDomain ball(Vec center, double radius);
  static ChartDomain box(Vec lower, Vec upper);

  bool contains(const Vec& x) const;
  /// Distance from x to the boundary (negative outside, +inf if unbounded).
  double margin(const Vec& x) const;
};

struct CoreTolerances {
  double degenerate_plane = 1e-12;  // Gram determinant threshold
  double unit_norm = 1e-10;
  double orthonormal = 1e-10;
  double rank = 1e-8;  // relative residual below which a candidate is dependent
};

class ManifoldSpec {
public:
  static ManifoldSpec euclidean(int n);
  static ManifoldSpec sphere(int n, double k);
  static ManifoldSpec hyperbolic(int n, double k);
  /// `entries` holds the upper triangle row by row: g11, g12, ..., g1n, g22, ...
  static ManifoldSpec custom(int n, std::span<const std::string> entries, ChartDomain domain,
                             Derivatives derivatives = Derivatives::Automatic);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return n_; }
  double k() const { return k_; }
  const ChartDomain& domain() const { return domain_; }
  Derivatives derivatives() const { return derivatives_; }
  /// Metric entry expression g_ij (0-based, i <= j). Custom only.
  const Expression& entry(int i, int j) const;
  /// Constant sectional curvature for built-ins (0, k², −k²); nullopt for custom.
  std::optional<double> constant_curvature() const;
  bool is_builtin() const { return kind_ != ManifoldKind::Custom; }

private:
  ManifoldKind kind_ = ManifoldKind::Euclidean;
  int n_ = 0;
  double k_ = 0.0;
  ChartDomain domain_;
  Derivatives derivatives_ = Derivatives::Automatic;
  std::vector<Expression> entries_;
};

std::string_view to_string(ManifoldKind kind);

/// Everything the flow integrator needs at one point.
struct LocalGeometry {
  int n = 0;
  Mat g;
  Mat ginv;
  Christoffel gamma;
  Tensor4 curvature;  // mixed R^m_{ijl} at (m, i, j, l); filled only on request
};

/// Throws PointOutsideChart.
void require_in_chart(const ManifoldSpec& m, const Vec& x);

LocalGeometry local_geometry(const ManifoldSpec& m, const Vec& x, bool with_curvature);

/// Throws PointOutsideChart.
Mat metric_at(const ManifoldSpec& m, const ChartPoint& p);
/// Throws PointOutsideChart, DifferentiationStepTooLarge.
Christoffel christoffel_at(const ManifoldSpec& m, const ChartPoint& p);
/// Lowered tensor R_{ijkl} = <R(∂_i,∂_j)∂_l, ∂_k>.
Tensor4 riemann_at(const ManifoldSpec& m, const ChartPoint& p);
/// Mixed tensor R^m_{ijl} with R(∂_i,∂_j)∂_l = R^m_{ijl} ∂_m, stored at (m, i, j, l).
Tensor4 riemann_mixed_at(const ManifoldSpec& m, const ChartPoint& p);

/// Partial derivatives ∂_l g_ij, indexed [l](i, j). Exposed for tests.
std::vector<Mat> metric_gradient_at(const ManifoldSpec& m, const ChartPoint& p);

double inner(const Mat& g, const Vec& a, const Vec& b);

/// Throws DegeneratePlane.
double sectional_curvature(const ManifoldSpec& m, const ChartPoint& p, const Vec& u, const Vec& w,
                           const CoreTolerances& tol = {});
/// Throws NonUnitVector.
double ricci_curvature(const ManifoldSpec& m, const ChartPoint& p, const Vec& u, const CoreTolerances& tol = {});

struct OrthonormalFrame {
  ChartPoint base;
  Mat vectors;  // column a is the a-th frame vector in chart components

  int size() const { return static_cast<int>(vectors.cols()); }
  Vec vector(int a) const { return vectors.col(a); }
  /// Coordinates of a tangent vector in this frame, E^T g w.
  Vec coordinates(const Mat& g, const Vec& w) const { return vectors.transpose() * (g * w); }
};

/// Gram–Schmidt of `candidates` (chart coordinate basis when empty) against the
/// prescribed vectors. `leading` become the first vectors of the frame and
/// `trailing`, if given, the last one.
/// Throws PrescribedVectorsNotOrthonormal, RankDeficiency.
OrthonormalFrame orthonormal_frame(const ManifoldSpec& m, const ChartPoint& p, std::span<const Vec> leading = {},
                                   const std::optional<Vec>& trailing = std::nullopt,
                                   const std::optional<Mat>& candidates = std::nullopt,
                                   const CoreTolerances& tol = {});

}  // namespace bp
