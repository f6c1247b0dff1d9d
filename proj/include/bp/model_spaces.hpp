// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-form geometry of the built-in model spaces, used as an inverse of
// the circumscribed-ball parametrization.
//
//   Euclidean   X = x in R^n
//   Sphere      X = Y/k in R^{n+1}, Y = (2y, |y|² − 1)/(1 + |y|²), y = k x
//   Hyperbolic  X = Y/k in R^{1,n}, Y = (1 + |y|², 2y)/(1 − |y|²), y = k x
//               with <a,b> = −a_0 b_0 + Σ a_i b_i

#include "bp/manifold.hpp"

#include <optional>
#include <span>

namespace bp {

/// Throws Unsupported for custom manifolds.
VecX embed(const ManifoldSpec& m, const Vec& x);
Vec chart_from_embedding(const ManifoldSpec& m, const VecX& X);
/// Ambient bilinear form of the embedding (Euclidean or Minkowski).
double ambient_inner(const ManifoldSpec& m, const VecX& a, const VecX& b);

/// Closed-form geodesic distance between chart points.
double model_distance(const ManifoldSpec& m, const Vec& a, const Vec& b);
/// Chart radius of the geodesic ball of radius rho about the chart origin.
double chart_radius(const ManifoldSpec& m, double rho);

struct CircumscribedBall {
  Vec center;  // chart coordinates
  double radius = 0.0;
};

/// Center and radius of the geodesic sphere through the points whose center
/// lies in the totally geodesic submanifold they span. nullopt when the points
/// are affinely dependent or (hyperbolic) no such sphere exists.
std::optional<CircumscribedBall> circumscribed_ball(const ManifoldSpec& m, std::span<const Vec> points);

}  // namespace bp
