// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geodesic flow with parallel transport and Jacobi fields integrated as one
// first-order system by classical fixed-step RK4.
//
// State components are chart components. Transported vectors P and Jacobi
// pairs (J, W = D_t J) obey
//   x' = v,  v' = −Γ(v,v),  P' = −Γ(v,P),  J' = W − Γ(v,J),  W' = −R(J,v)v − Γ(v,W).

#include "bp/manifold.hpp"

#include <span>
#include <vector>

namespace bp {

struct IntegratorConfig {
  double steps_per_unit = 256.0;  // RK4 steps per unit arc length
  int min_steps = 8;
  long max_steps = 1'000'000;
  /// When positive, overrides the arc-length rule (finite differencing keeps
  /// the step count fixed across perturbed evaluations).
  int fixed_steps = 0;
  /// Allowed relative speed drift per unit arc length; non-positive disables.
  double tolerance = 1e-6;
};

struct GeodesicState {
  ChartPoint position;
  Vec velocity;
  double t = 0.0;
};

struct JacobiInit {
  Vec value;       // J(0)
  Vec derivative;  // J'(0), covariant
};

struct JacobiState {
  TangentVector value;
  Vec derivative;
};

struct FlowResult {
  GeodesicState end;
  std::vector<Vec> transported;
  std::vector<Vec> jacobi;
  std::vector<Vec> jacobi_derivative;
  long steps = 0;
  double speed_drift = 0.0;  // |‖γ'(t)‖ − ‖γ'(0)‖| / ‖γ'(0)‖
};

/// Number of RK4 steps used for a trajectory of the given arc length.
long step_count(double arc_length, const IntegratorConfig& cfg);

/// Throws LeftChartDomain (with exit time), StepCountOverflow, IntegratorDrift,
/// PointOutsideChart.
FlowResult integrate_flow(const ManifoldSpec& m, const Vec& z, const Vec& v, double t,
                          std::span<const Vec> transport, std::span<const JacobiInit> jacobi,
                          const IntegratorConfig& cfg = {});

ChartPoint exp_map(const ManifoldSpec& m, const ChartPoint& z, const TangentVector& v, double t,
                   const IntegratorConfig& cfg = {});

/// Transport of u0 along t ↦ exp_z(t·v), evaluated at t.
TangentVector parallel_transport(const ManifoldSpec& m, const GeodesicState& start, const Vec& u0, double t,
                                 const IntegratorConfig& cfg = {});

/// Jacobi field along t ↦ exp_z(t·v) with J(0) = j0, J'(0) = j0p, evaluated at t.
JacobiState jacobi_field(const ManifoldSpec& m, const GeodesicState& start, const Vec& j0, const Vec& j0p, double t,
                         const IntegratorConfig& cfg = {});

}  // namespace bp
