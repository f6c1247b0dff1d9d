// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte Carlo check of the change of variables
//   ∫ f(x_0, ...) Π dvol(x_i)  =  ∫ f(Φ(z, r, u)) |J| dr dvol(z) Π dσ(u_i)
// on the built-in model spaces. The test function depends on the tuple
// through its circumscribed ball (center z, radius r), computed in closed form:
//   f = φ(r) ψ(d(z, o)) χ(x),  φ(r) = (1 − (r/R)²)²₊,  ψ(d) = (1 − (d/d_Z)²)²₊,
//   χ(x) = 1 + ½ sin(Σ_i Σ_j w_j x_i^j).

#include "bp/bp_jacobian.hpp"

#include <cstdint>
#include <functional>

namespace bp {

struct MCRegion {
  double center_radius = 0.3;  // d_Z, geodesic
  double ball_radius = 0.6;    // R
};

struct MCConfig {
  BPMode mode = BPMode::Full;
  long samples = 100'000;  // per side
  std::uint64_t seed = 1;
  MCRegion region;
  IntegratorConfig integrator{64.0};
  int shard_size = 4096;
  int workers = 1;  // capped by BP_NUM_WORKERS when set
};

struct MCResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  double z_score = 0.0;  // |lhs − rhs| / √(se_lhs² + se_rhs²)
  long samples = 0;
  long shards = 0;
};

/// Test function value for a point tuple (chart coordinates). Throws NonFiniteTestFunction.
double mc_test_function(const ManifoldSpec& m, std::span<const Vec> points, const MCRegion& region);

/// Throws Unsupported (custom manifolds), RegionEscapesChart, NonFiniteTestFunction.
MCResult mc_measure_equality(const ManifoldSpec& m, const MCConfig& cfg);

/// Worker count from BP_NUM_WORKERS (default: hardware concurrency), at least 1.
int worker_limit(int requested);

}  // namespace bp
