// SPDX-License-Identifier: Apache-2.0
#pragma once

// Finite-difference Jacobian of the full coordinate map, independent of the
// Jacobi-field machinery: only the exponential map is integrated.
//
// Parameters are (r, z, angles). Each unit direction is written in the
// coordinate Gram–Schmidt frame E(z) at z as u = E(z) c and c is given in
// hyperspherical angles θ by c = Q S(θ), where S(θ) is the standard angle map
// and Q a Householder reflection taking S(θ₀) to the base direction (θ₀ is
// the equator point π/2, ..., π/2, π/4). Hyperplane directions u_i are written
// as c_i = F(c_v) d_i with F(c_v) an orthonormal basis of c_v⊥ and d_i in
// angles on the unit sphere of R^{n−1}.
//
// The result is |det ∂x/∂P| · Π √det g(x_i) / (√det g(z) · Π σ), σ the density
// of each angle chart. The frame's dependence on z only adds a block below
// the diagonal of the (z, c) → (z, u) change of variables, so it drops out.

#include "bp/bp_jacobian.hpp"
#include "bp/geodesic.hpp"

namespace bp {

struct OracleConfig {
  double fd_step = 1e-5;
  IntegratorConfig integrator;
  double pole_threshold = 1e-3;  // minimum angle-chart density
};

/// Throws SingularParametrization, InvalidConfiguration, propagated errors.
double fd_jacobian_oracle(const ManifoldSpec& m, const BPConfiguration& cfg, const OracleConfig& oc = {});

/// Hyperspherical angle map S: R^{d−1} → S^{d−1} and its density.
Vec angle_map(const Vec& theta, int d);
double angle_density(const Vec& theta, int d);

}  // namespace bp
