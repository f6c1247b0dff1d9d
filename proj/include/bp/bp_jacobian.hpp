// SPDX-License-Identifier: Apache-2.0
#pragma once

// Jacobians of the circumscribed-ball change of variables
//   Φ(z, r, u_0, ...) = (exp_z(r u_0), ...)
// for three configurations:
//   Full        m = n      directions u_0 .. u_n
//   Antipodal   m = 1      direction u; points exp_z(±r u)
//   Hyperplane  m = n − 1  directions u_0 .. u_{n−1} followed by the normal v
//
// Block entries are inner products at x_i of a transported frame
// (v_2(r), ..., v_n(r)) with Jacobi fields; v_1 = u_i.

#include "bp/geodesic.hpp"
#include "bp/manifold.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bp {

enum class BPMode { Full, Antipodal, Hyperplane };

std::string_view to_string(BPMode mode);
/// Throws Error(InvalidConfiguration) for unknown names.
BPMode parse_mode(std::string_view name);

struct BPConfiguration {
  BPMode mode = BPMode::Full;
  double r = 0.0;
  ChartPoint z;
  std::vector<Vec> directions;  // chart components at z
};

struct BPOptions {
  IntegratorConfig integrator;
  /// Candidate vectors for Gram–Schmidt completion of frames (coordinate basis when empty).
  std::optional<Mat> frame_candidates;
  double degenerate_simplex = 1e-14;
  double singular_delta = 1e-12;
  CoreTolerances core;
};

struct ExpansionPrediction {
  int leading_exponent = 0;
  double leading_coeff = 0.0;
  int correction_exponent = 0;
  double correction_coeff = 0.0;
};

/// Volume of the simplex spanned by m+1 points given in a common orthonormal
/// coordinate system; 0 for degenerate input. Throws DimensionMismatch.
double simplex_volume(std::span<const Vec> points);

/// Number of directions a configuration of this mode carries in dimension n.
int direction_count(BPMode mode, int n);

/// Throws NonUnitVector, InvalidConfiguration, DimensionMismatch, PointOutsideChart.
void validate(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});

/// B_lm = <v_{l+1}(r), J̃_{m+1}(r)>, J̃(0) = 0, J̃'(0) = sign·v_{m+1}, along t ↦ exp_z(sign·t·u).
Mat matrix_B(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame, double r,
             const IntegratorConfig& cfg = {}, int sign = 1);

/// A_lm = <v_{l+1}(r), J_{m+1}(r)>, J(0) = v_{m+1}, J'(0) = 0, along t ↦ exp_z(sign·t·u).
Mat matrix_A_antipodal(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame,
                       double r, int sign, const IntegratorConfig& cfg = {});

struct HyperplaneBlocks {
  Vec a_column;  // <v_{l+1}(r), J_v(r)>, J_v(0) = v, J_v'(0) = 0
  Mat C;         // <v_{l+1}(r), J̄_m(r)>, J̄_m(0) = 0, J̄_m'(0) = −u^m v
  Mat B;         // (n−1)×(n−2), fields with J̃'(0) = v_2 .. v_{n−1}
};

/// `frame` must have vectors[0] = u and vectors[n−1] = v; `u_coords` are the
/// n−1 coordinates of u in the common frame at z whose last vector is v.
HyperplaneBlocks matrix_A_column_and_C(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const Vec& v,
                                       const OrthonormalFrame& frame, const Vec& u_coords, double r,
                                       const IntegratorConfig& cfg = {});

/// Unreduced derivative blocks at x_i = exp_z(r u) in the transported frame
/// (v_1(r), ..., v_n(r)): dz columns are moves of z along the common frame,
/// du columns are moves of u along v_2 .. v_n.
struct RawBlocks {
  Mat dz;  // n × n
  Mat du;  // n × (n−1)
};
RawBlocks raw_blocks(const ManifoldSpec& m, const ChartPoint& z, const Vec& u, const OrthonormalFrame& frame,
                     const OrthonormalFrame& common, double r, const IntegratorConfig& cfg = {});

struct JacobianEvaluation {
  double value = 0.0;
  double simplex_volume = 0.0;    // Δ_n, Δ_1 = 2 or Δ_{n−1}
  std::vector<Vec> points;        // x_i
  std::vector<Mat> blocks;        // per-point B, or the assembled D for antipodal / hyperplane
};

/// Dispatches on cfg.mode. Throws DegenerateSimplex and propagated errors.
JacobianEvaluation evaluate_phi(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});

double jacobian_phi_n(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});
double jacobian_phi_1(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});
double jacobian_phi_nm1(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});

/// n!·Δ·s(r)^{n²−1}, s = r, sin(kr)/k, sinh(kr)/k. Throws RadiusOutOfRange
/// (sphere with kr ≥ π/2) and Unsupported for custom manifolds.
double closed_form_jacobian(ManifoldKind kind, double k, int n, double r, double delta);
/// Constant-curvature closed form for any mode; `delta` is the mode's simplex volume.
double closed_form_jacobian(BPMode mode, ManifoldKind kind, double k, int n, double r, double delta);

/// Full mode: r^{n²−1} n!Δ (1 − Σ Ric(u_i)/6 r²).
ExpansionPrediction expansion_phi_n(const ManifoldSpec& m, const ChartPoint& z, std::span<const Vec> dirs,
                                    const BPOptions& opt = {});
/// Antipodal mode: 2^n (r^{n−1} − (2/3) Ric(u) r^{n+1}).
ExpansionPrediction expansion_phi_1(const ManifoldSpec& m, const ChartPoint& z, const Vec& u,
                                    const BPOptions& opt = {});

struct HyperplaneExpansion {
  /// Correction Σ Ric^v(u_i) + Tr(Δ⁻¹K) with K rows (K_i/2, +u_iᵀK_i/6).
  ExpansionPrediction printed;
  /// Correction Σ Ric^v(u_i)/6 + Tr(Δ⁻¹K) with K rows (K_i/2, −u_iᵀK_i/6),
  /// the form consistent with G = Δ − r²K.
  ExpansionPrediction derived;
  MatX delta;
  MatX k_printed;
  MatX k_derived;
  double trace_printed = 0.0;
  double trace_derived = 0.0;
  double ricci_v_sum = 0.0;
  double det_delta = 0.0;
};

/// `dirs` are u_0 .. u_{n−1}. Throws SingularDelta.
HyperplaneExpansion expansion_phi_nm1(const ManifoldSpec& m, const ChartPoint& z, const Vec& v,
                                      std::span<const Vec> dirs, const BPOptions& opt = {});

/// Leading-order prediction for a configuration of any mode (derived variant
/// for the hyperplane mode).
ExpansionPrediction expansion_for(const ManifoldSpec& m, const BPConfiguration& cfg, const BPOptions& opt = {});

}  // namespace bp
