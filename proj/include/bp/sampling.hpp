// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic random streams and direction sets.
//
// Streams are std::mt19937_64 seeded through splitmix64 from (seed, stream
// ids). Uniform and normal variates are produced by fixed formulas rather than
// <random> distributions so results are identical across standard libraries.

#include "bp/bp_jacobian.hpp"
#include "bp/manifold.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace bp {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box–Muller.
  double normal();
  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform point on the unit sphere of R^d.
Vec random_unit(Rng& rng, int d);
/// Uniform point in the Euclidean ball of radius `radius` in R^d.
Vec random_in_ball(Rng& rng, int d, double radius);

/// Chart vector with frame coordinates c: Σ c_a e_a.
Vec from_frame(const OrthonormalFrame& frame, const Vec& coords);

/// Direction presets in orthonormal-frame coordinates for the given mode:
///   "equilateral"   regular simplex (hyperplane: in the first n−1 axes, v = e_n)
///   "orthants"      sign vectors / √d, even number of minus signs first
///   "random:<seed>" uniform random directions
///   "a,b;c,d;..."   explicit coordinates, normalized
/// Hyperplane mode returns n u's followed by v.
/// Throws InvalidConfiguration.
std::vector<Vec> preset_directions(std::string_view spec, BPMode mode, int n);

/// Regular simplex with count = d + 1 unit vertices in R^d.
std::vector<Vec> regular_simplex(int d);

struct RandomConfigOptions {
  double r_min = 0.1;
  double r_max = 0.8;
  double z_radius = 0.5;           // z uniform in a ball (or box half-width) around `z_center`
  bool z_in_box = false;
  Vec z_center;                    // origin when empty
  double min_simplex_volume = 1e-3;
};

/// Random configuration with directions uniform on the unit sphere at z
/// (hyperplane: v uniform, u_i uniform on the unit sphere of v⊥). Simplices
/// below `min_simplex_volume` are resampled.
BPConfiguration random_configuration(const ManifoldSpec& m, BPMode mode, Rng& rng,
                                     const RandomConfigOptions& opt = {});

/// Directions in chart components at z from frame coordinates, using the
/// coordinate Gram–Schmidt frame at z.
std::vector<Vec> directions_at(const ManifoldSpec& m, const ChartPoint& z, const std::vector<Vec>& frame_coords);

}  // namespace bp
