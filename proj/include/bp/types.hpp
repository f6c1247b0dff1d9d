// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>

namespace bp {

/// Largest manifold dimension supported by the fixed-capacity tensors.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Unbounded-size linear algebra (Jacobian matrices, fits).
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Coordinates of a point in the chart of its manifold.
struct ChartPoint {
  Vec coords;
};

/// Components of a tangent vector in the coordinate basis at `base`.
struct TangentVector {
  ChartPoint base;
  Vec components;
};

/// Christoffel symbols of the second kind, Gamma^k_{ij}, stored k-major.
class Christoffel {
public:
  explicit Christoffel(int n = 0) : n_(n) {}

  int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[(k * kMaxDim + i) * kMaxDim + j]; }
  double operator()(int k, int i, int j) const { return data_[(k * kMaxDim + i) * kMaxDim + j]; }

private:
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_{};
};

/// Rank-4 array indexed (a, b, c, d); used both for the lowered curvature tensor
/// R_{ijkl} and for the mixed tensor R^m_{ijl} (index m first).
class Tensor4 {
public:
  explicit Tensor4(int n = 0) : n_(n) {}

  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) {
    return data_[((a * kMaxDim + b) * kMaxDim + c) * kMaxDim + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return data_[((a * kMaxDim + b) * kMaxDim + c) * kMaxDim + d];
  }

private:
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_{};
};

}  // namespace bp
