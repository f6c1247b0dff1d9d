// SPDX-License-Identifier: Apache-2.0
#include "bp/series_fit.hpp"

#include "bp/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace bp {

FitResult series_fit(std::span<const double> r, std::span<const double> values, int leading_exponent,
                     const FitOptions& opt) {
  if (r.size() != values.size()) throw Error(Errc::InvalidFitInput, "radius and value arrays differ in length");
  const int N = static_cast<int>(r.size());
  const int P = static_cast<int>(opt.exponents.size());
  if (N < opt.min_samples || N <= P)
    throw Error(Errc::InvalidFitInput, "series fit needs at least " + std::to_string(opt.min_samples) + " samples");
  double lo = r[0], hi = r[0];
  for (int i = 0; i < N; ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(values[i]))
      throw Error(Errc::InvalidFitInput, "series fit needs positive radii and finite values");
    lo = std::min(lo, r[i]);
    hi = std::max(hi, r[i]);
  }
  if (hi < opt.min_span * lo * (1.0 - 1e-12))
    throw Error(Errc::InvalidFitInput, "radii must span at least a factor " + std::to_string(opt.min_span));

  MatX A(N, P);
  VecX y(N);
  for (int i = 0; i < N; ++i) {
    y[i] = values[i] / std::pow(r[i], leading_exponent);
    for (int j = 0; j < P; ++j) A(i, j) = std::pow(r[i], opt.exponents[static_cast<std::size_t>(j)]);
  }
  // Column scaling so the condition number reflects the basis, not the units.
  VecX scale(P);
  for (int j = 0; j < P; ++j) {
    scale[j] = A.col(j).norm();
    if (!(scale[j] > 0.0)) throw Error(Errc::IllConditionedFit, "design column vanishes");
    A.col(j) /= scale[j];
  }
  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  const double cond = s[0] / s[P - 1];
  if (!(cond <= opt.max_condition))
    throw Error(Errc::IllConditionedFit, "design matrix condition number " + std::to_string(cond));

  const VecX beta = svd.solve(y);
  const VecX resid = y - A * beta;
  const double sigma2 = resid.squaredNorm() / std::max(1, N - P);
  // cov(beta) = sigma² (AᵀA)⁻¹ = sigma² V S⁻² Vᵀ
  const MatX& V = svd.matrixV();
  FitResult out;
  out.leading_exponent = leading_exponent;
  out.exponents = opt.exponents;
  out.samples = N;
  out.condition = cond;
  out.residual_norm = resid.norm();
  for (int j = 0; j < P; ++j) {
    double var = 0.0;
    for (int q = 0; q < P; ++q) var += V(j, q) * V(j, q) / (s[q] * s[q]);
    out.coefficients.push_back(beta[j] / scale[j]);
    out.std_errors.push_back(std::sqrt(sigma2 * var) / scale[j]);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw Error(Errc::InvalidFitInput, "invalid radius grid");
  std::vector<double> out;
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  return out;
}

}  // namespace bp
