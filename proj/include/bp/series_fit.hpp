// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bp/types.hpp"

#include <span>
#include <vector>

namespace bp {

struct FitResult {
  int leading_exponent = 0;
  std::vector<int> exponents;  // relative to the leading exponent
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  double residual_norm = 0.0;  // of value / r^p
  double condition = 0.0;      // of the column-scaled design matrix
  int samples = 0;
};

struct FitOptions {
  std::vector<int> exponents{0, 2};
  double max_condition = 1e12;
  int min_samples = 6;
  double min_span = 10.0;  // r_max / r_min
};

/// Least squares of value / r^p against r^e for e in opt.exponents.
/// Throws InvalidFitInput, IllConditionedFit.
FitResult series_fit(std::span<const double> r, std::span<const double> values, int leading_exponent,
                     const FitOptions& opt = {});

/// `count` log-spaced radii in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace bp
