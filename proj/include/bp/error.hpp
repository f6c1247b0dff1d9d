// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bp {

enum class Errc {
  PointOutsideChart,
  DifferentiationStepTooLarge,
  DegeneratePlane,
  NonUnitVector,
  PrescribedVectorsNotOrthonormal,
  RankDeficiency,
  SyntaxError,
  UnknownIdentifier,
  VariableIndexOutOfRange,
  DomainError,
  LeftChartDomain,
  StepCountOverflow,
  IntegratorDrift,
  DimensionMismatch,
  DegenerateSimplex,
  RadiusOutOfRange,
  SingularDelta,
  SingularParametrization,
  IllConditionedFit,
  InvalidFitInput,
  RegionEscapesChart,
  NonFiniteTestFunction,
  InvalidConfiguration,
  SpecParseError,
  Unsupported,
};

std::string_view to_string(Errc code);

/// Base of every error raised by the library. `code()` is stable and is what
/// the CLI reports in its machine-readable error document.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

/// Parse failure in a metric expression: byte offset into the source and the
/// token kinds that would have been accepted there.
class SyntaxError : public Error {
public:
  SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& message)
      : Error(Errc::SyntaxError, message), position_(position), expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Numerical domain violation while evaluating an expression; [begin, end) is
/// the source span of the offending sub-expression.
class DomainError : public Error {
public:
  DomainError(std::size_t begin, std::size_t end, const std::string& message)
      : Error(Errc::DomainError, message), begin_(begin), end_(end) {}

  std::size_t begin() const noexcept { return begin_; }
  std::size_t end() const noexcept { return end_; }

private:
  std::size_t begin_;
  std::size_t end_;
};

/// A geodesic integration left the chart domain at parameter `exit_time`.
class LeftChartDomain : public Error {
public:
  LeftChartDomain(double exit_time, const std::string& message)
      : Error(Errc::LeftChartDomain, message), exit_time_(exit_time) {}

  double exit_time() const noexcept { return exit_time_; }

private:
  double exit_time_;
};

}  // namespace bp
