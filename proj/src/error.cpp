// SPDX-License-Identifier: Apache-2.0
#include "bp/error.hpp"

namespace bp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::PointOutsideChart: return "PointOutsideChart";
    case Errc::DifferentiationStepTooLarge: return "DifferentiationStepTooLarge";
    case Errc::DegeneratePlane: return "DegeneratePlane";
    case Errc::NonUnitVector: return "NonUnitVector";
    case Errc::PrescribedVectorsNotOrthonormal: return "PrescribedVectorsNotOrthonormal";
    case Errc::RankDeficiency: return "RankDeficiency";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
    case Errc::VariableIndexOutOfRange: return "VariableIndexOutOfRange";
    case Errc::DomainError: return "DomainError";
    case Errc::LeftChartDomain: return "LeftChartDomain";
    case Errc::StepCountOverflow: return "StepCountOverflow";
    case Errc::IntegratorDrift: return "IntegratorDrift";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateSimplex: return "DegenerateSimplex";
    case Errc::RadiusOutOfRange: return "RadiusOutOfRange";
    case Errc::SingularDelta: return "SingularDelta";
    case Errc::SingularParametrization: return "SingularParametrization";
    case Errc::IllConditionedFit: return "IllConditionedFit";
    case Errc::InvalidFitInput: return "InvalidFitInput";
    case Errc::RegionEscapesChart: return "RegionEscapesChart";
    case Errc::NonFiniteTestFunction: return "NonFiniteTestFunction";
    case Errc::InvalidConfiguration: return "InvalidConfiguration";
    case Errc::SpecParseError: return "SpecParseError";
    case Errc::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

}  // namespace bp
