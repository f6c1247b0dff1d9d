// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON serialization of results. Reports carry no timestamps, so identical
// inputs give byte-identical documents.

#include "bp/bp_jacobian.hpp"
#include "bp/lemma_checks.hpp"
#include "bp/monte_carlo.hpp"
#include "bp/series_fit.hpp"

#include <json.hpp>

#include <exception>
#include <optional>

namespace bp {

struct JacobianReport {
  BPConfiguration inputs;
  int n = 0;
  double formula_value = 0.0;
  std::optional<double> oracle_value;
  std::optional<double> closed_form;
  ExpansionPrediction expansion;                 // derived variant for hyperplane mode
  std::optional<HyperplaneExpansion> hyperplane; // both variants
  std::optional<FitResult> fit;
};

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const MatX& m);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const ExpansionPrediction& e);
nlohmann::json to_json(const HyperplaneExpansion& e);
nlohmann::json to_json(const BPConfiguration& c);
nlohmann::json to_json(const JacobianReport& r);
nlohmann::json to_json(const CoefficientReport& r);
nlohmann::json to_json(const DetGCheck& d);
nlohmann::json to_json(const MCResult& r);
nlohmann::json to_json(const IntegratorConfig& c);

/// {"error": {"code": ..., "message": ..., ...}} for any exception.
nlohmann::json error_json(const std::exception& e);

/// |a − b| / |b| (absolute difference when b is zero).
double relative_error(double a, double b);

}  // namespace bp
