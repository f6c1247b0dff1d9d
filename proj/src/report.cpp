// SPDX-License-Identifier: Apache-2.0
#include "bp/report.hpp"

#include "bp/error.hpp"

#include <cmath>

namespace bp {

using nlohmann::json;

json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const MatX& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const FitResult& f) {
  json j;
  j["leading_exponent"] = f.leading_exponent;
  j["exponents"] = f.exponents;
  j["coefficients"] = f.coefficients;
  j["std_errors"] = f.std_errors;
  j["residual_norm"] = f.residual_norm;
  j["condition"] = f.condition;
  j["samples"] = f.samples;
  return j;
}

json to_json(const ExpansionPrediction& e) {
  return {{"leading_exponent", e.leading_exponent},
          {"leading_coeff", e.leading_coeff},
          {"correction_exponent", e.correction_exponent},
          {"correction_coeff", e.correction_coeff}};
}

json to_json(const HyperplaneExpansion& e) {
  return {{"printed", to_json(e.printed)},
          {"derived", to_json(e.derived)},
          {"delta", to_json(e.delta)},
          {"k_printed", to_json(e.k_printed)},
          {"k_derived", to_json(e.k_derived)},
          {"trace_printed", e.trace_printed},
          {"trace_derived", e.trace_derived},
          {"ricci_v_sum", e.ricci_v_sum},
          {"det_delta", e.det_delta}};
}

json to_json(const BPConfiguration& c) {
  json dirs = json::array();
  for (const Vec& d : c.directions) dirs.push_back(to_json(d));
  return {{"mode", std::string(to_string(c.mode))}, {"r", c.r}, {"z", to_json(c.z.coords)}, {"directions", dirs}};
}

json to_json(const JacobianReport& r) {
  json j;
  j["mode"] = std::string(to_string(r.inputs.mode));
  j["n"] = r.n;
  j["r"] = r.inputs.r;
  j["inputs"] = to_json(r.inputs);
  j["formula_value"] = r.formula_value;
  j["oracle_value"] = r.oracle_value ? json(*r.oracle_value) : json(nullptr);
  j["closed_form"] = r.closed_form ? json(*r.closed_form) : json(nullptr);
  const double printed = r.hyperplane ? r.hyperplane->printed.correction_coeff : r.expansion.correction_coeff;
  j["expansion"] = {{"leading", {{"exponent", r.expansion.leading_exponent}, {"coeff", r.expansion.leading_coeff}}},
                    {"correction_exponent", r.expansion.correction_exponent},
                    {"correction_printed", printed},
                    {"correction_derived", r.expansion.correction_coeff}};
  if (r.hyperplane) j["expansion"]["hyperplane"] = to_json(*r.hyperplane);
  const double rr = r.inputs.r;
  const double predicted = r.expansion.leading_coeff * std::pow(rr, r.expansion.leading_exponent) +
                           r.expansion.correction_coeff * std::pow(rr, r.expansion.correction_exponent);
  json res;
  res["expansion_relative"] = relative_error(r.formula_value, predicted);
  res["oracle_relative"] = r.oracle_value ? json(relative_error(r.formula_value, *r.oracle_value)) : json(nullptr);
  res["closed_form_relative"] = r.closed_form ? json(relative_error(r.formula_value, *r.closed_form)) : json(nullptr);
  j["residuals"] = res;
  if (r.fit) j["fit"] = to_json(*r.fit);
  return j;
}

json to_json(const CoefficientReport& r) {
  json entries = json::array();
  for (const EntryFit& e : r.entries) {
    json checked = json::array();
    for (std::size_t q = 0; q < e.checked.size(); ++q) {
      const auto idx = static_cast<std::size_t>(e.checked[q]);
      checked.push_back({{"exponent", e.fit.leading_exponent + e.fit.exponents[idx]},
                         {"fitted", e.fit.coefficients[idx]},
                         {"std_error", e.fit.std_errors[idx]},
                         {"predicted", e.predicted[q]}});
    }
    entries.push_back({{"point", e.point},
                       {"row", e.row},
                       {"col", e.col},
                       {"checked", checked},
                       {"worst_ratio", e.worst},
                       {"pass", e.pass}});
  }
  return {{"block", std::string(to_string(r.block))}, {"pass", r.pass}, {"entries", entries}};
}

json to_json(const DetGCheck& d) {
  return {{"residual_coeff", d.residual_coeff}, {"scale", d.scale}, {"pass", d.pass}, {"fit", to_json(d.fit)}};
}

json to_json(const MCResult& r) {
  return {{"lhs", r.lhs},         {"rhs", r.rhs},         {"se_lhs", r.se_lhs},
          {"se_rhs", r.se_rhs},   {"z_score", r.z_score}, {"samples", r.samples},
          {"shards", r.shards}};
}

json to_json(const IntegratorConfig& c) {
  return {{"steps_per_unit", c.steps_per_unit},
          {"min_steps", c.min_steps},
          {"max_steps", c.max_steps},
          {"fixed_steps", c.fixed_steps},
          {"tolerance", c.tolerance}};
}

json error_json(const std::exception& e) {
  json err;
  err["message"] = e.what();
  if (const auto* be = dynamic_cast<const Error*>(&e)) {
    err["code"] = std::string(to_string(be->code()));
    if (const auto* se = dynamic_cast<const SyntaxError*>(&e)) {
      err["position"] = se->position();
      err["expected"] = se->expected();
    }
    if (const auto* de = dynamic_cast<const DomainError*>(&e)) err["span"] = {de->begin(), de->end()};
    if (const auto* le = dynamic_cast<const LeftChartDomain*>(&e)) err["exit_time"] = le->exit_time();
  } else {
    err["code"] = "InternalError";
  }
  return {{"error", err}};
}

double relative_error(double a, double b) { return b == 0.0 ? std::abs(a - b) : std::abs(a - b) / std::abs(b); }

}  // namespace bp
