// SPDX-License-Identifier: Apache-2.0
#pragma once

// Manifold description files.
//
//   {
//     "kind": "euclidean" | "sphere" | "hyperbolic" | "custom",
//     "dim": 2,
//     "k": 1.0,                                  // sphere / hyperbolic
//     "metric": {"g11": "...", "g12": "...", "g22": "..."},   // custom
//     "chart_domain": {"type": "box", "lower": [..], "upper": [..]}
//                   | {"type": "ball", "center": [..], "radius": r}
//                   | {"type": "unbounded"},               // custom
//     "derivatives": "automatic" | "finite-difference"      // custom, optional
//   }
//
// Metric keys are g<i><j> with 1-based indices; either g12 or g21 may be
// given for an off-diagonal entry. Missing off-diagonal entries are zero.

#include "bp/manifold.hpp"

#include <json.hpp>

#include <string>

namespace bp {

/// Throws Error(SpecParseError); DSL syntax errors are rethrown with the
/// offending key and position in the message.
ManifoldSpec manifold_from_json(const nlohmann::json& doc);
ManifoldSpec load_manifold(const std::string& path);

nlohmann::json manifold_to_json(const ManifoldSpec& m);

}  // namespace bp
