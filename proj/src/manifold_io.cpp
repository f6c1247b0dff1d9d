// SPDX-License-Identifier: Apache-2.0
#include "bp/manifold_io.hpp"

#include "bp/error.hpp"

#include <fstream>
#include <sstream>

namespace bp {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::SpecParseError, msg); }

Vec read_vec(const nlohmann::json& j, const char* key, int n) {
  if (!j.contains(key) || !j[key].is_array() || static_cast<int>(j[key].size()) != n)
    fail(std::string("chart_domain.") + key + " must be an array of " + std::to_string(n) + " numbers");
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[key][i].is_number()) fail(std::string("chart_domain.") + key + " must contain numbers");
    v[i] = j[key][i].get<double>();
  }
  return v;
}

ChartDomain read_domain(const nlohmann::json& doc, int n) {
  if (!doc.contains("chart_domain")) fail("custom manifold needs a chart_domain");
  const auto& d = doc["chart_domain"];
  const std::string type = d.value("type", "");
  if (type == "unbounded") return ChartDomain::unbounded();
  if (type == "ball") {
    if (!d.contains("radius") || !d["radius"].is_number()) fail("chart_domain.radius must be a number");
    Vec c = d.contains("center") ? read_vec(d, "center", n) : Vec(Vec::Zero(n));
    return ChartDomain::ball(c, d["radius"].get<double>());
  }
  if (type == "box") return ChartDomain::box(read_vec(d, "lower", n), read_vec(d, "upper", n));
  fail("chart_domain.type must be \"ball\", \"box\" or \"unbounded\"");
}

std::string metric_key(int i, int j) { return "g" + std::to_string(i + 1) + std::to_string(j + 1); }

}  // namespace

ManifoldSpec manifold_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("manifold description must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) fail("missing string field \"kind\"");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) fail("missing integer field \"dim\"");
  const std::string kind = doc["kind"].get<std::string>();
  const int n = doc["dim"].get<int>();
  if (n < 2 || n > kMaxDim) fail("dim must be between 2 and " + std::to_string(kMaxDim));

  auto read_k = [&]() {
    if (!doc.contains("k") || !doc["k"].is_number()) fail("missing numeric field \"k\"");
    return doc["k"].get<double>();
  };
  try {
    if (kind == "euclidean") return ManifoldSpec::euclidean(n);
    if (kind == "sphere") return ManifoldSpec::sphere(n, read_k());
    if (kind == "hyperbolic") return ManifoldSpec::hyperbolic(n, read_k());
  } catch (const Error& e) {
    if (e.code() == Errc::SpecParseError) throw;
    fail(e.what());
  }
  if (kind != "custom") fail("unknown manifold kind \"" + kind + "\"");

  if (!doc.contains("metric") || !doc["metric"].is_object()) fail("custom manifold needs a metric object");
  const auto& metric = doc["metric"];
  for (auto it = metric.begin(); it != metric.end(); ++it) {
    bool known = false;
    for (int i = 0; i < n && !known; ++i)
      for (int j = 0; j < n && !known; ++j) known = it.key() == metric_key(i, j);
    if (!known) fail("unexpected metric key \"" + it.key() + "\"");
  }
  std::vector<std::string> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string a = metric_key(i, j), b = metric_key(j, i);
      if (i != j && metric.contains(a) && metric.contains(b)) fail("both " + a + " and " + b + " given");
      const std::string key = metric.contains(a) ? a : b;
      if (!metric.contains(key)) {
        if (i == j) fail("missing diagonal metric entry " + a);
        entries.emplace_back("0");
        continue;
      }
      if (!metric[key].is_string()) fail("metric entry " + key + " must be a string");
      entries.push_back(metric[key].get<std::string>());
      try {
        parse_expression(entries.back(), n);
      } catch (const Error& e) {
        // The DSL message already carries the position and expected tokens.
        fail("metric entry " + key + ": " + e.what());
      }
    }

  Derivatives mode = Derivatives::Automatic;
  if (doc.contains("derivatives")) {
    const std::string d = doc["derivatives"].is_string() ? doc["derivatives"].get<std::string>() : "";
    if (d == "finite-difference")
      mode = Derivatives::FiniteDifference;
    else if (d != "automatic")
      fail("derivatives must be \"automatic\" or \"finite-difference\"");
  }
  try {
    return ManifoldSpec::custom(n, entries, read_domain(doc, n), mode);
  } catch (const Error& e) {
    if (e.code() == Errc::SpecParseError) throw;
    fail(e.what());
  }
}

ManifoldSpec load_manifold(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open manifold file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  return manifold_from_json(doc);
}

nlohmann::json manifold_to_json(const ManifoldSpec& m) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(m.kind()));
  j["dim"] = m.dim();
  if (m.kind() == ManifoldKind::Sphere || m.kind() == ManifoldKind::Hyperbolic) j["k"] = m.k();
  if (m.kind() != ManifoldKind::Custom) return j;
  nlohmann::json metric = nlohmann::json::object();
  for (int i = 0; i < m.dim(); ++i)
    for (int j2 = i; j2 < m.dim(); ++j2) metric[metric_key(i, j2)] = m.entry(i, j2).source();
  j["metric"] = metric;
  const ChartDomain& d = m.domain();
  auto arr = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  switch (d.type) {
    case ChartDomain::Type::Unbounded: j["chart_domain"] = {{"type", "unbounded"}}; break;
    case ChartDomain::Type::Ball:
      j["chart_domain"] = {{"type", "ball"}, {"center", arr(d.center)}, {"radius", d.radius}};
      break;
    case ChartDomain::Type::Box:
      j["chart_domain"] = {{"type", "box"}, {"lower", arr(d.lower)}, {"upper", arr(d.upper)}};
      break;
  }
  j["derivatives"] = m.derivatives() == Derivatives::Automatic ? "automatic" : "finite-difference";
  return j;
}

}  // namespace bp
