// SPDX-License-Identifier: Apache-2.0
//
// bp: command-line front end. Every command writes one JSON document (stdout
// or --out) that embeds the resolved configuration; --csv adds a flat table.
//
// Exit codes: 0 success, 1 a check ran and failed, 2 invalid input (a JSON
// error document is written to stderr).

#include "bp/bp_jacobian.hpp"
#include "bp/error.hpp"
#include "bp/lemma_checks.hpp"
#include "bp/manifold.hpp"
#include "bp/manifold_io.hpp"
#include "bp/monte_carlo.hpp"
#include "bp/oracle.hpp"
#include "bp/report.hpp"
#include "bp/sampling.hpp"
#include "bp/series_fit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef BP_DATA_DIR
#define BP_DATA_DIR ""
#endif

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string spec;
  std::string mode = "full";
  std::optional<double> r;
  std::string r_grid;
  std::string dirs = "equilateral";
  std::string u;
  std::string v;
  std::string z;
  int n = 0;
  int trials = 0;
  long samples = 100'000;
  std::uint64_t seed = 1;
  std::optional<double> steps_per_unit;
  std::optional<double> tolerance;
  double fd_step = 1e-5;
  double threshold = 1e-4;
  std::string block;
  bool fit = false;
  bool with_oracle = false;
  int size = 3;
  double center_radius = 0.3;
  double ball_radius = 0.6;
  std::string out;
  std::string csv;
};

[[noreturn]] void invalid(const std::string& msg) { throw bp::Error(bp::Errc::InvalidConfiguration, msg); }

double parse_double(std::string_view s) {
  // strtod rather than from_chars: libstdc++ 11 lacks the floating overloads everywhere.
  const std::string buf(s);
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(x)) invalid("not a number: '" + buf + "'");
  return x;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    out.push_back(parse_double(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

// "lo:hi:count" (log-spaced) or an explicit comma list.
std::vector<double> resolve_radii(const RunConfig& rc, const std::vector<double>& fallback) {
  std::vector<double> radii;
  if (rc.r && !rc.r_grid.empty()) invalid("--r and --r-grid are mutually exclusive");
  if (rc.r) {
    radii = {*rc.r};
  } else if (!rc.r_grid.empty()) {
    if (std::count(rc.r_grid.begin(), rc.r_grid.end(), ':') == 2) {
      const std::size_t a = rc.r_grid.find(':'), b = rc.r_grid.find(':', a + 1);
      const double lo = parse_double(std::string_view(rc.r_grid).substr(0, a));
      const double hi = parse_double(std::string_view(rc.r_grid).substr(a + 1, b - a - 1));
      const double count = parse_double(std::string_view(rc.r_grid).substr(b + 1));
      if (count < 1 || count != std::floor(count) || count > 100000) invalid("--r-grid count must be a positive integer");
      if (!(lo > 0.0) || !(hi >= lo)) invalid("--r-grid needs 0 < lo <= hi");
      radii = count == 1 ? std::vector<double>{lo} : bp::log_grid(lo, hi, static_cast<int>(count));
    } else {
      radii = parse_list(rc.r_grid);
    }
  } else {
    radii = fallback;
  }
  if (radii.empty()) invalid("a radius is required (--r or --r-grid)");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) invalid("radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) invalid("radii must be strictly increasing");
  }
  return radii;
}

std::string find_spec(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty()) invalid("--spec is required");
  if (fs::exists(path)) return path;
  const fs::path bundled = fs::path(BP_DATA_DIR) / path;
  if (!std::string(BP_DATA_DIR).empty() && fs::exists(bundled)) return bundled.string();
  throw bp::Error(bp::Errc::SpecParseError, "cannot open manifold spec '" + path + "'");
}

bp::Vec default_center(const bp::ManifoldSpec& m) {
  const bp::ChartDomain& d = m.domain();
  if (d.type == bp::ChartDomain::Type::Ball) return d.center;
  if (d.type == bp::ChartDomain::Type::Box) return 0.5 * (d.lower + d.upper);
  return bp::Vec::Zero(m.dim());
}

bp::ChartPoint resolve_z(const RunConfig& rc, const bp::ManifoldSpec& m) {
  if (rc.z.empty()) return {default_center(m)};
  const std::vector<double> c = parse_list(rc.z);
  if (static_cast<int>(c.size()) != m.dim()) invalid("--z needs " + std::to_string(m.dim()) + " coordinates");
  bp::ChartPoint p{Eigen::Map<const Eigen::VectorXd>(c.data(), m.dim())};
  bp::require_in_chart(m, p.coords);
  return p;
}

bp::IntegratorConfig resolve_integrator(const RunConfig& rc, double default_spu) {
  bp::IntegratorConfig ic;
  ic.steps_per_unit = rc.steps_per_unit.value_or(default_spu);
  if (!(ic.steps_per_unit > 0.0)) invalid("--steps-per-unit must be positive");
  if (rc.tolerance) ic.tolerance = *rc.tolerance;
  return ic;
}

// Directions in frame coordinates: --u (and --v in hyperplane mode) override --dirs.
std::vector<bp::Vec> resolve_frame_dirs(const RunConfig& rc, bp::BPMode mode, int n) {
  if (rc.u.empty()) {
    if (!rc.v.empty()) invalid("--v requires --u");
    return bp::preset_directions(rc.dirs, mode, n);
  }
  if (mode == bp::BPMode::Hyperplane) {
    if (rc.v.empty()) invalid("hyperplane mode with --u also needs --v");
    return bp::preset_directions(rc.u + ";" + rc.v, mode, n);
  }
  if (!rc.v.empty()) invalid("--v is only used in hyperplane mode");
  return bp::preset_directions(rc.u, mode, n);
}

bp::Vec frame_vector(const std::string& s, int n, const char* flag) {
  const std::vector<double> c = parse_list(s);
  if (static_cast<int>(c.size()) != n) invalid(std::string(flag) + " needs " + std::to_string(n) + " coordinates");
  return Eigen::Map<const Eigen::VectorXd>(c.data(), n);
}

double mode_simplex_volume(bp::BPMode mode, const std::vector<bp::Vec>& frame_dirs) {
  switch (mode) {
    case bp::BPMode::Full: return bp::simplex_volume(frame_dirs);
    case bp::BPMode::Antipodal: return 2.0;
    case bp::BPMode::Hyperplane:
      return bp::simplex_volume(std::span<const bp::Vec>(frame_dirs.data(), frame_dirs.size() - 1));
  }
  return 0.0;
}

double evaluate_expansion(const bp::ExpansionPrediction& e, double r) {
  return e.leading_coeff * std::pow(r, e.leading_exponent) + e.correction_coeff * std::pow(r, e.correction_exponent);
}

std::optional<double> maybe_closed_form(const bp::ManifoldSpec& m, bp::BPMode mode, double r, double delta) {
  if (!m.is_builtin()) return std::nullopt;
  try {
    return bp::closed_form_jacobian(mode, m.kind(), m.k(), m.dim(), r, delta);
  } catch (const bp::Error& e) {
    if (e.code() == bp::Errc::RadiusOutOfRange) return std::nullopt;
    throw;
  }
}

json vec_list(const std::vector<bp::Vec>& vs) {
  json a = json::array();
  for (const bp::Vec& v : vs) a.push_back(bp::to_json(v));
  return a;
}

// ---------------------------------------------------------------------------
// Commands. Each returns the report and whether its check (if any) passed.

struct Outcome {
  json report;
  bool pass = true;
  std::vector<std::vector<std::string>> csv;  // first row is the header
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Outcome cmd_curvature(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  const int n = m.dim();
  const bp::ChartPoint z = resolve_z(rc, m);
  const bp::OrthonormalFrame E = bp::orthonormal_frame(m, z);
  const bp::Mat g = bp::metric_at(m, z);
  config["z"] = bp::to_json(z.coords);

  Outcome o;
  json& rep = o.report;
  rep["metric"] = bp::to_json(bp::MatX(g));
  rep["frame"] = bp::to_json(bp::MatX(E.vectors));
  json planes = json::array();
  o.csv.push_back({"a", "b", "sectional"});
  double scalar = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double K = bp::sectional_curvature(m, z, E.vector(a), E.vector(b));
      scalar += 2.0 * K;
      planes.push_back({{"a", a}, {"b", b}, {"sectional", K}});
      o.csv.push_back({std::to_string(a), std::to_string(b), num(K)});
    }
  json ricci = json::array();
  for (int a = 0; a < n; ++a) ricci.push_back(bp::ricci_curvature(m, z, E.vector(a)));
  rep["frame_sectional"] = planes;
  rep["frame_ricci"] = ricci;
  rep["scalar_curvature"] = scalar;
  if (!rc.u.empty()) {
    bp::Vec cu = frame_vector(rc.u, n, "--u");
    if (cu.norm() == 0.0) invalid("--u must be nonzero");
    config["u"] = bp::to_json(cu);
    cu.normalize();
    rep["ricci_u"] = bp::ricci_curvature(m, z, bp::from_frame(E, cu));
    if (!rc.v.empty()) {
      const bp::Vec cv = frame_vector(rc.v, n, "--v");
      config["v"] = bp::to_json(cv);
      rep["sectional_uv"] = bp::sectional_curvature(m, z, bp::from_frame(E, cu), bp::from_frame(E, cv));
    }
  } else if (!rc.v.empty()) {
    invalid("--v requires --u");
  }
  return o;
}

bp::BPConfiguration build_configuration(const RunConfig& rc, const bp::ManifoldSpec& m, bp::BPMode mode,
                                        std::vector<bp::Vec>& frame_dirs, json& config) {
  bp::BPConfiguration cfg;
  cfg.mode = mode;
  cfg.z = resolve_z(rc, m);
  frame_dirs = resolve_frame_dirs(rc, mode, m.dim());
  cfg.directions = bp::directions_at(m, cfg.z, frame_dirs);
  config["z"] = bp::to_json(cfg.z.coords);
  config["frame_directions"] = vec_list(frame_dirs);
  return cfg;
}

Outcome cmd_jacobian(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  const bp::BPMode mode = bp::parse_mode(rc.mode);
  std::vector<bp::Vec> frame_dirs;
  bp::BPConfiguration cfg = build_configuration(rc, m, mode, frame_dirs, config);
  const std::vector<double> radii = resolve_radii(rc, {});
  config["radii"] = radii;
  bp::BPOptions opt;
  opt.integrator = resolve_integrator(rc, 256.0);
  config["integrator"] = bp::to_json(opt.integrator);
  bp::OracleConfig oc;
  oc.fd_step = rc.fd_step;
  oc.integrator = opt.integrator;

  cfg.r = radii.front();
  bp::validate(m, cfg, opt);
  const bp::ExpansionPrediction pred = bp::expansion_for(m, cfg, opt);
  std::optional<bp::HyperplaneExpansion> hyper;
  if (mode == bp::BPMode::Hyperplane) {
    std::vector<bp::Vec> us(cfg.directions.begin(), cfg.directions.end() - 1);
    hyper = bp::expansion_phi_nm1(m, cfg.z, cfg.directions.back(), us, opt);
  }

  Outcome o;
  o.csv.push_back({"r", "formula_value", "closed_form", "expansion", "oracle_value"});
  json results = json::array();
  for (double r : radii) {
    cfg.r = r;
    bp::JacobianReport rep;
    rep.inputs = cfg;
    rep.n = m.dim();
    const bp::JacobianEvaluation ev = bp::evaluate_phi(m, cfg, opt);
    rep.formula_value = ev.value;
    rep.closed_form = maybe_closed_form(m, mode, r, ev.simplex_volume);
    rep.expansion = pred;
    rep.hyperplane = hyper;
    if (rc.with_oracle) rep.oracle_value = bp::fd_jacobian_oracle(m, cfg, oc);
    results.push_back(bp::to_json(rep));
    results.back()["simplex_volume"] = ev.simplex_volume;
    o.csv.push_back({num(r), num(ev.value), rep.closed_form ? num(*rep.closed_form) : "",
                     num(evaluate_expansion(pred, r)), rep.oracle_value ? num(*rep.oracle_value) : ""});
  }
  if (results.size() == 1) {
    o.report = results.front();
  } else {
    o.report["results"] = results;
  }
  return o;
}

Outcome cmd_closed_form(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  if (!m.is_builtin()) throw bp::Error(bp::Errc::Unsupported, "closed forms exist only for the built-in model spaces");
  const bp::BPMode mode = bp::parse_mode(rc.mode);
  const int n = m.dim();
  const std::vector<bp::Vec> frame_dirs = resolve_frame_dirs(rc, mode, n);
  const double delta = mode_simplex_volume(mode, frame_dirs);
  const std::vector<double> radii = resolve_radii(rc, {});
  config["frame_directions"] = vec_list(frame_dirs);
  config["radii"] = radii;

  Outcome o;
  o.csv.push_back({"r", "closed_form"});
  json values = json::array();
  for (double r : radii) {
    const double value = bp::closed_form_jacobian(mode, m.kind(), m.k(), n, r, delta);
    values.push_back({{"r", r}, {"closed_form", value}});
    o.csv.push_back({num(r), num(value)});
  }
  o.report["simplex_volume"] = delta;
  o.report["values"] = values;
  return o;
}

Outcome cmd_expansion(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  const bp::BPMode mode = bp::parse_mode(rc.mode);
  std::vector<bp::Vec> frame_dirs;
  bp::BPConfiguration cfg = build_configuration(rc, m, mode, frame_dirs, config);
  bp::BPOptions opt;
  opt.integrator = resolve_integrator(rc, 256.0);
  config["integrator"] = bp::to_json(opt.integrator);
  cfg.r = 0.01;
  bp::validate(m, cfg, opt);

  Outcome o;
  const bp::ExpansionPrediction pred = bp::expansion_for(m, cfg, opt);
  o.report["prediction"] = bp::to_json(pred);
  o.report["correction_ratio"] = pred.correction_coeff / pred.leading_coeff;
  std::optional<bp::HyperplaneExpansion> hyper;
  if (mode == bp::BPMode::Hyperplane) {
    std::vector<bp::Vec> us(cfg.directions.begin(), cfg.directions.end() - 1);
    hyper = bp::expansion_phi_nm1(m, cfg.z, cfg.directions.back(), us, opt);
    o.report["hyperplane"] = bp::to_json(*hyper);
  }
  if (!rc.fit) return o;

  const std::vector<double> radii = resolve_radii(rc, bp::log_grid(1e-3, 1e-1, 25));
  config["radii"] = radii;
  std::vector<double> values;
  o.csv.push_back({"r", "formula_value"});
  for (double r : radii) {
    cfg.r = r;
    values.push_back(bp::evaluate_phi(m, cfg, opt).value);
    o.csv.push_back({num(r), num(values.back())});
  }
  bp::FitOptions fo;
  fo.exponents = {0, 2, 4};
  const bp::FitResult fit = bp::series_fit(radii, values, pred.leading_exponent, fo);
  o.report["fit"] = bp::to_json(fit);
  const double lead_err = bp::relative_error(fit.coefficients[0], pred.leading_coeff);
  o.report["leading_relative_error"] = lead_err;
  auto corr_err = [&](const bp::ExpansionPrediction& p) {
    return bp::relative_error(fit.coefficients[1], p.correction_coeff);
  };
  if (hyper) {
    const double ep = corr_err(hyper->printed), ed = corr_err(hyper->derived);
    o.report["correction_relative_error"] = {{"printed", ep}, {"derived", ed}};
    const bool mp = ep <= 0.02, md = ed <= 0.02;
    o.report["matched_variant"] = mp && md ? "both" : mp ? "printed" : md ? "derived" : "none";
  } else {
    o.report["correction_relative_error"] = corr_err(pred);
  }
  return o;
}

Outcome cmd_oracle(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  const bp::BPMode mode = bp::parse_mode(rc.mode);
  if (rc.n != 0 && rc.n != m.dim())
    throw bp::Error(bp::Errc::DimensionMismatch, "--n " + std::to_string(rc.n) + " does not match the manifold dimension " +
                                                     std::to_string(m.dim()));
  const int trials = rc.trials > 0 ? rc.trials : 100;
  if (rc.threshold <= 0.0) invalid("--threshold must be positive");
  bp::OracleConfig oc;
  oc.fd_step = rc.fd_step;
  oc.integrator = resolve_integrator(rc, 64.0);
  bp::BPOptions opt;
  opt.integrator = oc.integrator;
  bp::RandomConfigOptions ro;
  ro.z_center = default_center(m);
  config["trials"] = trials;
  config["threshold"] = rc.threshold;
  config["integrator"] = bp::to_json(oc.integrator);
  config["r_range"] = {ro.r_min, ro.r_max};
  config["z_radius"] = ro.z_radius;

  // Configurations are drawn serially so the report does not depend on the worker count.
  std::vector<bp::BPConfiguration> cfgs;
  for (int t = 0; t < trials; ++t) {
    bp::Rng rng(rc.seed, 0x6f7261636c65ULL, static_cast<std::uint64_t>(t));
    cfgs.push_back(bp::random_configuration(m, mode, rng, ro));
  }
  struct Row {
    double formula = 0.0, oracle = 0.0, rel = 0.0;
    std::string error;
  };
  std::vector<Row> rows(cfgs.size());
  const int workers = std::min(bp::worker_limit(static_cast<int>(std::thread::hardware_concurrency())), trials);
  auto work = [&](int w) {
    for (std::size_t t = static_cast<std::size_t>(w); t < cfgs.size(); t += static_cast<std::size_t>(workers)) {
      try {
        rows[t].formula = bp::evaluate_phi(m, cfgs[t], opt).value;
        rows[t].oracle = bp::fd_jacobian_oracle(m, cfgs[t], oc);
        rows[t].rel = bp::relative_error(rows[t].formula, rows[t].oracle);
      } catch (const std::exception& e) {
        rows[t].error = bp::error_json(e).dump();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();

  Outcome o;
  o.csv.push_back({"trial", "r", "formula_value", "oracle_value", "relative_error"});
  json list = json::array();
  double worst = 0.0;
  int failures = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    json e = bp::to_json(cfgs[t]);
    if (!rows[t].error.empty()) {
      e["error"] = json::parse(rows[t].error)["error"];
      ++failures;
    } else {
      e["formula_value"] = rows[t].formula;
      e["oracle_value"] = rows[t].oracle;
      e["relative_error"] = rows[t].rel;
      worst = std::max(worst, rows[t].rel);
      if (!(rows[t].rel <= rc.threshold)) ++failures;
      o.csv.push_back({std::to_string(t), num(cfgs[t].r), num(rows[t].formula), num(rows[t].oracle), num(rows[t].rel)});
    }
    list.push_back(e);
  }
  o.pass = failures == 0;
  o.report["trials"] = list;
  o.report["max_relative_error"] = worst;
  o.report["failures"] = failures;
  o.report["pass"] = o.pass;
  return o;
}

std::vector<bp::LemmaBlock> blocks_for(bp::BPMode mode) {
  using B = bp::LemmaBlock;
  switch (mode) {
    case bp::BPMode::Full: return {B::B_diag, B::B_off};
    case bp::BPMode::Antipodal: return {B::B_diag, B::B_off, B::A_diag, B::A_off};
    case bp::BPMode::Hyperplane:
      return {B::B_diag, B::B_off, B::C_lastrow, B::C_other, B::A_col_last, B::A_col_other};
  }
  return {};
}

Outcome cmd_lemma_check(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  const bp::BPMode mode = bp::parse_mode(rc.mode);
  std::vector<bp::Vec> frame_dirs;
  bp::BPConfiguration cfg = build_configuration(rc, m, mode, frame_dirs, config);
  bp::LemmaOptions lo;
  lo.integrator = resolve_integrator(rc, 256.0);
  lo.radii = resolve_radii(rc, lo.radii);
  cfg.r = lo.radii.back();
  config["radii"] = lo.radii;
  config["integrator"] = bp::to_json(lo.integrator);
  const std::vector<bp::LemmaBlock> blocks =
      rc.block.empty() ? blocks_for(mode) : std::vector<bp::LemmaBlock>{bp::parse_lemma_block(rc.block)};

  Outcome o;
  o.csv.push_back({"block", "point", "row", "col", "worst_ratio", "pass"});
  json reports = json::array();
  for (bp::LemmaBlock b : blocks) {
    const bp::CoefficientReport rep = bp::coefficient_report(m, cfg, b, lo);
    o.pass = o.pass && rep.pass;
    reports.push_back(bp::to_json(rep));
    for (const bp::EntryFit& e : rep.entries)
      o.csv.push_back({std::string(bp::to_string(b)), std::to_string(e.point), std::to_string(e.row),
                       std::to_string(e.col), num(e.worst), e.pass ? "1" : "0"});
  }
  o.report["blocks"] = reports;
  o.report["pass"] = o.pass;
  return o;
}

Outcome cmd_detg_check(const RunConfig& rc, json& config) {
  const int trials = rc.trials > 0 ? rc.trials : 50;
  const int size = rc.n > 0 ? rc.n : rc.size;
  if (size < 1 || size > 12) invalid("matrix size must be in [1, 12]");
  const std::vector<double> radii = resolve_radii(rc, bp::log_grid(1e-3, 1e-1, 25));
  config["trials"] = trials;
  config["size"] = size;
  config["radii"] = radii;

  Outcome o;
  o.csv.push_back({"trial", "residual_coeff", "scale", "pass"});
  json list = json::array();
  bp::Rng rng(rc.seed, 0x64657467ULL);
  for (int t = 0; t < trials; ++t) {
    bp::MatX delta(size, size), K(size, size);
    do {
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) delta(i, j) = rng.normal();
    } while (std::abs(delta.determinant()) < 0.1);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) K(i, j) = rng.normal();
    const bp::DetGCheck d = bp::detg_expansion_check(delta, K, radii);
    o.pass = o.pass && d.pass;
    list.push_back(bp::to_json(d));
    o.csv.push_back({std::to_string(t), num(d.residual_coeff), num(d.scale), d.pass ? "1" : "0"});
  }
  o.report["checks"] = list;
  o.report["pass"] = o.pass;
  return o;
}

Outcome cmd_mc_check(const RunConfig& rc, const bp::ManifoldSpec& m, json& config) {
  bp::MCConfig mc;
  mc.mode = bp::parse_mode(rc.mode);
  if (rc.samples < 1) invalid("--samples must be positive");
  mc.samples = rc.samples;
  mc.seed = rc.seed;
  mc.region = {rc.center_radius, rc.ball_radius};
  mc.integrator = resolve_integrator(rc, 64.0);
  mc.workers = bp::worker_limit(static_cast<int>(std::thread::hardware_concurrency()));
  config["samples"] = mc.samples;
  config["region"] = {{"center_radius", mc.region.center_radius}, {"ball_radius", mc.region.ball_radius}};
  config["shard_size"] = mc.shard_size;
  config["integrator"] = bp::to_json(mc.integrator);

  const bp::MCResult res = bp::mc_measure_equality(m, mc);
  Outcome o;
  o.pass = res.z_score <= 3.0;
  o.report["result"] = bp::to_json(res);
  o.report["pass"] = o.pass;
  o.csv.push_back({"lhs", "rhs", "se_lhs", "se_rhs", "z_score"});
  o.csv.push_back({num(res.lhs), num(res.rhs), num(res.se_lhs), num(res.se_rhs), num(res.z_score)});
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) invalid("cannot write '" + path + "'");
  f << text;
}

int run(const RunConfig& rc) {
  json config;
  config["command"] = rc.command;
  config["mode"] = rc.mode;
  config["seed"] = rc.seed;
  config["fd_step"] = rc.fd_step;

  Outcome o;
  if (rc.command == "detg-check") {
    o = cmd_detg_check(rc, config);
  } else {
    const bp::ManifoldSpec m = bp::load_manifold(find_spec(rc.spec));
    config["spec"] = rc.spec;
    config["manifold"] = bp::manifold_to_json(m);
    if (rc.command == "curvature") o = cmd_curvature(rc, m, config);
    else if (rc.command == "jacobian") o = cmd_jacobian(rc, m, config);
    else if (rc.command == "closed-form") o = cmd_closed_form(rc, m, config);
    else if (rc.command == "expansion") o = cmd_expansion(rc, m, config);
    else if (rc.command == "oracle") o = cmd_oracle(rc, m, config);
    else if (rc.command == "lemma-check") o = cmd_lemma_check(rc, m, config);
    else if (rc.command == "mc-check") o = cmd_mc_check(rc, m, config);
    else invalid("unknown command '" + rc.command + "'");
  }
  json doc = o.report;
  doc["config"] = config;
  write_text(rc.out, doc.dump(2) + "\n");

  if (!rc.csv.empty()) {
    std::string text;
    for (const auto& row : o.csv) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
      text += "\n";
    }
    write_text(rc.csv, text);
  }
  return o.pass ? 0 : 1;
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"Circumscribed-ball Jacobians on Riemannian manifolds"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"curvature", "sectional and Ricci curvature at a point"},
      {"jacobian", "Jacobian of the parametrization at one or more radii"},
      {"closed-form", "constant-curvature closed form"},
      {"expansion", "small-radius expansion coefficients (optionally fitted)"},
      {"oracle", "finite-difference oracle against the formula on random configurations"},
      {"lemma-check", "small-radius behavior of individual block entries"},
      {"detg-check", "second-order expansion of det(delta - r^2 K)"},
      {"mc-check", "Monte Carlo measure equality on a model space"},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&rc, name = std::string(c.name)] { rc.command = name; });
    sub->add_option("--spec", rc.spec, "manifold description (JSON)");
    sub->add_option("--mode", rc.mode, "full | antipodal | hyperplane")->capture_default_str();
    sub->add_option("--r", rc.r, "single radius");
    sub->add_option("--r-grid", rc.r_grid, "lo:hi:count (log-spaced) or a,b,c");
    sub->add_option("--dirs", rc.dirs, "equilateral | orthants | random:<seed> | a,b;c,d")->capture_default_str();
    sub->add_option("--u", rc.u, "explicit direction(s) in frame coordinates");
    sub->add_option("--v", rc.v, "hyperplane normal in frame coordinates");
    sub->add_option("--z", rc.z, "base point in chart coordinates");
    sub->add_option("--n", rc.n, "expected dimension (oracle) or matrix size (detg-check)");
    sub->add_option("--trials", rc.trials, "number of random trials");
    sub->add_option("--samples", rc.samples, "Monte Carlo samples per side")->capture_default_str();
    sub->add_option("--seed", rc.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--steps-per-unit", rc.steps_per_unit, "RK4 steps per unit arc length");
    sub->add_option("--tolerance", rc.tolerance, "allowed relative speed drift per unit length");
    sub->add_option("--fd-step", rc.fd_step, "oracle finite-difference step")->capture_default_str();
    sub->add_option("--threshold", rc.threshold, "oracle relative error bound")->capture_default_str();
    sub->add_option("--block", rc.block, "lemma block (default: all blocks of the mode)");
    sub->add_flag("--fit", rc.fit, "fit the expansion to formula values");
    sub->add_flag("--with-oracle", rc.with_oracle, "also evaluate the finite-difference oracle");
    sub->add_option("--center-radius", rc.center_radius, "Monte Carlo center region radius")->capture_default_str();
    sub->add_option("--ball-radius", rc.ball_radius, "Monte Carlo ball radius cutoff")->capture_default_str();
    sub->add_option("--out", rc.out, "JSON report path (stdout when omitted)");
    sub->add_option("--csv", rc.csv, "CSV table path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("BadFlags", e.what());
    return 2;
  }

  try {
    return run(rc);
  } catch (const std::exception& e) {
    std::cerr << bp::error_json(e).dump() << "\n";
    return 2;
  }
}
