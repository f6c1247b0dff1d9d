// SPDX-License-Identifier: Apache-2.0
#include "bp/lemma_checks.hpp"

#include "bp/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <map>

namespace bp {

std::string_view to_string(LemmaBlock block) {
  switch (block) {
    case LemmaBlock::B_diag: return "B_diag";
    case LemmaBlock::B_off: return "B_off";
    case LemmaBlock::A_diag: return "A_diag";
    case LemmaBlock::A_off: return "A_off";
    case LemmaBlock::C_lastrow: return "C_lastrow";
    case LemmaBlock::C_other: return "C_other";
    case LemmaBlock::A_col_last: return "A_col_last";
    case LemmaBlock::A_col_other: return "A_col_other";
  }
  return "?";
}

LemmaBlock parse_lemma_block(std::string_view name) {
  for (LemmaBlock b : {LemmaBlock::B_diag, LemmaBlock::B_off, LemmaBlock::A_diag, LemmaBlock::A_off,
                       LemmaBlock::C_lastrow, LemmaBlock::C_other, LemmaBlock::A_col_last, LemmaBlock::A_col_other})
    if (to_string(b) == name) return b;
  throw Error(Errc::InvalidConfiguration, "unknown block '" + std::string(name) + "'");
}

namespace {

// Geodesic from z along sign·u with its frame; `sign` only differs for the
// second antipodal point.
struct PointSetup {
  Vec u;
  int sign = 1;
  OrthonormalFrame frame;
  Vec u_coords;  // hyperplane only
};

// Predicted values of the diagonal curvature terms, per entry.
struct Target {
  int point, row, col;
  double lead;   // coefficient of the leading power
  double curv;   // coefficient two orders higher
};

bool is_offdiag(LemmaBlock b) {
  return b == LemmaBlock::B_off || b == LemmaBlock::A_off || b == LemmaBlock::C_other || b == LemmaBlock::A_col_other;
}

// Leading power of the entries of a block family.
int leading_power(LemmaBlock b) {
  switch (b) {
    case LemmaBlock::B_diag:
    case LemmaBlock::B_off:
    case LemmaBlock::C_lastrow:
    case LemmaBlock::C_other: return 1;
    default: return 0;
  }
}

}  // namespace

CoefficientReport coefficient_report(const ManifoldSpec& m, const BPConfiguration& cfg, LemmaBlock block,
                                     const LemmaOptions& opt) {
  BPConfiguration probe = cfg;
  probe.r = opt.radii.empty() ? 1.0 : opt.radii.front();
  validate(m, probe);
  const int n = m.dim();
  const Mat g = metric_at(m, cfg.z);

  const bool wants_a = block == LemmaBlock::A_diag || block == LemmaBlock::A_off;
  const bool wants_hyper = block == LemmaBlock::C_lastrow || block == LemmaBlock::C_other ||
                           block == LemmaBlock::A_col_last || block == LemmaBlock::A_col_other;
  if (wants_hyper && cfg.mode != BPMode::Hyperplane)
    throw Error(Errc::InvalidConfiguration, std::string(to_string(block)) + " needs a hyperplane configuration");
  if (wants_a && cfg.mode == BPMode::Hyperplane)
    throw Error(Errc::InvalidConfiguration, std::string(to_string(block)) + " is not defined in hyperplane mode");

  std::vector<PointSetup> points;
  std::optional<Vec> v;
  if (cfg.mode == BPMode::Hyperplane) v = cfg.directions.back();
  const int count = cfg.mode == BPMode::Hyperplane ? n : static_cast<int>(cfg.directions.size());
  OrthonormalFrame common;
  if (v) common = orthonormal_frame(m, cfg.z, {}, v);
  for (int i = 0; i < count; ++i) {
    const Vec& u = cfg.directions[static_cast<std::size_t>(i)];
    const Vec lead[] = {u};
    PointSetup p{u, 1, orthonormal_frame(m, cfg.z, lead, v), Vec()};
    if (v) p.u_coords = common.coordinates(g, u).head(n - 1);
    points.push_back(p);
    if (cfg.mode == BPMode::Antipodal) {
      p.sign = -1;
      points.push_back(p);
    }
  }

  // Entry values over the radius grid, keyed by (point, row, col).
  std::map<std::tuple<int, int, int>, std::vector<double>> series;
  for (double r : opt.radii) {
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const PointSetup& p = points[pi];
      Mat M;
      switch (block) {
        case LemmaBlock::B_diag:
        case LemmaBlock::B_off:
          if (cfg.mode == BPMode::Hyperplane)
            M = matrix_A_column_and_C(m, cfg.z, p.u, *v, p.frame, p.u_coords, r, opt.integrator).B;
          else
            M = matrix_B(m, cfg.z, p.u, p.frame, r, opt.integrator, p.sign);
          break;
        case LemmaBlock::A_diag:
        case LemmaBlock::A_off: M = matrix_A_antipodal(m, cfg.z, p.u, p.frame, r, p.sign, opt.integrator); break;
        case LemmaBlock::C_lastrow:
        case LemmaBlock::C_other: M = matrix_A_column_and_C(m, cfg.z, p.u, *v, p.frame, p.u_coords, r, opt.integrator).C; break;
        case LemmaBlock::A_col_last:
        case LemmaBlock::A_col_other:
          M = matrix_A_column_and_C(m, cfg.z, p.u, *v, p.frame, p.u_coords, r, opt.integrator).a_column;
          break;
      }
      for (int a = 0; a < M.rows(); ++a)
        for (int b = 0; b < M.cols(); ++b) series[{static_cast<int>(pi), a, b}].push_back(M(a, b));
    }
  }

  // Which entries belong to the requested family, with predictions for diagonal ones.
  std::vector<Target> targets;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const PointSetup& p = points[pi];
    const int ip = static_cast<int>(pi);
    auto K = [&](const Vec& w) { return sectional_curvature(m, cfg.z, p.u, w); };
    switch (block) {
      case LemmaBlock::B_diag: {
        const int diag = cfg.mode == BPMode::Hyperplane ? n - 2 : n - 1;
        for (int l = 0; l < diag; ++l) {
          const double kk = K(p.frame.vector(l + 1));
          targets.push_back({ip, l, l, double(p.sign), -p.sign * kk / 6.0});
        }
        break;
      }
      case LemmaBlock::A_diag:
        for (int l = 0; l < n - 1; ++l) targets.push_back({ip, l, l, 1.0, -K(p.frame.vector(l + 1)) / 2.0});
        break;
      case LemmaBlock::C_lastrow: {
        const double kv = K(*v);
        for (int c = 0; c < n - 1; ++c) targets.push_back({ip, n - 2, c, -p.u_coords[c], p.u_coords[c] * kv / 6.0});
        break;
      }
      case LemmaBlock::A_col_last: targets.push_back({ip, n - 2, 0, 1.0, -K(*v) / 2.0}); break;
      case LemmaBlock::B_off: {
        const int rows = n - 1, cols = cfg.mode == BPMode::Hyperplane ? n - 2 : n - 1;
        for (int a = 0; a < rows; ++a)
          for (int b = 0; b < cols; ++b)
            if (a != b) targets.push_back({ip, a, b, 0.0, 0.0});
        break;
      }
      case LemmaBlock::A_off:
        for (int a = 0; a < n - 1; ++a)
          for (int b = 0; b < n - 1; ++b)
            if (a != b) targets.push_back({ip, a, b, 0.0, 0.0});
        break;
      case LemmaBlock::C_other:
        for (int a = 0; a < n - 2; ++a)
          for (int b = 0; b < n - 1; ++b) targets.push_back({ip, a, b, 0.0, 0.0});
        break;
      case LemmaBlock::A_col_other:
        for (int a = 0; a < n - 2; ++a) targets.push_back({ip, a, 0, 0.0, 0.0});
        break;
    }
  }

  CoefficientReport report;
  report.block = block;
  report.pass = true;
  const int p = leading_power(block);
  for (const Target& t : targets) {
    const std::vector<double>& ys = series.at({t.point, t.row, t.col});
    EntryFit e;
    e.point = t.point;
    e.row = t.row;
    e.col = t.col;
    FitOptions fo;
    if (is_offdiag(block)) {
      // Raw entry against r^p .. r^{p+3}: the r^p and r^{p+1} terms must vanish.
      fo.exponents = {0, 1, 2, 3};
      e.fit = series_fit(opt.radii, ys, p, fo);
      e.checked = {0, 1};
      e.predicted = {0.0, 0.0};
      for (int idx : e.checked)
        e.worst = std::max(e.worst, std::abs(e.fit.coefficients[static_cast<std::size_t>(idx)]) / opt.offdiag_tol);
    } else {
      fo.exponents = {0, 2, 3, 4};
      e.fit = series_fit(opt.radii, ys, p, fo);
      e.checked = {0, 1};
      e.predicted = {t.lead, t.curv};
      for (std::size_t q = 0; q < 2; ++q) {
        const double err = std::abs(e.fit.coefficients[q] - e.predicted[q]);
        e.worst = std::max(e.worst, err / std::max(opt.rel_tol * std::abs(e.predicted[q]), opt.abs_floor));
      }
    }
    e.pass = e.worst <= 1.0;
    report.pass = report.pass && e.pass;
    report.entries.push_back(std::move(e));
  }
  return report;
}

DetGCheck detg_expansion_check(const MatX& delta, const MatX& K, const std::vector<double>& radii, double tolerance) {
  const int n = static_cast<int>(delta.rows());
  if (delta.cols() != n || K.rows() != n || K.cols() != n)
    throw Error(Errc::DimensionMismatch, "Delta and K must be square of the same size");
  const auto lu = delta.partialPivLu();
  const double det_delta = lu.determinant();
  if (!(std::abs(det_delta) > 1e-12)) throw Error(Errc::SingularDelta, "matrix Delta is singular");
  const double tr = lu.solve(K).trace();

  std::vector<double> f;
  for (double r : radii) {
    const double s = r * r;
    f.push_back((delta - s * K).partialPivLu().determinant() - det_delta * (1.0 - s * tr));
  }
  // f is a polynomial of degree n in s = r² without constant term.
  FitOptions fo;
  fo.exponents.clear();
  for (int q = 0; q < n; ++q) fo.exponents.push_back(2 * q);
  DetGCheck out;
  out.fit = series_fit(radii, f, 2, fo);
  out.residual_coeff = out.fit.coefficients[0];
  out.scale = std::abs(det_delta) * K.norm();
  out.pass = std::abs(out.residual_coeff) <= tolerance * out.scale;
  return out;
}

}  // namespace bp
