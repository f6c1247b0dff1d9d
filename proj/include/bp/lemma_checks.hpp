// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small-r behavior of individual block entries and of det(Δ − r²K).

#include "bp/bp_jacobian.hpp"
#include "bp/series_fit.hpp"

#include <string_view>
#include <vector>

namespace bp {

enum class LemmaBlock { B_diag, B_off, A_diag, A_off, C_lastrow, C_other, A_col_last, A_col_other };

std::string_view to_string(LemmaBlock block);
LemmaBlock parse_lemma_block(std::string_view name);

struct LemmaOptions {
  std::vector<double> radii = log_grid(1e-3, 1e-1, 25);
  IntegratorConfig integrator;
  double rel_tol = 0.02;
  double abs_floor = 1e-6;
  double offdiag_tol = 1e-3;  // relative to the diagonal scale (1)
};

struct EntryFit {
  int point = 0;  // which x_i
  int row = 0;
  int col = 0;
  FitResult fit;
  /// Indices into fit.coefficients that are checked, with their predictions.
  std::vector<int> checked;
  std::vector<double> predicted;
  double worst = 0.0;  // largest error relative to max(|prediction|·rel_tol, abs_floor) or offdiag_tol
  bool pass = false;
};

struct CoefficientReport {
  LemmaBlock block = LemmaBlock::B_diag;
  std::vector<EntryFit> entries;
  bool pass = false;
};

/// Diagonal blocks: fit entry / r^p against {1, r², r³, r⁴} and compare the
/// first two coefficients with the predicted (leading, −K/6 or −K/2 scaled).
/// Off-diagonal blocks: fit the raw entry and require the coefficients below
/// the first nonvanishing order (r, r² for B and C; 1, r for A) to be small.
/// Throws InvalidConfiguration when the block does not exist in cfg.mode.
CoefficientReport coefficient_report(const ManifoldSpec& m, const BPConfiguration& cfg, LemmaBlock block,
                                     const LemmaOptions& opt = {});

struct DetGCheck {
  FitResult fit;            // of f(r)/r² in powers of r²
  double residual_coeff = 0.0;  // r² coefficient of det(Δ − r²K) − detΔ(1 − r²Tr(Δ⁻¹K))
  double scale = 0.0;           // |detΔ|·‖K‖
  bool pass = false;
};

/// Throws SingularDelta.
DetGCheck detg_expansion_check(const MatX& delta, const MatX& K, const std::vector<double>& radii,
                               double tolerance = 1e-9);

}  // namespace bp
