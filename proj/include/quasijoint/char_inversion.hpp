#pragma once

#include <optional>

#include "quasijoint/grid.hpp"

namespace qj {

// sign convention: φ(t) = ∫ ℘(x) e^{−i·axis_scale·x·t} dx, data given on a
// uniform grid t ∈ [0, t_max]; the negative-t half follows by conjugation

struct InversionConfig {
  double tail_band_frac = 0.1;     // trailing fraction inspected for a plateau
  double delta_attempt_level = 1e-6;  // try frozen-component extraction above this
  double alias_tol = 1e-3;         // refuse plain inversion above this tail level
  double fit_amp_rel_tol = 0.05;   // amplitude flatness required of a plateau
  double fit_phase_resid = 0.02;   // rad, linear-phase misfit allowed
  double fit_phase_tol = 0.15;     // rad, intercept must be near 0 (real weight)
  double imag_tol = 1e-6;          // imaginary residue guard
  double cf0_tol = 1e-6;           // |φ(0) − 1|
};

// point mass that never decays in the characteristic function
struct DeltaComponent {
  double x0 = 0.0;
  double weight = 0.0;
};

struct InvertedMarginal {
  Marginal marginal;                   // includes the frozen component's bin mass
  VecXd smooth_values;                 // marginal values without the frozen bins
  std::optional<DeltaComponent> frozen;
  double imag_residue = 0.0;           // max |Im| of the inversion integral
  double cf_tail = 0.0;                // mean |φ| over the trailing band
};

InvertedMarginal marginal_from_characteristic(const VecXcd& phi, double t_max,
                                              double axis_scale, const Grid1d& grid,
                                              Axis axis, const InversionConfig& cfg = {});

// forward transform of a sampled density (plus optional point mass) at the
// requested times; used for round-trip validation
VecXcd forward_characteristic(const Marginal& m, const std::optional<DeltaComponent>& frozen,
                              const VecXd& times, double axis_scale);

}  // namespace qj
