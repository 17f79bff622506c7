#pragma once

#include "quasijoint/grid.hpp"
#include "quasijoint/spectral_density.hpp"

namespace qj {

// phase accumulated by the off-diagonal coherence:
//   θ(t) = 4 ∫_0^∞ J(ω)/ω² · (ωt − sin ωt) dω
double theta_phase(const SpectralDensity& sd, double t, double rel_tol = 1e-9);

// decoherence exponent at temperature T (ħ = k_B = 1):
//   Φ(t) = 4 ∫_0^∞ J(ω)/ω² · coth(ω/2T) · (1 − cos ωt) dω,  coth → 1 at T = 0
double phi_decoherence(const SpectralDensity& sd, double temperature, double t,
                       double rel_tol = 1e-9);

// dephasing factors of the three informative matrix elements on a uniform
// time grid; the fourth element is identically 1
struct DephasingTrace {
  VecXd times;   // n_t points, from 0 to t_max
  VecXd theta;   // θ(t)
  VecXd phi;     // Φ(t)

  double t_max() const { return times[times.size() - 1]; }
  int size() const { return static_cast<int>(times.size()); }

  // e^{iθ(t) − Φ(t)}
  VecXcd factor_single() const;
  // e^{−4Φ(t)} (real positive)
  VecXd factor_double() const;
  // conjugate partner of factor_single
  VecXcd factor_single_conj() const;
};

DephasingTrace dephasing_factors(const SpectralDensity& sd, double temperature, double t_max,
                                 int n_t, double rel_tol = 1e-9);

}  // namespace qj
