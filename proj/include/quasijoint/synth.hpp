#pragma once

#include <cstdint>

#include "quasijoint/grid.hpp"

namespace qj {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  void validate(const char* what) const;
  double width() const { return hi - lo; }
};

// bivariate normal component of a signed mixture
struct GaussianComponent {
  double m1 = 0.0, m13 = 0.0;  // mean
  double s1 = 1.0, s13 = 1.0;  // per-axis standard deviation
  double rho = 0.0;            // correlation, in (-1, 1)

  void validate() const;
  double peak() const;  // value at the mean
  double value(double x, double y) const;
  double proj_mean(Axis a) const;   // mean of the 1-D projection
  double proj_sigma(Axis a) const;  // width of the 1-D projection
};

// signed three-component mixture: base + amplitude * (lobe - well);
// the two signed terms cancel in the integral, so it is normalized for any
// amplitude, and amplitude = 0 reduces it to the plain base Gaussian
struct SyntheticSample {
  GaussianComponent p, p_prime, p_dprime;
  double amplitude = 0.0;

  void validate() const;
  double value(double x, double y) const;
};

// parameter ranges for one training-distribution family; the numeric presets
// are fitted to the dephasing-model marginal statistics over T in [2, 5]
// (peak location and width intervals inflated 25% about their midpoints) and
// the signed-term budgets keep every sample inside the height colormap window
struct SynthPreset {
  Grid1d window;        // marginal grid; the joint window spans the same square
  Range m1_loc;         // base mean along the first axis
  Range m13_loc;        // base mean along the second axis
  Range sigma;          // base per-axis widths
  Range amp;            // signed amplitude (log-uniform); {0,0} for plain samples
  double peak_budget = 0.0405;  // cap on base-plus-lobe height
  double dip_budget = 0.0095;   // cap on the well depth
  double rho_cap = 0.95;
  Range lobe_sigma_scale{0.6, 1.2};   // p' widths relative to base
  Range well_sigma_scale{0.5, 1.0};   // p'' widths relative to base
  Range lobe_offset{-0.8, 0.8};       // p' center shift along the u diagonal, in mean sigmas
  Range well_offset{0.3, 1.8};        // |p'' center shift| along the v diagonal
  double well_rho_scale = 0.7;

  static SynthPreset cher_super_ohmic();
  static SynthPreset cher_drude_lorentz();
  SynthPreset plain() const;  // same preset with the amplitude forced to zero
  void validate() const;
};

// largest correlation whose density peak stays within the height budget
double rho_budget(double s1, double s13, double peak_budget, double rho_cap);

// deterministic parameter draw; (seed, index) streams are independent
SyntheticSample sample_params(uint64_t seed, uint64_t index, const SynthPreset& cfg);

JointGrid eval_joint(const SyntheticSample& s, const Grid1d& gx, const Grid1d& gy);

// closed-form marginals: each component projects to a 1-D normal along the
// axis (u picks up the correlation term), combined with the same signs
MarginalTriple analytic_marginals(const SyntheticSample& s, const Grid1d& grid);

}  // namespace qj
