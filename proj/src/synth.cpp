#include "quasijoint/synth.hpp"

#include <algorithm>
#include <cmath>

#include "quasijoint/errors.hpp"
#include "quasijoint/rng.hpp"

namespace qj {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double normal_pdf(double x, double mean, double sigma) {
  const double t = (x - mean) / sigma;
  return std::exp(-0.5 * t * t) / (std::sqrt(kTwoPi) * sigma);
}

}  // namespace

void Range::validate(const char* what) const {
  if (!(lo <= hi)) throw ConfigError(std::string(what) + ": empty or inverted range");
}

void GaussianComponent::validate() const {
  if (!(s1 > 0.0) || !(s13 > 0.0)) throw ConfigError("GaussianComponent: sigma must be positive");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("GaussianComponent: |rho| must be below 1");
}

double GaussianComponent::peak() const {
  return 1.0 / (kTwoPi * s1 * s13 * std::sqrt(1.0 - rho * rho));
}

double GaussianComponent::value(double x, double y) const {
  const double dx = (x - m1) / s1;
  const double dy = (y - m13) / s13;
  const double q = (dx * dx - 2.0 * rho * dx * dy + dy * dy) / (1.0 - rho * rho);
  return peak() * std::exp(-0.5 * q);
}

double GaussianComponent::proj_mean(Axis a) const {
  switch (a) {
    case Axis::x1: return m1;
    case Axis::x13: return m13;
    case Axis::u: return (m1 + m13) / std::sqrt(2.0);
  }
  return 0.0;
}

double GaussianComponent::proj_sigma(Axis a) const {
  switch (a) {
    case Axis::x1: return s1;
    case Axis::x13: return s13;
    case Axis::u: return std::sqrt(0.5 * (s1 * s1 + s13 * s13 + 2.0 * rho * s1 * s13));
  }
  return 1.0;
}

void SyntheticSample::validate() const {
  p.validate();
  p_prime.validate();
  p_dprime.validate();
  if (!(amplitude >= 0.0)) throw ConfigError("SyntheticSample: amplitude must be nonnegative");
}

double SyntheticSample::value(double x, double y) const {
  double v = p.value(x, y);
  if (amplitude > 0.0) v += amplitude * (p_prime.value(x, y) - p_dprime.value(x, y));
  return v;
}

SynthPreset SynthPreset::cher_super_ohmic() {
  SynthPreset c;
  c.window = Grid1d{-24.0, 24.0, 721};
  c.m1_loc = Range{-0.72, -0.22};
  c.m13_loc = Range{0.22, 0.72};
  c.sigma = Range{2.50, 4.21};
  c.amp = Range{0.05, 0.6};
  return c;
}

SynthPreset SynthPreset::cher_drude_lorentz() {
  SynthPreset c;
  c.window = Grid1d{-44.0, 44.0, 721};
  c.m1_loc = Range{-0.51, -0.35};
  c.m13_loc = Range{0.35, 0.51};
  c.sigma = Range{2.85, 4.53};
  c.amp = Range{0.05, 0.6};
  return c;
}

SynthPreset SynthPreset::plain() const {
  SynthPreset c = *this;
  c.amp = Range{0.0, 0.0};
  return c;
}

void SynthPreset::validate() const {
  window.validate();
  m1_loc.validate("m1_loc");
  m13_loc.validate("m13_loc");
  sigma.validate("sigma");
  amp.validate("amp");
  lobe_sigma_scale.validate("lobe_sigma_scale");
  well_sigma_scale.validate("well_sigma_scale");
  lobe_offset.validate("lobe_offset");
  well_offset.validate("well_offset");
  if (!(sigma.lo > 0.0)) throw ConfigError("SynthPreset: sigma range must be positive");
  if (!(amp.lo >= 0.0)) throw ConfigError("SynthPreset: amplitude range must be nonnegative");
  if (amp.hi > 0.0 && !(amp.lo > 0.0))
    throw ConfigError("SynthPreset: signed amplitude range needs a positive lower edge");
  if (!(peak_budget > 0.0) || !(dip_budget > 0.0))
    throw ConfigError("SynthPreset: budgets must be positive");
  if (!(rho_cap >= 0.0) || !(rho_cap < 1.0)) throw ConfigError("SynthPreset: rho_cap in [0, 1)");
  if (!(well_sigma_scale.lo > 0.0) || !(lobe_sigma_scale.lo > 0.0))
    throw ConfigError("SynthPreset: sigma scale ranges must be positive");
  if (!(well_offset.lo >= 0.0)) throw ConfigError("SynthPreset: well_offset must be nonnegative");
  if (well_rho_scale < 0.0 || well_rho_scale > 1.0)
    throw ConfigError("SynthPreset: well_rho_scale in [0, 1]");
}

double rho_budget(double s1, double s13, double peak_budget, double rho_cap) {
  const double r = 1.0 / (kTwoPi * s1 * s13 * peak_budget);
  if (r >= 1.0) return 0.0;
  return std::min(rho_cap, std::sqrt(1.0 - r * r));
}

SyntheticSample sample_params(uint64_t seed, uint64_t index, const SynthPreset& cfg) {
  cfg.validate();
  SplitMix64 rng(seed, index);
  SyntheticSample s;

  s.p.m1 = rng.uniform(cfg.m1_loc.lo, cfg.m1_loc.hi);
  s.p.m13 = rng.uniform(cfg.m13_loc.lo, cfg.m13_loc.hi);
  s.p.s1 = rng.uniform(cfg.sigma.lo, cfg.sigma.hi);
  s.p.s13 = rng.uniform(cfg.sigma.lo, cfg.sigma.hi);
  s.p.rho = rng.uniform(0.0, rho_budget(s.p.s1, s.p.s13, cfg.peak_budget, cfg.rho_cap));

  if (cfg.amp.hi <= 0.0) {  // plain sample: the signed pair degenerates to the base
    s.p_prime = s.p;
    s.p_dprime = s.p;
    s.amplitude = 0.0;
    return s;
  }

  const double r2 = std::sqrt(2.0);
  const double sbar = 0.5 * (s.p.s1 + s.p.s13);

  // lobe: reweighted sibling shifted along the u diagonal
  s.p_prime.s1 = s.p.s1 * rng.uniform(cfg.lobe_sigma_scale.lo, cfg.lobe_sigma_scale.hi);
  s.p_prime.s13 = s.p.s13 * rng.uniform(cfg.lobe_sigma_scale.lo, cfg.lobe_sigma_scale.hi);
  const double du = sbar * rng.uniform(cfg.lobe_offset.lo, cfg.lobe_offset.hi);
  s.p_prime.m1 = s.p.m1 + du / r2;
  s.p_prime.m13 = s.p.m13 + du / r2;
  s.p_prime.rho =
      rng.uniform(0.0, rho_budget(s.p_prime.s1, s.p_prime.s13, cfg.peak_budget, cfg.rho_cap));

  // well: negative sibling shifted off the diagonal, carving the negative region
  s.p_dprime.s1 = s.p.s1 * rng.uniform(cfg.well_sigma_scale.lo, cfg.well_sigma_scale.hi);
  s.p_dprime.s13 = s.p.s13 * rng.uniform(cfg.well_sigma_scale.lo, cfg.well_sigma_scale.hi);
  const double wbar = 0.5 * (s.p_dprime.s1 + s.p_dprime.s13);
  double dv = wbar * rng.uniform(cfg.well_offset.lo, cfg.well_offset.hi);
  if (rng.next() & 1) dv = -dv;
  s.p_dprime.m1 = s.p.m1 + dv / r2;
  s.p_dprime.m13 = s.p.m13 - dv / r2;
  s.p_dprime.rho = rng.uniform(
      0.0, cfg.well_rho_scale * rho_budget(s.p_dprime.s1, s.p_dprime.s13, cfg.peak_budget,
                                           cfg.rho_cap));

  // amplitude: log-uniform draw clamped so the sample respects both height
  // budgets (the clamp can undercut the configured lower edge)
  double a = rng.log_uniform(cfg.amp.lo, cfg.amp.hi);
  const double lobe_room = cfg.peak_budget - s.p.peak();
  a = std::min(a, std::max(0.0, lobe_room) / s.p_prime.peak());
  a = std::min(a, cfg.dip_budget / s.p_dprime.peak());
  s.amplitude = a;
  return s;
}

JointGrid eval_joint(const SyntheticSample& s, const Grid1d& gx, const Grid1d& gy) {
  s.validate();
  JointGrid j = make_joint_grid(gx, gy);
  for (int i = 0; i < gx.n; ++i) {
    const double x = gx.point(i);
    for (int k = 0; k < gy.n; ++k) j.values(i, k) = s.value(x, gy.point(k));
  }
  return j;
}

MarginalTriple analytic_marginals(const SyntheticSample& s, const Grid1d& grid) {
  s.validate();
  grid.validate();
  MarginalTriple t;
  for (Axis a : {Axis::x1, Axis::x13, Axis::u}) {
    Marginal m;
    m.axis = a;
    m.grid = grid;
    m.values.resize(grid.n);
    for (int k = 0; k < grid.n; ++k) {
      const double x = grid.point(k);
      double v = normal_pdf(x, s.p.proj_mean(a), s.p.proj_sigma(a));
      if (s.amplitude > 0.0)
        v += s.amplitude * (normal_pdf(x, s.p_prime.proj_mean(a), s.p_prime.proj_sigma(a)) -
                            normal_pdf(x, s.p_dprime.proj_mean(a), s.p_dprime.proj_sigma(a)));
      m.values[k] = v;
    }
    (a == Axis::x1 ? t.m1 : a == Axis::x13 ? t.m13 : t.mu) = m;
  }
  return t;
}

}  // namespace qj
