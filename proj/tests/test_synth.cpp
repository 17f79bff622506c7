#include <cmath>

#include <doctest.h>

#include "quasijoint/errors.hpp"
#include "quasijoint/synth.hpp"

using namespace qj;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

bool same_component(const GaussianComponent& a, const GaussianComponent& b) {
  return a.m1 == b.m1 && a.m13 == b.m13 && a.s1 == b.s1 && a.s13 == b.s13 && a.rho == b.rho;
}

}  // namespace

TEST_CASE("parameter draws are deterministic with independent streams") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  SyntheticSample a = sample_params(42, 7, cfg);
  SyntheticSample b = sample_params(42, 7, cfg);
  CHECK(same_component(a.p, b.p));
  CHECK(same_component(a.p_prime, b.p_prime));
  CHECK(same_component(a.p_dprime, b.p_dprime));
  CHECK(a.amplitude == b.amplitude);

  SyntheticSample c = sample_params(42, 8, cfg);
  SyntheticSample d = sample_params(43, 7, cfg);
  CHECK(!same_component(a.p, c.p));
  CHECK(!same_component(a.p, d.p));
}

TEST_CASE("drawn parameters respect the configured ranges and height budgets") {
  for (const SynthPreset& cfg :
       {SynthPreset::cher_super_ohmic(), SynthPreset::cher_drude_lorentz()}) {
    for (int i = 0; i < 500; ++i) {
      SyntheticSample s = sample_params(11, i, cfg);
      CHECK(s.p.m1 >= cfg.m1_loc.lo);
      CHECK(s.p.m1 <= cfg.m1_loc.hi);
      CHECK(s.p.m13 >= cfg.m13_loc.lo);
      CHECK(s.p.m13 <= cfg.m13_loc.hi);
      for (double sig : {s.p.s1, s.p.s13}) {
        CHECK(sig >= cfg.sigma.lo);
        CHECK(sig <= cfg.sigma.hi);
      }
      CHECK(s.p.rho >= 0.0);
      CHECK(s.p.rho <= cfg.rho_cap);
      CHECK(s.amplitude <= cfg.amp.hi);

      // both signed siblings sit on their assigned diagonals
      const double du1 = s.p_prime.m1 - s.p.m1, du13 = s.p_prime.m13 - s.p.m13;
      CHECK(du1 == doctest::Approx(du13).epsilon(1e-12));
      const double dv1 = s.p_dprime.m1 - s.p.m1, dv13 = s.p_dprime.m13 - s.p.m13;
      CHECK(dv1 == doctest::Approx(-dv13).epsilon(1e-12));
      const double wbar = 0.5 * (s.p_dprime.s1 + s.p_dprime.s13);
      const double dv = std::abs(dv1) * std::sqrt(2.0);
      CHECK(dv >= cfg.well_offset.lo * wbar - 1e-12);
      CHECK(dv <= cfg.well_offset.hi * wbar + 1e-12);

      // conservative height budgets: the lobe cannot push the sample above the
      // encoder window and the well cannot push it below
      CHECK(s.p.peak() <= cfg.peak_budget + 1e-12);
      CHECK(s.p.peak() + s.amplitude * s.p_prime.peak() <= cfg.peak_budget + 1e-12);
      CHECK(s.amplitude * s.p_dprime.peak() <= cfg.dip_budget + 1e-12);
    }
  }
}

TEST_CASE("zero-amplitude preset degenerates to a plain Gaussian") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic().plain();
  CHECK(cfg.amp.hi == 0.0);
  SyntheticSample s = sample_params(3, 0, cfg);
  CHECK(s.amplitude == 0.0);
  CHECK(same_component(s.p, s.p_prime));
  CHECK(same_component(s.p, s.p_dprime));
  Grid1d g{cfg.window.lo, cfg.window.hi, 161};
  JointGrid j = eval_joint(s, g, g);
  CHECK(j.integral() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("standard normal evaluates to the textbook peak") {
  SyntheticSample s;  // defaults: unit isotropic Gaussian at the origin, A = 0
  Grid1d g{-8.0, 8.0, 257};
  JointGrid j = eval_joint(s, g, g);
  CHECK(j.values(128, 128) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
  CHECK(j.values.maxCoeff() == j.values(128, 128));
  CHECK(j.integral() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identical signed siblings cancel exactly") {
  SyntheticSample s;
  s.p = GaussianComponent{0.3, -0.2, 1.4, 1.1, 0.5};
  s.p_prime = GaussianComponent{1.0, 0.7, 2.0, 1.8, 0.2};
  s.p_dprime = s.p_prime;
  s.amplitude = 0.45;
  Grid1d g{-6.0, 6.0, 101};
  JointGrid with = eval_joint(s, g, g);
  s.amplitude = 0.0;
  JointGrid base = eval_joint(s, g, g);
  CHECK((with.values - base.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form marginals match grid integration of the joint") {
  for (const SynthPreset& cfg :
       {SynthPreset::cher_super_ohmic(), SynthPreset::cher_drude_lorentz()}) {
    Grid1d jg{cfg.window.lo, cfg.window.hi, 256};
    for (int i = 0; i < 20; ++i) {
      SyntheticSample s = sample_params(99, i, cfg);
      JointGrid j = eval_joint(s, jg, jg);
      MarginalTriple t = analytic_marginals(s, cfg.window);

      VecXd m1 = resample_to_grid(joint_axis_marginal(j, Axis::x1), cfg.window);
      VecXd m13 = resample_to_grid(joint_axis_marginal(j, Axis::x13), cfg.window);
      VecXd mu = joint_oblique_marginal(j, cfg.window).values;
      CHECK((m1 - t.m1.values).cwiseAbs().sum() / cfg.window.n < 1e-3);
      CHECK((m13 - t.m13.values).cwiseAbs().sum() / cfg.window.n < 1e-3);
      CHECK((mu - t.mu.values).cwiseAbs().sum() / cfg.window.n < 1e-3);
      for (const Marginal* m : {&t.m1, &t.m13, &t.mu})
        CHECK(m->integral() == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("negativity on the native grid tracks a dense oversampled scan") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  Grid1d coarse{cfg.window.lo, cfg.window.hi, 256};
  Grid1d fine{cfg.window.lo, cfg.window.hi, 4 * (256 - 1) + 1};
  int negatives = 0, positives = 0;
  for (int i = 0; i < 30; ++i) {
    SyntheticSample s = sample_params(123, i, cfg);
    JointGrid jc = eval_joint(s, coarse, coarse);
    JointGrid jf = eval_joint(s, fine, fine);
    const double mc = jc.values.minCoeff(), mf = jf.values.minCoeff();
    CHECK(mc >= mf - 1e-15);  // the fine grid contains every coarse point
    if (mf < -1e-6) {
      CHECK(mc < 0.0);  // wells are wide relative to the grid step
      ++negatives;
    } else if (mf > -1e-9) {
      ++positives;
    }
    // every sample stays inside the encoder height window
    CHECK(jf.values.maxCoeff() <= cfg.peak_budget + 1e-12);
    CHECK(mf >= -cfg.dip_budget - 1e-12);
  }
  CHECK(negatives > 5);
  CHECK(positives > 0);
}

TEST_CASE("diagonal marginal of the isotropic unit Gaussian is standard normal") {
  SyntheticSample s;
  Grid1d g{-8.0, 8.0, 721};
  MarginalTriple t = analytic_marginals(s, g);
  double worst = 0.0;
  for (int k = 0; k < g.n; ++k) {
    const double x = g.point(k);
    const double ref = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    worst = std::max(worst, std::abs(t.mu.values[k] - ref));
  }
  CHECK(worst < 1e-15);
}

TEST_CASE("invalid configuration is rejected") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  cfg.sigma = Range{4.0, 2.0};
  CHECK_THROWS_AS(sample_params(1, 0, cfg), ConfigError);

  SynthPreset zero_floor = SynthPreset::cher_super_ohmic();
  zero_floor.amp = Range{0.0, 0.5};  // log-uniform draw needs a positive floor
  CHECK_THROWS_AS(sample_params(1, 0, zero_floor), ConfigError);

  GaussianComponent bad;
  bad.rho = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
