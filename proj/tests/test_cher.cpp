#include <doctest.h>

#include <cmath>

#include "quasijoint/cher.hpp"
#include "quasijoint/errors.hpp"

using namespace qj;

namespace {

double mean_of(const Marginal& m) {
  VecXd xv = m.grid.points();
  VecXd integrand = xv.cwiseProduct(m.values);
  return trapezoid(integrand, m.grid.step());
}

double var_of(const Marginal& m) {
  double mu = mean_of(m);
  VecXd xv = m.grid.points();
  VecXd integrand = (xv.array() - mu).square().matrix().cwiseProduct(m.values);
  return trapezoid(integrand, m.grid.step());
}

}  // namespace

TEST_CASE("zero-temperature triple freezes a coherent remnant") {
  auto sd = SpectralDensity::super_ohmic(0.1, 2.0, 1.0);
  CherConfig cfg;
  // the remnant distribution has an edge at the frozen point, so its tails
  // decay slowly; a ±6 window truncates ~2e-3 of mass
  cfg.grid = {-10.0, 10.0, 721};
  auto res = cher_marginal_triple(sd, 0.0, cfg);

  // asymptotic phase slope 4η puts the frozen mass at ∓4η with weight e^{−4η}
  REQUIRE(res.frozen1.has_value());
  REQUIRE(res.frozen13.has_value());
  REQUIRE(res.frozen_u.has_value());
  CHECK(res.frozen1->x0 == doctest::Approx(-0.4).epsilon(3e-3));
  CHECK(res.frozen13->x0 == doctest::Approx(0.4).epsilon(3e-3));
  CHECK(res.frozen1->weight == doctest::Approx(std::exp(-0.4)).epsilon(1e-3));
  CHECK(std::abs(res.frozen_u->x0) < 1e-6);
  CHECK(res.frozen_u->weight == doctest::Approx(std::exp(-1.6)).epsilon(1e-3));

  CHECK(res.marginals.m1.integral() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.marginals.mu.integral() == doctest::Approx(1.0).epsilon(1e-3));

  // the conjugate marginal is the mirror image
  int n = cfg.grid.n;
  double mirror = 0.0;
  for (int i = 0; i < n; ++i)
    mirror = std::max(mirror,
                      std::abs(res.marginals.m13.values[i] - res.marginals.m1.values[n - 1 - i]));
  CHECK(mirror <= 1e-8);
}

TEST_CASE("warm triple is smooth, normalized, and satisfies the variance identity") {
  auto sd = SpectralDensity::super_ohmic(0.1, 2.0, 1.0);
  CherConfig cfg;
  cfg.grid = {-12.0, 12.0, 721};
  auto res = cher_marginal_triple(sd, 3.6, cfg);

  CHECK(!res.frozen1.has_value());
  CHECK(res.t_max_used >= 80.0);  // horizon extended for the slow thermal tail
  CHECK(res.marginals.m1.integral() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.marginals.m13.integral() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.marginals.mu.integral() == doctest::Approx(1.0).epsilon(1e-3));

  int n = cfg.grid.n;
  double mirror = 0.0, usym = 0.0;
  for (int i = 0; i < n; ++i) {
    mirror = std::max(mirror,
                      std::abs(res.marginals.m13.values[i] - res.marginals.m1.values[n - 1 - i]));
    usym = std::max(usym,
                    std::abs(res.marginals.mu.values[i] - res.marginals.mu.values[n - 1 - i]));
  }
  CHECK(mirror <= 1e-8);
  CHECK(usym <= 1e-8);  // the oblique characteristic function is real

  // second cumulant doubles along the oblique axis
  double v1 = var_of(res.marginals.m1);
  double vu = var_of(res.marginals.mu);
  CHECK(vu == doctest::Approx(2.0 * v1).epsilon(2e-3));
  CHECK(std::abs(mean_of(res.marginals.mu)) < 1e-9);
}

TEST_CASE("memory-kernel family triple at finite temperature") {
  auto sd = SpectralDensity::drude_lorentz(0.1, 1.0);
  CherConfig cfg;
  cfg.grid = {-20.0, 20.0, 721};
  auto res = cher_marginal_triple(sd, 2.4, cfg);

  CHECK(res.marginals.m1.integral() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.marginals.mu.integral() == doctest::Approx(1.0).epsilon(1e-3));
  int n = cfg.grid.n;
  double mirror = 0.0;
  for (int i = 0; i < n; ++i)
    mirror = std::max(mirror,
                      std::abs(res.marginals.m13.values[i] - res.marginals.m1.values[n - 1 - i]));
  CHECK(mirror <= 1e-8);
}

TEST_CASE("horizon doubling gives up with a diagnostic") {
  // weak coupling at low temperature decays too slowly to resolve quickly
  auto sd = SpectralDensity::super_ohmic(0.01, 2.0, 1.0);
  CherConfig cfg;
  cfg.grid = {-6.0, 6.0, 721};
  cfg.n_t = 512;
  cfg.max_doublings = 2;
  cfg.plateau_decay = 0.999;
  CHECK_THROWS_AS(cher_marginal_triple(sd, 0.5, cfg), AliasingError);
}
