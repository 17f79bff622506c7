#include "quasijoint/cher.hpp"

#include <cmath>

#include "quasijoint/io.hpp"

namespace qj {

namespace {

void check_norm(const Marginal& m, double tol) {
  double v = m.integral();
  if (std::abs(v - 1.0) > tol)
    throw NormalizationError("marginal " + axis_name(m.axis) + " integrates to " +
                             format_double(v) + " (tolerance " + format_double(tol) + ")");
}

}  // namespace

CherResult cher_marginal_triple(const SpectralDensity& sd, double temperature,
                                const CherConfig& cfg) {
  cfg.grid.validate();
  if (cfg.n_t < 64) throw ConfigError("cher: n_t too small");

  double t_max = cfg.t_max;
  DephasingTrace trace;
  for (int d = 0;; ++d) {
    trace = dephasing_factors(sd, temperature, t_max, cfg.n_t, cfg.rel_tol);
    double tail = std::exp(-trace.phi[cfg.n_t - 1]);
    if (tail <= cfg.cf_tail_target) break;
    double mid = std::exp(-trace.phi[cfg.n_t / 2]);
    if (mid > 0.0 && tail / mid >= cfg.plateau_decay) break;  // frozen coherence
    if (d == cfg.max_doublings)
      throw AliasingError("characteristic function tail still " + format_double(tail) +
                          " after " + std::to_string(d) + " horizon doublings");
    t_max *= 2.0;
  }

  CherResult res;
  res.trace = trace;
  res.t_max_used = t_max;

  auto inv1 = marginal_from_characteristic(trace.factor_single(), t_max, 1.0, cfg.grid,
                                           Axis::x1, cfg.inversion);
  auto inv13 = marginal_from_characteristic(trace.factor_single_conj(), t_max, 1.0, cfg.grid,
                                            Axis::x13, cfg.inversion);
  VecXcd f9 = trace.factor_double().cast<cplx>();
  auto invu = marginal_from_characteristic(f9, t_max, std::sqrt(2.0), cfg.grid, Axis::u,
                                           cfg.inversion);

  check_norm(inv1.marginal, cfg.norm_tol);
  check_norm(inv13.marginal, cfg.norm_tol);
  check_norm(invu.marginal, cfg.norm_tol);

  res.marginals.m1 = std::move(inv1.marginal);
  res.marginals.m13 = std::move(inv13.marginal);
  res.marginals.mu = std::move(invu.marginal);
  res.frozen1 = inv1.frozen;
  res.frozen13 = inv13.frozen;
  res.frozen_u = invu.frozen;
  return res;
}

}  // namespace qj
