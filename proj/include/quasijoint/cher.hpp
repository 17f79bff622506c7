#pragma once

#include <optional>

#include "quasijoint/char_inversion.hpp"
#include "quasijoint/dephasing.hpp"
#include "quasijoint/grid.hpp"
#include "quasijoint/spectral_density.hpp"

namespace qj {

struct CherConfig {
  double t_max = 40.0;           // initial characteristic-function horizon
  int n_t = 4096;
  int max_doublings = 6;
  double cf_tail_target = 1e-6;  // extend t_max until the tail falls below this
  double plateau_decay = 0.99;   // tail ratio across a doubling that counts as frozen
  Grid1d grid{-3.0, 3.0, 721};   // shared output window for all three marginals
  double norm_tol = 1e-3;
  double rel_tol = 1e-9;         // dephasing quadrature tolerance
  InversionConfig inversion;
};

// the three informative marginals of the bivariate quasi-distribution:
// both single-axis densities come from the conjugate pair e^{±iθ−Φ} and the
// oblique density from e^{−4Φ}, inverted at axis scale √2
struct CherResult {
  MarginalTriple marginals;
  DephasingTrace trace;
  double t_max_used = 0.0;
  std::optional<DeltaComponent> frozen1, frozen13, frozen_u;
};

CherResult cher_marginal_triple(const SpectralDensity& sd, double temperature,
                                const CherConfig& cfg = {});

}  // namespace qj
