#pragma once

#include "quasijoint/grid.hpp"

namespace qj {

enum class StateKind { coherent, cat };

// noisy-state family: a coherent state or an even/odd-phase cat passed
// through an attenuation channel of transmissivity μ² coupled to a thermal
// environment with occupation n̄; the effective added noise is ν = (1−μ²)n̄
struct NoisyStateParams {
  StateKind kind = StateKind::coherent;
  cplx alpha{0.0, 0.0};
  double theta_rel = 0.0;  // relative phase of the cat superposition
  double mu = 1.0;         // field attenuation, in [0.5, 1]
  double nbar = 0.0;       // bath occupation, in [0, 2]

  double nu() const { return (1.0 - mu * mu) * nbar; }
  void validate() const;
};

// truncated number-basis density operator
struct FockDensity {
  int dim = 0;
  MatXcd rho;

  double trace_real() const { return rho.trace().real(); }
  double purity() const { return rho.squaredNorm(); }  // Tr ρ² for Hermitian ρ
  double mean_photon() const;
  // total population of the top `frac` share of levels
  double tail_mass(double frac = 0.1) const;
  // Hermiticity / unit-trace / positivity / tail-mass guards
  void check(double herm_tol = 1e-12, double trace_tol = 1e-8, double eig_tol = 1e-10,
             double tail_tol = 1e-6) const;
};

// smallest cutoff considered safe for the given displacement and noise
int default_n_cut(const NoisyStateParams& p);

VecXcd coherent_amplitudes(cplx alpha, int dim);
VecXcd cat_amplitudes(cplx alpha, double theta_rel, int dim);

// pure attenuation: each photon survives with probability lambda
MatXcd loss_channel(const MatXcd& rho, double lambda);
// quantum-limited amplification of gain G >= 1
MatXcd amp_channel(const MatXcd& rho, double gain);

// builds the noisy state: pure preparation followed by the thermal
// attenuation channel, realized as amplification after loss with
// G = 1 + ν and λ = μ²/G
FockDensity fock_density(const NoisyStateParams& p, int n_cut);

// reference constructions used to cross-check the channel algebra
MatXcd thermal_density(double nbar, int dim);
// exact exponential of the truncated generator β a† − β* a
MatXcd displacement_operator(cplx beta, int dim);

}  // namespace qj
