#include "quasijoint/fock.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qj {

void NoisyStateParams::validate() const {
  if (std::abs(alpha.real()) > 2.0 || std::abs(alpha.imag()) > 2.0)
    throw ConfigError("NoisyStateParams: Re/Im alpha must lie in [-2, 2]");
  if (mu < 0.5 || mu > 1.0) throw ConfigError("NoisyStateParams: mu must lie in [0.5, 1]");
  if (nbar < 0.0 || nbar > 2.0) throw ConfigError("NoisyStateParams: nbar must lie in [0, 2]");
  if (theta_rel < 0.0 || theta_rel >= 2.0 * 3.14159265358979323846 + 1e-12)
    throw ConfigError("NoisyStateParams: theta_rel must lie in [0, 2pi)");
}

double FockDensity::mean_photon() const {
  double e = 0.0;
  for (int n = 0; n < dim; ++n) e += n * rho(n, n).real();
  return e;
}

double FockDensity::tail_mass(double frac) const {
  int from = dim - static_cast<int>(std::ceil(frac * dim));
  double m = 0.0;
  for (int n = from; n < dim; ++n) m += rho(n, n).real();
  return m;
}

void FockDensity::check(double herm_tol, double trace_tol, double eig_tol,
                        double tail_tol) const {
  double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asym > herm_tol) throw HermiticityError("density matrix asymmetry " + std::to_string(asym));
  double tr = trace_real();
  if (std::abs(tr - 1.0) > trace_tol)
    throw NormalizationError("density matrix trace " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<MatXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -eig_tol)
    throw HermiticityError("density matrix has a negative eigenvalue " +
                           std::to_string(es.eigenvalues().minCoeff()));
  double tail = tail_mass();
  if (tail > tail_tol)
    throw TruncationError("top-level population " + std::to_string(tail) +
                          " exceeds the truncation budget; raise n_cut");
}

int default_n_cut(const NoisyStateParams& p) {
  double load = std::norm(p.alpha) + p.nbar;
  return std::max(60, static_cast<int>(std::ceil(4.0 * load)) + 20);
}

VecXcd coherent_amplitudes(cplx alpha, int dim) {
  VecXcd c(dim);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  return c;
}

VecXcd cat_amplitudes(cplx alpha, double theta_rel, int dim) {
  VecXcd plus = coherent_amplitudes(alpha, dim);
  cplx phase = std::exp(cplx(0.0, theta_rel));
  VecXcd c(dim);
  for (int n = 0; n < dim; ++n) c[n] = plus[n] * (n % 2 == 0 ? 1.0 + phase : 1.0 - phase);
  // ⟨α|−α⟩ = e^{−2|α|²}, hence ‖ |α⟩ + e^{iθ}|−α⟩ ‖² = 2 + 2cosθ·e^{−2|α|²}
  double norm2 = 2.0 + 2.0 * std::cos(theta_rel) * std::exp(-2.0 * std::norm(alpha));
  return c / std::sqrt(norm2);
}

MatXcd loss_channel(const MatXcd& rho, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("loss_channel: lambda must lie in [0, 1]");
  const int dim = static_cast<int>(rho.rows());
  MatXcd out = MatXcd::Zero(dim, dim);
  std::vector<double> coef(dim);
  for (int k = 0; k < dim; ++k) {
    // coef[m] = sqrt(C(m+k, k) λ^m) (1−λ)^{k/2}, built by a stable recurrence
    coef[0] = std::pow(1.0 - lambda, 0.5 * k);
    if (coef[0] == 0.0 && k > 0) break;
    for (int m = 1; m + k < dim; ++m)
      coef[m] = coef[m - 1] * std::sqrt(lambda * (m + k) / m);
    for (int m = 0; m + k < dim; ++m)
      for (int n = 0; n + k < dim; ++n) out(m, n) += coef[m] * coef[n] * rho(m + k, n + k);
  }
  return out;
}

MatXcd amp_channel(const MatXcd& rho, double gain) {
  if (gain < 1.0) throw ConfigError("amp_channel: gain must be >= 1");
  const int dim = static_cast<int>(rho.rows());
  MatXcd out = MatXcd::Zero(dim, dim);
  const double t2 = 1.0 - 1.0 / gain;
  std::vector<double> coef(dim);
  for (int k = 0; k < dim; ++k) {
    // coef[n] = sqrt(C(n+k, k)) t^k G^{−(n+1)/2}
    coef[0] = std::pow(t2, 0.5 * k) / std::sqrt(gain);
    if (coef[0] == 0.0 && k > 0) break;
    for (int n = 1; n + k < dim; ++n)
      coef[n] = coef[n - 1] * std::sqrt(double(n + k) / n / gain);
    for (int m = 0; m + k < dim; ++m)
      for (int n = 0; n + k < dim; ++n) out(m + k, n + k) += coef[m] * coef[n] * rho(m, n);
  }
  return out;
}

FockDensity fock_density(const NoisyStateParams& p, int n_cut) {
  p.validate();
  if (n_cut < default_n_cut(p))
    throw TruncationError("n_cut " + std::to_string(n_cut) + " below the safe cutoff " +
                          std::to_string(default_n_cut(p)));
  VecXcd psi = p.kind == StateKind::coherent ? coherent_amplitudes(p.alpha, n_cut)
                                             : cat_amplitudes(p.alpha, p.theta_rel, n_cut);
  FockDensity d;
  d.dim = n_cut;
  d.rho = psi * psi.adjoint();
  const double gain = 1.0 + p.nu();
  const double lambda = p.mu * p.mu / gain;
  d.rho = amp_channel(loss_channel(d.rho, lambda), gain);
  double tail = d.tail_mass();
  if (tail > 1e-6)
    throw TruncationError("top-level population " + std::to_string(tail) +
                          " exceeds the truncation budget; raise n_cut");
  return d;
}

MatXcd thermal_density(double nbar, int dim) {
  if (nbar < 0.0) throw ConfigError("thermal_density: nbar must be >= 0");
  MatXcd rho = MatXcd::Zero(dim, dim);
  double p = 1.0 / (1.0 + nbar);
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = p;
    p *= nbar / (1.0 + nbar);
  }
  return rho;
}

MatXcd displacement_operator(cplx beta, int dim) {
  MatXcd gen = MatXcd::Zero(dim, dim);  // −i(β a† − β* a), Hermitian
  for (int n = 1; n < dim; ++n) {
    double s = std::sqrt(double(n));
    gen(n, n - 1) = cplx(0.0, -1.0) * beta * s;
    gen(n - 1, n) = cplx(0.0, 1.0) * std::conj(beta) * s;
  }
  Eigen::SelfAdjointEigenSolver<MatXcd> es(gen);
  VecXcd phases(dim);
  for (int i = 0; i < dim; ++i) phases[i] = std::exp(cplx(0.0, es.eigenvalues()[i]));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qj
