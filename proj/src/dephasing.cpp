#include "quasijoint/dephasing.hpp"

#include <cmath>

#include "quasijoint/quadrature.hpp"

namespace qj {

namespace {

const double kPi = 3.14159265358979323846;

// (x − sin x)/x, stable near 0
double lin_minus_sin_over_x(double x) {
  if (std::abs(x) < 0.1) {
    double x2 = x * x;
    return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return (x - std::sin(x)) / x;
}

// sin(y)/y, stable near 0
double sinc(double y) {
  if (std::abs(y) < 1e-4) {
    double y2 = y * y;
    return 1.0 - y2 / 6.0 * (1.0 - y2 / 20.0);
  }
  return std::sin(y) / y;
}

// ω · coth(ω / 2T), stable near 0; reduces to ω at T = 0
double omega_coth(double omega, double temperature) {
  if (temperature == 0.0) return omega;
  double x = omega / (2.0 * temperature);
  if (std::abs(x) < 1e-4) return 2.0 * temperature * (1.0 + x * x / 3.0);
  return omega / std::tanh(x);
}

double coth_factor(double omega, double temperature) {
  if (temperature == 0.0) return 1.0;
  double x = omega / (2.0 * temperature);
  if (std::abs(x) < 1e-4) return 1.0 / x + x / 3.0;
  return 1.0 / std::tanh(x);
}

// split frequency: the core [0, ωs] stays within a quarter oscillation period
double split_point(const SpectralDensity& sd, double t) {
  double scale = sd.scales().front();
  if (t <= 0.0) return scale;
  return std::min(scale, kPi / (2.0 * t));
}

}  // namespace

double theta_phase(const SpectralDensity& sd, double t, double rel_tol) {
  if (t < 0.0) throw ConfigError("theta_phase: t must be >= 0");
  if (t == 0.0) return 0.0;
  double ws = split_point(sd, t);
  auto breaks = sd.scales();

  auto core = [&](double w) { return 4.0 * sd.over_omega(w) * t * lin_minus_sin_over_x(w * t); };
  double core_val = integrate_segments(core, 0.0, ws, breaks, rel_tol * 0.1);

  auto lin = [&](double w) { return 4.0 * sd.over_omega(w); };
  auto inv2 = [&](double w) { return 4.0 * sd.over_omega(w) / w; };
  double tail_lin = t * semi_infinite(lin, ws, OscKind::plain, 0.0, rel_tol * 0.1, breaks);
  double tail_sin = semi_infinite(inv2, ws, OscKind::sine, t, rel_tol * 0.1, breaks);
  return core_val + tail_lin - tail_sin;
}

double phi_decoherence(const SpectralDensity& sd, double temperature, double t, double rel_tol) {
  if (t < 0.0) throw ConfigError("phi_decoherence: t must be >= 0");
  if (temperature < 0.0) throw ConfigError("phi_decoherence: temperature must be >= 0");
  if (t == 0.0) return 0.0;
  double ws = split_point(sd, t);
  auto breaks = sd.scales();
  if (temperature > 0.0) breaks.push_back(2.0 * temperature);

  auto core = [&](double w) {
    double y = 0.5 * w * t;
    double sc = sinc(y);
    return 4.0 * sd.over_omega(w) * omega_coth(w, temperature) * 0.5 * t * t * sc * sc;
  };
  double core_val = integrate_segments(core, 0.0, ws, breaks, rel_tol * 0.1);

  auto envelope = [&](double w) {
    return 4.0 * sd.over_omega(w) / w * coth_factor(w, temperature);
  };
  double tail_flat = semi_infinite(envelope, ws, OscKind::plain, 0.0, rel_tol * 0.1, breaks);
  double tail_cos = semi_infinite(envelope, ws, OscKind::cosine, t, rel_tol * 0.1, breaks);
  return core_val + tail_flat - tail_cos;
}

VecXcd DephasingTrace::factor_single() const {
  VecXcd v(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i)
    v[i] = std::exp(-phi[i]) * cplx(std::cos(theta[i]), std::sin(theta[i]));
  return v;
}

VecXd DephasingTrace::factor_double() const {
  VecXd v(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) v[i] = std::exp(-4.0 * phi[i]);
  return v;
}

VecXcd DephasingTrace::factor_single_conj() const { return factor_single().conjugate(); }

DephasingTrace dephasing_factors(const SpectralDensity& sd, double temperature, double t_max,
                                 int n_t, double rel_tol) {
  if (!(t_max > 0.0)) throw ConfigError("dephasing_factors: t_max must be > 0");
  if (n_t < 2) throw ConfigError("dephasing_factors: need n_t >= 2");
  DephasingTrace tr;
  tr.times.resize(n_t);
  tr.theta.resize(n_t);
  tr.phi.resize(n_t);
  double dt = t_max / (n_t - 1);
  for (int i = 0; i < n_t; ++i) {
    double t = i * dt;
    tr.times[i] = t;
    tr.theta[i] = theta_phase(sd, t, rel_tol);
    tr.phi[i] = phi_decoherence(sd, temperature, t, rel_tol);
  }
  return tr;
}

}  // namespace qj
