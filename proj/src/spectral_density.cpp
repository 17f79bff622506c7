#include "quasijoint/spectral_density.hpp"

#include <cmath>

namespace qj {

SpectralDensity SpectralDensity::super_ohmic(double eta, double s, double omega_c) {
  if (!(eta > 0.0)) throw ConfigError("super_ohmic: eta must be > 0");
  if (!(s > 1.0)) throw ConfigError("super_ohmic: exponent s must be > 1");
  if (!(omega_c > 0.0)) throw ConfigError("super_ohmic: omega_c must be > 0");
  SpectralDensity sd;
  sd.kind = BathKind::super_ohmic;
  sd.eta = eta;
  sd.s = s;
  sd.omega_c = omega_c;
  return sd;
}

SpectralDensity SpectralDensity::drude_lorentz(double eta, double gamma) {
  if (!(eta > 0.0)) throw ConfigError("drude_lorentz: eta must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("drude_lorentz: gamma must be > 0");
  SpectralDensity sd;
  sd.kind = BathKind::drude_lorentz;
  sd.eta = eta;
  sd.gamma = gamma;
  return sd;
}

double SpectralDensity::operator()(double omega) const {
  if (omega < 0.0) throw ConfigError("spectral density defined for omega >= 0");
  if (omega == 0.0) return 0.0;
  if (kind == BathKind::super_ohmic)
    return eta * std::pow(omega, s) * std::pow(omega_c, 1.0 - s) * std::exp(-omega / omega_c);
  const double pi = 3.14159265358979323846;
  return (2.0 * eta * gamma / pi) * omega / (omega * omega + gamma * gamma);
}

double SpectralDensity::over_omega(double omega) const {
  if (omega < 0.0) throw ConfigError("spectral density defined for omega >= 0");
  if (kind == BathKind::super_ohmic) {
    if (omega == 0.0) return 0.0;  // s > 1
    return eta * std::pow(omega, s - 1.0) * std::pow(omega_c, 1.0 - s) * std::exp(-omega / omega_c);
  }
  const double pi = 3.14159265358979323846;
  return (2.0 * eta * gamma / pi) / (omega * omega + gamma * gamma);
}

std::vector<double> SpectralDensity::scales() const {
  if (kind == BathKind::super_ohmic) return {omega_c, s * omega_c, (s + 8.0) * omega_c};
  return {gamma, 4.0 * gamma, 16.0 * gamma};
}

std::string SpectralDensity::name() const {
  return kind == BathKind::super_ohmic ? "super_ohmic" : "drude_lorentz";
}

}  // namespace qj
