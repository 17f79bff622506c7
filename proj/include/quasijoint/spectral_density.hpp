#pragma once

#include <string>
#include <vector>

#include "quasijoint/errors.hpp"

namespace qj {

enum class BathKind { super_ohmic, drude_lorentz };

// bath spectral density J(ω), ω >= 0
struct SpectralDensity {
  BathKind kind = BathKind::super_ohmic;
  double eta = 0.1;      // dimensionless coupling strength
  double s = 2.0;        // super-ohmic exponent, > 1
  double omega_c = 1.0;  // super-ohmic cutoff frequency
  double gamma = 1.0;    // drude-lorentz width

  static SpectralDensity super_ohmic(double eta, double s, double omega_c);
  static SpectralDensity drude_lorentz(double eta, double gamma);

  double operator()(double omega) const;

  // J(ω)/ω, finite at ω = 0 for both families
  double over_omega(double omega) const;

  // characteristic frequency scales, used as quadrature breakpoints
  std::vector<double> scales() const;

  std::string name() const;
};

}  // namespace qj
