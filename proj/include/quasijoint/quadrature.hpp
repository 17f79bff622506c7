#pragma once

#include <functional>
#include <vector>

namespace qj {

using Integrand = std::function<double(double)>;

// adaptive Gauss-Kronrod integral over one finite panel
double integrate_panel(const Integrand& f, double a, double b, double rel_tol = 1e-10);

// finite integral split at the interior breakpoints that fall inside (a, b)
double integrate_segments(const Integrand& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol = 1e-10);

enum class OscKind { plain, cosine, sine };

// ∫_a^∞ g(ω) · {1, cos(ωt), sin(ωt)} dω for a smooth, decaying, integrable
// envelope g. Oscillatory kinds sum half-period panels between consecutive
// zeros of the trigonometric factor and accelerate the alternating series.
// `breaks` lists the envelope's own scale points (knees) for panel splitting.
double semi_infinite(const Integrand& g, double a, OscKind kind, double t,
                     double rel_tol = 1e-10, const std::vector<double>& breaks = {});

}  // namespace qj
