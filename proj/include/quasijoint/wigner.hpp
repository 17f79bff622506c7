#pragma once

#include "quasijoint/fock.hpp"
#include "quasijoint/grid.hpp"

namespace qj {

// normalized harmonic-oscillator eigenfunctions; row n holds ψ_n over xs
MatXd hermite_functions(const VecXd& xs, int count);

// phase-space quasi-distribution on the (x, p) grid, vacuum peak 1/π,
// evaluated through the displaced-parity expansion of the number basis;
// *imag_residue (if given) receives the largest imaginary remainder, which
// is nonzero only for a non-Hermitian input
JointGrid wigner_from_density(const FockDensity& d, const Grid1d& gx, const Grid1d& gp,
                              double* imag_residue = nullptr);

// probability density of the rotated quadrature x_φ = x cos φ + p sin φ
Marginal quadrature_density(const FockDensity& d, double phase, Axis axis, const Grid1d& out);

// the three marginals (x, p, and the diagonal u = (x+p)/√2); each is
// checked to be nonnegative and normalized on the output window; the
// diagonal density concentrates at (⟨x⟩+⟨p⟩)/√2, so it may need a wider
// window than the axis marginals to hold its mass
MarginalTriple wigner_marginals(const FockDensity& d, const Grid1d& out);
MarginalTriple wigner_marginals(const FockDensity& d, const Grid1d& axis_out,
                                const Grid1d& oblique_out);

}  // namespace qj
