#include "quasijoint/wigner.hpp"

#include <boost/math/special_functions/laguerre.hpp>

#include <cmath>
#include <complex>

#include "quasijoint/errors.hpp"
#include "quasijoint/io.hpp"

namespace qj {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// S(m, d) = sqrt(m! / (m+d)!), the normalization of the displacement
// matrix element between number states m and m+d
MatXd ladder_norms(int dim) {
  MatXd s(dim, dim);
  for (int m = 0; m < dim; ++m) {
    s(m, 0) = 1.0;
    for (int d = 1; d < dim; ++d) s(m, d) = s(m, d - 1) / std::sqrt(double(m + d));
  }
  return s;
}

}  // namespace

MatXd hermite_functions(const VecXd& xs, int count) {
  if (count < 1) throw ConfigError("hermite_functions needs count >= 1");
  const int n = int(xs.size());
  MatXd psi(count, n);
  const double root4pi = std::pow(kPi, -0.25);
  for (int k = 0; k < n; ++k) {
    const double x = xs[k];
    psi(0, k) = root4pi * std::exp(-0.5 * x * x);
    if (count > 1) psi(1, k) = std::sqrt(2.0) * x * psi(0, k);
    for (int m = 2; m < count; ++m)
      psi(m, k) = std::sqrt(2.0 / m) * x * psi(m - 1, k) -
                  std::sqrt((m - 1.0) / m) * psi(m - 2, k);
  }
  return psi;
}

JointGrid wigner_from_density(const FockDensity& d, const Grid1d& gx, const Grid1d& gp,
                              double* imag_residue) {
  gx.validate();
  gp.validate();
  if (d.dim < 1 || d.rho.rows() != d.dim || d.rho.cols() != d.dim)
    throw ConfigError("wigner_from_density: density matrix shape does not match dim");
  const int dim = d.dim;
  const MatXd s = ladder_norms(dim);
  JointGrid w = make_joint_grid(gx, gp);
  double worst_im = 0.0;

  for (int i = 0; i < gx.n; ++i) {
    const double x = gx.point(i);
    for (int j = 0; j < gp.n; ++j) {
      const double p = gp.point(j);
      // displacement argument of the parity kernel: twice the phase-space point
      const std::complex<double> gamma{std::sqrt(2.0) * x, std::sqrt(2.0) * p};
      const double z = std::norm(gamma);
      std::complex<double> acc{0.0, 0.0};

      {  // main diagonal: plain Laguerre polynomials
        double lm1 = 0.0, l = 1.0;
        for (int m = 0; m < dim; ++m) {
          const double sgn = (m & 1) ? -1.0 : 1.0;
          acc += d.rho(m, m) * (sgn * l);
          const double lp1 = boost::math::laguerre_next(m, 0, z, l, lm1);
          lm1 = l;
          l = lp1;
        }
      }
      std::complex<double> gpow{1.0, 0.0};   // γ^d
      std::complex<double> gcpow{1.0, 0.0};  // (−γ*)^d
      for (int dd = 1; dd < dim; ++dd) {
        gpow *= gamma;
        gcpow *= -std::conj(gamma);
        double lm1 = 0.0, l = 1.0;  // associated Laguerre L_m^{(dd)}(z)
        for (int m = 0; m + dd < dim; ++m) {
          const double c = s(m, dd) * l;
          const double sgn_m = (m & 1) ? -1.0 : 1.0;
          const double sgn_md = ((m + dd) & 1) ? -1.0 : 1.0;
          acc += c * (d.rho(m, m + dd) * (sgn_m * gpow) +
                      d.rho(m + dd, m) * (sgn_md * gcpow));
          const double lp1 = boost::math::laguerre_next(m, dd, z, l, lm1);
          lm1 = l;
          l = lp1;
        }
      }
      const double envelope = std::exp(-0.5 * z) / kPi;
      w.values(i, j) = envelope * acc.real();
      worst_im = std::max(worst_im, std::abs(envelope * acc.imag()));
    }
  }
  if (imag_residue) *imag_residue = worst_im;
  if (worst_im > 1e-9)
    throw HermiticityError("phase-space distribution has imaginary residue " +
                           format_double(worst_im) + "; density matrix is not Hermitian");
  return w;
}

Marginal quadrature_density(const FockDensity& d, double phase, Axis axis, const Grid1d& out) {
  out.validate();
  if (d.dim < 1 || d.rho.rows() != d.dim || d.rho.cols() != d.dim)
    throw ConfigError("quadrature_density: density matrix shape does not match dim");
  const int dim = d.dim;
  // rotate the state by e^{-i φ n̂}; the x-density of the rotated state is the
  // density of the quadrature x cos φ + p sin φ of the original one
  MatXd b(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const double ang = -phase * double(m - n);
      b(m, n) = std::cos(ang) * d.rho(m, n).real() - std::sin(ang) * d.rho(m, n).imag();
    }
  const MatXd psi = hermite_functions(out.points(), dim);
  const MatXd c = b * psi;
  Marginal marg;
  marg.axis = axis;
  marg.grid = out;
  marg.values = (psi.cwiseProduct(c)).colwise().sum().transpose();

  const double dip = marg.values.minCoeff();
  if (dip < -1e-9)
    throw NormalizationError("quadrature density dips to " + format_double(dip) +
                             "; rotation or state is inconsistent");
  const double norm = marg.integral();
  if (std::abs(norm - 1.0) > 1e-3)
    throw NormalizationError("quadrature density integrates to " + format_double(norm) +
                             " on the output window; widen the window or raise the cutoff");
  return marg;
}

MarginalTriple wigner_marginals(const FockDensity& d, const Grid1d& out) {
  return wigner_marginals(d, out, out);
}

MarginalTriple wigner_marginals(const FockDensity& d, const Grid1d& axis_out,
                                const Grid1d& oblique_out) {
  MarginalTriple t;
  t.m1 = quadrature_density(d, 0.0, Axis::x1, axis_out);
  t.m13 = quadrature_density(d, kPi / 2.0, Axis::x13, axis_out);
  t.mu = quadrature_density(d, kPi / 4.0, Axis::u, oblique_out);
  return t;
}

}  // namespace qj
