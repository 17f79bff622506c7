#include "quasijoint/char_inversion.hpp"

#include <cmath>
#include <vector>

#include "quasijoint/io.hpp"

namespace qj {

namespace {

const double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

struct PlateauFit {
  bool ok = false;
  double w = 0.0;
  double slope = 0.0;
  double intercept = 0.0;  // wrapped to (−π, π]
  double intercept_raw = 0.0;
};

PlateauFit fit_plateau(const VecXcd& phi, double dt, int j0, const InversionConfig& cfg) {
  PlateauFit fit;
  int n = static_cast<int>(phi.size());
  int m = n - j0;
  if (m < 8) return fit;

  double w = 0.0;
  for (int j = j0; j < n; ++j) w += std::abs(phi[j]);
  w /= m;
  if (w < 1e-12) return fit;
  for (int j = j0; j < n; ++j)
    if (std::abs(std::abs(phi[j]) - w) > cfg.fit_amp_rel_tol * w) return fit;

  // sequentially unwrapped phases and a linear least-squares fit
  std::vector<double> ts(m), ps(m);
  double prev = std::arg(phi[j0]);
  ps[0] = prev;
  ts[0] = j0 * dt;
  for (int k = 1; k < m; ++k) {
    double raw = std::arg(phi[j0 + k]);
    prev += wrap_angle(raw - prev);
    ps[k] = prev;
    ts[k] = (j0 + k) * dt;
  }
  double st = 0, sp = 0, stt = 0, stp = 0;
  for (int k = 0; k < m; ++k) {
    st += ts[k];
    sp += ps[k];
    stt += ts[k] * ts[k];
    stp += ts[k] * ps[k];
  }
  double det = m * stt - st * st;
  if (det == 0.0) return fit;
  double slope = (m * stp - st * sp) / det;
  double intercept_raw = (sp * stt - st * stp) / det;
  for (int k = 0; k < m; ++k)
    if (std::abs(ps[k] - slope * ts[k] - intercept_raw) > cfg.fit_phase_resid) return fit;

  fit.ok = true;
  fit.w = w;
  fit.slope = slope;
  fit.intercept_raw = intercept_raw;
  fit.intercept = wrap_angle(intercept_raw);
  return fit;
}

// trapezoid Fourier sum over the explicit two-sided extension
void invert_smooth(const VecXcd& phi, double t_max, double a_s, const Grid1d& grid, VecXd& out,
                   double& imag_residue) {
  int n = static_cast<int>(phi.size());
  double dt = t_max / (n - 1);
  std::vector<cplx> ext(2 * n - 1);
  for (int j = 0; j < n; ++j) {
    ext[n - 1 + j] = phi[j];
    ext[n - 1 - j] = std::conj(phi[j]);
  }
  out.resize(grid.n);
  double max_im = 0.0;
  for (int k = 0; k < grid.n; ++k) {
    double x = grid.point(k);
    double step_phase = a_s * x * dt;
    cplx r(std::cos(step_phase), std::sin(step_phase));
    double start = -a_s * x * t_max;
    cplx p(std::cos(start), std::sin(start));
    cplx acc(0.0, 0.0);
    int last = 2 * n - 2;
    for (int j = 0; j <= last; ++j) {
      double w = (j == 0 || j == last) ? 0.5 : 1.0;
      acc += w * ext[j] * p;
      p *= r;
    }
    cplx val = acc * (dt * a_s / (2.0 * kPi));
    out[k] = val.real();
    max_im = std::max(max_im, std::abs(val.imag()));
  }
  imag_residue = max_im;
}

}  // namespace

InvertedMarginal marginal_from_characteristic(const VecXcd& phi, double t_max, double axis_scale,
                                              const Grid1d& grid, Axis axis,
                                              const InversionConfig& cfg) {
  grid.validate();
  if (phi.size() < 16) throw ConfigError("inversion: need at least 16 time samples");
  if (!(t_max > 0.0)) throw ConfigError("inversion: t_max must be > 0");
  if (!(axis_scale > 0.0)) throw ConfigError("inversion: axis_scale must be > 0");
  if (std::abs(phi[0] - cplx(1.0, 0.0)) > cfg.cf0_tol)
    throw ConfigError("inversion: characteristic function must equal 1 at t = 0");

  int n = static_cast<int>(phi.size());
  double dt = t_max / (n - 1);
  int j0 = std::max(0, n - std::max(8, static_cast<int>(cfg.tail_band_frac * n)));

  double tail = 0.0;
  for (int j = j0; j < n; ++j) tail += std::abs(phi[j]);
  tail /= (n - j0);

  InvertedMarginal res;
  res.cf_tail = tail;

  VecXcd smooth = phi;
  if (tail > cfg.delta_attempt_level) {
    PlateauFit fit = fit_plateau(phi, dt, j0, cfg);
    if (!fit.ok) {
      if (tail > cfg.alias_tol)
        throw AliasingError("characteristic function tail at " + format_double(tail) +
                            " with no frozen plateau; increase t_max");
    } else {
      if (std::abs(fit.intercept) > cfg.fit_phase_tol)
        throw InversionError("frozen component has a complex weight (phase intercept " +
                             format_double(fit.intercept) + ")");
      double x0 = -fit.slope / axis_scale;
      double dx = grid.step();
      if (x0 < grid.lo + 2 * dx || x0 > grid.hi - 2 * dx)
        throw InversionError("frozen component at the window edge; widen the grid");
      for (int j = 0; j < n; ++j) {
        double ph = fit.slope * (j * dt) + fit.intercept_raw;
        smooth[j] -= fit.w * cplx(std::cos(ph), std::sin(ph));
      }
      // the model's t = 0 extrapolation error is gated by fit_phase_tol;
      // keep the center sample real so the residue guard watches numerics only
      smooth[0] = cplx(smooth[0].real(), 0.0);
      res.frozen = DeltaComponent{x0, fit.w};
    }
  }

  res.marginal.axis = axis;
  res.marginal.grid = grid;
  invert_smooth(smooth, t_max, axis_scale, grid, res.marginal.values, res.imag_residue);
  res.smooth_values = res.marginal.values;

  double ref = std::max(1.0, res.marginal.values.cwiseAbs().maxCoeff());
  if (res.imag_residue > cfg.imag_tol * ref)
    throw InversionError("imaginary residue of the inversion integral exceeds tolerance");

  if (res.frozen) {
    double dx = grid.step();
    double f = (res.frozen->x0 - grid.lo) / dx;
    int i = static_cast<int>(f);
    double frac = f - i;
    res.marginal.values[i] += res.frozen->weight * (1.0 - frac) / dx;
    res.marginal.values[i + 1] += res.frozen->weight * frac / dx;
  }
  return res;
}

VecXcd forward_characteristic(const Marginal& m, const std::optional<DeltaComponent>& frozen,
                              const VecXd& times, double axis_scale) {
  VecXcd out(times.size());
  double dx = m.grid.step();
  for (Eigen::Index q = 0; q < times.size(); ++q) {
    double t = times[q];
    cplx acc(0.0, 0.0);
    for (int i = 0; i < m.grid.n; ++i) {
      double w = (i == 0 || i == m.grid.n - 1) ? 0.5 : 1.0;
      double ph = -axis_scale * m.grid.point(i) * t;
      acc += w * m.values[i] * cplx(std::cos(ph), std::sin(ph));
    }
    acc *= dx;
    if (frozen) {
      double ph = -axis_scale * frozen->x0 * t;
      acc += frozen->weight * cplx(std::cos(ph), std::sin(ph));
    }
    out[q] = acc;
  }
  return out;
}

}  // namespace qj
