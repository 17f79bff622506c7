#include "quasijoint/grid.hpp"

#include <algorithm>
#include <cmath>

namespace qj {

double trapezoid(const VecXd& values, double dx) {
  if (values.size() < 2) return 0.0;
  double s = values.sum() - 0.5 * (values[0] + values[values.size() - 1]);
  return s * dx;
}

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::x1: return "x1";
    case Axis::x13: return "x13";
    case Axis::u: return "u";
  }
  return "?";
}

double JointGrid::integral() const {
  VecXd row_int(gx.n);
  for (int i = 0; i < gx.n; ++i) row_int[i] = trapezoid(values.row(i).transpose(), gy.step());
  return trapezoid(row_int, gx.step());
}

double JointGrid::sample(double x, double y) const {
  double fx = (x - gx.lo) / gx.step();
  double fy = (y - gy.lo) / gy.step();
  if (fx < 0.0 || fy < 0.0 || fx > gx.n - 1 || fy > gy.n - 1) return 0.0;
  int ix = std::min(static_cast<int>(fx), gx.n - 2);
  int iy = std::min(static_cast<int>(fy), gy.n - 2);
  double ax = fx - ix;
  double ay = fy - iy;
  return values(ix, iy) * (1 - ax) * (1 - ay) + values(ix + 1, iy) * ax * (1 - ay) +
         values(ix, iy + 1) * (1 - ax) * ay + values(ix + 1, iy + 1) * ax * ay;
}

JointGrid make_joint_grid(const Grid1d& gx, const Grid1d& gy) {
  gx.validate();
  gy.validate();
  JointGrid j;
  j.gx = gx;
  j.gy = gy;
  j.values = MatXd::Zero(gx.n, gy.n);
  return j;
}

Marginal joint_axis_marginal(const JointGrid& j, Axis axis) {
  Marginal m;
  m.axis = axis;
  if (axis == Axis::x1) {
    m.grid = j.gx;
    m.values.resize(j.gx.n);
    for (int i = 0; i < j.gx.n; ++i) m.values[i] = trapezoid(j.values.row(i).transpose(), j.gy.step());
  } else if (axis == Axis::x13) {
    m.grid = j.gy;
    m.values.resize(j.gy.n);
    for (int k = 0; k < j.gy.n; ++k) m.values[k] = trapezoid(j.values.col(k), j.gx.step());
  } else {
    throw ConfigError("joint_axis_marginal: oblique axis needs joint_oblique_marginal");
  }
  return m;
}

Marginal joint_oblique_marginal(const JointGrid& j, const Grid1d& out) {
  out.validate();
  const double r2 = std::sqrt(2.0);
  Marginal m;
  m.axis = Axis::u;
  m.grid = out;
  m.values = VecXd::Zero(out.n);
  double dv = std::min(j.gx.step(), j.gy.step());
  for (int k = 0; k < out.n; ++k) {
    double u = out.point(k);
    double vlo = std::max(u - r2 * j.gx.hi, r2 * j.gy.lo - u);
    double vhi = std::min(u - r2 * j.gx.lo, r2 * j.gy.hi - u);
    if (vhi <= vlo) continue;
    int nv = std::max(2, static_cast<int>(std::ceil((vhi - vlo) / dv)) + 1);
    double step = (vhi - vlo) / (nv - 1);
    double acc = 0.0;
    for (int q = 0; q < nv; ++q) {
      double v = vlo + q * step;
      double x = (u - v) / r2;
      double y = (u + v) / r2;
      double w = (q == 0 || q == nv - 1) ? 0.5 : 1.0;
      acc += w * j.sample(x, y);
    }
    m.values[k] = acc * step;
  }
  return m;
}

namespace {

double catmull_rom(double pm1, double p0, double p1, double p2, double a) {
  return p0 + 0.5 * a * (p1 - pm1 + a * (2 * pm1 - 5 * p0 + 4 * p1 - p2 + a * (3 * (p0 - p1) + p2 - pm1)));
}

}  // namespace

VecXd resample_to_grid(const Marginal& m, const Grid1d& out) {
  out.validate();
  const Grid1d& g = m.grid;
  VecXd r = VecXd::Zero(out.n);
  for (int k = 0; k < out.n; ++k) {
    double f = (out.point(k) - g.lo) / g.step();
    if (f < 0.0 || f > g.n - 1) continue;
    int i = std::min(static_cast<int>(f), g.n - 2);
    double a = f - i;
    double pm1 = m.values[std::max(i - 1, 0)];
    double p0 = m.values[i];
    double p1 = m.values[i + 1];
    double p2 = m.values[std::min(i + 2, g.n - 1)];
    r[k] = catmull_rom(pm1, p0, p1, p2, a);
  }
  return r;
}

}  // namespace qj
