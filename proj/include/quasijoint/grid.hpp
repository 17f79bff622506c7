#pragma once

#include <Eigen/Dense>

#include <string>

#include "quasijoint/errors.hpp"

namespace qj {

using VecXd = Eigen::VectorXd;
using VecXcd = Eigen::VectorXcd;
using MatXd = Eigen::MatrixXd;
using MatXcd = Eigen::MatrixXcd;
using cplx = std::complex<double>;

// uniform closed-interval abscissa set
struct Grid1d {
  double lo = -3.0;
  double hi = 3.0;
  int n = 721;

  double step() const { return (hi - lo) / (n - 1); }
  double point(int i) const { return lo + i * step(); }
  VecXd points() const {
    VecXd p(n);
    for (int i = 0; i < n; ++i) p[i] = point(i);
    return p;
  }
  void validate() const {
    if (n < 2 || !(hi > lo)) throw ConfigError("Grid1d: need n >= 2 and hi > lo");
  }
  bool operator==(const Grid1d&) const = default;
};

double trapezoid(const VecXd& values, double dx);

// marginal axis slot: first quadrature, second quadrature, oblique (x+y)/sqrt(2)
enum class Axis { x1, x13, u };

std::string axis_name(Axis a);

// signed 1-D density sampled on a uniform grid
struct Marginal {
  Axis axis = Axis::x1;
  Grid1d grid;
  VecXd values;

  double integral() const { return trapezoid(values, grid.step()); }
};

struct MarginalTriple {
  Marginal m1;   // first axis
  Marginal m13;  // second axis
  Marginal mu;   // oblique axis
};

// dense bivariate field; values(i, j) = z(gx.point(i), gy.point(j))
struct JointGrid {
  Grid1d gx;
  Grid1d gy;
  MatXd values;

  double cell_measure() const { return gx.step() * gy.step(); }
  double integral() const;
  // bilinear interpolation, zero outside the window
  double sample(double x, double y) const;
};

JointGrid make_joint_grid(const Grid1d& gx, const Grid1d& gy);

// integrate out one axis on the native grid
Marginal joint_axis_marginal(const JointGrid& j, Axis axis);

// distribution of (x + y)/sqrt(2), integrated along the perpendicular
// direction with bilinear resampling onto the requested output grid
Marginal joint_oblique_marginal(const JointGrid& j, const Grid1d& out);

// cubic resampling of a marginal onto another grid (zero outside support)
VecXd resample_to_grid(const Marginal& m, const Grid1d& out);

}  // namespace qj
