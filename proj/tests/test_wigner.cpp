#include <cmath>
#include <complex>

#include <doctest.h>
#include <utility>
#include <vector>

#include "quasijoint/errors.hpp"
#include "quasijoint/fock.hpp"
#include "quasijoint/wigner.hpp"

using namespace qj;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvPi = 0.318309886183790672;  // 1/π

// independent cross-check through the position representation:
// (1/π) ∫ ⟨x+y|ρ|x−y⟩ e^{−2ipy} dy by composite Simpson
double wigner_by_quadrature(const FockDensity& d, double x, double p) {
  const int ny = 8001;
  const double half = 8.0;
  const double h = 2.0 * half / (ny - 1);
  VecXd xplus(ny), xminus(ny);
  for (int k = 0; k < ny; ++k) {
    const double y = -half + k * h;
    xplus[k] = x + y;
    xminus[k] = x - y;
  }
  const MatXd psip = hermite_functions(xplus, d.dim);
  const MatXd psim = hermite_functions(xminus, d.dim);
  const MatXcd a = d.rho * psim.cast<cplx>();
  cplx acc{0.0, 0.0};
  for (int k = 0; k < ny; ++k) {
    const double y = -half + k * h;
    cplx kernel{0.0, 0.0};
    for (int m = 0; m < d.dim; ++m) kernel += psip(m, k) * a(m, k);
    const double w = (k == 0 || k == ny - 1) ? 1.0 : ((k & 1) ? 4.0 : 2.0);
    acc += w * kernel * std::exp(cplx(0.0, -2.0 * p * y));
  }
  acc *= h / 3.0 / kPi;
  REQUIRE(std::abs(acc.imag()) < 1e-9);
  return acc.real();
}

double engine_at_point(const FockDensity& d, double x, double p) {
  JointGrid w = wigner_from_density(d, Grid1d{x, x + 0.05, 2}, Grid1d{p, p + 0.05, 2});
  return w.values(0, 0);
}

int argmax(const VecXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

TEST_CASE("oscillator eigenfunctions are orthonormal") {
  // the window must clear the classical turning point sqrt(2*39+1) by a wide
  // margin or tail truncation dominates the Gram error
  const int npts = 4801, count = 40;
  Grid1d g{-12.0, 12.0, npts};
  MatXd psi = hermite_functions(g.points(), count);
  MatXd gram = psi * psi.transpose() * g.step();
  double worst = (gram - MatXd::Identity(count, count)).cwiseAbs().maxCoeff();
  CHECK(worst < 1e-9);
}

TEST_CASE("vacuum distribution matches its Gaussian closed form") {
  FockDensity d = fock_density(NoisyStateParams{}, 60);

  Grid1d fine{-6.0, 6.0, 257};
  double residue = -1.0;
  JointGrid w = wigner_from_density(d, fine, fine, &residue);
  CHECK(w.values(128, 128) == doctest::Approx(kInvPi).epsilon(1e-12));
  CHECK(w.values.maxCoeff() == w.values(128, 128));
  CHECK(residue <= 1e-15);

  Grid1d coarse{-6.0, 6.0, 65};
  JointGrid wc = wigner_from_density(d, coarse, coarse);
  double sup = 0.0;
  for (int i = 0; i < coarse.n; ++i)
    for (int j = 0; j < coarse.n; ++j) {
      const double x = coarse.point(i), p = coarse.point(j);
      sup = std::max(sup, std::abs(wc.values(i, j) - kInvPi * std::exp(-x * x - p * p)));
    }
  CHECK(sup < 1e-10);

  Grid1d out{-6.0, 6.0, 721};
  MarginalTriple t = wigner_marginals(d, out);
  for (const Marginal* m : {&t.m1, &t.m13, &t.mu}) {
    double worst = 0.0;
    for (int k = 0; k < out.n; ++k) {
      const double x = out.point(k);
      worst = std::max(worst, std::abs(m->values[k] - std::exp(-x * x) / std::sqrt(kPi)));
    }
    CHECK(worst < 1e-10);
    CHECK(m->integral() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("coherent state gives a displaced Gaussian with rotation-tracking marginals") {
  NoisyStateParams p;
  p.alpha = cplx(1.2, -0.5);
  FockDensity d = fock_density(p, default_n_cut(p));

  const double cx = std::sqrt(2.0) * 1.2, cp = -std::sqrt(2.0) * 0.5;
  Grid1d g{-6.0, 6.0, 65};
  JointGrid w = wigner_from_density(d, g, g);
  double sup = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double dx = g.point(i) - cx, dp = g.point(j) - cp;
      sup = std::max(sup, std::abs(w.values(i, j) - kInvPi * std::exp(-dx * dx - dp * dp)));
    }
  CHECK(sup < 1e-9);

  Grid1d out{-6.0, 6.0, 721};
  MarginalTriple t = wigner_marginals(d, out);
  CHECK(std::abs(out.point(argmax(t.m1.values)) - cx) <= out.step());
  CHECK(std::abs(out.point(argmax(t.m13.values)) - cp) <= out.step());
  CHECK(std::abs(out.point(argmax(t.mu.values)) - (cx + cp) / std::sqrt(2.0)) <= out.step());
}

TEST_CASE("thermal attenuation broadens the Gaussian per the closed form") {
  NoisyStateParams p;
  p.alpha = cplx(1.2, -0.5);
  p.mu = 0.8;
  p.nbar = 1.0;
  FockDensity d = fock_density(p, default_n_cut(p));

  const double s2 = 1.0 + 2.0 * p.nu();  // width of the smeared Gaussian
  const double cx = std::sqrt(2.0) * p.mu * 1.2, cp = -std::sqrt(2.0) * p.mu * 0.5;
  Grid1d g{-6.0, 6.0, 65};
  JointGrid w = wigner_from_density(d, g, g);
  double sup = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double dx = g.point(i) - cx, dp = g.point(j) - cp;
      const double ref = std::exp(-(dx * dx + dp * dp) / s2) / (kPi * s2);
      sup = std::max(sup, std::abs(w.values(i, j) - ref));
    }
  CHECK(sup < 1e-9);
}

TEST_CASE("cat-state interference matches the fringe closed form") {
  for (double theta : {0.0, kPi / 3.0}) {
    NoisyStateParams p;
    p.kind = StateKind::cat;
    p.alpha = cplx(2.0, 0.0);
    p.theta_rel = theta;
    FockDensity d = fock_density(p, default_n_cut(p));

    const double a = 2.0;
    const double n2 = 2.0 + 2.0 * std::cos(theta) * std::exp(-2.0 * a * a);
    Grid1d g{-6.0, 6.0, 129};
    JointGrid w = wigner_from_density(d, g, g);
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        const double x = g.point(i), pp = g.point(j);
        const double lobes = std::exp(-(x - std::sqrt(2.0) * a) * (x - std::sqrt(2.0) * a) - pp * pp) +
                             std::exp(-(x + std::sqrt(2.0) * a) * (x + std::sqrt(2.0) * a) - pp * pp);
        const double fringe =
            2.0 * std::exp(-x * x - pp * pp) * std::cos(2.0 * std::sqrt(2.0) * a * pp + theta);
        sup = std::max(sup, std::abs(w.values(i, j) - (lobes + fringe) / (n2 * kPi)));
      }
    CHECK(sup < 1e-9);
    CHECK(w.values.minCoeff() >= -kInvPi - 1e-9);  // parity bound on the magnitude
    if (theta == 0.0) CHECK(w.values.minCoeff() < -0.2);
  }
}

TEST_CASE("independent position-representation quadrature agrees") {
  NoisyStateParams p;
  p.kind = StateKind::cat;
  p.alpha = cplx(1.5, 0.0);
  p.theta_rel = kPi / 3.0;
  p.mu = 0.8;
  p.nbar = 0.7;
  FockDensity d = fock_density(p, default_n_cut(p));

  const double pts[5][2] = {{0.0, 0.0}, {0.7, -0.4}, {-1.2, 0.9}, {2.0, 0.3}, {0.3, 1.8}};
  for (const auto& q : pts) {
    const double engine = engine_at_point(d, q[0], q[1]);
    const double direct = wigner_by_quadrature(d, q[0], q[1]);
    CHECK(std::abs(engine - direct) < 1e-6);
  }
}

TEST_CASE("joint-grid marginals agree with directly computed densities") {
  NoisyStateParams coh;
  coh.alpha = cplx(1.2, -0.5);
  coh.mu = 0.8;
  coh.nbar = 1.0;
  NoisyStateParams cat;
  cat.kind = StateKind::cat;
  cat.alpha = cplx(1.5, 0.0);
  cat.theta_rel = kPi / 3.0;
  cat.mu = 0.8;
  cat.nbar = 0.7;

  Grid1d g{-6.0, 6.0, 256};
  Grid1d out{-6.0, 6.0, 721};
  for (const NoisyStateParams& p : {coh, cat}) {
    FockDensity d = fock_density(p, default_n_cut(p));
    JointGrid w = wigner_from_density(d, g, g);
    MarginalTriple t = wigner_marginals(d, out);

    VecXd mx = resample_to_grid(joint_axis_marginal(w, Axis::x1), out);
    VecXd mp = resample_to_grid(joint_axis_marginal(w, Axis::x13), out);
    VecXd mu = joint_oblique_marginal(w, out).values;
    CHECK((mx - t.m1.values).cwiseAbs().sum() / out.n < 1e-3);
    CHECK((mp - t.m13.values).cwiseAbs().sum() / out.n < 1e-3);
    CHECK((mu - t.mu.values).cwiseAbs().sum() / out.n < 1e-3);
  }
}

TEST_CASE("bath occupation monotonically fills the interference dip") {
  Grid1d g{-6.0, 6.0, 129};
  auto scan = [&g](double mu) {
    std::vector<std::pair<double, double>> out;  // (min W, negative mass)
    for (double nbar : {0.0, 1.0, 2.0}) {
      NoisyStateParams p;
      p.kind = StateKind::cat;
      p.alpha = cplx(2.0, 0.0);
      p.mu = mu;
      p.nbar = nbar;
      FockDensity d = fock_density(p, default_n_cut(p));
      JointGrid w = wigner_from_density(d, g, g);
      out.emplace_back(w.values.minCoeff(), w.values.cwiseMin(0.0).sum() * w.cell_measure());
    }
    return out;
  };

  // mild attenuation: negativity survives every step and shrinks strictly
  auto mild = scan(0.95);
  CHECK(mild[0].first < -0.1);
  for (int k : {1, 2}) {
    CHECK(mild[k].first < 0.0);
    CHECK(mild[k].first > mild[k - 1].first);
    CHECK(mild[k].second > mild[k - 1].second);
  }

  // strong attenuation: negativity collapses to exactly zero and stays there
  auto strong = scan(0.8);
  CHECK(strong[0].first < -0.005);
  CHECK(strong[0].second < -1e-3);
  CHECK(strong[1].second == 0.0);
  CHECK(strong[2].second == 0.0);
  CHECK(strong[1].first >= 0.0);
}

TEST_CASE("non-Hermitian input is rejected") {
  FockDensity bad;
  bad.dim = 2;
  bad.rho = MatXcd::Zero(2, 2);
  bad.rho(0, 0) = 0.5;
  bad.rho(1, 1) = 0.5;
  bad.rho(0, 1) = cplx(0.0, 0.3);
  bad.rho(1, 0) = cplx(0.0, 0.3);  // Hermitian would need the conjugate here
  Grid1d g{-2.0, 2.0, 5};
  CHECK_THROWS_AS(wigner_from_density(bad, g, g), HermiticityError);
}
