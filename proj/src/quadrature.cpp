#include "quasijoint/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "quasijoint/errors.hpp"

namespace qj {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Euler transformation of an alternating series, fed term by term
struct EulerSum {
  std::vector<double> wksp;
  double sum = 0.0;

  void add(double term) {
    if (wksp.empty()) {
      wksp.push_back(term);
      sum = 0.5 * term;
      return;
    }
    double tmp = wksp[0];
    wksp[0] = term;
    std::size_t n = wksp.size();
    for (std::size_t j = 1; j < n; ++j) {
      double dum = wksp[j];
      wksp[j] = 0.5 * (wksp[j - 1] + tmp);
      tmp = dum;
    }
    double next = 0.5 * (wksp[n - 1] + tmp);
    if (std::abs(next) <= std::abs(wksp[n - 1])) {
      wksp.push_back(next);
      sum += 0.5 * next;
    } else {
      sum += next;
    }
  }
};

struct PanelEst {
  double value = 0.0;
  double err = 0.0;
  double l1 = 0.0;
};

PanelEst panel_raw(const Integrand& f, double a, double b, double rel_tol) {
  PanelEst r;
  if (!(b > a)) return r;
  r.value = GK::integrate(f, a, b, 15, rel_tol, &r.err, &r.l1);
  return r;
}

bool converged(const PanelEst& r, double rel_tol) {
  return r.err <= 100 * rel_tol * std::max(r.l1, 1e-300) || r.err <= 1e-14 * std::max(r.l1, 1.0);
}

}  // namespace

double integrate_panel(const Integrand& f, double a, double b, double rel_tol) {
  PanelEst r = panel_raw(f, a, b, rel_tol);
  if (!converged(r, rel_tol))
    throw QuadratureError("panel integral did not converge to requested tolerance");
  return r.value;
}

double integrate_segments(const Integrand& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  // convergence is judged on the whole split integral: a sliver between two
  // nearby break points can carry negligible mass yet a poor local error
  // ratio, and must not veto an otherwise converged result
  PanelEst tot;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    PanelEst r = panel_raw(f, pts[i], pts[i + 1], rel_tol);
    tot.value += r.value;
    tot.err += r.err;
    tot.l1 += r.l1;
  }
  if (!converged(tot, rel_tol))
    throw QuadratureError("split integral did not converge to requested tolerance");
  return tot.value;
}

namespace {

// ∫_a^∞ g via the substitution ω = a + x/(1-x) (a == 0) or ω = a/x (a > 0)
double plain_tail(const Integrand& g, double a, double rel_tol) {
  if (a > 0.0) {
    auto mapped = [&](double x) {
      double w = a / x;
      return g(w) * w / x;
    };
    return integrate_panel(mapped, 0.0, 1.0, rel_tol);
  }
  auto mapped = [&](double x) {
    double om = 1.0 - x;
    double w = x / om;
    return g(w) / (om * om);
  };
  return integrate_panel(mapped, 0.0, 1.0, rel_tol);
}

}  // namespace

double semi_infinite(const Integrand& g, double a, OscKind kind, double t, double rel_tol,
                     const std::vector<double>& breaks) {
  if (a < 0.0) throw ConfigError("semi_infinite: lower bound must be >= 0");
  if (kind == OscKind::plain || t == 0.0) {
    if (kind == OscKind::sine) return 0.0;
    // split off the envelope's own scale region before mapping the tail
    double far = a;
    for (double p : breaks) far = std::max(far, p);
    far = std::max(far, 1.0);
    double head = integrate_segments(g, a, 4.0 * far, breaks, rel_tol);
    return head + plain_tail(g, 4.0 * far, rel_tol);
  }
  if (t < 0.0) throw ConfigError("semi_infinite: t must be >= 0");

  const double pi = 3.14159265358979323846;
  auto f = [&](double w) { return g(w) * (kind == OscKind::cosine ? std::cos(w * t) : std::sin(w * t)); };

  // first zero of the trigonometric factor at or beyond a
  double z0;
  if (kind == OscKind::cosine) {
    double k = std::ceil(t * a / pi - 0.5 - 1e-12);
    if (k < 0) k = 0;
    z0 = (0.5 + k) * pi / t;
  } else {
    double k = std::ceil(t * a / pi - 1e-12);
    if (k < 1) k = 1;
    z0 = k * pi / t;
  }

  double head = integrate_segments(f, a, z0, breaks, rel_tol);

  const double half = pi / t;
  EulerSum es;
  double prev_sum = head;
  int stable = 0;
  const int max_terms = 4000;
  for (int j = 0; j < max_terms; ++j) {
    double lo = z0 + j * half;
    double term = integrate_panel(f, lo, lo + half, rel_tol);
    es.add(term);
    double cur = head + es.sum;
    double scale = std::max({std::abs(cur), std::abs(term), 1e-300});
    if (std::abs(cur - prev_sum) <= rel_tol * scale) {
      if (++stable >= 3 && j >= 9) return cur;
    } else {
      stable = 0;
    }
    prev_sum = cur;
  }
  throw QuadratureError("oscillatory tail failed to converge");
}

}  // namespace qj
