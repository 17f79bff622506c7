#include <cmath>

#include <doctest.h>

#include "quasijoint/fock.hpp"

using namespace qj;

TEST_CASE("coherent amplitudes are normalized with the right photon number") {
  cplx alpha(1.3, -0.6);
  VecXcd c = coherent_amplitudes(alpha, 60);
  CHECK(c.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  double n = 0.0;
  for (int k = 0; k < 60; ++k) n += k * std::norm(c[k]);
  CHECK(n == doctest::Approx(std::norm(alpha)).epsilon(1e-10));
}

TEST_CASE("cat amplitudes carry the superposition norm") {
  cplx alpha(2.0, 0.0);
  VecXcd c = cat_amplitudes(alpha, 0.0, 60);
  CHECK(c.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  // θ = 0 keeps only even levels
  for (int k = 1; k < 60; k += 2) CHECK(std::abs(c[k]) == 0.0);
  // θ = π keeps only odd levels
  VecXcd codd = cat_amplitudes(alpha, 3.14159265358979323846, 60);
  CHECK(codd.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(codd[0]) <= 1e-15);
}

TEST_CASE("identity channel keeps a pure coherent state pure") {
  NoisyStateParams p{StateKind::coherent, cplx(1.5, 0.5), 0.0, 1.0, 0.0};
  FockDensity d = fock_density(p, 60);
  d.check();
  CHECK(d.purity() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(d.mean_photon() == doctest::Approx(std::norm(p.alpha)).epsilon(1e-9));
}

TEST_CASE("zero displacement with a clean channel is the vacuum projector") {
  NoisyStateParams p{StateKind::coherent, cplx(0.0, 0.0), 0.0, 1.0, 0.0};
  FockDensity d = fock_density(p, 60);
  CHECK(d.rho(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.rho.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noisy coherent state equals a displaced thermal state") {
  // channel moments: displacement μα, added noise ν
  for (cplx alpha : {cplx(1.0, 0.0), cplx(-0.8, 1.1)}) {
    for (double mu : {0.8, 0.6}) {
      for (double nbar : {1.0, 2.0}) {
        CAPTURE(alpha.real());
        CAPTURE(mu);
        CAPTURE(nbar);
        NoisyStateParams p{StateKind::coherent, alpha, 0.0, mu, nbar};
        FockDensity d = fock_density(p, 60);
        d.check();
        MatXcd disp = displacement_operator(mu * alpha, 60);
        MatXcd want = disp * thermal_density(p.nu(), 60) * disp.adjoint();
        CHECK((d.rho - want).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(d.mean_photon() ==
              doctest::Approx(mu * mu * std::norm(alpha) + p.nu()).epsilon(1e-8));
        CHECK(d.purity() == doctest::Approx(1.0 / (1.0 + 2.0 * p.nu())).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("noisy cat state stays a valid density operator") {
  NoisyStateParams p{StateKind::cat, cplx(2.0, 0.0), 0.7, 0.7, 1.5};
  FockDensity d = fock_density(p, 60);
  d.check();
  CHECK(d.purity() < 1.0);
  CHECK(d.tail_mass() <= 1e-6);
}

TEST_CASE("insufficient cutoff is rejected up front") {
  NoisyStateParams p{StateKind::coherent, cplx(2.0, 2.0), 0.0, 0.9, 2.0};
  CHECK(default_n_cut(p) == 60);
  CHECK_THROWS_AS(fock_density(p, 40), TruncationError);
  NoisyStateParams bad{StateKind::coherent, cplx(3.0, 0.0), 0.0, 0.9, 0.0};
  CHECK_THROWS_AS(fock_density(bad, 80), ConfigError);
}

TEST_CASE("loss channel scales photon number by the survival probability") {
  VecXcd c = coherent_amplitudes(cplx(1.2, 0.4), 50);
  MatXcd rho = c * c.adjoint();
  MatXcd lost = loss_channel(rho, 0.37);
  FockDensity d{50, lost};
  CHECK(d.trace_real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.mean_photon() == doctest::Approx(0.37 * std::norm(cplx(1.2, 0.4))).epsilon(1e-9));
}

TEST_CASE("amplification obeys the gain moment law") {
  MatXcd rho = thermal_density(0.5, 70);
  MatXcd amped = amp_channel(rho, 1.6);
  FockDensity d{70, amped};
  CHECK(d.trace_real() == doctest::Approx(1.0).epsilon(1e-8));
  // E' = G E + (G − 1)
  CHECK(d.mean_photon() == doctest::Approx(1.6 * 0.5 + 0.6).epsilon(1e-7));
}
