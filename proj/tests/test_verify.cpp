#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "quasijoint/errors.hpp"
#include "quasijoint/fock.hpp"
#include "quasijoint/image_out.hpp"
#include "quasijoint/io.hpp"
#include "quasijoint/rng.hpp"
#include "quasijoint/synth.hpp"
#include "quasijoint/verify.hpp"
#include "quasijoint/wigner.hpp"

using namespace qj;

namespace {

Marginal make_marginal(const Grid1d& g, const VecXd& v, Axis a = Axis::x1) {
  Marginal m;
  m.axis = a;
  m.grid = g;
  m.values = v;
  return m;
}

double gauss(double x, double mean, double sigma) {
  const double t = (x - mean) / sigma;
  return std::exp(-0.5 * t * t);
}

}  // namespace

TEST_CASE("image distance follows the element-count normalization") {
  Grid1d g{-1.0, 1.0, 256};
  JointGrid j = make_joint_grid(g, g);
  EncodedImage a = encode_grid(j, ColorMapConfig::wigner());
  CHECK(l2_image(a, a) == 0.0);

  EncodedImage b = a;
  b.r.array() += 1.0;
  b.g.array() += 1.0;
  b.b.array() += 1.0;
  const double expect = 1.0 / std::sqrt(256.0 * 256.0 * 3.0);
  CHECK(l2_image(a, b) == doctest::Approx(0.00225527448902197564).epsilon(1e-14));
  CHECK(l2_image(a, b) == doctest::Approx(expect).epsilon(1e-14));

  // a smaller frame uses its own element count
  Grid1d g64{-1.0, 1.0, 64};
  JointGrid j64 = make_joint_grid(g64, g64);
  EncodedImage c = encode_grid(j64, ColorMapConfig::wigner());
  EncodedImage d = c;
  d.r.array() += 1.0;
  d.g.array() += 1.0;
  d.b.array() += 1.0;
  CHECK(l2_image(c, d) == doctest::Approx(1.0 / std::sqrt(64.0 * 64.0 * 3.0)).epsilon(1e-14));

  CHECK_THROWS_AS(l2_image(a, c), ConfigError);
}

TEST_CASE("marginal distance equals the discrete total variation on a unit shift") {
  Grid1d g{-8.0, 8.0, 721};
  const double h = g.step();
  VecXd base(g.n), shifted(g.n);
  for (int k = 0; k < g.n; ++k) {
    base[k] = gauss(g.point(k), 0.0, 1.0);
    shifted[k] = gauss(g.point(k) - h, 0.0, 1.0);
  }
  Marginal gt = make_marginal(g, base);
  Marginal pred = make_marginal(g, shifted);
  CHECK(l1_marginal(gt, gt) == 0.0);

  double tv = std::abs(base[0] - gauss(g.point(0) - h, 0.0, 1.0));
  for (int k = 1; k < g.n; ++k) tv += std::abs(base[k] - base[k - 1]);
  CHECK(l1_marginal(gt, pred) == doctest::Approx(tv / g.n).epsilon(1e-13));

  Grid1d other{-8.0, 8.0, 720};
  CHECK_THROWS_AS(l1_marginal(gt, make_marginal(other, VecXd::Zero(720))), ConfigError);
}

TEST_CASE("marginal distance obeys the triangle inequality") {
  Grid1d g{-3.0, 3.0, 101};
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    VecXd a(g.n), b(g.n), c(g.n);
    for (int k = 0; k < g.n; ++k) {
      a[k] = rng.uniform(-1.0, 1.0);
      b[k] = rng.uniform(-1.0, 1.0);
      c[k] = rng.uniform(-1.0, 1.0);
    }
    Marginal ma = make_marginal(g, a), mb = make_marginal(g, b), mc = make_marginal(g, c);
    CHECK(l1_marginal(ma, mc) <= l1_marginal(ma, mb) + l1_marginal(mb, mc) + 1e-14);
  }
}

TEST_CASE("negativity volume integrates the negative region only") {
  Grid1d g{-24.0, 24.0, 256};
  JointGrid pos = make_joint_grid(g, g);
  pos.values.setConstant(0.01);
  CHECK(negativity_volume(pos) == 0.0);

  // well far from the positive mass: the negative volume is the well mass
  SyntheticSample s;
  s.p = GaussianComponent{-10.0, -10.0, 1.0, 1.0, 0.0};
  s.p_prime = s.p;
  s.p_dprime = GaussianComponent{10.0, 10.0, 0.8, 0.8, 0.0};
  s.amplitude = 0.3;
  JointGrid j = eval_joint(s, g, g);
  CHECK(negativity_volume(j) == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("negativity volume decreases when a cat state heats up") {
  Grid1d g{-6.0, 6.0, 129};
  double last = 1e9;
  for (double nbar : {0.0, 2.0}) {
    NoisyStateParams p;
    p.kind = StateKind::cat;
    p.alpha = cplx(2.0, 0.0);
    p.mu = 0.95;
    p.nbar = nbar;
    JointGrid w = wigner_from_density(fock_density(p, default_n_cut(p)), g, g);
    const double neg = negativity_volume(w);
    CHECK(neg > 0.0);
    CHECK(neg < last);
    last = neg;
  }
}

TEST_CASE("ground-truth-deficient protocol round-trips an exact encoding") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  Grid1d jg{cfg.window.lo, cfg.window.hi, 256};
  VerifyConfig vc{jg, jg, ColorMapConfig::cher()};
  for (int i = 0; i < 5; ++i) {
    SyntheticSample s = sample_params(31, i, cfg);
    JointGrid j = eval_joint(s, jg, jg);
    MarginalTriple gt = analytic_marginals(s, cfg.window);
    EncodedImage img = encode_grid(j, ColorMapConfig::cher());

    MetricReport rep = gt_deficient_verify(img, gt, vc);
    CHECK(!rep.has_l2);
    CHECK(rep.out_of_gamut_fraction == 0.0);
    CHECK(!rep.axes_swapped);
    CHECK(rep.l1_m1 <= 2e-3 * gt.m1.values.maxCoeff());
    CHECK(rep.l1_m13 <= 2e-3 * gt.m13.values.maxCoeff());
    CHECK(rep.l1_mu <= 2e-3 * gt.mu.values.maxCoeff());
    CHECK(rep.negativity_volume >= 0.0);

    MetricReport full = full_verify(img, img, gt, vc);
    CHECK(full.has_l2);
    CHECK(full.l2_image == 0.0);
  }
}

TEST_CASE("axis-swapped predictions are flagged") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  Grid1d jg{cfg.window.lo, cfg.window.hi, 256};
  VerifyConfig vc{jg, jg, ColorMapConfig::cher()};

  SyntheticSample s;  // strongly asymmetric widths so the axes are distinguishable
  s.p = GaussianComponent{-0.7, 0.7, 2.5, 4.0, 0.3};
  s.p_prime = s.p;
  s.p_dprime = s.p;
  s.amplitude = 0.0;
  JointGrid j = eval_joint(s, jg, jg);
  MarginalTriple gt = analytic_marginals(s, cfg.window);

  JointGrid swapped = make_joint_grid(jg, jg);
  swapped.values = j.values.transpose();
  MetricReport rep = gt_deficient_verify(encode_grid(swapped, ColorMapConfig::cher()), gt, vc);
  CHECK(rep.axes_swapped);
  CHECK(rep.l1_m1 > 10.0 * 2e-3 * gt.m1.values.maxCoeff());

  MetricReport ok = gt_deficient_verify(encode_grid(j, ColorMapConfig::cher()), gt, vc);
  CHECK(!ok.axes_swapped);
}

TEST_CASE("heavy gamut violations abort verification") {
  SynthPreset cfg = SynthPreset::cher_super_ohmic();
  Grid1d jg{cfg.window.lo, cfg.window.hi, 256};
  VerifyConfig vc{jg, jg, ColorMapConfig::cher()};
  SyntheticSample s = sample_params(31, 1, cfg);
  JointGrid j = eval_joint(s, jg, jg);
  MarginalTriple gt = analytic_marginals(s, cfg.window);
  EncodedImage img = encode_grid(j, ColorMapConfig::cher());

  int corrupted = 0;
  for (int i = 0; i < jg.n && corrupted < int(0.25 * jg.n * jg.n); ++i)
    for (int k = 0; k < jg.n && corrupted < int(0.25 * jg.n * jg.n); ++k) {
      img.r(i, k) = 1.0;
      img.g(i, k) = -1.0;
      img.b(i, k) = 1.0;
      ++corrupted;
    }
  CHECK_THROWS_AS(gt_deficient_verify(img, gt, vc), GamutError);
}

TEST_CASE("figure writers emit well-formed deterministic files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qj_image_out_test";
  fs::create_directories(dir);

  Grid1d g{-6.0, 6.0, 65};
  NoisyStateParams p;
  p.kind = StateKind::cat;
  p.alpha = cplx(1.5, 0.0);
  FockDensity d = fock_density(p, default_n_cut(p));
  JointGrid w = wigner_from_density(d, g, g);

  const std::string heat = (dir / "joint.bmp").string();
  write_heatmap(heat, w, ColorMapConfig::wigner());
  std::ifstream f(heat, std::ios::binary);
  REQUIRE(f.good());
  std::vector<uint8_t> head(26);
  f.read(reinterpret_cast<char*>(head.data()), 26);
  CHECK(head[0] == 'B');
  CHECK(head[1] == 'M');
  const auto u32 = [&head](int off) {
    return uint32_t(head[off]) | uint32_t(head[off + 1]) << 8 | uint32_t(head[off + 2]) << 16 |
           uint32_t(head[off + 3]) << 24;
  };
  CHECK(u32(18) == 65);  // width
  CHECK(u32(22) == 65);  // height
  const uintmax_t expected_size = 54 + (3 * 65 + (4 - (3 * 65) % 4) % 4) * 65;
  CHECK(fs::file_size(heat) == expected_size);

  const std::string heat2 = (dir / "joint2.bmp").string();
  write_heatmap(heat2, w, ColorMapConfig::wigner());
  CHECK(sha256_file(heat) == sha256_file(heat2));

  write_grayscale((dir / "diff.bmp").string(), w.values, 0.1);
  CHECK(fs::file_size(dir / "diff.bmp") == expected_size);

  MarginalTriple t = wigner_marginals(d, Grid1d{-6.0, 6.0, 721});
  write_marginal_overlay((dir / "overlay.bmp").string(), t, t);
  CHECK(fs::file_size(dir / "overlay.bmp") > 54);

  CHECK_THROWS_AS(write_grayscale((dir / "bad.bmp").string(), w.values, 0.0), ConfigError);
  CHECK_THROWS_AS(write_heatmap("/nonexistent_dir_qj/x.bmp", w, ColorMapConfig::wigner()),
                  IoError);
  fs::remove_all(dir);
}

TEST_CASE("report text carries every metric") {
  MetricReport r;
  r.has_l2 = true;
  r.l2_image = 0.25;
  r.l1_m1 = 0.5;
  r.negativity_volume = 1.5;
  const std::string txt = report_text(r);
  CHECK(txt.find("l2_image=0.25") != std::string::npos);
  CHECK(txt.find("l1_m1=0.5") != std::string::npos);
  CHECK(txt.find("negativity_volume=1.5") != std::string::npos);
  CHECK(txt.find("axes_swapped=0") != std::string::npos);
}
