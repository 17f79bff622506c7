#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quasijoint/cher.hpp"
#include "quasijoint/colormap.hpp"
#include "quasijoint/dataset.hpp"
#include "quasijoint/fock.hpp"
#include "quasijoint/nn/train.hpp"
#include "quasijoint/spectral_density.hpp"
#include "quasijoint/synth.hpp"
#include "quasijoint/verify.hpp"
#include "quasijoint/wigner.hpp"

namespace py = pybind11;
using namespace qj;

namespace {

ColorMapConfig cmap_by_name(const std::string& name) {
  if (name == "wigner") return ColorMapConfig::wigner();
  if (name == "cher") return ColorMapConfig::cher();
  throw ConfigError("unknown colormap: " + name);
}

SpectralDensity density_by_name(const std::string& preset, double eta) {
  if (preset == "cher-superohmic") return SpectralDensity::super_ohmic(eta > 0 ? eta : 0.4, 2.0, 1.0);
  if (preset == "cher-drudelorentz") return SpectralDensity::drude_lorentz(eta > 0 ? eta : 0.45, 1.0);
  throw ConfigError("unknown dephasing preset: " + preset);
}

py::dict triple_dict(const MarginalTriple& t) {
  py::dict d;
  d["x"] = t.m1.grid.points();
  d["m1"] = t.m1.values;
  d["m13"] = t.m13.values;
  d["u_x"] = t.mu.grid.points();
  d["mu"] = t.mu.values;
  return d;
}

}  // namespace

PYBIND11_MODULE(_quasijoint, m) {
  m.doc() = "joint quasi-distribution toolkit bindings";

  py::register_exception<Error>(m, "ToolkitError");

  m.def(
      "cher_marginals",
      [](const std::string& preset, double temperature, double eta) {
        const SpectralDensity sd = density_by_name(preset, eta);
        CherConfig cfg;
        cfg.grid = preset == "cher-superohmic" ? SynthPreset::cher_super_ohmic().window
                                               : SynthPreset::cher_drude_lorentz().window;
        const CherResult res = cher_marginal_triple(sd, temperature, cfg);
        py::dict d = triple_dict(res.marginals);
        d["t_max_used"] = res.t_max_used;
        return d;
      },
      py::arg("preset"), py::arg("temperature"), py::arg("eta") = -1.0,
      "solve the three dephasing-model marginals for one spectral-density preset");

  m.def(
      "wigner_joint",
      [](double alpha_re, double alpha_im, double mu, double nbar, py::object theta, int n,
         double window) {
        NoisyStateParams p;
        p.alpha = {alpha_re, alpha_im};
        p.mu = mu;
        p.nbar = nbar;
        if (!theta.is_none()) {
          p.kind = StateKind::cat;
          p.theta_rel = theta.cast<double>();
        }
        p.validate();
        const FockDensity d = fock_density(p, default_n_cut(p));
        const Grid1d g{-window, window, n};
        py::dict out;
        out["x"] = g.points();
        out["values"] = wigner_from_density(d, g, g).values;
        return out;
      },
      py::arg("alpha_re"), py::arg("alpha_im"), py::arg("mu") = 1.0, py::arg("nbar") = 0.0,
      py::arg("theta") = py::none(), py::arg("n") = 129, py::arg("window") = 6.0,
      "phase-space distribution of a noisy coherent or cat state");

  m.def(
      "wigner_marginals",
      [](double alpha_re, double alpha_im, double mu, double nbar, py::object theta) {
        NoisyStateParams p;
        p.alpha = {alpha_re, alpha_im};
        p.mu = mu;
        p.nbar = nbar;
        if (!theta.is_none()) {
          p.kind = StateKind::cat;
          p.theta_rel = theta.cast<double>();
        }
        p.validate();
        DatasetConfig cfg = DatasetConfig::preset(DatasetKind::wigner, 0);
        const FockDensity d = fock_density(p, default_n_cut(p));
        return triple_dict(
            wigner_marginals(d, marginal_grid(cfg, Axis::x1), marginal_grid(cfg, Axis::u)));
      },
      py::arg("alpha_re"), py::arg("alpha_im"), py::arg("mu") = 1.0, py::arg("nbar") = 0.0,
      py::arg("theta") = py::none(),
      "quadrature and oblique marginals of a noisy state on the dataset grids");

  m.def(
      "synth_marginals",
      [](std::uint64_t seed, std::uint64_t index, const std::string& preset, bool plain) {
        const SynthPreset sp = preset == "cher-superohmic" ? SynthPreset::cher_super_ohmic()
                                                           : SynthPreset::cher_drude_lorentz();
        const SyntheticSample s = sample_params(seed, index, plain ? sp.plain() : sp);
        return triple_dict(analytic_marginals(s, sp.window));
      },
      py::arg("seed"), py::arg("index"), py::arg("preset") = "cher-superohmic",
      py::arg("plain") = false,
      "marginals of one reproducible synthetic training sample");

  m.def(
      "encode",
      [](const MatXd& values, const std::string& cmap, double lo, double hi) {
        JointGrid j;
        j.gx = j.gy = Grid1d{lo, hi, static_cast<int>(values.rows())};
        j.values = values;
        const EncodedImage img = encode_grid(j, cmap_by_name(cmap));
        return py::make_tuple(img.r, img.g, img.b);
      },
      py::arg("values"), py::arg("cmap"), py::arg("lo") = -6.0, py::arg("hi") = 6.0,
      "false-color channels of a height field");

  m.def(
      "decode",
      [](const MatXd& r, const MatXd& g, const MatXd& b, const std::string& cmap, double lo,
         double hi) {
        EncodedImage img;
        img.r = r;
        img.g = g;
        img.b = b;
        const DecodeTable table(cmap_by_name(cmap));
        const Grid1d grid{lo, hi, static_cast<int>(r.rows())};
        const DecodedImage dec = decode_image(img, table, grid, grid);
        py::dict d;
        d["values"] = dec.joint.values;
        d["gamut_fraction"] = dec.gamut_fraction();
        return d;
      },
      py::arg("r"), py::arg("g"), py::arg("b"), py::arg("cmap"), py::arg("lo") = -6.0,
      py::arg("hi") = 6.0, "invert the color mapping back to heights");

  m.def(
      "l2_image",
      [](const MatXd& r1, const MatXd& g1, const MatXd& b1, const MatXd& r2, const MatXd& g2,
         const MatXd& b2) {
        EncodedImage a{r1, g1, b1, {}};
        EncodedImage b{r2, g2, b2, {}};
        return l2_image(a, b);
      },
      "image distance: sqrt of summed squared channel differences over the element count");

  m.def(
      "l1_marginal",
      [](const VecXd& gt, const VecXd& pred) {
        if (gt.size() != pred.size()) throw ConfigError("l1_marginal: length mismatch");
        const Grid1d g{0.0, 1.0, static_cast<int>(gt.size())};
        return l1_marginal(Marginal{Axis::x1, g, gt}, Marginal{Axis::x1, g, pred});
      },
      "mean absolute difference of two sampled curves");

  m.def(
      "negativity_volume",
      [](const MatXd& values, double lo, double hi) {
        JointGrid j;
        j.gx = j.gy = Grid1d{lo, hi, static_cast<int>(values.rows())};
        j.values = values;
        return negativity_volume(j);
      },
      py::arg("values"), py::arg("lo") = -6.0, py::arg("hi") = 6.0,
      "volume of the negative region of a sampled field");

  m.def(
      "predict",
      [](const std::string& checkpoint_path, const VecXd& m1, const VecXd& m13, const VecXd& mu) {
        const Checkpoint ck = load_checkpoint(checkpoint_path);
        Predictor p(ck);
        if (m1.size() != kMarginalPoints || m13.size() != kMarginalPoints ||
            mu.size() != kMarginalPoints)
          throw ConfigError("predict: marginals must have " + std::to_string(kMarginalPoints) +
                            " points");
        std::vector<float> row(3 * kMarginalPoints);
        for (int k = 0; k < kMarginalPoints; ++k) {
          row[k] = static_cast<float>(m1[k]);
          row[kMarginalPoints + k] = static_cast<float>(m13[k]);
          row[2 * kMarginalPoints + k] = static_cast<float>(mu[k]);
        }
        const EncodedImage img = p.run(row.data());
        return py::make_tuple(img.r, img.g, img.b);
      },
      py::arg("checkpoint_path"), py::arg("m1"), py::arg("m13"), py::arg("mu"),
      "run a trained generator on one marginal triple");

  m.attr("MARGINAL_POINTS") = kMarginalPoints;
}
