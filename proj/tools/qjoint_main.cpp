#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quasijoint/cher.hpp"
#include "quasijoint/colormap.hpp"
#include "quasijoint/dataset.hpp"
#include "quasijoint/errors.hpp"
#include "quasijoint/image_out.hpp"
#include "quasijoint/io.hpp"
#include "quasijoint/nn/train.hpp"
#include "quasijoint/spectral_density.hpp"
#include "quasijoint/verify.hpp"

namespace fs = std::filesystem;
using namespace qj;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
  std::string preset;
  std::string out;
  std::uint64_t seed = 1;
  long long train_plain = -1;
  long long train_signed = -1;
  long long test_plain = -1;
  long long test_signed = -1;
  int image_size = 0;
};

int cmd_gen_data(const GenDataArgs& a) {
  DatasetConfig cfg = DatasetConfig::preset(dataset_kind_from_name(a.preset), a.seed);
  if (a.train_plain >= 0) cfg.train_plain = a.train_plain;
  if (a.train_signed >= 0) cfg.train_signed = a.train_signed;
  if (a.test_plain >= 0) cfg.test_plain = a.test_plain;
  if (a.test_signed >= 0) cfg.test_signed = a.test_signed;
  if (a.image_size > 0) cfg.image_size = a.image_size;
  build_dataset(cfg, a.out);
  std::cout << "wrote " << a.out << ": " << cfg.train_count() << " train + " << cfg.test_count()
            << " test rows (" << a.preset << ", seed " << a.seed << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solve-ftog

struct SolveFtogArgs {
  std::string preset;
  std::string out;
  std::string temperatures = "2.4,3.6";
  double eta = -1.0;  // negative = preset default
  double s = 2.0;
  double omega_c = 1.0;
  double gamma = 1.0;
};

std::string ftog_file_name(double t) { return "ftog_T" + format_double(t) + ".f64"; }

std::vector<double> parse_temperatures(const std::string& list) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(list);
  while (std::getline(is, token, ',')) {
    if (token.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const double t = std::stod(token, &used);
      if (used != token.find_last_not_of(" \t") + 1) throw std::invalid_argument(token);
      out.push_back(t);
    } catch (const std::exception&) {
      throw ConfigError("solve-ftog: cannot parse temperature '" + token + "'");
    }
  }
  return out;
}

int cmd_solve_ftog(const SolveFtogArgs& a) {
  const std::vector<double> temperatures = parse_temperatures(a.temperatures);
  if (temperatures.empty()) {
    std::cerr << "warning: empty temperature list; nothing to solve\n";
    return 0;
  }
  const DatasetKind kind = dataset_kind_from_name(a.preset);
  SpectralDensity sd;
  SynthPreset sp;
  if (kind == DatasetKind::cher_super_ohmic) {
    sd = SpectralDensity::super_ohmic(a.eta > 0 ? a.eta : 0.4, a.s, a.omega_c);
    sp = SynthPreset::cher_super_ohmic();
  } else if (kind == DatasetKind::cher_drude_lorentz) {
    sd = SpectralDensity::drude_lorentz(a.eta > 0 ? a.eta : 0.45, a.gamma);
    sp = SynthPreset::cher_drude_lorentz();
  } else {
    throw ConfigError("solve-ftog: preset must be one of the dephasing families");
  }
  CherConfig ccfg;
  ccfg.grid = sp.window;

  ensure_dir(a.out);
  Manifest m;
  m.set_int("format_version", 1);
  m.set("command", "solve-ftog");
  m.set("preset", a.preset);
  m.set_double("eta", sd.eta);
  if (kind == DatasetKind::cher_super_ohmic) {
    m.set_double("s", sd.s);
    m.set_double("omega_c", sd.omega_c);
  } else {
    m.set_double("gamma", sd.gamma);
  }
  m.set_double("marginal_lo", ccfg.grid.lo);
  m.set_double("marginal_hi", ccfg.grid.hi);
  m.set_int("marginal_points", ccfg.grid.n);
  m.set_int("temperature_count", static_cast<long long>(temperatures.size()));

  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    const double t = temperatures[i];
    const CherResult res = cher_marginal_triple(sd, t, ccfg);
    std::vector<double> blob;
    blob.reserve(3 * ccfg.grid.n);
    for (const VecXd* v : {&res.marginals.m1.values, &res.marginals.m13.values,
                           &res.marginals.mu.values})
      blob.insert(blob.end(), v->data(), v->data() + v->size());
    const std::string name = ftog_file_name(t);
    write_f64((fs::path(a.out) / name).string(), blob);
    m.set_double("temperature_" + std::to_string(i), t);
    m.set_double("t_max_used_" + std::to_string(i), res.t_max_used);
    m.set("sha256_" + name, sha256_file((fs::path(a.out) / name).string()));
    std::cout << "T=" << format_double(t) << ": marginals solved (horizon "
              << format_double(res.t_max_used) << ")\n";
  }
  m.save((fs::path(a.out) / "manifest.txt").string());
  return 0;
}

// reload a solve-ftog output directory
std::vector<std::pair<double, MarginalTriple>> load_ftog_dir(const std::string& dir,
                                                             Manifest& m_out) {
  m_out = Manifest::load((fs::path(dir) / "manifest.txt").string());
  const Grid1d grid{m_out.get_double("marginal_lo"), m_out.get_double("marginal_hi"),
                    static_cast<int>(m_out.get_int("marginal_points"))};
  const long long count = m_out.get_int("temperature_count");
  std::vector<std::pair<double, MarginalTriple>> triples;
  for (long long i = 0; i < count; ++i) {
    const double t = m_out.get_double("temperature_" + std::to_string(i));
    const std::string name = ftog_file_name(t);
    const std::string path = (fs::path(dir) / name).string();
    if (sha256_file(path) != m_out.get("sha256_" + name))
      throw IoError("digest mismatch for " + path);
    const std::vector<double> blob = read_f64(path, 3 * static_cast<std::size_t>(grid.n));
    MarginalTriple mt;
    mt.m1 = {Axis::x1, grid, Eigen::Map<const VecXd>(blob.data(), grid.n)};
    mt.m13 = {Axis::x13, grid, Eigen::Map<const VecXd>(blob.data() + grid.n, grid.n)};
    mt.mu = {Axis::u, grid, Eigen::Map<const VecXd>(blob.data() + 2 * grid.n, grid.n)};
    triples.emplace_back(t, std::move(mt));
  }
  return triples;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string resume;
  int model_size = 64;
  int base_channels = 0;  // 0 = preset default
  TrainConfig tcfg;
};

// small log-scale loss plot: optimization curve solid red, holdout dashed black
void write_curve_plot(const std::string& path, const std::vector<TrainingPoint>& curve) {
  const int w = 640, h = 360;
  MatXd r = MatXd::Ones(w, h), g = MatXd::Ones(w, h), b = MatXd::Ones(w, h);
  double lo = 1e300, hi = -1e300;
  for (const auto& p : curve)
    for (double v : {p.train_loss, p.val_loss}) {
      const double lg = std::log10(std::max(v, 1e-12));
      lo = std::min(lo, lg);
      hi = std::max(hi, lg);
    }
  if (hi - lo < 1e-6) hi = lo + 1.0;
  const auto px = [&](double frac) { return 20 + frac * (w - 40); };
  const auto py = [&](double lg) { return 20 + (lg - lo) / (hi - lo) * (h - 40); };
  const auto dot = [&](double x, double y, double cr, double cg, double cb) {
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy) {
        const int ix = static_cast<int>(x) + dx, iy = static_cast<int>(y) + dy;
        if (ix >= 0 && ix < w && iy >= 0 && iy < h) {
          r(ix, iy) = cr;
          g(ix, iy) = cg;
          b(ix, iy) = cb;
        }
      }
  };
  const double span = std::max<std::size_t>(curve.size() - 1, 1);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    for (int k = 0; k <= 40; ++k) {
      const double f = k / 40.0;
      const double x = px((i + f) / span);
      dot(x, py(std::log10(std::max(curve[i].train_loss, 1e-12)) * (1 - f) +
                std::log10(std::max(curve[i + 1].train_loss, 1e-12)) * f),
          0.65, -0.69, -0.69);
      if (k % 8 < 4)  // dashed
        dot(x, py(std::log10(std::max(curve[i].val_loss, 1e-12)) * (1 - f) +
                  std::log10(std::max(curve[i + 1].val_loss, 1e-12)) * f),
            -1.0, -1.0, -1.0);
    }
  }
  write_bmp(path, r, g, b);
}

int cmd_train(const TrainArgs& a) {
  const Dataset ds = load_dataset(a.data);
  ModelConfig mcfg = ModelConfig::preset(a.model_size);
  if (a.base_channels > 0) mcfg.base_channels = a.base_channels;

  Checkpoint prev;
  const bool resuming = !a.resume.empty();
  if (resuming) prev = load_checkpoint(a.resume);

  const Checkpoint ck = train_model(ds, mcfg, a.tcfg, resuming ? &prev : nullptr);
  save_checkpoint(a.out, ck);
  write_curve_plot(a.out + ".curve.bmp", ck.curve);
  const TrainingPoint& last = ck.curve.back();
  std::cout << "checkpoint " << a.out << ": " << ck.curve.size() << " epochs, train loss "
            << format_double(last.train_loss) << ", holdout " << format_double(last.val_loss)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string source;
  std::string data;
  std::string out;
  int limit = 0;    // 0 = every test row
  int figures = 4;  // rows that get image artifacts
};

struct MeanAccumulator {
  double l1_m1 = 0, l1_m13 = 0, l1_mu = 0, l2 = 0, neg = 0;
  int n = 0, swapped = 0;
  void add(const MetricReport& r) {
    l1_m1 += r.l1_m1;
    l1_m13 += r.l1_m13;
    l1_mu += r.l1_mu;
    if (r.has_l2) l2 += r.l2_image;
    neg += r.negativity_volume;
    swapped += r.axes_swapped ? 1 : 0;
    ++n;
  }
};

// marginals of a decoded prediction, for overlay figures
MarginalTriple decoded_marginals(const EncodedImage& img, const VerifyConfig& vcfg,
                                 const Grid1d& out) {
  DecodeTable table(vcfg.colormap);
  const DecodedImage dec = decode_image(img, table, vcfg.gx, vcfg.gy);
  MarginalTriple mt;
  mt.m1 = {Axis::x1, out, resample_to_grid(joint_axis_marginal(dec.joint, Axis::x1), out)};
  mt.m13 = {Axis::x13, out, resample_to_grid(joint_axis_marginal(dec.joint, Axis::x13), out)};
  mt.mu = joint_oblique_marginal(dec.joint, out);
  return mt;
}

void write_encoded_bmp(const std::string& path, const EncodedImage& img) {
  write_bmp(path, img.r, img.g, img.b);
}

// grayscale map of the negative region, rescaled to its own depth
void write_negative_region(const std::string& path, const EncodedImage& img,
                           const VerifyConfig& vcfg) {
  DecodeTable table(vcfg.colormap);
  const DecodedImage dec = decode_image(img, table, vcfg.gx, vcfg.gy);
  const MatXd neg = (-dec.joint.values.array()).max(0.0).matrix();
  const double depth = neg.maxCoeff();
  write_grayscale(path, neg, depth > 0 ? depth : 1.0);
}

int cmd_evaluate(const EvaluateArgs& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  Predictor predictor(ck);
  ensure_dir(a.out);

  Manifest run;
  run.set_int("format_version", 1);
  run.set("command", "evaluate");
  run.set("source", a.source);
  run.set("checkpoint", a.checkpoint);
  run.set("sha256_checkpoint", sha256_file(a.checkpoint));
  run.set("data", a.data);
  run.set_int("limit", a.limit);
  run.set_int("figures", a.figures);

  std::ostringstream report;
  report << "source=" << a.source << "\n";
  int gamut_failures = 0;

  if (a.source == "synthetic-test" || a.source == "wigner-test") {
    const Dataset ds = load_dataset(a.data);
    const bool wigner = ds.cfg.kind == DatasetKind::wigner;
    if (wigner != (a.source == "wigner-test"))
      throw ConfigError("evaluate: dataset kind does not match the requested source");
    run.set("sha256_dataset_manifest",
            sha256_file((fs::path(a.data) / "manifest.txt").string()));

    VerifyConfig vcfg;
    vcfg.gx = vcfg.gy = joint_axis_grid(ds.cfg, ck.model.output_size);
    vcfg.colormap = label_colormap(ds.cfg.kind);
    const Grid1d mgrid = marginal_grid(ds.cfg, Axis::x1);

    const int total = ds.cfg.test_count();
    const int n = a.limit > 0 ? std::min(a.limit, total) : total;
    MeanAccumulator acc;
    std::ostringstream rows;
    for (int i = 0; i < n; ++i) {
      const SampleRecord rec = ds.test_record(i);
      const MarginalTriple gt = record_marginals(ds.cfg, rec);
      const EncodedImage gt_img = record_label(ds.cfg, rec, ck.model.output_size);
      const EncodedImage pred = predictor.run(ds.test_row(i));
      try {
        const MetricReport rep = full_verify(gt_img, pred, gt, vcfg);
        acc.add(rep);
        rows << "sample_" << i << ": l2=" << format_double(rep.l2_image)
             << " l1_m1=" << format_double(rep.l1_m1) << " l1_m13=" << format_double(rep.l1_m13)
             << " l1_mu=" << format_double(rep.l1_mu)
             << " neg=" << format_double(rep.negativity_volume) << "\n";
      } catch (const GamutError& e) {
        ++gamut_failures;
        rows << "sample_" << i << ": gamut failure (" << e.what() << ")\n";
      }
      if (i < a.figures) {
        const std::string tag = std::to_string(i);
        write_encoded_bmp((fs::path(a.out) / ("pred_" + tag + ".bmp")).string(), pred);
        write_encoded_bmp((fs::path(a.out) / ("gt_" + tag + ".bmp")).string(), gt_img);
        try {
          const MarginalTriple pm = decoded_marginals(pred, vcfg, mgrid);
          write_marginal_overlay((fs::path(a.out) / ("overlay_" + tag + ".bmp")).string(), gt,
                                 pm);
        } catch (const Error&) {
          // overlay skipped when the prediction does not decode
        }
        if (wigner) {
          const MatXd diff = ((gt_img.r - pred.r).cwiseAbs() + (gt_img.g - pred.g).cwiseAbs() +
                              (gt_img.b - pred.b).cwiseAbs()) /
                             3.0;
          const double vmax = diff.maxCoeff();
          write_grayscale((fs::path(a.out) / ("diff_" + tag + ".bmp")).string(), diff,
                          vmax > 0 ? vmax : 1.0);
        } else {
          write_negative_region((fs::path(a.out) / ("neg_" + tag + ".bmp")).string(), pred,
                                vcfg);
        }
      }
    }
    report << "samples=" << acc.n << "\n";
    if (acc.n > 0) {
      report << "mean_l2_image=" << format_double(acc.l2 / acc.n) << "\n"
             << "mean_l1_m1=" << format_double(acc.l1_m1 / acc.n) << "\n"
             << "mean_l1_m13=" << format_double(acc.l1_m13 / acc.n) << "\n"
             << "mean_l1_mu=" << format_double(acc.l1_mu / acc.n) << "\n"
             << "mean_negativity_volume=" << format_double(acc.neg / acc.n) << "\n"
             << "axes_swap_flags=" << acc.swapped << "\n";
    }
    report << "gamut_failures=" << gamut_failures << "\n" << rows.str();
  } else if (a.source == "ftog-marginals") {
    Manifest solve_manifest;
    const auto triples = load_ftog_dir(a.data, solve_manifest);
    run.set("sha256_ftog_manifest", sha256_file((fs::path(a.data) / "manifest.txt").string()));
    const std::string preset = solve_manifest.get("preset");
    const DatasetConfig dcfg = DatasetConfig::preset(dataset_kind_from_name(preset), 0);

    VerifyConfig vcfg;
    vcfg.gx = vcfg.gy = joint_axis_grid(dcfg, ck.model.output_size);
    vcfg.colormap = label_colormap(dcfg.kind);
    const Grid1d mgrid = marginal_grid(dcfg, Axis::x1);

    for (const auto& [t, gt] : triples) {
      if (gt.m1.grid.n != kMarginalPoints || !(gt.m1.grid == mgrid))
        throw ConfigError("evaluate: solved marginals use a different window than the preset");
      const EncodedImage pred = predictor.run(gt);
      const std::string tag = "T" + format_double(t);
      try {
        const MetricReport rep = gt_deficient_verify(pred, gt, vcfg);
        report << tag << ": l1_m1=" << format_double(rep.l1_m1)
               << " l1_m13=" << format_double(rep.l1_m13) << " l1_mu=" << format_double(rep.l1_mu)
               << " negativity_volume=" << format_double(rep.negativity_volume)
               << " gamut=" << format_double(rep.out_of_gamut_fraction) << "\n";
      } catch (const GamutError& e) {
        ++gamut_failures;
        report << tag << ": gamut failure (" << e.what() << ")\n";
      }
      write_encoded_bmp((fs::path(a.out) / ("pred_" + tag + ".bmp")).string(), pred);
      try {
        const MarginalTriple pm = decoded_marginals(pred, vcfg, mgrid);
        write_marginal_overlay((fs::path(a.out) / ("overlay_" + tag + ".bmp")).string(), gt, pm);
      } catch (const Error&) {
      }
      write_negative_region((fs::path(a.out) / ("neg_" + tag + ".bmp")).string(), pred, vcfg);
    }
    report << "gamut_failures=" << gamut_failures << "\n";
  } else {
    throw ConfigError("evaluate: unknown source " + a.source);
  }

  write_text_file((fs::path(a.out) / "report.txt").string(), report.str());
  run.save((fs::path(a.out) / "manifest.txt").string());
  std::cout << report.str();
  if (gamut_failures > 0) {
    std::cerr << "error: " << gamut_failures << " verification(s) were unreliable (out of gamut)\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint quasi-distribution toolkit: data generation, marginal solving, "
               "training, and verification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a config file (ini format)");

  const std::vector<std::string> kinds{"cher-superohmic", "cher-drudelorentz", "wigner"};
  const std::vector<std::string> cher_kinds{"cher-superohmic", "cher-drudelorentz"};

  GenDataArgs gen;
  CLI::App* cgen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  cgen->add_option("--preset", gen.preset, "dataset family")
      ->required()
      ->check(CLI::IsMember(kinds));
  cgen->add_option("--out", gen.out, "output directory")->required();
  cgen->add_option("--seed", gen.seed, "generation seed");
  cgen->add_option("--train-plain", gen.train_plain, "override: sign-free training rows");
  cgen->add_option("--train-signed", gen.train_signed, "override: negativity-carrying rows");
  cgen->add_option("--test-plain", gen.test_plain, "override: sign-free test rows");
  cgen->add_option("--test-signed", gen.test_signed, "override: negativity-carrying test rows");
  cgen->add_option("--image-size", gen.image_size, "override: label grid side");

  SolveFtogArgs solve;
  CLI::App* csolve = app.add_subcommand("solve-ftog", "solve dephasing-model marginals");
  csolve->add_option("--preset", solve.preset, "spectral-density family")
      ->required()
      ->check(CLI::IsMember(cher_kinds));
  csolve->add_option("--out", solve.out, "output directory")->required();
  csolve->add_option("--temperatures", solve.temperatures,
                     "comma-separated temperatures (empty list = no-op)");
  csolve->add_option("--eta", solve.eta, "coupling strength (preset default when omitted)");
  csolve->add_option("--s", solve.s, "super-ohmic exponent");
  csolve->add_option("--omega-c", solve.omega_c, "super-ohmic cutoff");
  csolve->add_option("--gamma", solve.gamma, "memory-kernel width");

  TrainArgs train;
  CLI::App* ctrain = app.add_subcommand("train", "train a generator on a dataset");
  ctrain->add_option("--data", train.data, "dataset directory")->required();
  ctrain->add_option("--out", train.out, "checkpoint path")->required();
  ctrain->add_option("--model-size", train.model_size, "output grid side")
      ->check(CLI::IsMember({64, 128, 256}));
  ctrain->add_option("--base-channels", train.base_channels, "override seed-stage channels");
  ctrain->add_option("--resume", train.resume, "checkpoint to continue from");
  ctrain->add_option("--epochs", train.tcfg.epochs, "epochs to run");
  ctrain->add_option("--batch-size", train.tcfg.batch_size, "samples per optimizer step");
  ctrain->add_option("--learning-rate", train.tcfg.learning_rate, "optimizer step size");
  ctrain->add_option("--seed", train.tcfg.seed, "training seed");
  ctrain->add_option("--val-fraction", train.tcfg.val_fraction, "holdout share");
  ctrain->add_option("--patience", train.tcfg.patience, "epochs without improvement to stop");

  EvaluateArgs eval;
  CLI::App* ceval = app.add_subcommand("evaluate", "score a checkpoint and emit figures");
  ceval->add_option("--checkpoint", eval.checkpoint, "trained checkpoint")->required();
  ceval->add_option("--source", eval.source, "what to evaluate against")
      ->required()
      ->check(CLI::IsMember({"synthetic-test", "ftog-marginals", "wigner-test"}));
  ceval->add_option("--data", eval.data, "dataset or solve-ftog directory")->required();
  ceval->add_option("--out", eval.out, "report directory")->required();
  ceval->add_option("--limit", eval.limit, "cap on evaluated rows (0 = all)");
  ceval->add_option("--figures", eval.figures, "rows that get image artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cgen->parsed()) return cmd_gen_data(gen);
    if (csolve->parsed()) return cmd_solve_ftog(solve);
    if (ctrain->parsed()) return cmd_train(train);
    if (ceval->parsed()) return cmd_evaluate(eval);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
