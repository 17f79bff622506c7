#include "quasijoint/colormap.hpp"

#include <algorithm>
#include <cmath>

namespace qj {

ColorMapConfig ColorMapConfig::wigner() { return {0.5, 0.45, 0.9}; }

ColorMapConfig ColorMapConfig::cher() { return {1.0 / 5.5, 0.01, 0.055}; }

void ColorMapConfig::validate() const {
  if (!(z_scale > 0.0)) throw ConfigError("ColorMapConfig: z_scale must be > 0");
}

namespace {

double clip_unit(double v, EncodeStats* stats) {
  if (v > 1.0 || v < -1.0) {
    if (stats) ++stats->clipped;
    return std::clamp(v, -1.0, 1.0);
  }
  return v;
}

}  // namespace

Rgb colormap_curves(double zeta, const ColorMapConfig& cfg) {
  const double z0 = cfg.zeta0;
  double r = 2.0 * 1.148 /
                 ((std::exp(-25.0 * (zeta - (z0 - 0.12))) + 1.0) *
                  (std::exp(5.0 * (zeta - (z0 + 0.45))) + 1.0)) -
             1.0;
  double g = 2.0 * std::exp(-(zeta - z0) * (zeta - z0) / 0.0392) - 1.0;
  double b = 2.0 * 1.148 /
                 ((std::exp(25.0 * (zeta - (z0 + 0.12))) + 1.0) *
                  (std::exp(-5.0 * (zeta - (z0 - 0.45))) + 1.0)) -
             1.0;
  return {std::clamp(r, -1.0, 1.0), std::clamp(g, -1.0, 1.0), std::clamp(b, -1.0, 1.0)};
}

Rgb encode_height(double z, const ColorMapConfig& cfg, EncodeStats* stats) {
  double zeta = cfg.zeta_of(z);
  if (zeta < 0.0 || zeta > 1.0) {
    if (stats) ++stats->saturated;
    zeta = std::clamp(zeta, 0.0, 1.0);
  }
  const double z0 = cfg.zeta0;
  double r = 2.0 * 1.148 /
                 ((std::exp(-25.0 * (zeta - (z0 - 0.12))) + 1.0) *
                  (std::exp(5.0 * (zeta - (z0 + 0.45))) + 1.0)) -
             1.0;
  double g = 2.0 * std::exp(-(zeta - z0) * (zeta - z0) / 0.0392) - 1.0;
  double b = 2.0 * 1.148 /
                 ((std::exp(25.0 * (zeta - (z0 + 0.12))) + 1.0) *
                  (std::exp(-5.0 * (zeta - (z0 - 0.45))) + 1.0)) -
             1.0;
  return {clip_unit(r, stats), clip_unit(g, stats), clip_unit(b, stats)};
}

EncodedImage encode_grid(const JointGrid& joint, const ColorMapConfig& cfg) {
  cfg.validate();
  EncodedImage img;
  const auto rows = joint.values.rows(), cols = joint.values.cols();
  img.r.resize(rows, cols);
  img.g.resize(rows, cols);
  img.b.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      Rgb c = encode_height(joint.values(i, j), cfg, &img.stats);
      img.r(i, j) = c.r;
      img.g(i, j) = c.g;
      img.b(i, j) = c.b;
    }
  return img;
}

DecodeTable::DecodeTable(const ColorMapConfig& cfg, int n) : cfg_(cfg), n_(n) {
  cfg.validate();
  if (n < 16) throw ConfigError("DecodeTable: need at least 16 samples");
  step_ = 1.0 / (n - 1);
  r_.resize(n);
  g_.resize(n);
  b_.resize(n);
  for (int i = 0; i < n; ++i) {
    Rgb c = colormap_curves(step_ * i, cfg);
    r_[i] = c.r;
    g_[i] = c.g;
    b_[i] = c.b;
  }
}

double DecodeTable::decode(const Rgb& rgb, double* distance) const {
  auto d2_at = [&](int i) {
    double dr = r_[i] - rgb.r, dg = g_[i] - rgb.g, db = b_[i] - rgb.b;
    return dr * dr + dg * dg + db * db;
  };
  int best = 0;
  double best_d2 = d2_at(0);
  for (int i = 1; i < n_; ++i) {
    double d2 = d2_at(i);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  // one quadratic-fit step through the neighbouring samples sharpens the
  // table resolution well below the round-trip budget
  double zeta = step_ * best;
  if (best > 0 && best + 1 < n_) {
    double dm = d2_at(best - 1), d0 = best_d2, dp = d2_at(best + 1);
    double denom = dm - 2.0 * d0 + dp;
    if (denom > 0.0) {
      double shift = 0.5 * (dm - dp) / denom;
      zeta += step_ * std::clamp(shift, -1.0, 1.0);
    }
  }
  zeta = std::clamp(zeta, 0.0, 1.0);
  if (distance) {
    Rgb c = colormap_curves(zeta, cfg_);
    double dr = c.r - rgb.r, dg = c.g - rgb.g, db = c.b - rgb.b;
    *distance = std::sqrt(dr * dr + dg * dg + db * db);
  }
  return cfg_.z_of(zeta);
}

DecodedImage decode_image(const EncodedImage& img, const DecodeTable& table,
                          const Grid1d& gx, const Grid1d& gy) {
  if (img.rows() != gx.n || img.cols() != gy.n)
    throw ConfigError("decode_image: image shape does not match the grids");
  DecodedImage out;
  out.joint = make_joint_grid(gx, gy);
  for (int i = 0; i < img.rows(); ++i)
    for (int j = 0; j < img.cols(); ++j) {
      double dist = 0.0;
      out.joint.values(i, j) = table.decode({img.r(i, j), img.g(i, j), img.b(i, j)}, &dist);
      if (dist > kGamutThreshold) ++out.out_of_gamut;
      out.max_distance = std::max(out.max_distance, dist);
    }
  return out;
}

}  // namespace qj
