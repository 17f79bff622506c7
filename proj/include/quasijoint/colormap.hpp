#pragma once

#include <vector>

#include "quasijoint/grid.hpp"

namespace qj {

// affine height rescale ζ = (z + z_offset)/z_scale feeding the channel curves
struct ColorMapConfig {
  double zeta0 = 0.5;
  double z_offset = 0.45;
  double z_scale = 0.9;

  static ColorMapConfig wigner();  // ζ0 = 1/2,   z ∈ [−0.45, 0.45]
  static ColorMapConfig cher();    // ζ0 = 1/5.5, z ∈ [−0.01, 0.045]

  double zeta_of(double z) const { return (z + z_offset) / z_scale; }
  double z_of(double zeta) const { return zeta * z_scale - z_offset; }
  double z_lo() const { return z_of(0.0); }
  double z_hi() const { return z_of(1.0); }
  void validate() const;
};

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;
};

// the three channel curves at ζ (already clipped to [−1, 1]); the logistic
// products peak at ≈0.9986, so the clip only guards rounding at the edges
Rgb colormap_curves(double zeta, const ColorMapConfig& cfg);

struct EncodeStats {
  long long saturated = 0;  // ζ outside [0, 1]: height beyond the affine window
  long long clipped = 0;    // raw channel value outside [−1, 1]
};

Rgb encode_height(double z, const ColorMapConfig& cfg, EncodeStats* stats = nullptr);

// three monochromatic images of one bivariate field, channel values in [−1, 1]
struct EncodedImage {
  MatXd r, g, b;
  EncodeStats stats;

  int rows() const { return static_cast<int>(r.rows()); }
  int cols() const { return static_cast<int>(r.cols()); }
};

EncodedImage encode_grid(const JointGrid& joint, const ColorMapConfig& cfg);

// nearest-point inverse of the channel curves; table of n samples over
// ζ ∈ [0, 1] with one quadratic refinement step on the squared distance
class DecodeTable {
 public:
  explicit DecodeTable(const ColorMapConfig& cfg, int n = 4096);

  // returns z; *distance (if given) receives the Euclidean gap to the curve
  double decode(const Rgb& rgb, double* distance = nullptr) const;

  const ColorMapConfig& config() const { return cfg_; }
  int size() const { return n_; }
  Rgb sample(int i) const { return {r_[i], g_[i], b_[i]}; }
  double zeta_sample(int i) const { return step_ * i; }

 private:
  ColorMapConfig cfg_;
  int n_;
  double step_;
  std::vector<double> r_, g_, b_;
};

struct DecodedImage {
  JointGrid joint;
  long long out_of_gamut = 0;  // pixels farther than the gamut threshold
  double max_distance = 0.0;
  double gamut_fraction() const {
    return static_cast<double>(out_of_gamut) / joint.values.size();
  }
};

// distance beyond which a pixel is declared off the color curve
inline constexpr double kGamutThreshold = 0.15;

DecodedImage decode_image(const EncodedImage& img, const DecodeTable& table,
                          const Grid1d& gx, const Grid1d& gy);

}  // namespace qj
