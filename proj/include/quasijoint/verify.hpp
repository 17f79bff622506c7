#pragma once

#include <string>

#include "quasijoint/colormap.hpp"
#include "quasijoint/grid.hpp"

namespace qj {

struct MetricReport {
  double l2_image = 0.0;  // meaningful only when has_l2 is set
  bool has_l2 = false;
  double l1_m1 = 0.0;
  double l1_m13 = 0.0;
  double l1_mu = 0.0;
  double negativity_volume = 0.0;
  double out_of_gamut_fraction = 0.0;
  bool axes_swapped = false;  // the two axis marginals fit better exchanged
};

struct VerifyConfig {
  Grid1d gx;  // joint window behind the encoded image
  Grid1d gy;
  ColorMapConfig colormap;
  double gamut_limit = 0.20;  // decoded-pixel failure share above which the run is unreliable
};

// image distance: sqrt of the summed squared channel differences divided by
// the full element count (channels included); the divisor sits outside the
// root, so this is not a root mean square
double l2_image(const EncodedImage& gt, const EncodedImage& pred);

// mean absolute difference over the shared grid
double l1_marginal(const Marginal& gt, const Marginal& pred);

// volume of the negative region: -integral of min(joint, 0)
double negativity_volume(const JointGrid& joint);

// verification without a ground-truth joint: decode the predicted image,
// integrate out each axis (the diagonal via rotated-frame resampling), and
// score the resulting marginals against the physics-derived ones
MetricReport gt_deficient_verify(const EncodedImage& pred, const MarginalTriple& gt,
                                 const VerifyConfig& cfg);

// same protocol plus the image distance against an exact encoded ground truth
MetricReport full_verify(const EncodedImage& gt_img, const EncodedImage& pred,
                         const MarginalTriple& gt, const VerifyConfig& cfg);

std::string report_text(const MetricReport& r);

}  // namespace qj
