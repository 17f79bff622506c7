#include "quasijoint/verify.hpp"

#include <cmath>
#include <sstream>

#include "quasijoint/errors.hpp"
#include "quasijoint/io.hpp"

namespace qj {

double l2_image(const EncodedImage& gt, const EncodedImage& pred) {
  if (gt.rows() != pred.rows() || gt.cols() != pred.cols())
    throw ConfigError("l2_image: image shapes differ");
  const double ss = (gt.r - pred.r).squaredNorm() + (gt.g - pred.g).squaredNorm() +
                    (gt.b - pred.b).squaredNorm();
  const double count = 3.0 * double(gt.rows()) * double(gt.cols());
  return std::sqrt(ss) / count;
}

double l1_marginal(const Marginal& gt, const Marginal& pred) {
  if (!(gt.grid == pred.grid)) throw ConfigError("l1_marginal: marginal grids differ");
  if (gt.values.size() != pred.values.size())
    throw ConfigError("l1_marginal: value lengths differ");
  return (gt.values - pred.values).cwiseAbs().sum() / double(gt.values.size());
}

double negativity_volume(const JointGrid& joint) {
  return -joint.values.cwiseMin(0.0).sum() * joint.cell_measure();
}

MetricReport gt_deficient_verify(const EncodedImage& pred, const MarginalTriple& gt,
                                 const VerifyConfig& cfg) {
  if (!(gt.m1.grid == gt.m13.grid) || !(gt.m1.grid == gt.mu.grid))
    throw ConfigError("gt_deficient_verify: marginal grids must agree");

  DecodeTable table(cfg.colormap);
  DecodedImage dec = decode_image(pred, table, cfg.gx, cfg.gy);
  MetricReport rep;
  rep.out_of_gamut_fraction = dec.gamut_fraction();
  if (rep.out_of_gamut_fraction > cfg.gamut_limit)
    throw GamutError("gt_deficient_verify: " + format_double(rep.out_of_gamut_fraction) +
                     " of decoded pixels are out of gamut; verification is unreliable");

  const Grid1d& out = gt.m1.grid;
  Marginal p1;
  p1.axis = Axis::x1;
  p1.grid = out;
  p1.values = resample_to_grid(joint_axis_marginal(dec.joint, Axis::x1), out);
  Marginal p13;
  p13.axis = Axis::x13;
  p13.grid = out;
  p13.values = resample_to_grid(joint_axis_marginal(dec.joint, Axis::x13), out);
  Marginal pu = joint_oblique_marginal(dec.joint, out);

  rep.l1_m1 = l1_marginal(gt.m1, p1);
  rep.l1_m13 = l1_marginal(gt.m13, p13);
  rep.l1_mu = l1_marginal(gt.mu, pu);
  rep.negativity_volume = negativity_volume(dec.joint);

  // axis-confusion detector: if the axis marginals score clearly better against
  // each other's references, the prediction has x1 and x13 exchanged
  const double straight = rep.l1_m1 + rep.l1_m13;
  const double crossed = l1_marginal(gt.m1, Marginal{Axis::x1, out, p13.values}) +
                         l1_marginal(gt.m13, Marginal{Axis::x13, out, p1.values});
  rep.axes_swapped = crossed < 0.5 * straight;
  return rep;
}

MetricReport full_verify(const EncodedImage& gt_img, const EncodedImage& pred,
                         const MarginalTriple& gt, const VerifyConfig& cfg) {
  MetricReport rep = gt_deficient_verify(pred, gt, cfg);
  rep.l2_image = l2_image(gt_img, pred);
  rep.has_l2 = true;
  return rep;
}

std::string report_text(const MetricReport& r) {
  std::ostringstream os;
  if (r.has_l2) os << "l2_image=" << format_double(r.l2_image) << "\n";
  os << "l1_m1=" << format_double(r.l1_m1) << "\n";
  os << "l1_m13=" << format_double(r.l1_m13) << "\n";
  os << "l1_mu=" << format_double(r.l1_mu) << "\n";
  os << "negativity_volume=" << format_double(r.negativity_volume) << "\n";
  os << "out_of_gamut_fraction=" << format_double(r.out_of_gamut_fraction) << "\n";
  os << "axes_swapped=" << (r.axes_swapped ? "1" : "0") << "\n";
  return os.str();
}

}  // namespace qj
