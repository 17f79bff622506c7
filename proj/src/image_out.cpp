#include "quasijoint/image_out.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "quasijoint/errors.hpp"

namespace qj {

namespace {

using Px = std::array<uint8_t, 3>;  // r, g, b

uint8_t to_byte(double v) {  // [-1, 1] -> [0, 255]
  const double t = std::clamp(0.5 * (v + 1.0), 0.0, 1.0);
  return uint8_t(std::lround(t * 255.0));
}

void put_u16(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t((v >> 8) & 0xff));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  put_u16(out, v & 0xffff);
  put_u16(out, v >> 16);
}

// pixels are top-down rows of (r, g, b); the file stores rows bottom-up in bgr
void emit_bmp(const std::string& path, int w, int h, const std::vector<Px>& px) {
  const int pad = (4 - (3 * w) % 4) % 4;
  const uint32_t data_size = uint32_t((3 * w + pad) * h);
  std::vector<uint8_t> out;
  out.reserve(54 + data_size);
  out.push_back('B');
  out.push_back('M');
  put_u32(out, 54 + data_size);
  put_u32(out, 0);
  put_u32(out, 54);
  put_u32(out, 40);  // info header
  put_u32(out, uint32_t(w));
  put_u32(out, uint32_t(h));
  put_u16(out, 1);
  put_u16(out, 24);
  put_u32(out, 0);
  put_u32(out, data_size);
  put_u32(out, 2835);  // 72 dpi
  put_u32(out, 2835);
  put_u32(out, 0);
  put_u32(out, 0);
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col) {
      const Px& p = px[size_t(row) * w + col];
      out.push_back(p[2]);
      out.push_back(p[1]);
      out.push_back(p[0]);
    }
    for (int k = 0; k < pad; ++k) out.push_back(0);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  if (!f) throw IoError("short write: " + path);
}

}  // namespace

void write_bmp(const std::string& path, const MatXd& r, const MatXd& g, const MatXd& b) {
  if (r.rows() != g.rows() || r.rows() != b.rows() || r.cols() != g.cols() ||
      r.cols() != b.cols())
    throw ConfigError("write_bmp: channel shapes differ");
  const int w = int(r.rows()), h = int(r.cols());
  std::vector<Px> px(size_t(w) * h);
  for (int j = 0; j < h; ++j) {
    const int row = h - 1 - j;  // grid y increases upward, pixel rows go down
    for (int i = 0; i < w; ++i)
      px[size_t(row) * w + i] = {to_byte(r(i, j)), to_byte(g(i, j)), to_byte(b(i, j))};
  }
  emit_bmp(path, w, h, px);
}

void write_heatmap(const std::string& path, const JointGrid& joint, const ColorMapConfig& cmap) {
  EncodedImage img = encode_grid(joint, cmap);
  write_bmp(path, img.r, img.g, img.b);
}

void write_grayscale(const std::string& path, const MatXd& values, double vmax) {
  if (!(vmax > 0.0)) throw ConfigError("write_grayscale: vmax must be positive");
  const int w = int(values.rows()), h = int(values.cols());
  std::vector<Px> px(size_t(w) * h);
  for (int j = 0; j < h; ++j) {
    const int row = h - 1 - j;
    for (int i = 0; i < w; ++i) {
      const double t = std::min(std::abs(values(i, j)) / vmax, 1.0);
      const uint8_t v = uint8_t(255 - std::lround(t * 255.0));
      px[size_t(row) * w + i] = {v, v, v};
    }
  }
  emit_bmp(path, w, h, px);
}

namespace {

void draw_curve(std::vector<Px>& px, int w, int top, int panel_h, const VecXd& v, double ymin,
                double ymax, int x0, Px color, bool dashed) {
  const int n = int(v.size());
  int prev_row = -1;
  for (int k = 0; k < n; ++k) {
    if (dashed && (k / 10) % 2 == 1) {
      prev_row = -1;
      continue;
    }
    const double t = (v[k] - ymin) / (ymax - ymin);
    int row = top + panel_h - 1 - int(std::lround(t * (panel_h - 1)));
    row = std::clamp(row, top, top + panel_h - 1);
    const int x = x0 + k;
    const int lo = prev_row < 0 ? row : std::min(row, prev_row);
    const int hi = prev_row < 0 ? row : std::max(row, prev_row);
    for (int rr = lo; rr <= hi; ++rr) px[size_t(rr) * w + x] = color;
    prev_row = row;
  }
}

}  // namespace

void write_marginal_overlay(const std::string& path, const MarginalTriple& gt,
                            const MarginalTriple& pred) {
  const int n = int(gt.m1.values.size());
  if (pred.m1.values.size() != n || gt.m13.values.size() != n || pred.m13.values.size() != n ||
      gt.mu.values.size() != n || pred.mu.values.size() != n)
    throw ConfigError("write_marginal_overlay: curve lengths differ");
  const int margin = 40, panel_h = 220, gap = 24;
  const int w = n + 2 * margin, h = 3 * panel_h + 4 * gap;
  std::vector<Px> px(size_t(w) * h, Px{255, 255, 255});

  const Marginal* gts[3] = {&gt.m1, &gt.m13, &gt.mu};
  const Marginal* prs[3] = {&pred.m1, &pred.m13, &pred.mu};
  for (int panel = 0; panel < 3; ++panel) {
    const int top = gap + panel * (panel_h + gap);
    double ymax = std::max(gts[panel]->values.maxCoeff(), prs[panel]->values.maxCoeff());
    double ymin = std::min({gts[panel]->values.minCoeff(), prs[panel]->values.minCoeff(), 0.0});
    const double pad = 0.05 * std::max(ymax - ymin, 1e-12);
    ymax += pad;
    ymin -= pad;

    for (int x = margin; x < margin + n; ++x) {  // frame and zero line
      px[size_t(top) * w + x] = {200, 200, 200};
      px[size_t(top + panel_h - 1) * w + x] = {200, 200, 200};
      const double tz = (0.0 - ymin) / (ymax - ymin);
      const int zr = top + panel_h - 1 - int(std::lround(tz * (panel_h - 1)));
      if (zr > top && zr < top + panel_h - 1) px[size_t(zr) * w + x] = {225, 225, 225};
    }
    draw_curve(px, w, top, panel_h, prs[panel]->values, ymin, ymax, margin, Px{210, 40, 40},
               false);
    draw_curve(px, w, top, panel_h, gts[panel]->values, ymin, ymax, margin, Px{20, 20, 20},
               true);
  }
  emit_bmp(path, w, h, px);
}

}  // namespace qj
