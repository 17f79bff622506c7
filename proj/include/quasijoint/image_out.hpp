#pragma once

#include <string>

#include "quasijoint/colormap.hpp"
#include "quasijoint/grid.hpp"

namespace qj {

// 24-bit BMP from channel matrices in [-1, 1]; matrix entry (i, j) is the
// pixel at horizontal position i and vertical position j (upward), matching
// the joint-grid convention values(i, j) = z(x_i, y_j)
void write_bmp(const std::string& path, const MatXd& r, const MatXd& g, const MatXd& b);

// false-color rendering of a joint grid through the given colormap
void write_heatmap(const std::string& path, const JointGrid& joint, const ColorMapConfig& cmap);

// |values| rendered white (0) to black (>= vmax); used for difference maps
void write_grayscale(const std::string& path, const MatXd& values, double vmax);

// three stacked panels (first axis, second axis, diagonal): reference curve
// dashed black, prediction solid red
void write_marginal_overlay(const std::string& path, const MarginalTriple& gt,
                            const MarginalTriple& pred);

}  // namespace qj
