#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "quasijoint/colormap.hpp"
#include "quasijoint/errors.hpp"

namespace qj {

// marginals-to-image generator: a dense embedding reshapes the 3 x 721
// feature into a low-resolution seed tensor, six stages of residual
// transposed-convolution blocks grow it to the output square, and a
// range-limiting head emits three channels in [-1, 1]
struct ModelConfig {
  int output_size = 256;  // one of 64, 128, 256
  int base_channels = 256;
  std::array<int, 6> blocks_per_stage{2, 2, 2, 2, 2, 2};
  int input_length = 3 * 721;
  int seed_side = 4;  // spatial side of the embedded seed tensor

  static ModelConfig full();               // 256 x 256 output
  static ModelConfig desk();               // small 64 x 64 variant
  static ModelConfig preset(int output_size);

  std::array<int, 6> stage_channels() const;  // tapering channel widths
  std::array<int, 6> stage_strides() const;   // 2 while doubling, then 1
  void validate() const;
};

namespace detail {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// feature maps are (height*width) x channels, one column per channel
template <typename T>
struct ConvTransposed {
  int cin = 0, cout = 0, k = 0, stride = 1, pad = 0;
  int hin = 0, win = 0, hout = 0, wout = 0;
  MatX<T> w;  // cin x (cout*k*k)
  VecX<T> b;  // cout
  MatX<T> gw;
  VecX<T> gb;
  std::vector<std::int32_t> scatter;  // k*k slabs of hin*win target indices
  MatX<T> x_cache;

  void init(int cin_, int cout_, int k_, int stride_, int pad_, int hin_, int win_);
  MatX<T> forward(const MatX<T>& x, bool store);
  MatX<T> backward(const MatX<T>& gy);  // accumulates gw/gb, returns gx
};

template <typename T>
struct Dense {
  MatX<T> w;  // out x in
  VecX<T> b;
  MatX<T> gw;
  VecX<T> gb;
  VecX<T> x_cache;

  void init(int out, int in);
  VecX<T> forward(const VecX<T>& x, bool store);
  VecX<T> backward(const VecX<T>& gy);
};

// main stream of three transposed-convolution layers plus a skip path; the
// projecting variant places the upsampling in the first layer and a matching
// projection on the skip, the identity variant adds its input unchanged, so
// zeroed main-stream weights make it an exact identity map
template <typename T>
struct ResidualBlock {
  bool projected = false;
  ConvTransposed<T> c1, c2, c3;
  ConvTransposed<T> sc;
  MatX<T> h1_cache, h2_cache;

  void init_projected(int cin, int cout, int stride, int hin, int win);
  void init_identity(int channels, int hin, int win);
  int out_side() const { return c3.hout; }
  int out_channels() const { return c3.cout; }
  MatX<T> forward(const MatX<T>& x, bool store);
  MatX<T> backward(const MatX<T>& gy);
};

}  // namespace detail

// one contiguous view of a parameter (or gradient) matrix
template <typename T>
struct ParamSpan {
  T* value;
  T* grad;
  std::size_t size;
};

template <typename T>
struct GeneratorModel {
  ModelConfig cfg;
  detail::Dense<T> embed;
  std::vector<detail::ResidualBlock<T>> blocks;
  detail::ConvTransposed<T> head;

  // deterministic random initialization; the last main-stream layer of every
  // block starts at zero so each block begins as its skip path
  static GeneratorModel build(const ModelConfig& cfg, std::uint64_t init_seed);

  // feature (input_length) -> (output_size^2) x 3, values in (-1, 1)
  detail::MatX<T> forward(const detail::VecX<T>& feature, bool store = false);
  // gradient of the loss w.r.t. the output; accumulates parameter gradients
  void backward(const detail::MatX<T>& gout);

  std::vector<ParamSpan<T>> params();
  std::size_t param_count();
  void zero_grad();
  std::vector<T> weights_flat();
  void load_weights(const std::vector<T>& flat);

 private:
  detail::MatX<T> seed_cache_, pre_cache_;
};

using Model = GeneratorModel<float>;

// spell the (hw x 3) network output as channel images, row i*S + j holding
// matrix entry (i, j)
EncodedImage output_to_image(const detail::MatX<float>& out, int side);
// flatten an encoded label to the matching (hw x 3) float target
detail::MatX<float> image_to_target(const EncodedImage& img);

extern template struct GeneratorModel<float>;
extern template struct GeneratorModel<double>;

}  // namespace qj
