#include "quasijoint/nn/model.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "quasijoint/rng.hpp"

namespace qj {

namespace {

constexpr double kLeakSlope = 0.2;

// derivative of the leaky rectifier from its own output (sign-preserving)
template <typename T>
T act_grad(T activated) {
  return activated > T(0) ? T(1) : T(kLeakSlope);
}

template <typename T>
void act_inplace(detail::MatX<T>& m) {
  m = m.array().max(m.array() * T(kLeakSlope)).matrix();
}

}  // namespace

ModelConfig ModelConfig::full() { return ModelConfig{}; }

ModelConfig ModelConfig::desk() {
  ModelConfig cfg;
  cfg.output_size = 64;
  cfg.base_channels = 32;
  return cfg;
}

ModelConfig ModelConfig::preset(int output_size) {
  ModelConfig cfg;
  cfg.output_size = output_size;
  cfg.base_channels = output_size == 64 ? 32 : (output_size == 128 ? 96 : 256);
  cfg.validate();
  return cfg;
}

std::array<int, 6> ModelConfig::stage_channels() const {
  // tapering fractions of the seed width: 3/4, 1/2, 3/8, 1/4, 3/16, 3/16
  const std::array<int, 6> sixteenths{12, 8, 6, 4, 3, 3};
  std::array<int, 6> ch{};
  for (int s = 0; s < 6; ++s) ch[s] = std::max(6, base_channels * sixteenths[s] / 16);
  return ch;
}

std::array<int, 6> ModelConfig::stage_strides() const {
  int doublings = 0;
  for (int side = seed_side; side < output_size; side *= 2) ++doublings;
  std::array<int, 6> st{};
  for (int s = 0; s < 6; ++s) st[s] = s < doublings ? 2 : 1;
  return st;
}

void ModelConfig::validate() const {
  if (output_size != 64 && output_size != 128 && output_size != 256)
    throw ConfigError("ModelConfig: output_size must be 64, 128, or 256");
  if (base_channels < 1) throw ConfigError("ModelConfig: base_channels must be positive");
  if (input_length < 1) throw ConfigError("ModelConfig: input_length must be positive");
  if (seed_side < 1) throw ConfigError("ModelConfig: seed_side must be positive");
  for (int n : blocks_per_stage)
    if (n < 1) throw ConfigError("ModelConfig: every stage needs at least one block");
  int side = seed_side, doublings = 0;
  while (side < output_size) {
    side *= 2;
    ++doublings;
  }
  if (side != output_size || doublings > 6)
    throw ConfigError("ModelConfig: output_size is not reachable from the seed tensor by at most six doublings");
}

namespace detail {

template <typename T>
void ConvTransposed<T>::init(int cin_, int cout_, int k_, int stride_, int pad_, int hin_, int win_) {
  cin = cin_;
  cout = cout_;
  k = k_;
  stride = stride_;
  pad = pad_;
  hin = hin_;
  win = win_;
  hout = (hin - 1) * stride - 2 * pad + k;
  wout = (win - 1) * stride - 2 * pad + k;
  if (hout < 1 || wout < 1) throw ConfigError("ConvTransposed: degenerate output extent");
  w = MatX<T>::Zero(cin, cout * k * k);
  b = VecX<T>::Zero(cout);
  gw = MatX<T>::Zero(cin, cout * k * k);
  gb = VecX<T>::Zero(cout);
  scatter.assign(static_cast<std::size_t>(k) * k * hin * win, -1);
  for (int ki = 0; ki < k; ++ki)
    for (int kj = 0; kj < k; ++kj) {
      std::int32_t* slab = scatter.data() + static_cast<std::size_t>(ki * k + kj) * hin * win;
      for (int i = 0; i < hin; ++i) {
        const int oy = i * stride - pad + ki;
        if (oy < 0 || oy >= hout) continue;
        for (int j = 0; j < win; ++j) {
          const int ox = j * stride - pad + kj;
          if (ox >= 0 && ox < wout) slab[i * win + j] = oy * wout + ox;
        }
      }
    }
}

template <typename T>
MatX<T> ConvTransposed<T>::forward(const MatX<T>& x, bool store) {
  if (store) x_cache = x;
  const int hw_in = hin * win;
  const MatX<T> cols = x * w;  // hw_in x (cout*k*k)
  MatX<T> y = MatX<T>::Zero(static_cast<std::size_t>(hout) * wout, cout);
  for (int c = 0; c < cout; ++c) {
    T* ycol = y.col(c).data();
    for (int r = 0; r < k * k; ++r) {
      const T* ccol = cols.col(c * k * k + r).data();
      const std::int32_t* slab = scatter.data() + static_cast<std::size_t>(r) * hw_in;
      for (int s = 0; s < hw_in; ++s)
        if (slab[s] >= 0) ycol[slab[s]] += ccol[s];
    }
    y.col(c).array() += b[c];
  }
  return y;
}

template <typename T>
MatX<T> ConvTransposed<T>::backward(const MatX<T>& gy) {
  const int hw_in = hin * win;
  MatX<T> gcols(hw_in, cout * k * k);
  for (int c = 0; c < cout; ++c) {
    const T* gycol = gy.col(c).data();
    for (int r = 0; r < k * k; ++r) {
      T* gcol = gcols.col(c * k * k + r).data();
      const std::int32_t* slab = scatter.data() + static_cast<std::size_t>(r) * hw_in;
      for (int s = 0; s < hw_in; ++s) gcol[s] = slab[s] >= 0 ? gycol[slab[s]] : T(0);
    }
    gb[c] += gy.col(c).sum();
  }
  gw.noalias() += x_cache.transpose() * gcols;
  return gcols * w.transpose();
}

template <typename T>
void Dense<T>::init(int out, int in) {
  w = MatX<T>::Zero(out, in);
  b = VecX<T>::Zero(out);
  gw = MatX<T>::Zero(out, in);
  gb = VecX<T>::Zero(out);
}

template <typename T>
VecX<T> Dense<T>::forward(const VecX<T>& x, bool store) {
  if (store) x_cache = x;
  return w * x + b;
}

template <typename T>
VecX<T> Dense<T>::backward(const VecX<T>& gy) {
  gw.noalias() += gy * x_cache.transpose();
  gb += gy;
  return w.transpose() * gy;
}

template <typename T>
void ResidualBlock<T>::init_projected(int cin, int cout, int stride, int hin, int win) {
  projected = true;
  if (stride == 2) {
    c1.init(cin, cout, 4, 2, 1, hin, win);
    sc.init(cin, cout, 2, 2, 0, hin, win);
  } else {
    c1.init(cin, cout, 3, 1, 1, hin, win);
    sc.init(cin, cout, 1, 1, 0, hin, win);
  }
  c2.init(cout, cout, 3, 1, 1, c1.hout, c1.wout);
  c3.init(cout, cout, 3, 1, 1, c2.hout, c2.wout);
}

template <typename T>
void ResidualBlock<T>::init_identity(int channels, int hin, int win) {
  projected = false;
  c1.init(channels, channels, 3, 1, 1, hin, win);
  c2.init(channels, channels, 3, 1, 1, hin, win);
  c3.init(channels, channels, 3, 1, 1, hin, win);
}

template <typename T>
MatX<T> ResidualBlock<T>::forward(const MatX<T>& x, bool store) {
  MatX<T> h1 = c1.forward(x, store);
  act_inplace(h1);
  if (store) h1_cache = h1;
  MatX<T> h2 = c2.forward(h1, store);
  act_inplace(h2);
  if (store) h2_cache = h2;
  MatX<T> y = c3.forward(h2, store);
  if (projected)
    y += sc.forward(x, store);
  else
    y += x;
  return y;
}

template <typename T>
MatX<T> ResidualBlock<T>::backward(const MatX<T>& gy) {
  MatX<T> gh2 = c3.backward(gy);
  gh2.array() *= h2_cache.array().unaryExpr([](T v) { return act_grad(v); });
  MatX<T> gh1 = c2.backward(gh2);
  gh1.array() *= h1_cache.array().unaryExpr([](T v) { return act_grad(v); });
  MatX<T> gx = c1.backward(gh1);
  if (projected)
    gx += sc.backward(gy);
  else
    gx += gy;
  return gx;
}

template struct ConvTransposed<float>;
template struct ConvTransposed<double>;
template struct Dense<float>;
template struct Dense<double>;
template struct ResidualBlock<float>;
template struct ResidualBlock<double>;

}  // namespace detail

namespace {

template <typename T>
void fill_normal(detail::MatX<T>& m, SplitMix64& rng, double sd) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(sd * rng.normal());
}

// forward fan-in of one output position of a transposed convolution
double convt_fan_in(int cin, int k, int stride) {
  return double(cin) * k * k / double(stride * stride);
}

}  // namespace

template <typename T>
GeneratorModel<T> GeneratorModel<T>::build(const ModelConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  GeneratorModel<T> m;
  m.cfg = cfg;
  const auto channels = cfg.stage_channels();
  const auto strides = cfg.stage_strides();

  m.embed.init(cfg.seed_side * cfg.seed_side * cfg.base_channels, cfg.input_length);
  int side = cfg.seed_side;
  int width = cfg.base_channels;
  for (int s = 0; s < 6; ++s) {
    detail::ResidualBlock<T> lead;
    lead.init_projected(width, channels[s], strides[s], side, side);
    side = lead.out_side();
    width = channels[s];
    m.blocks.push_back(std::move(lead));
    for (int extra = 1; extra < cfg.blocks_per_stage[s]; ++extra) {
      detail::ResidualBlock<T> id;
      id.init_identity(width, side, side);
      m.blocks.push_back(std::move(id));
    }
  }
  if (side != cfg.output_size)
    throw ConfigError("ModelConfig: upsampling schedule lands on " + std::to_string(side) +
                      ", not " + std::to_string(cfg.output_size));
  m.head.init(width, 3, 3, 1, 1, side, side);

  // one deterministic stream in parameter order; variance-preserving scales
  // for the leaky rectifier, and zero last layers so blocks start as skips
  SplitMix64 rng(init_seed);
  const double gain = 2.0 / (1.0 + kLeakSlope * kLeakSlope);
  fill_normal(m.embed.w, rng, std::sqrt(1.0 / cfg.input_length));
  for (auto& blk : m.blocks) {
    fill_normal(blk.c1.w, rng, std::sqrt(gain / convt_fan_in(blk.c1.cin, blk.c1.k, blk.c1.stride)));
    fill_normal(blk.c2.w, rng, std::sqrt(gain / convt_fan_in(blk.c2.cin, blk.c2.k, blk.c2.stride)));
    // c3 stays zero
    if (blk.projected)
      fill_normal(blk.sc.w, rng, std::sqrt(1.0 / convt_fan_in(blk.sc.cin, blk.sc.k, blk.sc.stride)));
  }
  fill_normal(m.head.w, rng, std::sqrt(1.0 / convt_fan_in(m.head.cin, m.head.k, 1)));
  return m;
}

template <typename T>
detail::MatX<T> GeneratorModel<T>::forward(const detail::VecX<T>& feature, bool store) {
  if (feature.size() != cfg.input_length)
    throw ConfigError("forward: feature length " + std::to_string(feature.size()) +
                      ", expected " + std::to_string(cfg.input_length));
  if (!feature.allFinite()) throw ConfigError("forward: feature contains non-finite values");

  const detail::VecX<T> v = embed.forward(feature, store);
  const int hw = cfg.seed_side * cfg.seed_side;
  detail::MatX<T> t =
      Eigen::Map<const detail::MatX<T>>(v.data(), hw, cfg.base_channels);
  act_inplace(t);
  if (store) seed_cache_ = t;
  for (auto& blk : blocks) t = blk.forward(t, store);
  t = head.forward(t, store);
  if (store) pre_cache_ = t;
  return t.array().tanh().matrix();
}

// d tanh / dx evaluated from the pre-activation. Computing 1 - tanh(x)^2 from
// the output cancels to exactly zero once tanh rounds to +-1, which would
// permanently freeze any weight feeding a saturated pixel; this form keeps the
// true exponentially small slope down to the underflow edge.
template <typename T>
static T tanh_slope(T x) {
  const T a = std::exp(T(-2) * std::abs(x));
  const T onep = T(1) + a;
  return T(4) * a / (onep * onep);
}

template <typename T>
void GeneratorModel<T>::backward(const detail::MatX<T>& gout) {
  detail::MatX<T> g =
      (gout.array() * pre_cache_.array().unaryExpr([](T v) { return tanh_slope(v); })).matrix();
  g = head.backward(g);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) g = it->backward(g);
  g.array() *= seed_cache_.array().unaryExpr([](T v) { return act_grad(v); });
  const detail::VecX<T> gv =
      Eigen::Map<const detail::VecX<T>>(g.data(), g.size());
  embed.backward(gv);
}

template <typename T>
std::vector<ParamSpan<T>> GeneratorModel<T>::params() {
  std::vector<ParamSpan<T>> spans;
  auto add = [&](auto& layer) {
    spans.push_back({layer.w.data(), layer.gw.data(), static_cast<std::size_t>(layer.w.size())});
    spans.push_back({layer.b.data(), layer.gb.data(), static_cast<std::size_t>(layer.b.size())});
  };
  add(embed);
  for (auto& blk : blocks) {
    add(blk.c1);
    add(blk.c2);
    add(blk.c3);
    if (blk.projected) add(blk.sc);
  }
  add(head);
  return spans;
}

template <typename T>
std::size_t GeneratorModel<T>::param_count() {
  std::size_t n = 0;
  for (const auto& s : params()) n += s.size;
  return n;
}

template <typename T>
void GeneratorModel<T>::zero_grad() {
  for (auto& s : params())
    for (std::size_t i = 0; i < s.size; ++i) s.grad[i] = T(0);
}

template <typename T>
std::vector<T> GeneratorModel<T>::weights_flat() {
  std::vector<T> flat;
  flat.reserve(param_count());
  for (const auto& s : params()) flat.insert(flat.end(), s.value, s.value + s.size);
  return flat;
}

template <typename T>
void GeneratorModel<T>::load_weights(const std::vector<T>& flat) {
  if (flat.size() != param_count())
    throw ConfigError("load_weights: got " + std::to_string(flat.size()) + " values, expected " +
                      std::to_string(param_count()));
  std::size_t at = 0;
  for (auto& s : params()) {
    std::copy(flat.begin() + at, flat.begin() + at + s.size, s.value);
    at += s.size;
  }
}

template struct GeneratorModel<float>;
template struct GeneratorModel<double>;

EncodedImage output_to_image(const detail::MatX<float>& out, int side) {
  if (out.rows() != Eigen::Index(side) * side || out.cols() != 3)
    throw ConfigError("output_to_image: shape mismatch");
  EncodedImage img;
  MatXd* ch[3] = {&img.r, &img.g, &img.b};
  for (int c = 0; c < 3; ++c) {
    ch[c]->resize(side, side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) (*ch[c])(i, j) = out(i * side + j, c);
  }
  return img;
}

detail::MatX<float> image_to_target(const EncodedImage& img) {
  const int side = img.rows();
  if (img.cols() != side) throw ConfigError("image_to_target: image must be square");
  detail::MatX<float> t(static_cast<std::size_t>(side) * side, 3);
  const MatXd* ch[3] = {&img.r, &img.g, &img.b};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) t(i * side + j, c) = static_cast<float>((*ch[c])(i, j));
  return t;
}

}  // namespace qj
