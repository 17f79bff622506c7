#include "quasijoint/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "quasijoint/io.hpp"
#include "quasijoint/rng.hpp"

namespace qj {

namespace {

using detail::MatX;
using detail::VecX;

constexpr const char* kCheckpointMagic = "QJCKPT 1";
constexpr std::uint64_t kSplitStream = 9991;
constexpr std::uint64_t kEpochStreamBase = 10000;

void shuffle_indices(std::vector<int>& idx, SplitMix64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

VecX<float> standardized_row(const float* row, const std::array<double, 3>& mean,
                             const std::array<double, 3>& sd) {
  VecX<float> f(3 * kMarginalPoints);
  for (int c = 0; c < 3; ++c) {
    const float m = static_cast<float>(mean[c]);
    const float s = static_cast<float>(sd[c]);
    for (int k = 0; k < kMarginalPoints; ++k) {
      const int at = c * kMarginalPoints + k;
      f[at] = (row[at] - m) / s;
    }
  }
  return f;
}

// rendered-label store, capped in bytes; misses re-render deterministically
class LabelStore {
 public:
  LabelStore(const Dataset& ds, int side, std::size_t budget_mb)
      : ds_(ds), side_(side), max_entries_(0) {
    const std::size_t bytes_each = static_cast<std::size_t>(side) * side * 3 * sizeof(float);
    max_entries_ = budget_mb * std::size_t(1024) * 1024 / std::max<std::size_t>(1, bytes_each);
  }

  const MatX<float>& get(int row) {
    auto it = cache_.find(row);
    if (it != cache_.end()) return it->second;
    MatX<float> t = image_to_target(record_label(ds_.cfg, ds_.train_record(row), side_));
    if (cache_.size() >= max_entries_) {
      scratch_ = std::move(t);
      return scratch_;
    }
    return cache_.emplace(row, std::move(t)).first->second;
  }

 private:
  const Dataset& ds_;
  int side_;
  std::size_t max_entries_;
  std::unordered_map<int, MatX<float>> cache_;
  MatX<float> scratch_;
};

struct Adam {
  std::vector<float> m, v;
  long long t = 0;

  explicit Adam(std::size_t n) : m(n, 0.0f), v(n, 0.0f) {}

  void step(Model& model, double lr) {
    ++t;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 / (1.0 - std::pow(b1, double(t)));
    const double c2 = 1.0 / (1.0 - std::pow(b2, double(t)));
    std::size_t at = 0;
    for (auto& span : model.params()) {
      for (std::size_t i = 0; i < span.size; ++i, ++at) {
        const double g = span.grad[i];
        m[at] = float(b1 * m[at] + (1.0 - b1) * g);
        v[at] = float(b2 * v[at] + (1.0 - b2) * g * g);
        span.value[i] -= float(lr * (m[at] * c1) / (std::sqrt(v[at] * c2) + eps));
      }
    }
  }
};

std::string curve_dump(const std::vector<TrainingPoint>& curve) {
  std::ostringstream os;
  for (const auto& p : curve)
    os << "\n  epoch " << p.epoch << ": train " << format_double(p.train_loss) << ", val "
       << format_double(p.val_loss);
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be positive");
  if (epochs < 1) throw ConfigError("TrainConfig: epochs must be positive");
  if (val_fraction < 0.0 || val_fraction > 0.5)
    throw ConfigError("TrainConfig: val_fraction must lie in [0, 0.5]");
  if (patience < 1) throw ConfigError("TrainConfig: patience must be positive");
}

std::string dataset_digest(const Dataset& ds) {
  const std::string text = ds.manifest.serialize();
  return sha256_hex(text.data(), text.size());
}

Checkpoint train_model(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                       const Checkpoint* resume) {
  mcfg.validate();
  tcfg.validate();
  if (mcfg.input_length != 3 * kMarginalPoints)
    throw ConfigError("train_model: model input length does not match the feature rows");
  const std::string digest = dataset_digest(ds);

  Checkpoint out;
  out.model = mcfg;
  out.train = tcfg;
  out.kind = dataset_kind_name(ds.cfg.kind);
  out.dataset_digest = digest;

  if (resume) {
    if (resume->dataset_digest != digest)
      throw ConfigError("train_model: resume checkpoint was trained on a different dataset");
    if (resume->model.output_size != mcfg.output_size ||
        resume->model.base_channels != mcfg.base_channels ||
        resume->model.blocks_per_stage != mcfg.blocks_per_stage)
      throw ConfigError("train_model: resume checkpoint has a different model configuration");
    out.feat_mean = resume->feat_mean;
    out.feat_sd = resume->feat_sd;
    out.curve = resume->curve;
  } else {
    // per-marginal affine standardization over the training rows
    const int n = ds.cfg.train_count();
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0, sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const float* row = ds.train_row(i) + c * kMarginalPoints;
        for (int k = 0; k < kMarginalPoints; ++k) {
          sum += row[k];
          sq += double(row[k]) * row[k];
        }
      }
      const double count = double(n) * kMarginalPoints;
      const double mean = sum / count;
      const double var = std::max(sq / count - mean * mean, 0.0);
      out.feat_mean[c] = mean;
      out.feat_sd[c] = std::max(std::sqrt(var), 1e-12);
    }
  }

  Model model = Model::build(mcfg, tcfg.seed);
  if (resume) model.load_weights(resume->weights);

  // seeded split of the training rows into an optimization and a holdout part
  const int n_rows = ds.cfg.train_count();
  std::vector<int> perm(n_rows);
  for (int i = 0; i < n_rows; ++i) perm[i] = i;
  SplitMix64 split_rng(tcfg.seed, kSplitStream);
  shuffle_indices(perm, split_rng);
  int n_val = static_cast<int>(std::lround(n_rows * tcfg.val_fraction));
  n_val = std::min(n_val, n_rows - 1);
  const std::vector<int> val_rows(perm.end() - n_val, perm.end());
  std::vector<int> train_rows(perm.begin(), perm.end() - n_val);

  const int side = mcfg.output_size;
  const double denom = double(side) * side * 3;
  LabelStore labels(ds, side, tcfg.label_cache_mb);
  Adam opt(model.param_count());

  const int first_epoch = out.curve.empty() ? 1 : out.curve.back().epoch + 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<float> best_weights = model.weights_flat();
  int since_best = 0;

  for (int epoch = first_epoch; epoch < first_epoch + tcfg.epochs; ++epoch) {
    SplitMix64 order_rng(tcfg.seed, kEpochStreamBase + static_cast<std::uint64_t>(epoch));
    shuffle_indices(train_rows, order_rng);

    double train_loss = 0.0;
    for (std::size_t at = 0; at < train_rows.size(); at += tcfg.batch_size) {
      const std::size_t stop = std::min(at + tcfg.batch_size, train_rows.size());
      const double batch_n = double(stop - at);
      model.zero_grad();
      for (std::size_t s = at; s < stop; ++s) {
        const int row = train_rows[s];
        const VecX<float> feat = standardized_row(ds.train_row(row), out.feat_mean, out.feat_sd);
        const MatX<float> pred = model.forward(feat, true);
        MatX<float> diff = pred - labels.get(row);
        train_loss += diff.squaredNorm() / denom;
        diff *= float(2.0 / (denom * batch_n));
        model.backward(diff);
      }
      opt.step(model, tcfg.learning_rate);
    }
    train_loss /= double(train_rows.size());

    double val_loss = train_loss;
    if (n_val > 0) {
      val_loss = 0.0;
      for (int row : val_rows) {
        const VecX<float> feat = standardized_row(ds.train_row(row), out.feat_mean, out.feat_sd);
        const MatX<float> pred = model.forward(feat, false);
        val_loss += (pred - labels.get(row)).squaredNorm() / denom;
      }
      val_loss /= double(n_val);
    }
    out.curve.push_back({epoch, train_loss, val_loss});

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                          "; curve so far:" + curve_dump(out.curve));

    if (val_loss < best) {
      best = val_loss;
      best_weights = model.weights_flat();
      since_best = 0;
    } else if (++since_best >= tcfg.patience) {
      break;  // validation plateau
    }
  }

  out.weights = std::move(best_weights);
  return out;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  Manifest m;
  m.set("format", kCheckpointMagic);
  m.set("kind", c.kind);
  m.set("dataset_digest", c.dataset_digest);
  m.set_int("output_size", c.model.output_size);
  m.set_int("base_channels", c.model.base_channels);
  for (int s = 0; s < 6; ++s)
    m.set_int("blocks_stage_" + std::to_string(s), c.model.blocks_per_stage[s]);
  m.set_int("input_length", c.model.input_length);
  m.set_int("seed_side", c.model.seed_side);
  m.set_double("learning_rate", c.train.learning_rate);
  m.set_int("batch_size", c.train.batch_size);
  m.set_int("epochs", c.train.epochs);
  m.set_int("seed", static_cast<long long>(c.train.seed));
  m.set_double("val_fraction", c.train.val_fraction);
  m.set_int("patience", c.train.patience);
  m.set_int("label_cache_mb", static_cast<long long>(c.train.label_cache_mb));
  for (int i = 0; i < 3; ++i) {
    m.set_double("feat_mean_" + std::to_string(i), c.feat_mean[i]);
    m.set_double("feat_sd_" + std::to_string(i), c.feat_sd[i]);
  }
  m.set_int("weight_count", static_cast<long long>(c.weights.size()));
  m.set_int("curve_count", static_cast<long long>(c.curve.size()));

  std::string blob = m.serialize();
  blob += "---\n";
  const std::size_t head = blob.size();
  blob.resize(head + c.weights.size() * sizeof(float) + c.curve.size() * 3 * sizeof(double));
  char* at = blob.data() + head;
  std::memcpy(at, c.weights.data(), c.weights.size() * sizeof(float));
  at += c.weights.size() * sizeof(float);
  for (const auto& p : c.curve) {
    const double rec[3] = {double(p.epoch), p.train_loss, p.val_loss};
    std::memcpy(at, rec, sizeof(rec));
    at += sizeof(rec);
  }
  write_text_file(path, blob);
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string blob = read_text_file(path);
  const std::string sep = "\n---\n";
  const std::size_t cut = blob.find(sep);
  if (cut == std::string::npos) throw IoError("not a checkpoint file: " + path);
  const Manifest m = Manifest::parse(blob.substr(0, cut + 1));
  if (!m.has("format") || m.get("format") != kCheckpointMagic)
    throw IoError("unsupported checkpoint format in " + path);

  Checkpoint c;
  c.kind = m.get("kind");
  c.dataset_digest = m.get("dataset_digest");
  c.model.output_size = static_cast<int>(m.get_int("output_size"));
  c.model.base_channels = static_cast<int>(m.get_int("base_channels"));
  for (int s = 0; s < 6; ++s)
    c.model.blocks_per_stage[s] = static_cast<int>(m.get_int("blocks_stage_" + std::to_string(s)));
  c.model.input_length = static_cast<int>(m.get_int("input_length"));
  c.model.seed_side = static_cast<int>(m.get_int("seed_side"));
  c.train.learning_rate = m.get_double("learning_rate");
  c.train.batch_size = static_cast<int>(m.get_int("batch_size"));
  c.train.epochs = static_cast<int>(m.get_int("epochs"));
  c.train.seed = static_cast<std::uint64_t>(m.get_int("seed"));
  c.train.val_fraction = m.get_double("val_fraction");
  c.train.patience = static_cast<int>(m.get_int("patience"));
  c.train.label_cache_mb = static_cast<std::size_t>(m.get_int("label_cache_mb"));
  for (int i = 0; i < 3; ++i) {
    c.feat_mean[i] = m.get_double("feat_mean_" + std::to_string(i));
    c.feat_sd[i] = m.get_double("feat_sd_" + std::to_string(i));
  }
  const std::size_t n_weights = static_cast<std::size_t>(m.get_int("weight_count"));
  const std::size_t n_curve = static_cast<std::size_t>(m.get_int("curve_count"));

  const std::size_t payload = cut + sep.size();
  const std::size_t need = n_weights * sizeof(float) + n_curve * 3 * sizeof(double);
  if (blob.size() - payload != need) throw IoError("checkpoint payload truncated: " + path);
  const char* at = blob.data() + payload;
  c.weights.resize(n_weights);
  std::memcpy(c.weights.data(), at, n_weights * sizeof(float));
  at += n_weights * sizeof(float);
  c.curve.resize(n_curve);
  for (auto& p : c.curve) {
    double rec[3];
    std::memcpy(rec, at, sizeof(rec));
    at += sizeof(rec);
    p.epoch = static_cast<int>(rec[0]);
    p.train_loss = rec[1];
    p.val_loss = rec[2];
  }
  return c;
}

Predictor::Predictor(const Checkpoint& c)
    : model_(Model::build(c.model, 0)), mean_(c.feat_mean), sd_(c.feat_sd) {
  model_.load_weights(c.weights);
}

EncodedImage Predictor::run(const float* row) {
  const VecX<float> feat = standardized_row(row, mean_, sd_);
  return output_to_image(model_.forward(feat, false), model_.cfg.output_size);
}

EncodedImage Predictor::run(const MarginalTriple& feature) {
  const Marginal* parts[3] = {&feature.m1, &feature.m13, &feature.mu};
  std::vector<float> row(3 * kMarginalPoints);
  for (int c = 0; c < 3; ++c) {
    if (parts[c]->grid.n != kMarginalPoints)
      throw ConfigError("predict: marginals must carry 721 points");
    for (int k = 0; k < kMarginalPoints; ++k)
      row[static_cast<std::size_t>(c) * kMarginalPoints + k] =
          static_cast<float>(parts[c]->values[k]);
  }
  return run(row.data());
}

EncodedImage predict(const Checkpoint& ckpt, const MarginalTriple& feature) {
  Predictor p(ckpt);
  return p.run(feature);
}

}  // namespace qj
