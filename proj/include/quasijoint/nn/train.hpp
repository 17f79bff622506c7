#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quasijoint/dataset.hpp"
#include "quasijoint/nn/model.hpp"

namespace qj {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 32;
  int epochs = 100;
  std::uint64_t seed = 1;
  double val_fraction = 0.05;  // held out from the training rows
  int patience = 10;           // epochs without improvement before stopping
  std::size_t label_cache_mb = 2048;  // rendered-label memory budget

  void validate() const;
};

struct TrainingPoint {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// everything needed to reproduce and reuse a trained model
struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  std::string kind;            // dataset kind name
  std::string dataset_digest;  // sha256 of the dataset manifest text
  std::array<double, 3> feat_mean{0.0, 0.0, 0.0};  // per-marginal affine
  std::array<double, 3> feat_sd{1.0, 1.0, 1.0};    // standardization
  std::vector<TrainingPoint> curve;
  std::vector<float> weights;
};

std::string dataset_digest(const Dataset& ds);

// mean-squared-error training with adaptive-moment updates over on-demand
// rendered labels; deterministic for a fixed seed; keeps the weights of the
// best validation epoch; pass `resume` to continue a previous run on the
// same dataset
Checkpoint train_model(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                       const Checkpoint* resume = nullptr);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

// reusable forward pass over a checkpoint's weights and feature statistics
class Predictor {
 public:
  explicit Predictor(const Checkpoint& c);

  EncodedImage run(const float* row);  // 3 x 721 floats, marginal-major
  EncodedImage run(const MarginalTriple& feature);
  int output_size() const { return model_.cfg.output_size; }

 private:
  Model model_;
  std::array<double, 3> mean_;
  std::array<double, 3> sd_;
};

// one-call convenience wrapper
EncodedImage predict(const Checkpoint& ckpt, const MarginalTriple& feature);

}  // namespace qj
