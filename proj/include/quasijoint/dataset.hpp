#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quasijoint/colormap.hpp"
#include "quasijoint/fock.hpp"
#include "quasijoint/grid.hpp"
#include "quasijoint/io.hpp"
#include "quasijoint/synth.hpp"

namespace qj {

enum class DatasetKind { cher_super_ohmic, cher_drude_lorentz, wigner };

const char* dataset_kind_name(DatasetKind kind);
DatasetKind dataset_kind_from_name(const std::string& name);

inline constexpr int kMarginalPoints = 721;

// held-out rows draw from parameter streams far above any training index
inline constexpr std::uint64_t kTestStreamOffset = 1'000'000'000ULL;

// phase-space half-width of the quasi-distribution window for field states
inline constexpr double kFieldWindow = 6.0;

// sampling ranges for the noisy field states
struct FieldStateRanges {
  Range alpha_re{-2.0, 2.0};
  Range alpha_im{-2.0, 2.0};
  Range theta{0.0, 6.283185307179586476925286766559};  // cat phase, [0, 2π)
  Range mu{0.5, 1.0};
  Range nbar{0.0, 2.0};

  void validate() const;
};

// a dataset is two index blocks per split: rows below `plain` counts carry no
// joint negativity (A = 0 mixtures, or coherent states), the rest do (signed
// mixtures, or cat states)
struct DatasetConfig {
  DatasetKind kind = DatasetKind::cher_super_ohmic;
  std::uint64_t seed = 1;
  int train_plain = 0;
  int train_signed = 0;
  int test_plain = 0;
  int test_signed = 0;
  int image_size = 256;  // default label resolution, recorded in the manifest
  SynthPreset synth;       // mixture ranges (ignored for field states)
  FieldStateRanges field;  // state ranges (ignored for mixtures)

  static DatasetConfig preset(DatasetKind kind, std::uint64_t seed);

  int train_count() const { return train_plain + train_signed; }
  int test_count() const { return test_plain + test_signed; }
  void validate() const;
};

// feature grids: all three marginals share the dataset window, except the
// diagonal marginal of field states, which spans the window's diagonal
Grid1d marginal_grid(const DatasetConfig& cfg, Axis axis);
// one side of the square label grid
Grid1d joint_axis_grid(const DatasetConfig& cfg, int n);
ColorMapConfig label_colormap(DatasetKind kind);

// the generating parameters of one row; exactly one branch is meaningful
struct SampleRecord {
  bool is_field_state = false;
  SyntheticSample synth;
  NoisyStateParams state;
};

// doubles per row in the parameter sidecar (16 for mixtures, 6 for states)
int param_stride(DatasetKind kind);

// deterministic row parameters keyed by (seed, index); indices at or above
// kTestStreamOffset address the held-out split
SampleRecord make_record(const DatasetConfig& cfg, std::uint64_t index);

void encode_params(const SampleRecord& rec, double* out);
SampleRecord decode_params(DatasetKind kind, const double* in);

// features: the three 1-D marginals on the dataset grids
MarginalTriple record_marginals(const DatasetConfig& cfg, const SampleRecord& rec);
// label source: the joint quasi-distribution on an n × n window grid
JointGrid record_joint(const DatasetConfig& cfg, const SampleRecord& rec, int n);
// label: the color-encoded joint
EncodedImage record_label(const DatasetConfig& cfg, const SampleRecord& rec, int n);

// on-disk layout under one directory:
//   manifest.txt           config, grids, ranges, and array digests
//   train_features.f32     train_count × 3 × 721 floats (m1 | m13 | mu)
//   test_features.f32      test_count  × 3 × 721
//   train_params.f64       train_count × param_stride doubles
//   test_params.f64        test_count  × param_stride
// labels are not materialized; rows re-render exactly from the f64 params
struct Dataset {
  DatasetConfig cfg;
  Manifest manifest;
  std::vector<float> train_features;
  std::vector<float> test_features;
  std::vector<double> train_params;
  std::vector<double> test_params;

  SampleRecord train_record(int i) const;
  SampleRecord test_record(int i) const;
  const float* train_row(int i) const;
  const float* test_row(int i) const;
};

// worker count from the QJOINT_WORKERS environment variable (default: the
// hardware concurrency); the output is identical for any worker count
int env_worker_count();

// generates both splits and writes the directory atomically: the manifest is
// written last, and on failure every file written so far is removed
void build_dataset(const DatasetConfig& cfg, const std::string& out_dir, int workers = 0);

// reads a dataset back and verifies the array digests against the manifest
Dataset load_dataset(const std::string& dir);

}  // namespace qj
