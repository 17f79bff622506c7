#include "quasijoint/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "quasijoint/errors.hpp"
#include "quasijoint/rng.hpp"
#include "quasijoint/wigner.hpp"

namespace qj {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

}  // namespace

const char* dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::cher_super_ohmic: return "cher-superohmic";
    case DatasetKind::cher_drude_lorentz: return "cher-drudelorentz";
    case DatasetKind::wigner: return "wigner";
  }
  throw ConfigError("dataset_kind_name: unknown kind");
}

DatasetKind dataset_kind_from_name(const std::string& name) {
  if (name == "cher-superohmic") return DatasetKind::cher_super_ohmic;
  if (name == "cher-drudelorentz") return DatasetKind::cher_drude_lorentz;
  if (name == "wigner") return DatasetKind::wigner;
  throw ConfigError("unknown dataset kind: " + name);
}

void FieldStateRanges::validate() const {
  alpha_re.validate("alpha_re");
  alpha_im.validate("alpha_im");
  theta.validate("theta");
  mu.validate("mu");
  nbar.validate("nbar");
  // the drawn extremes must themselves be admissible state parameters
  NoisyStateParams corner;
  corner.kind = StateKind::cat;
  corner.alpha = cplx(alpha_re.lo, alpha_im.lo);
  corner.theta_rel = theta.lo;
  corner.mu = mu.lo;
  corner.nbar = nbar.lo;
  corner.validate();
  corner.alpha = cplx(alpha_re.hi, alpha_im.hi);
  corner.theta_rel = std::nextafter(theta.hi, theta.lo);
  corner.mu = mu.hi;
  corner.nbar = nbar.hi;
  corner.validate();
}

DatasetConfig DatasetConfig::preset(DatasetKind kind, std::uint64_t seed) {
  DatasetConfig cfg;
  cfg.kind = kind;
  cfg.seed = seed;
  switch (kind) {
    case DatasetKind::cher_super_ohmic:
      cfg.train_plain = 10000;
      cfg.train_signed = 20000;
      cfg.test_plain = 33;  // ~ the training plain/signed proportion
      cfg.test_signed = 67;
      cfg.synth = SynthPreset::cher_super_ohmic();
      break;
    case DatasetKind::cher_drude_lorentz:
      cfg.train_plain = 10000;
      cfg.train_signed = 21000;
      cfg.test_plain = 32;
      cfg.test_signed = 68;
      cfg.synth = SynthPreset::cher_drude_lorentz();
      break;
    case DatasetKind::wigner:
      cfg.train_plain = 16000;  // coherent states
      cfg.train_signed = 18000;  // cat states
      cfg.test_plain = 50;  // both families matter equally at evaluation
      cfg.test_signed = 50;
      break;
  }
  return cfg;
}

void DatasetConfig::validate() const {
  if (train_plain < 0 || train_signed < 0 || test_plain < 0 || test_signed < 0)
    throw ConfigError("DatasetConfig: counts must be nonnegative");
  if (train_count() < 1) throw ConfigError("DatasetConfig: empty training split");
  if (static_cast<std::uint64_t>(train_count()) >= kTestStreamOffset ||
      static_cast<std::uint64_t>(test_count()) >= kTestStreamOffset)
    throw ConfigError("DatasetConfig: split too large for the held-out stream offset");
  if (image_size < 2) throw ConfigError("DatasetConfig: image_size must be at least 2");
  if (kind == DatasetKind::wigner)
    field.validate();
  else
    synth.validate();
}

Grid1d marginal_grid(const DatasetConfig& cfg, Axis axis) {
  if (cfg.kind != DatasetKind::wigner)
    return Grid1d{cfg.synth.window.lo, cfg.synth.window.hi, kMarginalPoints};
  if (axis == Axis::u) {
    const double w = kFieldWindow * kSqrt2;  // the window's diagonal half-width
    return Grid1d{-w, w, kMarginalPoints};
  }
  return Grid1d{-kFieldWindow, kFieldWindow, kMarginalPoints};
}

Grid1d joint_axis_grid(const DatasetConfig& cfg, int n) {
  if (cfg.kind != DatasetKind::wigner) return Grid1d{cfg.synth.window.lo, cfg.synth.window.hi, n};
  return Grid1d{-kFieldWindow, kFieldWindow, n};
}

ColorMapConfig label_colormap(DatasetKind kind) {
  return kind == DatasetKind::wigner ? ColorMapConfig::wigner() : ColorMapConfig::cher();
}

int param_stride(DatasetKind kind) { return kind == DatasetKind::wigner ? 6 : 16; }

SampleRecord make_record(const DatasetConfig& cfg, std::uint64_t index) {
  const bool held_out = index >= kTestStreamOffset;
  const std::uint64_t local = held_out ? index - kTestStreamOffset : index;
  const int plain = held_out ? cfg.test_plain : cfg.train_plain;
  const int total = held_out ? cfg.test_count() : cfg.train_count();
  if (local >= static_cast<std::uint64_t>(total))
    throw ConfigError("make_record: row " + std::to_string(local) + " beyond the " +
                      (held_out ? std::string("held-out") : std::string("training")) + " split of " +
                      std::to_string(total));
  const bool in_plain_block = local < static_cast<std::uint64_t>(plain);

  SampleRecord rec;
  if (cfg.kind != DatasetKind::wigner) {
    rec.is_field_state = false;
    rec.synth = sample_params(cfg.seed, index, in_plain_block ? cfg.synth.plain() : cfg.synth);
    return rec;
  }
  rec.is_field_state = true;
  SplitMix64 rng(cfg.seed, index);
  NoisyStateParams& s = rec.state;
  s.kind = in_plain_block ? StateKind::coherent : StateKind::cat;
  const double re = rng.uniform(cfg.field.alpha_re.lo, cfg.field.alpha_re.hi);
  const double im = rng.uniform(cfg.field.alpha_im.lo, cfg.field.alpha_im.hi);
  s.alpha = cplx(re, im);
  s.theta_rel = s.kind == StateKind::cat ? rng.uniform(cfg.field.theta.lo, cfg.field.theta.hi) : 0.0;
  s.mu = rng.uniform(cfg.field.mu.lo, cfg.field.mu.hi);
  s.nbar = rng.uniform(cfg.field.nbar.lo, cfg.field.nbar.hi);
  s.validate();
  return rec;
}

void encode_params(const SampleRecord& rec, double* out) {
  if (rec.is_field_state) {
    out[0] = rec.state.kind == StateKind::cat ? 1.0 : 0.0;
    out[1] = rec.state.alpha.real();
    out[2] = rec.state.alpha.imag();
    out[3] = rec.state.theta_rel;
    out[4] = rec.state.mu;
    out[5] = rec.state.nbar;
    return;
  }
  const GaussianComponent* parts[3] = {&rec.synth.p, &rec.synth.p_prime, &rec.synth.p_dprime};
  for (int c = 0; c < 3; ++c) {
    out[5 * c + 0] = parts[c]->m1;
    out[5 * c + 1] = parts[c]->m13;
    out[5 * c + 2] = parts[c]->s1;
    out[5 * c + 3] = parts[c]->s13;
    out[5 * c + 4] = parts[c]->rho;
  }
  out[15] = rec.synth.amplitude;
}

SampleRecord decode_params(DatasetKind kind, const double* in) {
  SampleRecord rec;
  if (kind == DatasetKind::wigner) {
    rec.is_field_state = true;
    rec.state.kind = in[0] == 1.0 ? StateKind::cat : StateKind::coherent;
    rec.state.alpha = cplx(in[1], in[2]);
    rec.state.theta_rel = in[3];
    rec.state.mu = in[4];
    rec.state.nbar = in[5];
    rec.state.validate();
    return rec;
  }
  rec.is_field_state = false;
  GaussianComponent* parts[3] = {&rec.synth.p, &rec.synth.p_prime, &rec.synth.p_dprime};
  for (int c = 0; c < 3; ++c) {
    parts[c]->m1 = in[5 * c + 0];
    parts[c]->m13 = in[5 * c + 1];
    parts[c]->s1 = in[5 * c + 2];
    parts[c]->s13 = in[5 * c + 3];
    parts[c]->rho = in[5 * c + 4];
  }
  rec.synth.amplitude = in[15];
  rec.synth.validate();
  return rec;
}

MarginalTriple record_marginals(const DatasetConfig& cfg, const SampleRecord& rec) {
  if (!rec.is_field_state) return analytic_marginals(rec.synth, marginal_grid(cfg, Axis::x1));
  FockDensity d = fock_density(rec.state, default_n_cut(rec.state));
  return wigner_marginals(d, marginal_grid(cfg, Axis::x1), marginal_grid(cfg, Axis::u));
}

JointGrid record_joint(const DatasetConfig& cfg, const SampleRecord& rec, int n) {
  const Grid1d g = joint_axis_grid(cfg, n);
  if (!rec.is_field_state) return eval_joint(rec.synth, g, g);
  FockDensity d = fock_density(rec.state, default_n_cut(rec.state));
  return wigner_from_density(d, g, g);
}

EncodedImage record_label(const DatasetConfig& cfg, const SampleRecord& rec, int n) {
  return encode_grid(record_joint(cfg, rec, n), label_colormap(cfg.kind));
}

SampleRecord Dataset::train_record(int i) const {
  if (i < 0 || i >= cfg.train_count()) throw ConfigError("train_record: row out of range");
  return decode_params(cfg.kind, train_params.data() + static_cast<std::size_t>(i) * param_stride(cfg.kind));
}

SampleRecord Dataset::test_record(int i) const {
  if (i < 0 || i >= cfg.test_count()) throw ConfigError("test_record: row out of range");
  return decode_params(cfg.kind, test_params.data() + static_cast<std::size_t>(i) * param_stride(cfg.kind));
}

const float* Dataset::train_row(int i) const {
  if (i < 0 || i >= cfg.train_count()) throw ConfigError("train_row: row out of range");
  return train_features.data() + static_cast<std::size_t>(i) * 3 * kMarginalPoints;
}

const float* Dataset::test_row(int i) const {
  if (i < 0 || i >= cfg.test_count()) throw ConfigError("test_row: row out of range");
  return test_features.data() + static_cast<std::size_t>(i) * 3 * kMarginalPoints;
}

int env_worker_count() {
  const char* v = std::getenv("QJOINT_WORKERS");
  if (!v || !*v) {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
  }
  int n = 0;
  const char* end = v + std::strlen(v);
  auto [ptr, ec] = std::from_chars(v, end, n);
  if (ec != std::errc{} || ptr != end || n < 1 || n > 256)
    throw ConfigError("QJOINT_WORKERS must be an integer in [1, 256], got '" + std::string(v) + "'");
  return n;
}

namespace {

void flatten_row(const MarginalTriple& mt, float* out) {
  const VecXd* parts[3] = {&mt.m1.values, &mt.m13.values, &mt.mu.values};
  for (int s = 0; s < 3; ++s) {
    const VecXd& v = *parts[s];
    for (int k = 0; k < kMarginalPoints; ++k)
      out[static_cast<std::size_t>(s) * kMarginalPoints + k] = static_cast<float>(v[k]);
  }
}

std::vector<double> compute_params(const DatasetConfig& cfg, bool held_out) {
  const int count = held_out ? cfg.test_count() : cfg.train_count();
  const std::uint64_t base = held_out ? kTestStreamOffset : 0;
  const int stride = param_stride(cfg.kind);
  std::vector<double> out(static_cast<std::size_t>(count) * stride);
  for (int i = 0; i < count; ++i)
    encode_params(make_record(cfg, base + static_cast<std::uint64_t>(i)),
                  out.data() + static_cast<std::size_t>(i) * stride);
  return out;
}

// rows are pure functions of (seed, index), so the result is byte-identical
// for any worker count
std::vector<float> compute_features(const DatasetConfig& cfg, bool held_out, int workers) {
  const int count = held_out ? cfg.test_count() : cfg.train_count();
  const std::uint64_t base = held_out ? kTestStreamOffset : 0;
  std::vector<float> out(static_cast<std::size_t>(count) * 3 * kMarginalPoints);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        const SampleRecord rec = make_record(cfg, base + static_cast<std::uint64_t>(i));
        flatten_row(record_marginals(cfg, rec),
                    out.data() + static_cast<std::size_t>(i) * 3 * kMarginalPoints);
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  const int n_threads = std::max(1, std::min(workers, count));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// removes everything written so far unless the build reached the end
struct PathCleanup {
  std::vector<std::string> paths;
  bool armed = true;

  ~PathCleanup() {
    if (!armed) return;
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

void put_range(Manifest& m, const std::string& key, const Range& r) {
  m.set_double(key + "_lo", r.lo);
  m.set_double(key + "_hi", r.hi);
}

Range get_range(const Manifest& m, const std::string& key) {
  return Range{m.get_double(key + "_lo"), m.get_double(key + "_hi")};
}

Manifest dataset_manifest(const DatasetConfig& cfg) {
  Manifest m;
  m.set_int("format_version", 1);
  m.set("kind", dataset_kind_name(cfg.kind));
  m.set_int("seed", static_cast<long long>(cfg.seed));
  m.set_int("train_plain", cfg.train_plain);
  m.set_int("train_signed", cfg.train_signed);
  m.set_int("train_count", cfg.train_count());
  m.set_int("test_plain", cfg.test_plain);
  m.set_int("test_signed", cfg.test_signed);
  m.set_int("test_count", cfg.test_count());
  m.set_int("marginal_points", kMarginalPoints);
  m.set_int("param_stride", param_stride(cfg.kind));
  m.set_int("image_size", cfg.image_size);

  const Grid1d ga = marginal_grid(cfg, Axis::x1);
  const Grid1d gu = marginal_grid(cfg, Axis::u);
  const Grid1d gj = joint_axis_grid(cfg, cfg.image_size);
  m.set_double("marginal_lo", ga.lo);
  m.set_double("marginal_hi", ga.hi);
  m.set_double("oblique_lo", gu.lo);
  m.set_double("oblique_hi", gu.hi);
  m.set_double("joint_lo", gj.lo);
  m.set_double("joint_hi", gj.hi);

  const ColorMapConfig cm = label_colormap(cfg.kind);
  m.set("colormap", cfg.kind == DatasetKind::wigner ? "wigner" : "cher");
  m.set_double("colormap_zeta0", cm.zeta0);
  m.set_double("colormap_z_offset", cm.z_offset);
  m.set_double("colormap_z_scale", cm.z_scale);

  if (cfg.kind == DatasetKind::wigner) {
    put_range(m, "alpha_re", cfg.field.alpha_re);
    put_range(m, "alpha_im", cfg.field.alpha_im);
    put_range(m, "theta", cfg.field.theta);
    put_range(m, "mu", cfg.field.mu);
    put_range(m, "nbar", cfg.field.nbar);
  } else {
    put_range(m, "m1_loc", cfg.synth.m1_loc);
    put_range(m, "m13_loc", cfg.synth.m13_loc);
    put_range(m, "sigma", cfg.synth.sigma);
    put_range(m, "amp", cfg.synth.amp);
    put_range(m, "lobe_sigma_scale", cfg.synth.lobe_sigma_scale);
    put_range(m, "well_sigma_scale", cfg.synth.well_sigma_scale);
    put_range(m, "lobe_offset", cfg.synth.lobe_offset);
    put_range(m, "well_offset", cfg.synth.well_offset);
    m.set_double("peak_budget", cfg.synth.peak_budget);
    m.set_double("dip_budget", cfg.synth.dip_budget);
    m.set_double("rho_cap", cfg.synth.rho_cap);
    m.set_double("well_rho_scale", cfg.synth.well_rho_scale);
  }
  return m;
}

DatasetConfig config_from_manifest(const Manifest& m) {
  const long long version = m.get_int("format_version");
  if (version != 1)
    throw IoError("unsupported dataset format version " + std::to_string(version));
  DatasetConfig cfg;
  cfg.kind = dataset_kind_from_name(m.get("kind"));
  cfg.seed = static_cast<std::uint64_t>(m.get_int("seed"));
  cfg.train_plain = static_cast<int>(m.get_int("train_plain"));
  cfg.train_signed = static_cast<int>(m.get_int("train_signed"));
  cfg.test_plain = static_cast<int>(m.get_int("test_plain"));
  cfg.test_signed = static_cast<int>(m.get_int("test_signed"));
  cfg.image_size = static_cast<int>(m.get_int("image_size"));
  if (m.get_int("marginal_points") != kMarginalPoints)
    throw IoError("dataset uses " + m.get("marginal_points") + " marginal points, expected " +
                  std::to_string(kMarginalPoints));
  if (cfg.kind == DatasetKind::wigner) {
    cfg.field.alpha_re = get_range(m, "alpha_re");
    cfg.field.alpha_im = get_range(m, "alpha_im");
    cfg.field.theta = get_range(m, "theta");
    cfg.field.mu = get_range(m, "mu");
    cfg.field.nbar = get_range(m, "nbar");
  } else {
    SynthPreset& p = cfg.synth;
    p.window = Grid1d{m.get_double("marginal_lo"), m.get_double("marginal_hi"), kMarginalPoints};
    p.m1_loc = get_range(m, "m1_loc");
    p.m13_loc = get_range(m, "m13_loc");
    p.sigma = get_range(m, "sigma");
    p.amp = get_range(m, "amp");
    p.lobe_sigma_scale = get_range(m, "lobe_sigma_scale");
    p.well_sigma_scale = get_range(m, "well_sigma_scale");
    p.lobe_offset = get_range(m, "lobe_offset");
    p.well_offset = get_range(m, "well_offset");
    p.peak_budget = m.get_double("peak_budget");
    p.dip_budget = m.get_double("dip_budget");
    p.rho_cap = m.get_double("rho_cap");
    p.well_rho_scale = m.get_double("well_rho_scale");
  }
  cfg.validate();
  // the recorded grids must match what this code would regenerate
  const Grid1d ga = marginal_grid(cfg, Axis::x1);
  const Grid1d gu = marginal_grid(cfg, Axis::u);
  if (m.get_double("marginal_lo") != ga.lo || m.get_double("marginal_hi") != ga.hi ||
      m.get_double("oblique_lo") != gu.lo || m.get_double("oblique_hi") != gu.hi)
    throw IoError("dataset marginal windows do not match this build");
  return cfg;
}

}  // namespace

void build_dataset(const DatasetConfig& cfg, const std::string& out_dir, int workers) {
  cfg.validate();
  if (workers == 0) workers = env_worker_count();
  if (workers < 1) throw ConfigError("build_dataset: worker count must be positive");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create dataset directory " + out_dir + ": " + ec.message());

  Manifest m = dataset_manifest(cfg);

  const std::vector<double> train_params = compute_params(cfg, false);
  const std::vector<double> test_params = compute_params(cfg, true);
  const std::vector<float> train_features = compute_features(cfg, false, workers);
  const std::vector<float> test_features = compute_features(cfg, true, workers);

  PathCleanup cleanup;
  auto emit = [&](const char* name, auto&& writer) {
    const std::string path = out_dir + "/" + name;
    cleanup.paths.push_back(path);
    writer(path);
    m.set("sha256_" + std::string(name), sha256_file(path));
  };
  emit("train_features.f32", [&](const std::string& p) { write_f32(p, train_features); });
  emit("test_features.f32", [&](const std::string& p) { write_f32(p, test_features); });
  emit("train_params.f64", [&](const std::string& p) { write_f64(p, train_params); });
  emit("test_params.f64", [&](const std::string& p) { write_f64(p, test_params); });

  const std::string manifest_path = out_dir + "/manifest.txt";
  cleanup.paths.push_back(manifest_path);
  m.save(manifest_path);
  cleanup.armed = false;
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  ds.manifest = Manifest::load(dir + "/manifest.txt");
  ds.cfg = config_from_manifest(ds.manifest);

  auto checked = [&](const char* name) {
    const std::string path = dir + "/" + name;
    const std::string& want = ds.manifest.get("sha256_" + std::string(name));
    const std::string got = sha256_file(path);
    if (got != want) throw IoError("digest mismatch for " + path);
    return path;
  };
  const std::size_t row = 3 * static_cast<std::size_t>(kMarginalPoints);
  const std::size_t stride = static_cast<std::size_t>(param_stride(ds.cfg.kind));
  ds.train_features = read_f32(checked("train_features.f32"), ds.cfg.train_count() * row);
  ds.test_features = read_f32(checked("test_features.f32"), ds.cfg.test_count() * row);
  ds.train_params = read_f64(checked("train_params.f64"), ds.cfg.train_count() * stride);
  ds.test_params = read_f64(checked("test_params.f64"), ds.cfg.test_count() * stride);
  return ds;
}

}  // namespace qj
