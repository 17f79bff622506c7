#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quasijoint/errors.hpp"

namespace qj {

// raw little-endian float32 arrays; shapes live in the sidecar manifest
void write_f32(const std::string& path, const float* data, std::size_t count);
void write_f32(const std::string& path, const std::vector<float>& data);
std::vector<float> read_f32(const std::string& path);
std::vector<float> read_f32(const std::string& path, std::size_t expect_count);

// float64 variant for parameter sidecars that must round-trip exactly
void write_f64(const std::string& path, const double* data, std::size_t count);
void write_f64(const std::string& path, const std::vector<double>& data);
std::vector<double> read_f64(const std::string& path);
std::vector<double> read_f64(const std::string& path, std::size_t expect_count);

std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_file(const std::string& path);

// canonical shortest-roundtrip decimal formatting
std::string format_double(double v);

// ordered key = value text block, one entry per line
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double v);
  void set_int(const std::string& key, long long v);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;

  std::string serialize() const;
  static Manifest parse(const std::string& text);

  void save(const std::string& path) const;
  static Manifest load(const std::string& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qj
