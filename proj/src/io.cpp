#include "quasijoint/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

namespace qj {

static_assert(std::endian::native == std::endian::little, "array files assume a little-endian host");

void write_f32(const std::string& path, const float* data, std::size_t count) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
  if (!f) throw IoError("short write: " + path);
}

void write_f32(const std::string& path, const std::vector<float>& data) {
  write_f32(path, data.data(), data.size());
}

std::vector<float> read_f32(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw IoError("cannot open: " + path);
  std::streamsize bytes = f.tellg();
  if (bytes % sizeof(float) != 0) throw IoError("file size not a multiple of 4: " + path);
  std::vector<float> v(static_cast<std::size_t>(bytes) / sizeof(float));
  f.seekg(0);
  f.read(reinterpret_cast<char*>(v.data()), bytes);
  if (!f) throw IoError("short read: " + path);
  return v;
}

std::vector<float> read_f32(const std::string& path, std::size_t expect_count) {
  auto v = read_f32(path);
  if (v.size() != expect_count)
    throw IoError("unexpected element count in " + path + ": got " + std::to_string(v.size()) +
                  ", want " + std::to_string(expect_count));
  return v;
}

void write_f64(const std::string& path, const double* data, std::size_t count) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!f) throw IoError("short write: " + path);
}

void write_f64(const std::string& path, const std::vector<double>& data) {
  write_f64(path, data.data(), data.size());
}

std::vector<double> read_f64(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw IoError("cannot open: " + path);
  std::streamsize bytes = f.tellg();
  if (bytes % sizeof(double) != 0) throw IoError("file size not a multiple of 8: " + path);
  std::vector<double> v(static_cast<std::size_t>(bytes) / sizeof(double));
  f.seekg(0);
  f.read(reinterpret_cast<char*>(v.data()), bytes);
  if (!f) throw IoError("short read: " + path);
  return v;
}

std::vector<double> read_f64(const std::string& path, std::size_t expect_count) {
  auto v = read_f64(path);
  if (v.size() != expect_count)
    throw IoError("unexpected element count in " + path + ": got " + std::to_string(v.size()) +
                  ", want " + std::to_string(expect_count));
  return v;
}

namespace {

struct Sha256 {
  std::array<uint32_t, 8> h{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                            0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
  std::array<uint8_t, 64> buf{};
  uint64_t total = 0;
  std::size_t fill = 0;

  static constexpr std::array<uint32_t, 64> K{
      0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu, 0x59f111f1u, 0x923f82a4u,
      0xab1c5ed5u, 0xd807aa98u, 0x12835b01u, 0x243185beu, 0x550c7dc3u, 0x72be5d74u, 0x80deb1feu,
      0x9bdc06a7u, 0xc19bf174u, 0xe49b69c1u, 0xefbe4786u, 0x0fc19dc6u, 0x240ca1ccu, 0x2de92c6fu,
      0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau, 0x983e5152u, 0xa831c66du, 0xb00327c8u, 0xbf597fc7u,
      0xc6e00bf3u, 0xd5a79147u, 0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu,
      0x53380d13u, 0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u, 0xa2bfe8a1u, 0xa81a664bu,
      0xc24b8b70u, 0xc76c51a3u, 0xd192e819u, 0xd6990624u, 0xf40e3585u, 0x106aa070u, 0x19a4c116u,
      0x1e376c08u, 0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au, 0x5b9cca4fu, 0x682e6ff3u,
      0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u, 0x90befffau, 0xa4506cebu, 0xbef9a3f7u,
      0xc67178f2u};

  static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void block(const uint8_t* p) {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
             (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      uint32_t ch = (e & f) ^ (~e & g);
      uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      uint32_t t2 = S0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const void* data, std::size_t n) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    total += n;
    if (fill) {
      std::size_t take = std::min(n, buf.size() - fill);
      std::memcpy(buf.data() + fill, p, take);
      fill += take;
      p += take;
      n -= take;
      if (fill == 64) {
        block(buf.data());
        fill = 0;
      }
    }
    while (n >= 64) {
      block(p);
      p += 64;
      n -= 64;
    }
    if (n) {
      std::memcpy(buf.data(), p, n);
      fill = n;
    }
  }

  std::string finish() {
    uint64_t bits = total * 8;
    uint8_t pad = 0x80;
    update(&pad, 1);
    uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    uint8_t len[8];
    for (int i = 0; i < 8; ++i) len[i] = uint8_t(bits >> (56 - 8 * i));
    update(len, 8);
    static const char* hex = "0123456789abcdef";
    std::string out(64, '0');
    for (int i = 0; i < 8; ++i)
      for (int b = 0; b < 4; ++b) {
        uint8_t byte = uint8_t(h[i] >> (24 - 8 * b));
        out[8 * i + 2 * b] = hex[byte >> 4];
        out[8 * i + 2 * b + 1] = hex[byte & 0xf];
      }
    return out;
  }
};

}  // namespace

std::string sha256_hex(const void* data, std::size_t size) {
  Sha256 s;
  s.update(data, size);
  return s.finish();
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  Sha256 s;
  std::vector<char> chunk(1 << 16);
  while (f) {
    f.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    s.update(chunk.data(), static_cast<std::size_t>(f.gcount()));
  }
  return s.finish();
}

std::string format_double(double v) {
  char tmp[64];
  auto r = std::to_chars(tmp, tmp + sizeof(tmp), v);
  return std::string(tmp, r.ptr);
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Manifest::set_double(const std::string& key, double v) { set(key, format_double(v)); }
void Manifest::set_int(const std::string& key, long long v) { set(key, std::to_string(v)); }

bool Manifest::has(const std::string& key) const {
  for (auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string& Manifest::get(const std::string& key) const {
  for (auto& e : entries_)
    if (e.first == key) return e.second;
  throw IoError("manifest key missing: " + key);
}

double Manifest::get_double(const std::string& key) const {
  const std::string& s = get(key);
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw IoError("manifest value not a number: " + key + " = " + s);
  return v;
}

long long Manifest::get_int(const std::string& key) const {
  const std::string& s = get(key);
  long long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw IoError("manifest value not an integer: " + key + " = " + s);
  return v;
}

std::string Manifest::serialize() const {
  std::string out;
  for (auto& e : entries_) {
    out += e.first;
    out += " = ";
    out += e.second;
    out += '\n';
  }
  return out;
}

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line[0] == '#') continue;
    std::size_t sep = line.find(" = ");
    if (sep == std::string::npos) throw IoError("bad manifest line: " + line);
    m.entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
  }
  return m;
}

void Manifest::save(const std::string& path) const { write_text_file(path, serialize()); }

Manifest Manifest::load(const std::string& path) { return parse(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw IoError("cannot open: " + path);
  std::string s(static_cast<std::size_t>(f.tellg()), '\0');
  f.seekg(0);
  f.read(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw IoError("short read: " + path);
  return s;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("short write: " + path);
}

}  // namespace qj
