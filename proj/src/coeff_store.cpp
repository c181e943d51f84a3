// SPDX-License-Identifier: Apache-2.0
#include "nlin/coeff_store.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "nlin/fft.hpp"

namespace nlin {

namespace {

constexpr char kMagic[8] = {'N', 'L', 'I', 'N', 'F', 'D', 'E', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}
void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("coefficient file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("coefficient file truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& is) {
  const std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void write_coefficients(std::ostream& os, const FdeCoefficients& c) {
  c.validate();
  os.write(kMagic, 8);
  put_u32(os, kVersion);
  put_u32(os, c.taps);
  put_f64(os, c.bin_spacing);
  put_f64(os, c.sample_rate);
  put_f64(os, c.delay);
  put_f64(os, c.band_edge);
  put_u64(os, c.seed);
  put_u32(os, c.span);
  put_u64(os, c.fingerprint);
  for (std::uint32_t k = 0; k < c.taps; ++k) {
    put_u32(os, static_cast<std::uint32_t>(static_cast<std::int32_t>(fft::bin_index_offset(k, c.taps))));
    for (const auto& v : c.w[k]) {
      put_f64(os, v.real());
      put_f64(os, v.imag());
    }
  }
  if (!os) throw IoError("failed writing coefficient data");
}

FdeCoefficients read_coefficients(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a coefficient file (bad magic)");
  const std::uint32_t version = get_u32(is);
  if (version != kVersion) throw IoError("unsupported coefficient file version " + std::to_string(version));
  FdeCoefficients c;
  c.taps = get_u32(is);
  if (c.taps < 4 || c.taps > (1u << 24)) throw IoError("coefficient file: implausible tap count");
  c.bin_spacing = get_f64(is);
  c.sample_rate = get_f64(is);
  c.delay = get_f64(is);
  c.band_edge = get_f64(is);
  c.seed = get_u64(is);
  c.span = get_u32(is);
  c.fingerprint = get_u64(is);
  c.w.assign(c.taps, {});
  for (std::uint32_t k = 0; k < c.taps; ++k) {
    const auto idx = static_cast<std::int32_t>(get_u32(is));
    if (idx != fft::bin_index_offset(k, c.taps)) throw IoError("coefficient file: bins out of order");
    for (auto& v : c.w[k]) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      v = {re, im};
    }
  }
  c.validate();
  return c;
}

CoefficientStore::CoefficientStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path CoefficientStore::path_for(std::uint64_t seed, std::uint32_t span) const {
  char name[64];
  std::snprintf(name, sizeof name, "fde_%016" PRIx64 "_span%03u.bin", seed, span);
  return dir_ / name;
}

bool CoefficientStore::contains(std::uint64_t seed, std::uint32_t span) const {
  return std::filesystem::exists(path_for(seed, span));
}

void CoefficientStore::save(const FdeCoefficients& c) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create coefficient directory " + dir_.string() + ": " + ec.message());
  const auto path = path_for(c.seed, c.span);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    write_coefficients(os, c);
    os.flush();
    if (!os) throw IoError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
}

FdeCoefficients CoefficientStore::load(std::uint64_t seed, std::uint32_t span, std::uint64_t fingerprint) const {
  const auto path = path_for(seed, span);
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw MissingCalibration("no FDE calibration for seed " + std::to_string(seed) + ", span " + std::to_string(span) +
                             " (expected " + path.string() + "); run `nlinsim calibrate` first");
  FdeCoefficients c = read_coefficients(is);
  if (c.seed != seed || c.span != span) throw IoError(path.string() + ": key does not match file contents");
  if (c.fingerprint != fingerprint)
    throw MissingCalibration(path.string() + " was calibrated for a different configuration; recalibrate");
  return c;
}

}  // namespace nlin
