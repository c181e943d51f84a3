// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>

#include "nlin/dsp.hpp"

namespace nlin {

class MissingCalibration : public IoError {
 public:
  using IoError::IoError;
};

// Binary coefficient file, all fields little-endian:
//   char[8] magic "NLINFDE\0", u32 version (1), u32 taps,
//   f64 bin_spacing, f64 sample_rate, f64 delay, f64 band_edge,
//   u64 seed, u32 span, u64 fingerprint,
//   then per bin in DFT order: i32 bin offset index, f64 re/im of w00, w01, w10, w11.
void write_coefficients(std::ostream& os, const FdeCoefficients& c);
FdeCoefficients read_coefficients(std::istream& is);

// One file per (realization seed, span count) in a directory. The
// fingerprint identifies the link/transmitter configuration the coefficients
// were calibrated for; loading with a different fingerprint is an error.
class CoefficientStore {
 public:
  explicit CoefficientStore(std::filesystem::path dir);

  std::filesystem::path path_for(std::uint64_t seed, std::uint32_t span) const;
  bool contains(std::uint64_t seed, std::uint32_t span) const;
  void save(const FdeCoefficients& c) const;
  FdeCoefficients load(std::uint64_t seed, std::uint32_t span, std::uint64_t fingerprint) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace nlin
