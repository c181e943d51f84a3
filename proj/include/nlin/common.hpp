// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlin {

using cplx = std::complex<double>;

// 64-byte aligned storage so FFT plans and AVX2 loads see a fixed alignment.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    std::size_t bytes = (n * sizeof(T) + alignment - 1) / alignment * alignment;
    void* p = std::aligned_alloc(alignment, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
  template <class U>
  bool operator!=(const AlignedAllocator<U>&) const noexcept { return false; }
};

using cvec = std::vector<cplx, AlignedAllocator<cplx>>;
using rvec = std::vector<double, AlignedAllocator<double>>;

// Error categories map onto the CLI exit codes (1 config, 2 numerical, 3 I/O).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class NumericalError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c0 = 299792458.0;  // [m/s]
}  // namespace constants

namespace units {
inline constexpr double km = 1e3;
inline constexpr double nm = 1e-9;
inline constexpr double ps = 1e-12;
inline constexpr double GHz = 1e9;
inline constexpr double THz = 1e12;

double db_to_linear(double db);          // power ratio
double linear_to_db(double ratio);
double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double ps_nm_km_to_si(double d);         // ps/(nm km) -> s/m^2
double ps_nm_to_si(double d);            // ps/nm -> s/m
double ps_sqrt_km_to_si(double p);       // ps/sqrt(km) -> s/sqrt(m)
double db_km_to_field_np_m(double a);    // dB/km (power) -> field attenuation [1/m]
}  // namespace units

// Deterministic seed derivation; every random stream in a run is keyed off
// (realization seed, purpose, indices) so reruns are bit-identical.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace nlin
