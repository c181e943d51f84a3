// SPDX-License-Identifier: Apache-2.0
#include "nlin/common.hpp"

#include <cmath>

namespace nlin {
namespace units {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
double watt_to_dbm(double w) { return linear_to_db(w / 1e-3); }
double ps_nm_km_to_si(double d) { return d * ps / (nm * km); }
double ps_nm_to_si(double d) { return d * ps / nm; }
double ps_sqrt_km_to_si(double p) { return p * ps / std::sqrt(km); }
double db_km_to_field_np_m(double a) { return a * std::log(10.0) / 20.0 / km; }

}  // namespace units

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(splitmix64(a) ^ (b * 0xd6e8feb86659fd93ULL)); }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return mix_seed(mix_seed(a, b), c); }

}  // namespace nlin
