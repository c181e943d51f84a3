// SPDX-License-Identifier: Apache-2.0
#include "nlin/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace nlin::fft {
namespace {

struct PlanKey {
  std::size_t n;
  int sign;
  bool in_place;
  bool aligned;
  bool operator<(const PlanKey& o) const {
    return std::tie(n, sign, in_place, aligned) < std::tie(o.n, o.sign, o.in_place, o.aligned);
  }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    // Planner calls are not thread-safe; the mutex also covers fftw_malloc.
    auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * key.n));
    auto* b = key.in_place ? a : static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * key.n));
    unsigned flags = FFTW_ESTIMATE;
    if (!key.aligned) flags |= FFTW_UNALIGNED;
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(key.n), a, b, key.sign, flags);
    if (b != a) fftw_free(b);
    fftw_free(a);
    if (!p) throw NumericalError("fft: planner failed for size " + std::to_string(key.n));
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

bool is_aligned(const void* p) { return (reinterpret_cast<std::uintptr_t>(p) % 64) == 0; }

void run(const cplx* in, cplx* out, std::size_t n, int sign) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  bool aligned = is_aligned(in) && is_aligned(out);
  bool in_place = (in == out);
  fftw_plan p = cache().get({n, sign, in_place, aligned});
  // fftw_execute_dft does not modify the input for out-of-place complex plans
  // created with FFTW_ESTIMATE; the cast is required by the C API only.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const cplx* in, cplx* out, std::size_t n) { run(in, out, n, FFTW_FORWARD); }

void inverse(const cplx* in, cplx* out, std::size_t n) {
  run(in, out, n, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= s;
}

rvec bin_frequencies(std::size_t n, double df) {
  rvec f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = static_cast<double>(bin_index_offset(k, n)) * df;
  return f;
}

}  // namespace nlin::fft
