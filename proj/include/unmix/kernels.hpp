#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace unmix::kernels {

// The band-wise inner loops shared by the forward models and the Gibbs
// sampler. The scalar table is the reference semantics; SIMD variants may
// reassociate sums and must stay within rounding distance of it
// (equivalence-tested in tests/test_kernels.cpp).
struct Backend {
  const char* name;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // sum_i (x[i] - y[i])^2
  double (*sum_sq_diff)(const double* x, const double* y, std::size_t n);

  // sum_i (y[i] - s[i] - b*s[i]*s[i])^2
  double (*residual_sq_ppnm)(const double* y, const double* s, double b,
                             std::size_t n);

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // out[i] = s[i] + b * s[i] * s[i]
  void (*ppnm_transform)(const double* s, double b, double* out,
                         std::size_t n);

  // out[i] = s[i] * s[i]
  void (*square)(const double* s, double* out, std::size_t n);

  // sum_i h[i] * (y[i] - s[i])
  double (*dot_diff)(const double* h, const double* y, const double* s,
                     std::size_t n);
};

const Backend& scalar_backend();

// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2+FMA.
const Backend* avx2_backend_if_supported();

// Active backend. Defaults to the best runtime-supported variant.
const Backend& active();

// "scalar", "avx2" or "auto". Returns false (and leaves the selection
// unchanged) if the requested variant is unavailable.
bool select(std::string_view name);

std::vector<const Backend*> available();

}  // namespace unmix::kernels
