// Reference implementations of the band-wise kernels. Plain loops, no manual
// reassociation: these define the semantics the SIMD variants are tested
// against.

#include "unmix/kernels.hpp"

namespace unmix::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq_diff_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double residual_sq_ppnm_scalar(const double* y, const double* s, double b,
                               std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (s[i] + b * s[i] * s[i]);
    acc += r * r;
  }
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void ppnm_transform_scalar(const double* s, double b, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i] + b * s[i] * s[i];
}

void square_scalar(const double* s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i] * s[i];
}

double dot_diff_scalar(const double* h, const double* y, const double* s,
                       std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += h[i] * (y[i] - s[i]);
  return acc;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend table = {
      "scalar",          dot_scalar,    sum_sq_diff_scalar,
      residual_sq_ppnm_scalar, axpy_scalar, ppnm_transform_scalar,
      square_scalar,     dot_diff_scalar,
  };
  return table;
}

}  // namespace unmix::kernels
