#include "unmix/model.hpp"

#include <algorithm>
#include <cmath>

#include "unmix/errors.hpp"
#include "unmix/kernels.hpp"

namespace unmix {

namespace {

void check_dims(const SpectralLibrary& lib, std::size_t a_len) {
  if (a_len != lib.endmembers)
    throw InputError("abundance length does not match library endmembers");
}

}  // namespace

void linear_mix_into(const SpectralLibrary& lib, std::span<const double> a,
                     std::span<double> out) {
  const auto& k = kernels::active();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < lib.endmembers; ++r)
    k.axpy(a[r], lib.column(r).data(), out.data(), lib.bands);
}

std::vector<double> linear_mix(const SpectralLibrary& lib,
                               const AbundanceVector& a) {
  check_dims(lib, a.size());
  std::vector<double> out(lib.bands);
  linear_mix_into(lib, a, out);
  return out;
}

void quadratic_term_into(const SpectralLibrary& lib, std::span<const double> a,
                         std::span<double> out) {
  linear_mix_into(lib, a, out);
  kernels::active().square(out.data(), out.data(), lib.bands);
}

std::vector<double> quadratic_term(const SpectralLibrary& lib,
                                   const AbundanceVector& a) {
  check_dims(lib, a.size());
  std::vector<double> out(lib.bands);
  quadratic_term_into(lib, a, out);
  return out;
}

void ppnm_forward_into(const SpectralLibrary& lib, std::span<const double> a,
                       double b, std::span<double> out) {
  linear_mix_into(lib, a, out);
  kernels::active().ppnm_transform(out.data(), b, out.data(), lib.bands);
}

std::vector<double> ppnm_forward(const SpectralLibrary& lib,
                                 const AbundanceVector& a, double b) {
  check_dims(lib, a.size());
  std::vector<double> out(lib.bands);
  ppnm_forward_into(lib, a, b, out);
  return out;
}

std::vector<double> gbm_forward(const SpectralLibrary& lib,
                                const AbundanceVector& a,
                                const std::vector<double>& gamma) {
  check_dims(lib, a.size());
  std::vector<std::size_t> active;
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r] != 0.0) active.push_back(r);
  const std::size_t n_pairs = active.size() * (active.size() - 1) / 2;
  if (gamma.size() != n_pairs)
    throw InputError("gamma length does not match active endmember pairs");

  std::vector<double> out(lib.bands, 0.0);
  linear_mix_into(lib, a, out);
  std::size_t g = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i + 1; j < active.size(); ++j, ++g) {
      const double w = gamma[g] * a[active[i]] * a[active[j]];
      const double* mi = lib.column(active[i]).data();
      const double* mj = lib.column(active[j]).data();
      for (std::size_t l = 0; l < lib.bands; ++l) out[l] += w * mi[l] * mj[l];
    }
  }
  return out;
}

void add_noise(std::span<double> spectrum, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw InputError("noise variance must be positive");
  const double sd = std::sqrt(sigma2);
  for (double& v : spectrum) v += sd * rng.normal();
}

}  // namespace unmix
