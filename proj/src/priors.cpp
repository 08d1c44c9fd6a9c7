#include "unmix/priors.hpp"

#include <algorithm>
#include <cmath>

#include "unmix/errors.hpp"

namespace unmix {

double dirichlet_log_pdf(const AbundanceVector& a, double eta) {
  if (!(eta > 0.0)) throw InputError("dirichlet eta must be positive");
  validate_abundance(a);
  return dirichlet_log_pdf_unchecked(a, eta);
}

double dirichlet_log_pdf_unchecked(std::span<const double> a, double eta) {
  const double dim = static_cast<double>(a.size());
  double lp = std::lgamma(eta * dim) - dim * std::lgamma(eta);
  constexpr double kFloor = 1e-12;
  for (double v : a) lp += (eta - 1.0) * std::log(std::max(v, kFloor));
  return lp;
}

AbundanceVector sample_dirichlet(double eta, std::size_t dim, Rng& rng) {
  if (!(eta > 0.0)) throw InputError("dirichlet eta must be positive");
  if (dim == 0) throw InputError("dirichlet dimension must be positive");
  AbundanceVector a(dim);
  double sum = 0.0;
  for (double& v : a) {
    v = rng.gamma(eta);
    sum += v;
  }
  for (double& v : a) v /= sum;
  return a;
}

double sample_inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw InputError("inverse-gamma parameters must be positive");
  return scale / rng.gamma(shape);
}

}  // namespace unmix
