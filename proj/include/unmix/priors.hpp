#pragma once

#include <cstddef>
#include <span>

#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

struct InverseGammaParams {
  double shape = 1.0;
  double scale = 0.01;
};

// log of the symmetric Dirichlet(eta) density at a. Components below 1e-12
// are floored there before the log so boundary points with eta < 1 stay
// finite. Throws InputError when a is off the simplex or eta <= 0.
double dirichlet_log_pdf(const AbundanceVector& a, double eta);

// Same density without the simplex check; for sampler-internal points that
// are on the simplex by construction.
double dirichlet_log_pdf_unchecked(std::span<const double> a, double eta);

// R independent Gamma(eta, 1) draws normalized to sum 1.
AbundanceVector sample_dirichlet(double eta, std::size_t dim, Rng& rng);

// 1 / Gamma(shape, rate = scale). Throws InputError on nonpositive
// parameters.
double sample_inverse_gamma(double shape, double scale, Rng& rng);

}  // namespace unmix
