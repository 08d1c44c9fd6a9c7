#pragma once

#include <span>
#include <vector>

#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Forward mixing models. The *_into variants write into caller storage of
// size lib.bands and are the forms used inside the sampler's hot loop; the
// value-returning wrappers validate dimensions and allocate.

// s = M a
void linear_mix_into(const SpectralLibrary& lib, std::span<const double> a,
                     std::span<double> out);
std::vector<double> linear_mix(const SpectralLibrary& lib,
                               const AbundanceVector& a);

// (M a) componentwise squared
void quadratic_term_into(const SpectralLibrary& lib, std::span<const double> a,
                         std::span<double> out);
std::vector<double> quadratic_term(const SpectralLibrary& lib,
                                   const AbundanceVector& a);

// M a + b (M a) o (M a)
void ppnm_forward_into(const SpectralLibrary& lib, std::span<const double> a,
                       double b, std::span<double> out);
std::vector<double> ppnm_forward(const SpectralLibrary& lib,
                                 const AbundanceVector& a, double b);

// M a + sum_{i<j} gamma_ij a_i a_j (m_i o m_j) over the active endmembers
// (indices into lib with nonzero declared abundance), gamma ordered
// lexicographically over active pairs i<j. Scene generation only.
std::vector<double> gbm_forward(const SpectralLibrary& lib,
                                const AbundanceVector& a,
                                const std::vector<double>& gamma);

// Adds i.i.d. N(0, sigma2) per band. sigma2 must be > 0.
void add_noise(std::span<double> spectrum, double sigma2, Rng& rng);

}  // namespace unmix
