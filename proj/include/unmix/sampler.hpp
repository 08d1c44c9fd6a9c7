#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "unmix/mrf.hpp"
#include "unmix/priors.hpp"
#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Full parameter state of one Metropolis-within-Gibbs chain: per-class
// abundances (one row per class), per-pixel labels, the shared nonlinearity
// amplitude b, noise variance, and the variance hyperparameter of b's prior.
struct ChainState {
  AbundanceMatrix abundance;  // num_classes x endmembers, rows on the simplex
  LabelMap labels;
  double b = 0.0;
  double sigma2 = 1e-2;
  double sigma_b2 = 1e-2;
};

struct SamplerConfig {
  std::size_t n_mc = 5000;
  std::size_t burn_in = 500;
  int num_classes = 3;
  double eta = 0.2;    // Dirichlet concentration on abundances
  double beta = 1.1;   // Potts granularity
  InverseGammaParams sigma_b2_prior{1.0, 0.01};
  double proposal_scale = 0.005;  // initial random-walk stddev, adapted
  double adapt_target = 0.3;      // acceptance-rate target during burn-in
  std::uint64_t seed = 0;
  SweepOrder label_sweep = SweepOrder::Raster;
  std::size_t init_label_sweeps = 10;
  // Flattens the likelihood (sigma2 -> infinity limit): abundance and label
  // updates see priors only; b is drawn from its prior and sigma2 is frozen.
  // Prior-recovery tests only.
  bool disable_likelihood = false;
};

// Post-burn-in samples plus diagnostics. Iteration-major layouts.
struct PosteriorChain {
  std::size_t num_classes = 0;
  std::size_t endmembers = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t n_mc = 0;
  std::size_t burn_in = 0;

  std::vector<double> abundance_samples;  // stored() * K * R
  std::vector<double> b_samples;          // stored()
  std::vector<double> sigma2_samples;     // stored()
  std::vector<double> sigma_b2_samples;   // stored()
  std::vector<std::uint32_t> label_counts;  // pixels * K, post burn-in

  std::vector<double> log_posterior;          // n_mc, up to a constant
  std::vector<double> acceptance_rate;        // per class, whole run
  std::vector<double> acceptance_rate_post;   // per class, post burn-in
  std::vector<double> proposal_scale_final;   // per class, after adaptation

  std::size_t stored() const { return b_samples.size(); }
};

struct PosteriorEstimates {
  AbundanceMatrix abundance;  // per-class posterior means, renormalized
  double b = 0.0;
  double sigma2 = 0.0;
  double sigma_b2 = 0.0;
  LabelMap labels;  // per-pixel posterior mode
};

// log N(y_p; Ma + b(Ma)o(Ma), sigma2 I), including the normalizing constant.
double pixel_log_likelihood(std::span<const double> y,
                            std::span<const double> a, double b, double sigma2,
                            const SpectralLibrary& lib);

// Log conditional target of one class's abundance vector: the likelihood of
// the pixels currently assigned to the class plus the Dirichlet prior.
// Pixel sums are precomputed at construction so each evaluation is
// O(bands * endmembers) regardless of class size.
class ClassAbundanceTarget {
 public:
  // Likelihood over pixels p with labels.labels[p] == k (1-based).
  ClassAbundanceTarget(const HyperCube& cube, const SpectralLibrary& lib,
                       const LabelMap& labels, int k, double b, double sigma2,
                       double eta);
  // Prior-only target (empty class or disabled likelihood).
  ClassAbundanceTarget(const SpectralLibrary& lib, double eta);

  double operator()(std::span<const double> a) const;
  std::size_t pixel_count() const { return n_pixels_; }

 private:
  const SpectralLibrary* lib_;
  double b_ = 0.0;
  double sigma2_ = 1.0;
  double eta_;
  std::size_t n_pixels_ = 0;
  double sq_sum_ = 0.0;         // sum_p ||y_p||^2
  std::vector<double> y_sum_;   // sum_p y_p
  mutable std::vector<double> fwd_;  // forward-model scratch
};

// One random-walk step: i.i.d. N(0, proposal_scale^2) on the first R-1
// components, last component is the slack 1 - sum. Any negative component
// rejects immediately; otherwise standard Metropolis on the target ratio.
// Mutates a on acceptance, returns whether the proposal was accepted.
bool mh_update_abundance(const ClassAbundanceTarget& target, std::span<double> a,
                         double proposal_scale, Rng& rng);

// Unnormalized log label weights for pixel p: per-class log-likelihood of
// y_p plus beta * #{neighbors of p with that label}.
std::vector<double> label_log_weights(std::size_t p, const ChainState& state,
                                      const HyperCube& cube,
                                      const SpectralLibrary& lib, double beta);

// Categorical draw from the normalized label weights (max-shifted logs).
int sample_label(std::size_t p, const ChainState& state, const HyperCube& cube,
                 const SpectralLibrary& lib, double beta, Rng& rng);

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

// Exact conjugate Gaussian conditional of b given everything else:
//   precision = 1/sigma_b2 + sum_p h_p.h_p / sigma2
//   mean = variance * sum_p h_p.(y_p - M a_{c_p}) / sigma2
// with h_p = (M a_{c_p}) o (M a_{c_p}).
GaussianParams b_conditional_params(const ChainState& state,
                                    const HyperCube& cube,
                                    const SpectralLibrary& lib);
double sample_b(const ChainState& state, const HyperCube& cube,
                const SpectralLibrary& lib, Rng& rng);

// Inverse-Gamma conditional of the noise variance: shape = L*P/2, scale =
// half the total squared residual. A zero residual clamps the scale at
// 1e-300 and warns once.
InverseGammaParams sigma2_conditional_params(const ChainState& state,
                                             const HyperCube& cube,
                                             const SpectralLibrary& lib);
double sample_sigma2(const ChainState& state, const HyperCube& cube,
                     const SpectralLibrary& lib, Rng& rng);

// Inverse-Gamma conditional of sigma_b2: shape = 1/2 + gamma, scale =
// b^2/2 + rho.
double sample_sigma_b2(double b, const InverseGammaParams& prior, Rng& rng);

// One Metropolis-within-Gibbs chain. Each iteration scans pixels, applying a
// Metropolis step to the owning class row per pixel (a class with n_k pixels
// gets n_k steps on its shared abundance vector), then Gibbs-updates labels,
// b, sigma2, and sigma_b2. Proposal scales adapt per class during burn-in
// only, every 50 iterations, x1.1 / x0.9 around adapt_target.
PosteriorChain run_chain(const HyperCube& cube, const SpectralLibrary& lib,
                         const SamplerConfig& config);

PosteriorEstimates posterior_estimates(const PosteriorChain& chain);

}  // namespace unmix
