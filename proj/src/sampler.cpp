#include "unmix/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "unmix/errors.hpp"
#include "unmix/kernels.hpp"
#include "unmix/model.hpp"

namespace unmix {

namespace {

constexpr std::size_t kAdaptInterval = 50;
constexpr double kAdaptBand = 0.05;

double log_2pi() { return std::log(2.0 * std::numbers::pi); }

// Categorical draw from max-shifted log weights.
int draw_from_log_weights(std::span<const double> logw, Rng& rng) {
  const double shift = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  std::vector<double> w(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) {
    w[k] = std::exp(logw[k] - shift);
    total += w[k];
  }
  if (!(total > 0.0))
    throw std::logic_error("label weights underflowed after max shift");
  double u = rng.uniform01() * total;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    u -= w[k];
    if (u < 0.0) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(w.size());
}

int count_neighbors_with_label(const LabelMap& labels, std::size_t p,
                               int label) {
  const Neighbors nb = neighbors4(p, labels.width, labels.height);
  int count = 0;
  for (std::size_t i = 0; i < nb.count; ++i)
    if (labels.labels[nb.idx[i]] == label) ++count;
  return count;
}

double inverse_gamma_log_pdf(double x, const InverseGammaParams& params) {
  return params.shape * std::log(params.scale) - std::lgamma(params.shape) -
         (params.shape + 1.0) * std::log(x) - params.scale / x;
}

void check_state_dims(const ChainState& state, const HyperCube& cube,
                      const SpectralLibrary& lib) {
  if (cube.bands != lib.bands)
    throw InputError("cube band count does not match library");
  if (state.abundance.cols != lib.endmembers)
    throw InputError("abundance columns do not match library endmembers");
  if (state.labels.pixels() != cube.pixels())
    throw InputError("label map size does not match cube");
  if (!(state.sigma2 > 0.0) || !(state.sigma_b2 > 0.0))
    throw InputError("variances must be positive");
}

}  // namespace

double pixel_log_likelihood(std::span<const double> y,
                            std::span<const double> a, double b, double sigma2,
                            const SpectralLibrary& lib) {
  if (y.size() != lib.bands || a.size() != lib.endmembers)
    throw InputError("pixel_log_likelihood: dimension mismatch");
  if (!(sigma2 > 0.0)) throw InputError("sigma2 must be positive");
  std::vector<double> s(lib.bands);
  linear_mix_into(lib, a, s);
  const double r2 =
      kernels::active().residual_sq_ppnm(y.data(), s.data(), b, lib.bands);
  const double L = static_cast<double>(lib.bands);
  return -0.5 * L * (log_2pi() + std::log(sigma2)) - r2 / (2.0 * sigma2);
}

ClassAbundanceTarget::ClassAbundanceTarget(const HyperCube& cube,
                                           const SpectralLibrary& lib,
                                           const LabelMap& labels, int k,
                                           double b, double sigma2, double eta)
    : lib_(&lib), b_(b), sigma2_(sigma2), eta_(eta), y_sum_(lib.bands, 0.0),
      fwd_(lib.bands) {
  if (cube.bands != lib.bands)
    throw InputError("cube band count does not match library");
  if (labels.pixels() != cube.pixels())
    throw InputError("label map size does not match cube");
  if (!(sigma2 > 0.0)) throw InputError("sigma2 must be positive");
  const auto& kern = kernels::active();
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    if (labels.labels[p] != k) continue;
    const auto y = cube.pixel(p);
    ++n_pixels_;
    sq_sum_ += kern.dot(y.data(), y.data(), lib.bands);
    kern.axpy(1.0, y.data(), y_sum_.data(), lib.bands);
  }
}

ClassAbundanceTarget::ClassAbundanceTarget(const SpectralLibrary& lib,
                                           double eta)
    : lib_(&lib), eta_(eta), fwd_(lib.bands) {}

double ClassAbundanceTarget::operator()(std::span<const double> a) const {
  const double prior = dirichlet_log_pdf_unchecked(a, eta_);
  if (n_pixels_ == 0) return prior;
  const auto& kern = kernels::active();
  ppnm_forward_into(*lib_, a, b_, fwd_);
  // sum_p ||y_p - f||^2 over the class via its first two moments
  const double n = static_cast<double>(n_pixels_);
  double resid = sq_sum_ -
                 2.0 * kern.dot(fwd_.data(), y_sum_.data(), lib_->bands) +
                 n * kern.dot(fwd_.data(), fwd_.data(), lib_->bands);
  resid = std::max(resid, 0.0);
  const double L = static_cast<double>(lib_->bands);
  return -0.5 * n * L * (log_2pi() + std::log(sigma2_)) -
         resid / (2.0 * sigma2_) + prior;
}

namespace {

// One random-walk step reusing the cached log target of the current state;
// cur_logp stays valid as long as the target's conditioning state does.
bool mh_step_cached(const ClassAbundanceTarget& target, std::span<double> a,
                    double proposal_scale, Rng& rng, double& cur_logp,
                    std::vector<double>& cand) {
  const std::size_t dim = a.size();
  cand.assign(a.begin(), a.end());
  double partial = 0.0;
  for (std::size_t r = 0; r + 1 < dim; ++r) {
    cand[r] += proposal_scale * rng.normal();
    partial += cand[r];
  }
  cand[dim - 1] = 1.0 - partial;
  for (double v : cand)
    if (v < 0.0) return false;  // outside the prior support
  const double cand_logp = target(cand);
  if (std::log(rng.uniform_pos()) < cand_logp - cur_logp) {
    std::copy(cand.begin(), cand.end(), a.begin());
    cur_logp = cand_logp;
    return true;
  }
  return false;
}

}  // namespace

bool mh_update_abundance(const ClassAbundanceTarget& target,
                         std::span<double> a, double proposal_scale,
                         Rng& rng) {
  double cur_logp = target(a);
  std::vector<double> cand;
  return mh_step_cached(target, a, proposal_scale, rng, cur_logp, cand);
}

std::vector<double> label_log_weights(std::size_t p, const ChainState& state,
                                      const HyperCube& cube,
                                      const SpectralLibrary& lib,
                                      double beta) {
  check_state_dims(state, cube, lib);
  const std::size_t K = state.abundance.rows;
  std::vector<double> logw(K);
  const auto y = cube.pixel(p);
  for (std::size_t k = 0; k < K; ++k) {
    const int label = static_cast<int>(k) + 1;
    logw[k] =
        pixel_log_likelihood(y, state.abundance.row(k), state.b, state.sigma2,
                             lib) +
        beta * count_neighbors_with_label(state.labels, p, label);
  }
  return logw;
}

int sample_label(std::size_t p, const ChainState& state, const HyperCube& cube,
                 const SpectralLibrary& lib, double beta, Rng& rng) {
  return draw_from_log_weights(label_log_weights(p, state, cube, lib, beta),
                               rng);
}

GaussianParams b_conditional_params(const ChainState& state,
                                    const HyperCube& cube,
                                    const SpectralLibrary& lib) {
  check_state_dims(state, cube, lib);
  const auto& kern = kernels::active();
  const std::size_t K = state.abundance.rows;
  const std::size_t L = lib.bands;

  // Per-class linear mix s_k and its square h_k = s_k o s_k.
  std::vector<double> s(K * L), h(K * L);
  for (std::size_t k = 0; k < K; ++k) {
    linear_mix_into(lib, state.abundance.row(k), {&s[k * L], L});
    kern.square(&s[k * L], &h[k * L], L);
  }
  std::vector<double> hth(K);
  for (std::size_t k = 0; k < K; ++k)
    hth[k] = kern.dot(&h[k * L], &h[k * L], L);

  double quad = 0.0;  // sum_p h_p . h_p
  double lin = 0.0;   // sum_p h_p . (y_p - s_p)
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto k = static_cast<std::size_t>(state.labels.labels[p] - 1);
    quad += hth[k];
    lin += kern.dot_diff(&h[k * L], cube.pixel(p).data(), &s[k * L], L);
  }
  const double precision = 1.0 / state.sigma_b2 + quad / state.sigma2;
  GaussianParams out;
  out.variance = 1.0 / precision;
  out.mean = out.variance * lin / state.sigma2;
  return out;
}

double sample_b(const ChainState& state, const HyperCube& cube,
                const SpectralLibrary& lib, Rng& rng) {
  const GaussianParams g = b_conditional_params(state, cube, lib);
  return rng.normal(g.mean, std::sqrt(g.variance));
}

InverseGammaParams sigma2_conditional_params(const ChainState& state,
                                             const HyperCube& cube,
                                             const SpectralLibrary& lib) {
  check_state_dims(state, cube, lib);
  const auto& kern = kernels::active();
  const std::size_t K = state.abundance.rows;
  const std::size_t L = lib.bands;
  std::vector<double> f(K * L);
  for (std::size_t k = 0; k < K; ++k)
    ppnm_forward_into(lib, state.abundance.row(k), state.b, {&f[k * L], L});
  double total = 0.0;
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto k = static_cast<std::size_t>(state.labels.labels[p] - 1);
    total += kern.sum_sq_diff(cube.pixel(p).data(), &f[k * L], L);
  }
  InverseGammaParams out;
  out.shape = 0.5 * static_cast<double>(L * cube.pixels());
  out.scale = 0.5 * total;
  if (!(out.scale > 0.0)) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::cerr << "warning: zero residual in noise-variance update, "
                   "clamping scale\n";
    out.scale = 1e-300;
  }
  return out;
}

double sample_sigma2(const ChainState& state, const HyperCube& cube,
                     const SpectralLibrary& lib, Rng& rng) {
  const InverseGammaParams ig = sigma2_conditional_params(state, cube, lib);
  return sample_inverse_gamma(ig.shape, ig.scale, rng);
}

double sample_sigma_b2(double b, const InverseGammaParams& prior, Rng& rng) {
  return sample_inverse_gamma(0.5 + prior.shape, 0.5 * b * b + prior.scale,
                              rng);
}

namespace {

void check_config(const HyperCube& cube, const SpectralLibrary& lib,
                  const SamplerConfig& config) {
  validate_cube(cube);
  validate_library(lib);
  if (cube.bands != lib.bands)
    throw InputError("cube band count does not match library");
  if (config.num_classes < 1) throw InputError("need at least one class");
  if (static_cast<std::size_t>(config.num_classes) > cube.pixels())
    throw InputError("more classes than pixels");
  if (config.burn_in >= config.n_mc)
    throw InputError("burn-in must be smaller than total iterations");
  if (!(config.proposal_scale > 0.0))
    throw InputError("proposal scale must be positive");
  if (!(config.adapt_target > 0.0 && config.adapt_target < 1.0))
    throw InputError("acceptance target must lie in (0,1)");
  if (!(config.eta > 0.0)) throw InputError("eta must be positive");
  if (!(config.beta > 0.0)) throw InputError("beta must be positive");
  if (config.num_classes >= 2 && config.init_label_sweeps == 0)
    throw InputError("need at least one initialization sweep");
}

// Mean per-band sample variance of the cube; 1e-2 when degenerate.
double initial_sigma2(const HyperCube& cube) {
  const std::size_t P = cube.pixels();
  if (P < 2) return 1e-2;
  std::vector<double> sum(cube.bands, 0.0), sq(cube.bands, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    const auto y = cube.pixel(p);
    for (std::size_t l = 0; l < cube.bands; ++l) {
      sum[l] += y[l];
      sq[l] += y[l] * y[l];
    }
  }
  double acc = 0.0;
  const double n = static_cast<double>(P);
  for (std::size_t l = 0; l < cube.bands; ++l)
    acc += (sq[l] - sum[l] * sum[l] / n) / (n - 1.0);
  const double v = acc / static_cast<double>(cube.bands);
  return (std::isfinite(v) && v > 0.0) ? v : 1e-2;
}

// Joint log density at the current state, up to an additive constant.
double log_posterior_at(const ChainState& state, const HyperCube& cube,
                        const SpectralLibrary& lib,
                        const SamplerConfig& config,
                        std::span<const double> class_forward) {
  const auto& kern = kernels::active();
  const std::size_t L = lib.bands;
  double lp = 0.0;
  if (!config.disable_likelihood) {
    double total = 0.0;
    for (std::size_t p = 0; p < cube.pixels(); ++p) {
      const auto k = static_cast<std::size_t>(state.labels.labels[p] - 1);
      total += kern.sum_sq_diff(cube.pixel(p).data(),
                                class_forward.data() + k * L, L);
    }
    lp += -0.5 * static_cast<double>(L * cube.pixels()) *
              (log_2pi() + std::log(state.sigma2)) -
          total / (2.0 * state.sigma2);
  }
  for (std::size_t k = 0; k < state.abundance.rows; ++k)
    lp += dirichlet_log_pdf_unchecked(state.abundance.row(k), config.eta);
  if (config.num_classes >= 2) {
    PottsParams potts{config.beta, config.num_classes,
                      Neighborhood::FourPixel};
    lp += potts_log_density(state.labels, potts);
  }
  lp += -0.5 * (log_2pi() + std::log(state.sigma_b2)) -
        state.b * state.b / (2.0 * state.sigma_b2);
  lp += -std::log(state.sigma2);  // Jeffreys
  lp += inverse_gamma_log_pdf(state.sigma_b2, config.sigma_b2_prior);
  return lp;
}

}  // namespace

PosteriorChain run_chain(const HyperCube& cube, const SpectralLibrary& lib,
                         const SamplerConfig& config) {
  check_config(cube, lib, config);
  const std::size_t K = static_cast<std::size_t>(config.num_classes);
  const std::size_t R = lib.endmembers;
  const std::size_t L = lib.bands;
  const std::size_t P = cube.pixels();
  const auto& kern = kernels::active();
  Rng rng(config.seed);

  // Initialization: hyperparameter and b from their priors, abundances from
  // the Dirichlet prior, labels from a short Potts prior simulation, sigma2
  // from the image variance (its Jeffreys prior is improper).
  ChainState state;
  state.sigma_b2 = sample_inverse_gamma(config.sigma_b2_prior.shape,
                                        config.sigma_b2_prior.scale, rng);
  state.b = rng.normal(0.0, std::sqrt(state.sigma_b2));
  state.abundance.rows = K;
  state.abundance.cols = R;
  state.abundance.values.resize(K * R);
  for (std::size_t k = 0; k < K; ++k) {
    const AbundanceVector a = sample_dirichlet(config.eta, R, rng);
    std::copy(a.begin(), a.end(), state.abundance.row(k).begin());
  }
  if (K >= 2) {
    PottsParams potts{config.beta, config.num_classes,
                      Neighborhood::FourPixel};
    state.labels = sample_potts_field(cube.width, cube.height, potts,
                                      config.init_label_sweeps, rng,
                                      config.label_sweep);
  } else {
    state.labels.width = cube.width;
    state.labels.height = cube.height;
    state.labels.labels.assign(P, 1);
  }
  state.sigma2 = initial_sigma2(cube);

  PosteriorChain chain;
  chain.num_classes = K;
  chain.endmembers = R;
  chain.width = cube.width;
  chain.height = cube.height;
  chain.n_mc = config.n_mc;
  chain.burn_in = config.burn_in;
  const std::size_t stored = config.n_mc - config.burn_in;
  chain.abundance_samples.reserve(stored * K * R);
  chain.b_samples.reserve(stored);
  chain.sigma2_samples.reserve(stored);
  chain.sigma_b2_samples.reserve(stored);
  chain.label_counts.assign(P * K, 0);
  chain.log_posterior.reserve(config.n_mc);

  std::vector<double> scale(K, config.proposal_scale);
  std::vector<std::size_t> win_prop(K, 0), win_acc(K, 0);
  std::vector<std::size_t> all_prop(K, 0), all_acc(K, 0);
  std::vector<std::size_t> post_prop(K, 0), post_acc(K, 0);

  std::vector<double> class_forward(K * L);  // g_b(M a_k) per class
  const auto refresh_forward = [&] {
    for (std::size_t k = 0; k < K; ++k)
      ppnm_forward_into(lib, state.abundance.row(k), state.b,
                        {&class_forward[k * L], L});
  };

  std::vector<std::size_t> class_count(K);
  std::vector<double> cand;

  for (std::size_t t = 0; t < config.n_mc; ++t) {
    // Abundances: the per-pixel scan applies one Metropolis step to a_{c_p}
    // for every pixel, so each class row gets as many steps per iteration as
    // it has pixels. Empty classes redraw from the prior (their conditional
    // is the prior).
    std::fill(class_count.begin(), class_count.end(), 0);
    for (std::size_t p = 0; p < P; ++p)
      ++class_count[static_cast<std::size_t>(state.labels.labels[p] - 1)];
    for (std::size_t k = 0; k < K; ++k) {
      if (class_count[k] == 0) {
        const AbundanceVector a = sample_dirichlet(config.eta, R, rng);
        std::copy(a.begin(), a.end(), state.abundance.row(k).begin());
        continue;
      }
      const int label = static_cast<int>(k) + 1;
      std::optional<ClassAbundanceTarget> target;
      if (config.disable_likelihood) {
        target.emplace(lib, config.eta);
      } else {
        target.emplace(cube, lib, state.labels, label, state.b, state.sigma2,
                       config.eta);
      }
      const auto row = state.abundance.row(k);
      double cur_logp = (*target)(row);
      std::size_t accepted = 0;
      for (std::size_t step = 0; step < class_count[k]; ++step)
        if (mh_step_cached(*target, row, scale[k], rng, cur_logp, cand))
          ++accepted;
      win_prop[k] += class_count[k];
      all_prop[k] += class_count[k];
      win_acc[k] += accepted;
      all_acc[k] += accepted;
      if (t >= config.burn_in) {
        post_prop[k] += class_count[k];
        post_acc[k] += accepted;
      }
    }

    // Labels: sequential Gibbs sweep; likelihood term from the per-class
    // forward spectra, Potts term from the evolving label field.
    if (K >= 2) {
      refresh_forward();
      std::vector<double> logw(K);
      const double inv2s2 = config.disable_likelihood
                                ? 0.0
                                : 1.0 / (2.0 * state.sigma2);
      const auto update_pixel = [&](std::size_t p) {
        const auto y = cube.pixel(p);
        for (std::size_t k = 0; k < K; ++k) {
          const double ll =
              config.disable_likelihood
                  ? 0.0
                  : -kern.sum_sq_diff(y.data(), &class_forward[k * L], L) *
                        inv2s2;
          logw[k] = ll + config.beta *
                             count_neighbors_with_label(
                                 state.labels, p, static_cast<int>(k) + 1);
        }
        state.labels.labels[p] = draw_from_log_weights(logw, rng);
      };
      if (config.label_sweep == SweepOrder::Raster) {
        for (std::size_t p = 0; p < P; ++p) update_pixel(p);
      } else {
        for (int color = 0; color < 2; ++color)
          for (std::size_t y = 0; y < cube.height; ++y)
            for (std::size_t x = 0; x < cube.width; ++x)
              if (static_cast<int>((x + y) % 2) == color)
                update_pixel(y * cube.width + x);
      }
    }

    // Scalar conditionals.
    if (config.disable_likelihood) {
      state.b = rng.normal(0.0, std::sqrt(state.sigma_b2));
    } else {
      state.b = sample_b(state, cube, lib, rng);
      state.sigma2 = sample_sigma2(state, cube, lib, rng);
    }
    state.sigma_b2 = sample_sigma_b2(state.b, config.sigma_b2_prior, rng);

    // Proposal adaptation, burn-in only.
    if (t < config.burn_in && (t + 1) % kAdaptInterval == 0) {
      for (std::size_t k = 0; k < K; ++k) {
        if (win_prop[k] == 0) continue;
        const double rate = static_cast<double>(win_acc[k]) /
                            static_cast<double>(win_prop[k]);
        if (rate > config.adapt_target + kAdaptBand)
          scale[k] *= 1.1;
        else if (rate < config.adapt_target - kAdaptBand)
          scale[k] *= 0.9;
        win_prop[k] = win_acc[k] = 0;
      }
    }

    refresh_forward();
    chain.log_posterior.push_back(
        log_posterior_at(state, cube, lib, config, class_forward));

    if (t >= config.burn_in) {
      chain.abundance_samples.insert(chain.abundance_samples.end(),
                                     state.abundance.values.begin(),
                                     state.abundance.values.end());
      chain.b_samples.push_back(state.b);
      chain.sigma2_samples.push_back(state.sigma2);
      chain.sigma_b2_samples.push_back(state.sigma_b2);
      for (std::size_t p = 0; p < P; ++p)
        ++chain.label_counts[p * K +
                             static_cast<std::size_t>(state.labels.labels[p] -
                                                      1)];
    }
  }

  const auto rates = [&](const std::vector<std::size_t>& acc,
                         const std::vector<std::size_t>& prop) {
    std::vector<double> out(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
      if (prop[k] > 0)
        out[k] = static_cast<double>(acc[k]) / static_cast<double>(prop[k]);
    return out;
  };
  chain.acceptance_rate = rates(all_acc, all_prop);
  chain.acceptance_rate_post = rates(post_acc, post_prop);
  chain.proposal_scale_final = scale;
  return chain;
}

PosteriorEstimates posterior_estimates(const PosteriorChain& chain) {
  const std::size_t n = chain.stored();
  if (n == 0) throw InputError("posterior chain holds no samples");
  const std::size_t K = chain.num_classes;
  const std::size_t R = chain.endmembers;
  const std::size_t P = chain.width * chain.height;

  PosteriorEstimates est;
  est.abundance.rows = K;
  est.abundance.cols = R;
  est.abundance.values.assign(K * R, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < K * R; ++j)
      est.abundance.values[j] += chain.abundance_samples[i * K * R + j];
  for (double& v : est.abundance.values) v /= static_cast<double>(n);
  // Means of simplex points lie on the simplex; renormalize away the
  // accumulation drift.
  for (std::size_t k = 0; k < K; ++k) {
    auto row = est.abundance.row(k);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum > 0.0)
      for (double& v : row) v /= sum;
  }

  const auto mean = [n](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(n);
  };
  est.b = mean(chain.b_samples);
  est.sigma2 = mean(chain.sigma2_samples);
  est.sigma_b2 = mean(chain.sigma_b2_samples);

  est.labels.width = chain.width;
  est.labels.height = chain.height;
  est.labels.labels.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
      if (chain.label_counts[p * K + k] > chain.label_counts[p * K + best])
        best = k;
    est.labels.labels[p] = static_cast<int>(best) + 1;
  }
  return est;
}

}  // namespace unmix
