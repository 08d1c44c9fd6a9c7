#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "unmix/errors.hpp"
#include "unmix/model.hpp"
#include "unmix/priors.hpp"
#include "unmix/sampler.hpp"
#include "unmix/synth.hpp"

using namespace unmix;
using testutil::library_from;

namespace {

HyperCube cube_from(std::size_t w, std::size_t h, std::size_t bands,
                    std::vector<double> data) {
  HyperCube c;
  c.width = w;
  c.height = h;
  c.bands = bands;
  c.data = std::move(data);
  return c;
}

LabelMap labels_from(std::size_t w, std::size_t h, std::vector<int> labels) {
  LabelMap m;
  m.width = w;
  m.height = h;
  m.labels = std::move(labels);
  return m;
}

AbundanceMatrix matrix_from(std::size_t rows, std::size_t cols,
                            std::vector<double> values) {
  AbundanceMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values = std::move(values);
  return m;
}

}  // namespace

TEST_CASE("pixel log likelihood") {
  const auto lib = make_synthetic_library(16, 3, 2);
  const AbundanceVector a = {0.5, 0.2, 0.3};
  const double b = 0.07, sigma2 = 0.004;
  const auto f = ppnm_forward(lib, a, b);

  // Zero residual: only the Gaussian normalizer remains.
  const double l0 = pixel_log_likelihood(f, a, b, sigma2, lib);
  const double want0 =
      -0.5 * 16.0 * std::log(2.0 * std::numbers::pi * sigma2);
  CHECK(l0 == doctest::Approx(want0).epsilon(1e-14));

  // Doubling the residual scales the quadratic term by 4.
  std::vector<double> y1(f), y2(f);
  for (std::size_t l = 0; l < 16; ++l) {
    const double r = 0.01 * (static_cast<double>(l % 3) - 1.0);
    y1[l] += r;
    y2[l] += 2.0 * r;
  }
  const double d1 = l0 - pixel_log_likelihood(y1, a, b, sigma2, lib);
  const double d2 = l0 - pixel_log_likelihood(y2, a, b, sigma2, lib);
  CHECK(d2 == doctest::Approx(4.0 * d1).epsilon(1e-10));

  // Bandwise agreement with an independent normal pdf.
  boost::math::normal_distribution<double> n(0.0, std::sqrt(sigma2));
  double want = 0.0;
  for (std::size_t l = 0; l < 16; ++l)
    want += std::log(boost::math::pdf(n, y1[l] - f[l]));
  CHECK(pixel_log_likelihood(y1, a, b, sigma2, lib) ==
        doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("class abundance target") {
  const auto lib = make_synthetic_library(8, 2, 4);

  SUBCASE("empty class reduces to the prior") {
    const ClassAbundanceTarget prior_only(lib, 0.2);
    const auto labels = labels_from(2, 1, {2, 2});
    const auto cube = cube_from(2, 1, 8, std::vector<double>(16, 0.3));
    const ClassAbundanceTarget empty(cube, lib, labels, 1, 0.1, 0.01, 0.2);
    CHECK(empty.pixel_count() == 0);
    for (double x : {0.1, 0.45, 0.8}) {
      const AbundanceVector a = {x, 1.0 - x};
      const double want = dirichlet_log_pdf_unchecked(a, 0.2);
      CHECK(prior_only(a) == want);
      CHECK(empty(a) == want);
    }
  }

  SUBCASE("flat likelihood leaves the prior argmax") {
    // sigma2 so large the likelihood is constant over the grid; with
    // eta = 3 the prior peaks at the barycenter.
    const auto cube = cube_from(1, 1, 8, std::vector<double>(8, 0.4));
    const auto labels = labels_from(1, 1, {1});
    const ClassAbundanceTarget t(cube, lib, labels, 1, 0.0, 1e12, 3.0);
    double best_x = -1.0, best_v = -1e300;
    for (int i = 1; i < 1000; ++i) {
      const double x = static_cast<double>(i) / 1000.0;
      const AbundanceVector a = {x, 1.0 - x};
      if (t(a) > best_v) {
        best_v = t(a);
        best_x = x;
      }
    }
    CHECK(best_x == doctest::Approx(0.5).epsilon(0.002));
  }

  SUBCASE("matches the direct likelihood-plus-prior sum") {
    // Three pixels of one class; the moment form must equal the naive
    // per-pixel sum for every grid point.
    const auto labels = labels_from(3, 1, {1, 1, 1});
    Rng rng(31);
    std::vector<double> data;
    for (int p = 0; p < 3; ++p) {
      auto y = ppnm_forward(lib, {0.6, 0.4}, 0.05);
      add_noise(y, 0.01, rng);
      data.insert(data.end(), y.begin(), y.end());
    }
    const auto cube = cube_from(3, 1, 8, data);
    const double b = 0.05, sigma2 = 0.01, eta = 0.4;
    const ClassAbundanceTarget t(cube, lib, labels, 1, b, sigma2, eta);
    CHECK(t.pixel_count() == 3);
    for (int i = 0; i <= 10'000; ++i) {
      const double x = static_cast<double>(i) / 10'000.0;
      const AbundanceVector a = {x, 1.0 - x};
      double direct = dirichlet_log_pdf_unchecked(a, eta);
      for (std::size_t p = 0; p < 3; ++p)
        direct += pixel_log_likelihood(cube.pixel(p), a, b, sigma2, lib);
      CHECK(t(a) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("metropolis abundance step") {
  const auto lib = make_synthetic_library(8, 2, 4);
  const ClassAbundanceTarget prior(lib, 1.0);

  SUBCASE("zero-move limit accepts") {
    Rng rng(1);
    AbundanceVector a = {0.5, 0.5};
    int accepted = 0;
    for (int i = 0; i < 1000; ++i)
      if (mh_update_abundance(prior, a, 1e-14, rng)) ++accepted;
    CHECK(accepted >= 999);
  }

  SUBCASE("rejected proposals leave the state untouched") {
    Rng rng(2);
    AbundanceVector a = {0.3, 0.7};
    const AbundanceVector before = a;
    int rejected = 0;
    for (int i = 0; i < 200; ++i) {
      // Huge steps leave the simplex almost surely.
      if (!mh_update_abundance(prior, a, 50.0, rng)) {
        ++rejected;
        CHECK(a == before);
        break;
      }
      if (a != before) break;
    }
    CHECK(rejected >= 1);
  }

  SUBCASE("chain matches the grid density of its target") {
    // One pixel, two endmembers: the free coordinate is scalar, so the
    // stationary law has a brute-force grid oracle.
    const auto labels = labels_from(1, 1, {1});
    auto y = ppnm_forward(lib, {0.55, 0.45}, 0.1);
    const auto cube = cube_from(1, 1, 8, y);
    const double sigma2 = 0.02;  // loose enough to mix quickly
    const ClassAbundanceTarget t(cube, lib, labels, 1, 0.1, sigma2, 0.7);

    const std::size_t n_grid = 2000;
    std::vector<double> grid(n_grid), logd(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / n_grid;
      grid[i] = x;
      logd[i] = t(AbundanceVector{x, 1.0 - x});
    }
    const auto cdf = testutil::grid_cdf_from_log_density(logd);

    Rng rng(77);
    AbundanceVector a = {0.5, 0.5};
    std::vector<double> samples;
    samples.reserve(100'000);
    for (int i = 0; i < 100'000; ++i) {
      mh_update_abundance(t, a, 0.15, rng);
      samples.push_back(a[0]);
    }
    CHECK(testutil::sup_cdf_distance_grid(samples, grid, cdf) < 0.02);
  }
}

TEST_CASE("label conditional") {
  const auto lib = make_synthetic_library(8, 2, 4);

  SUBCASE("identical rows reduce to the pure spatial conditional") {
    // All classes share one abundance row, so likelihoods cancel and the
    // center pixel of a uniform 3x3 field sees the closed-form weight.
    ChainState state;
    state.abundance = matrix_from(3, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    state.labels = labels_from(3, 3, std::vector<int>(9, 1));
    state.b = 0.0;
    state.sigma2 = 0.01;
    const auto cube =
        cube_from(3, 3, 8, [&] {
          std::vector<double> d;
          const auto f = ppnm_forward(lib, {0.5, 0.5}, 0.0);
          for (int p = 0; p < 9; ++p) d.insert(d.end(), f.begin(), f.end());
          return d;
        }());
    const auto logw = label_log_weights(4, state, cube, lib, 1.1);
    std::vector<double> w(logw.size());
    const double lse = testutil::logsumexp(logw);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(logw[k] - lse);
    CHECK(w[0] == doctest::Approx(0.976033802499654733778).epsilon(1e-9));

    // Empirical frequencies match within 3 sigma.
    Rng rng(5);
    int hits = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i)
      if (sample_label(4, state, cube, lib, 1.1, rng) == 1) ++hits;
    const double p = w[0];
    CHECK(std::abs(hits / static_cast<double>(n) - p) <
          3.0 * std::sqrt(p * (1 - p) / n));
  }

  SUBCASE("frequencies follow the likelihood-weighted conditional") {
    ChainState state;
    state.abundance = matrix_from(2, 2, {0.8, 0.2, 0.3, 0.7});
    state.labels = labels_from(2, 2, {1, 2, 2, 1});
    state.b = 0.05;
    state.sigma2 = 0.05;
    Rng noise(9);
    auto y0 = ppnm_forward(lib, {0.8, 0.2}, 0.05);
    add_noise(y0, 0.01, noise);
    std::vector<double> data;
    for (int p = 0; p < 4; ++p) data.insert(data.end(), y0.begin(), y0.end());
    const auto cube = cube_from(2, 2, 8, data);

    const auto logw = label_log_weights(0, state, cube, lib, 1.1);
    const double lse = testutil::logsumexp(logw);
    Rng rng(13);
    const int n = 100'000;
    std::vector<int> hits(2, 0);
    for (int i = 0; i < n; ++i)
      ++hits[static_cast<std::size_t>(sample_label(0, state, cube, lib, 1.1, rng) - 1)];
    for (std::size_t k = 0; k < 2; ++k) {
      const double p = std::exp(logw[k] - lse);
      CHECK(std::abs(hits[k] / static_cast<double>(n) - p) <
            3.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
  }

  SUBCASE("gibbs marginals match exhaustive enumeration") {
    // 4x4 binary labels: 65536 joint configurations are summed exactly;
    // the label sweep's empirical marginals must agree.
    const std::size_t W = 4, H = 4, P = 16, L = 8;
    const double beta = 0.8, sigma2 = 0.05, b = 0.0;
    ChainState state;
    state.abundance = matrix_from(2, 2, {0.75, 0.25, 0.25, 0.75});
    state.b = b;
    state.sigma2 = sigma2;

    Rng gen(21);
    std::vector<double> data;
    for (std::size_t p = 0; p < P; ++p) {
      auto y = ppnm_forward(lib, p % 3 == 0 ? AbundanceVector{0.75, 0.25}
                                            : AbundanceVector{0.25, 0.75},
                            b);
      add_noise(y, sigma2, gen);
      data.insert(data.end(), y.begin(), y.end());
    }
    const auto cube = cube_from(W, H, L, data);

    // Per-pixel class log likelihoods, reused across all configurations.
    std::vector<double> ll(P * 2);
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t k = 0; k < 2; ++k)
        ll[p * 2 + k] = pixel_log_likelihood(
            cube.pixel(p), state.abundance.row(k), b, sigma2, lib);

    std::vector<double> joint(1u << P);
    for (std::uint32_t cfg = 0; cfg < (1u << P); ++cfg) {
      double lp = 0.0;
      for (std::size_t p = 0; p < P; ++p)
        lp += ll[p * 2 + ((cfg >> p) & 1u)];
      for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
          const std::size_t p = y * W + x;
          if (x + 1 < W && ((cfg >> p) & 1u) == ((cfg >> (p + 1)) & 1u))
            lp += beta;
          if (y + 1 < H && ((cfg >> p) & 1u) == ((cfg >> (p + W)) & 1u))
            lp += beta;
        }
      }
      joint[cfg] = lp;
    }
    const double lse = testutil::logsumexp(joint);
    std::vector<double> exact(P, 0.0);  // P(c_p = 2)
    for (std::uint32_t cfg = 0; cfg < (1u << P); ++cfg) {
      const double w = std::exp(joint[cfg] - lse);
      for (std::size_t p = 0; p < P; ++p)
        if ((cfg >> p) & 1u) exact[p] += w;
    }

    state.labels = labels_from(W, H, std::vector<int>(P, 1));
    Rng rng(3);
    const int sweeps = 80'000;
    std::vector<double> freq(P, 0.0);
    for (int s = 0; s < sweeps; ++s) {
      for (std::size_t p = 0; p < P; ++p)
        state.labels.labels[p] =
            sample_label(p, state, cube, lib, beta, rng);
      for (std::size_t p = 0; p < P; ++p)
        if (state.labels.labels[p] == 2) freq[p] += 1.0;
    }
    for (std::size_t p = 0; p < P; ++p)
      CHECK(std::abs(freq[p] / sweeps - exact[p]) < 0.02);
  }
}

TEST_CASE("nonlinearity amplitude conditional") {
  const auto lib = make_synthetic_library(12, 3, 8);

  SUBCASE("noiseless data recovers the generating amplitude") {
    const double b_true = 0.12;
    ChainState state;
    state.abundance = matrix_from(1, 3, {0.5, 0.3, 0.2});
    state.labels = labels_from(4, 1, std::vector<int>(4, 1));
    state.sigma2 = 1e-4;
    state.sigma_b2 = 1e6;
    const auto f = ppnm_forward(lib, {0.5, 0.3, 0.2}, b_true);
    std::vector<double> data;
    for (int p = 0; p < 4; ++p) data.insert(data.end(), f.begin(), f.end());
    const auto cube = cube_from(4, 1, 12, data);
    const auto g = b_conditional_params(state, cube, lib);
    CHECK(g.mean == doctest::Approx(b_true).epsilon(1e-6));
    CHECK(g.variance > 0.0);
  }

  SUBCASE("zero linear mix falls back to the prior") {
    // One endmember column of zeros: h = (Ma)^2 = 0, so the likelihood
    // carries no information about b.
    auto zlib = library_from(4, 2, {0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 0.5});
    ChainState state;
    state.abundance = matrix_from(1, 2, {1.0, 0.0});
    state.labels = labels_from(1, 1, {1});
    state.sigma2 = 0.01;
    state.sigma_b2 = 0.25;
    const auto cube = cube_from(1, 1, 4, {0.1, 0.2, 0.3, 0.4});
    const auto g = b_conditional_params(state, cube, zlib);
    CHECK(g.mean == 0.0);
    CHECK(g.variance == doctest::Approx(0.25).epsilon(1e-14));
  }

  SUBCASE("sampled draws follow the conditional normal") {
    ChainState state;
    state.abundance = matrix_from(1, 3, {0.4, 0.35, 0.25});
    state.labels = labels_from(3, 1, {1, 1, 1});
    state.sigma2 = 0.01;
    state.sigma_b2 = 0.04;
    Rng gen(2);
    std::vector<double> data;
    for (int p = 0; p < 3; ++p) {
      auto y = ppnm_forward(lib, {0.4, 0.35, 0.25}, 0.08);
      add_noise(y, 0.01, gen);
      data.insert(data.end(), y.begin(), y.end());
    }
    const auto cube = cube_from(3, 1, 12, data);
    const auto g = b_conditional_params(state, cube, lib);
    boost::math::normal_distribution<double> ref(g.mean,
                                                 std::sqrt(g.variance));
    Rng rng(4);
    std::vector<double> draws;
    draws.reserve(100'000);
    for (int i = 0; i < 100'000; ++i)
      draws.push_back(sample_b(state, cube, lib, rng));
    const double d = testutil::sup_cdf_distance(
        draws, [&](double x) { return boost::math::cdf(ref, x); });
    CHECK(d < 0.01);
  }
}

TEST_CASE("noise variance conditional") {
  const auto lib = make_synthetic_library(8, 2, 4);
  ChainState state;
  state.abundance = matrix_from(2, 2, {0.7, 0.3, 0.2, 0.8});
  state.labels = labels_from(2, 2, {1, 2, 1, 2});
  state.b = 0.05;

  Rng gen(6);
  std::vector<double> data;
  for (std::size_t p = 0; p < 4; ++p) {
    auto y = ppnm_forward(
        lib, p % 2 == 0 ? AbundanceVector{0.7, 0.3} : AbundanceVector{0.2, 0.8},
        0.05);
    add_noise(y, 0.002, gen);
    data.insert(data.end(), y.begin(), y.end());
  }
  const auto cube = cube_from(2, 2, 8, data);

  SUBCASE("parameters match the hand-computed residual") {
    const auto ig = sigma2_conditional_params(state, cube, lib);
    CHECK(ig.shape == 0.5 * 8 * 4);
    double total = 0.0;
    for (std::size_t p = 0; p < 4; ++p) {
      const auto f = ppnm_forward(
          lib,
          p % 2 == 0 ? AbundanceVector{0.7, 0.3} : AbundanceVector{0.2, 0.8},
          0.05);
      for (std::size_t l = 0; l < 8; ++l) {
        const double r = cube.pixel(p)[l] - f[l];
        total += r * r;
      }
    }
    CHECK(ig.scale == doctest::Approx(0.5 * total).epsilon(1e-12));
  }

  SUBCASE("sampling equals the generic inverse-gamma draw") {
    const auto ig = sigma2_conditional_params(state, cube, lib);
    Rng r1(10), r2(10);
    CHECK(sample_sigma2(state, cube, lib, r1) ==
          sample_inverse_gamma(ig.shape, ig.scale, r2));
    // The conditional concentrates near the mean scale/(shape-1).
    Rng r3(11);
    std::vector<double> draws;
    draws.reserve(300'000);
    for (int i = 0; i < 300'000; ++i)
      draws.push_back(sample_sigma2(state, cube, lib, r3));
    CHECK(testutil::mean(draws) ==
          doctest::Approx(ig.scale / (ig.shape - 1.0)).epsilon(0.02));
  }

  SUBCASE("zero residual clamps instead of degenerating") {
    HyperCube exact = cube;
    for (std::size_t p = 0; p < 4; ++p) {
      const auto f = ppnm_forward(
          lib,
          p % 2 == 0 ? AbundanceVector{0.7, 0.3} : AbundanceVector{0.2, 0.8},
          0.05);
      std::copy(f.begin(), f.end(), exact.pixel(p).begin());
    }
    const auto ig = sigma2_conditional_params(state, exact, lib);
    CHECK(ig.scale == 1e-300);
    Rng rng(1);
    const double v = sample_inverse_gamma(ig.shape, ig.scale, rng);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("prior variance of the amplitude") {
  const InverseGammaParams prior{1.0, 0.01};

  // Equals the generic draw with shape 1/2 + gamma, scale b^2/2 + rho.
  Rng r1(3), r2(3);
  CHECK(sample_sigma_b2(0.3, prior, r1) ==
        sample_inverse_gamma(1.5, 0.5 * 0.09 + 0.01, r2));

  // Monotone in |b| under matched randomness.
  Rng r3(4), r4(4);
  CHECK(sample_sigma_b2(0.8, prior, r3) > sample_sigma_b2(0.1, prior, r4));

  boost::math::inverse_gamma_distribution<double> ref(1.5, 0.5 * 0.04 + 0.01);
  Rng rng(8);
  std::vector<double> draws;
  draws.reserve(100'000);
  for (int i = 0; i < 100'000; ++i)
    draws.push_back(sample_sigma_b2(0.2, prior, rng));
  const double d = testutil::sup_cdf_distance(
      draws, [&](double x) { return boost::math::cdf(ref, x); });
  CHECK(d < 0.01);
}

TEST_CASE("full chain") {
  SUBCASE("single-class linear scene is recovered") {
    const auto lib = make_synthetic_library(32, 3, 5);
    const AbundanceVector truth = {0.55, 0.3, 0.15};
    Rng gen(12);
    std::vector<double> data;
    for (int p = 0; p < 100; ++p) {
      auto y = linear_mix(lib, truth);
      add_noise(y, 0.001, gen);
      data.insert(data.end(), y.begin(), y.end());
    }
    const auto cube = cube_from(10, 10, 32, data);

    SamplerConfig config;
    config.n_mc = 600;
    config.burn_in = 100;
    config.num_classes = 1;
    config.seed = 1;
    const auto chain = run_chain(cube, lib, config);
    const auto est = posterior_estimates(chain);
    for (std::size_t r = 0; r < 3; ++r)
      CHECK(std::abs(est.abundance.at(0, r) - truth[r]) < 0.02);
    CHECK(std::abs(est.b) < 0.05);
    CHECK(est.sigma2 == doctest::Approx(0.001).epsilon(0.5));
    for (int lab : est.labels.labels) CHECK(lab == 1);
  }

  SUBCASE("reruns are bit identical") {
    const auto lib = make_synthetic_library(16, 3, 9);
    SceneSpec spec = preset_scene("paper-i3");
    spec.width = 6;
    spec.height = 6;
    spec.class_abundances = {{0.6, 0.1, 0.3}, {0.1, 0.3, 0.6}, {0.3, 0.4, 0.3}};
    spec.seed = 2;
    const auto gt = generate_scene(spec, lib);

    SamplerConfig config;
    config.n_mc = 120;
    config.burn_in = 20;
    config.seed = 42;
    const auto c1 = run_chain(gt.noisy_cube, lib, config);
    const auto c2 = run_chain(gt.noisy_cube, lib, config);
    CHECK(c1.abundance_samples == c2.abundance_samples);
    CHECK(c1.b_samples == c2.b_samples);
    CHECK(c1.sigma2_samples == c2.sigma2_samples);
    CHECK(c1.sigma_b2_samples == c2.sigma_b2_samples);
    CHECK(c1.label_counts == c2.label_counts);
    CHECK(c1.log_posterior == c2.log_posterior);

    // Stored state invariants: simplex rows, positive variances.
    const std::size_t R = c1.endmembers;
    for (std::size_t i = 0; i < c1.abundance_samples.size(); i += R) {
      double sum = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = c1.abundance_samples[i + r];
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (double v : c1.sigma2_samples) CHECK(v > 0.0);
    for (double v : c1.sigma_b2_samples) CHECK(v > 0.0);
    CHECK(c1.stored() == 100);
    CHECK(c1.log_posterior.size() == 120);
  }

  SUBCASE("more classes than occupied survives") {
    const auto lib = make_synthetic_library(8, 2, 1);
    Rng gen(3);
    std::vector<double> data;
    for (int p = 0; p < 4; ++p) {
      auto y = linear_mix(lib, {0.5, 0.5});
      add_noise(y, 0.01, gen);
      data.insert(data.end(), y.begin(), y.end());
    }
    const auto cube = cube_from(2, 2, 8, data);
    SamplerConfig config;
    config.n_mc = 60;
    config.burn_in = 10;
    config.num_classes = 3;  // only 4 pixels, classes will starve
    config.seed = 7;
    const auto chain = run_chain(cube, lib, config);
    CHECK(chain.stored() == 50);
    const auto est = posterior_estimates(chain);
    CHECK(est.abundance.rows == 3);
  }

  SUBCASE("disabled likelihood recovers the prior") {
    // Detailed-balance smoke: with the likelihood off, stored abundances
    // must follow Dirichlet(eta); the first component is Beta(eta, 2 eta).
    const auto lib = make_synthetic_library(8, 3, 2);
    const auto cube = cube_from(6, 6, 8, std::vector<double>(6 * 6 * 8, 0.2));
    SamplerConfig config;
    config.n_mc = 20'500;
    config.burn_in = 500;
    config.num_classes = 2;
    config.eta = 0.6;
    config.proposal_scale = 0.15;
    config.seed = 5;
    config.disable_likelihood = true;
    const auto chain = run_chain(cube, lib, config);

    // sigma2 never moves when the likelihood is off.
    for (double v : chain.sigma2_samples)
      CHECK(v == chain.sigma2_samples.front());

    boost::math::beta_distribution<double> ref(0.6, 1.2);
    const std::size_t R = chain.endmembers;
    const std::size_t KR = chain.num_classes * R;
    for (std::size_t k = 0; k < chain.num_classes; ++k) {
      std::vector<double> first;
      first.reserve(chain.stored());
      for (std::size_t i = 0; i < chain.stored(); ++i)
        first.push_back(chain.abundance_samples[i * KR + k * R]);
      const double d = testutil::sup_cdf_distance(
          first, [&](double x) { return boost::math::cdf(ref, x); });
      CHECK(d < 0.03);
    }
  }
}

TEST_CASE("posterior estimates") {
  PosteriorChain chain;
  chain.num_classes = 2;
  chain.endmembers = 2;
  chain.width = 2;
  chain.height = 1;
  chain.n_mc = 4;
  chain.burn_in = 2;
  chain.abundance_samples = {0.6, 0.4, 0.1, 0.9,   // iteration 1
                             0.8, 0.2, 0.3, 0.7};  // iteration 2
  chain.b_samples = {0.1, 0.3};
  chain.sigma2_samples = {0.002, 0.004};
  chain.sigma_b2_samples = {0.01, 0.03};
  chain.label_counts = {2, 0, 1, 1};  // pixel 1 ties -> smallest label

  const auto est = posterior_estimates(chain);
  CHECK(est.abundance.at(0, 0) == doctest::Approx(0.7));
  CHECK(est.abundance.at(0, 1) == doctest::Approx(0.3));
  CHECK(est.abundance.at(1, 0) == doctest::Approx(0.2));
  CHECK(est.abundance.at(1, 1) == doctest::Approx(0.8));
  CHECK(est.b == doctest::Approx(0.2));
  CHECK(est.sigma2 == doctest::Approx(0.003));
  CHECK(est.sigma_b2 == doctest::Approx(0.02));
  CHECK(est.labels.labels == std::vector<int>{1, 1});

  PosteriorChain empty;
  CHECK_THROWS_AS(posterior_estimates(empty), InputError);
}

TEST_CASE("config validation") {
  const auto lib = make_synthetic_library(8, 2, 4);
  const auto cube = cube_from(2, 2, 8, std::vector<double>(32, 0.2));

  SamplerConfig bad;
  bad.burn_in = 100;
  bad.n_mc = 100;
  CHECK_THROWS_AS(run_chain(cube, lib, bad), InputError);

  SamplerConfig neg;
  neg.n_mc = 10;
  neg.burn_in = 1;
  neg.proposal_scale = 0.0;
  CHECK_THROWS_AS(run_chain(cube, lib, neg), InputError);

  SamplerConfig many;
  many.n_mc = 10;
  many.burn_in = 1;
  many.num_classes = 5;  // more classes than pixels
  CHECK_THROWS_AS(run_chain(cube, lib, many), InputError);
}
