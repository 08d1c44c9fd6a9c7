#include <doctest.h>

#include <boost/math/distributions/inverse_gamma.hpp>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "unmix/errors.hpp"
#include "unmix/priors.hpp"
#include "unmix/rng.hpp"

using namespace unmix;

TEST_CASE("dirichlet log density closed forms") {
  // Flat case eta = 1, R = 3: density is Gamma(3) = 2 everywhere.
  const double kLog2 = 0.693147180559945309417;  // log(2)
  CHECK(dirichlet_log_pdf({1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0) ==
        doctest::Approx(kLog2).epsilon(1e-14));
  CHECK(dirichlet_log_pdf({0.7, 0.2, 0.1}, 1.0) ==
        doctest::Approx(kLog2).epsilon(1e-14));

  // eta = 0.2, R = 8 at the first preset row; zero components floor at
  // 1e-12. Reference value from 30-digit arithmetic.
  AbundanceVector row = {0.6, 0.1, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(dirichlet_log_pdf(row, 0.2) ==
        doctest::Approx(101.432888935439938738).epsilon(1e-12));

  // Sparse concentration favors boundary points over the barycenter.
  CHECK(dirichlet_log_pdf({0.98, 0.01, 0.01}, 0.2) >
        dirichlet_log_pdf({1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.2));

  CHECK_THROWS_AS(dirichlet_log_pdf({0.5, 0.6}, 0.2), InputError);
  CHECK_THROWS_AS(dirichlet_log_pdf({0.5, 0.5}, 0.0), InputError);
  CHECK_THROWS_AS(dirichlet_log_pdf({1.2, -0.2}, 0.2), InputError);
}

TEST_CASE("dirichlet normalization by independent Monte Carlo") {
  // Uniform simplex draws from sorted-uniform spacings (no gamma sampler
  // involved); E[f_eta / f_uniform] = 1 when f_eta integrates to 1.
  Rng rng(123);
  const double eta = 0.7;
  const std::size_t n = 200'000;
  const double log_uniform = std::log(2.0);  // Gamma(3) on the 2-simplex
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double u1 = rng.uniform01(), u2 = rng.uniform01();
    if (u2 < u1) std::swap(u1, u2);
    const AbundanceVector x = {u1, u2 - u1, 1.0 - u2};
    acc += std::exp(dirichlet_log_pdf_unchecked(x, eta) - log_uniform);
  }
  CHECK(acc / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("dirichlet sampling") {
  Rng rng(42);

  for (int i = 0; i < 10'000; ++i) {
    const auto a = sample_dirichlet(0.2, 8, rng);
    double sum = 0.0;
    bool nonneg = true;
    for (double v : a) {
      sum += v;
      nonneg = nonneg && v >= 0.0;
    }
    REQUIRE(nonneg);
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // eta = 1 is uniform on the simplex: component mean 1/3.
  std::vector<double> first;
  first.reserve(100'000);
  for (int i = 0; i < 100'000; ++i)
    first.push_back(sample_dirichlet(1.0, 3, rng)[0]);
  CHECK(testutil::mean(first) == doctest::Approx(1.0 / 3).epsilon(0.01));

  // Sparse eta concentrates single draws near vertices.
  std::size_t tiny_sparse = 0, tiny_flat = 0;
  for (int i = 0; i < 20'000; ++i) {
    for (double v : sample_dirichlet(0.2, 8, rng))
      if (v < 0.01) ++tiny_sparse;
    for (double v : sample_dirichlet(1.0, 8, rng))
      if (v < 0.01) ++tiny_flat;
  }
  CHECK(tiny_sparse > 3 * tiny_flat);

  CHECK_THROWS_AS(sample_dirichlet(0.0, 3, rng), InputError);
  CHECK_THROWS_AS(sample_dirichlet(0.2, 0, rng), InputError);
}

TEST_CASE("inverse gamma sampling") {
  Rng rng(7);

  // Mean scale/(shape-1) for shape > 1: IG(3, 2) has mean 1.
  std::vector<double> draws;
  draws.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) {
    const double v = sample_inverse_gamma(3.0, 2.0, rng);
    REQUIRE(v > 0.0);
    draws.push_back(v);
  }
  CHECK(testutil::mean(draws) == doctest::Approx(1.0).epsilon(0.02));

  // Distribution-level agreement with an independent implementation.
  boost::math::inverse_gamma_distribution<double> ref(2.5, 0.8);
  std::vector<double> ks;
  ks.reserve(100'000);
  for (int i = 0; i < 100'000; ++i)
    ks.push_back(sample_inverse_gamma(2.5, 0.8, rng));
  const double d = testutil::sup_cdf_distance(
      ks, [&](double x) { return boost::math::cdf(ref, x); });
  CHECK(d < 0.01);

  CHECK_THROWS_AS(sample_inverse_gamma(0.0, 1.0, rng), InputError);
  CHECK_THROWS_AS(sample_inverse_gamma(1.0, -1.0, rng), InputError);
}
