#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "unmix/types.hpp"

namespace testutil {

// Library from explicit column-major values; no validation so tests can
// build degenerate inputs.
inline unmix::SpectralLibrary library_from(std::size_t bands,
                                           std::size_t endmembers,
                                           std::vector<double> values) {
  unmix::SpectralLibrary lib;
  lib.bands = bands;
  lib.endmembers = endmembers;
  lib.values = std::move(values);
  return lib;
}

// 2x2 identity: M a = a, so conditionals have closed forms.
inline unmix::SpectralLibrary identity2() {
  return library_from(2, 2, {1.0, 0.0, 0.0, 1.0});
}

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double logsumexp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Kolmogorov-Smirnov sup distance between an empirical sample and a CDF.
inline double sup_cdf_distance(std::vector<double> samples,
                               const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    sup = std::max({sup, std::abs(f - lo), std::abs(f - hi)});
  }
  return sup;
}

// CDF of a density known up to a constant on a uniform grid (midpoint rule).
// Returns grid CDF values aligned with the grid points (right edges).
inline std::vector<double> grid_cdf_from_log_density(
    std::span<const double> log_density) {
  const double m =
      *std::max_element(log_density.begin(), log_density.end());
  std::vector<double> cdf(log_density.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_density.size(); ++i) {
    acc += std::exp(log_density[i] - m);
    cdf[i] = acc;
  }
  for (double& v : cdf) v /= acc;
  return cdf;
}

// Empirical-vs-grid sup distance: counts samples falling at or below each
// grid point (grid assumed sorted, covering the support).
inline double sup_cdf_distance_grid(std::vector<double> samples,
                                    std::span<const double> grid,
                                    std::span<const double> grid_cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double sup = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (j < samples.size() && samples[j] <= grid[i]) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(j) / n - grid_cdf[i]));
  }
  return sup;
}

// FNV-1a over raw bytes; stable golden-value hashing.
inline std::uint64_t fnv1a(const void* data, std::size_t n_bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n_bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace testutil
