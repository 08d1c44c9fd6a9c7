#include "unmix/mrf.hpp"

#include <cmath>

#include "unmix/errors.hpp"

namespace unmix {

namespace {

void check_params(const PottsParams& params) {
  if (!(params.beta > 0.0)) throw InputError("potts beta must be positive");
  if (params.num_classes < 2)
    throw InputError("potts needs at least 2 classes");
  if (params.neighborhood != Neighborhood::FourPixel)
    throw InputError("8-pixel neighborhood is not implemented");
}

// Draws a label for pixel p from its local conditional. Shared by the prior
// field simulator here and reused in spirit by the posterior label step.
int draw_conditional_label(const LabelMap& labels, std::size_t p,
                           const PottsParams& params, Rng& rng) {
  const Neighbors nb = neighbors4(p, labels.width, labels.height);
  // Neighbor counts per class; weights exp(beta * count) with the max count
  // factored out for stable normalization.
  std::vector<int> counts(static_cast<std::size_t>(params.num_classes), 0);
  int max_count = 0;
  for (std::size_t i = 0; i < nb.count; ++i) {
    int& c = counts[static_cast<std::size_t>(labels.labels[nb.idx[i]] - 1)];
    ++c;
    if (c > max_count) max_count = c;
  }
  double total = 0.0;
  std::vector<double> w(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    w[k] = std::exp(params.beta * (counts[k] - max_count));
    total += w[k];
  }
  double u = rng.uniform01() * total;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    u -= w[k];
    if (u < 0.0) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(w.size());
}

}  // namespace

Neighbors neighbors4(std::size_t p, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0 || p >= width * height)
    throw InputError("pixel index outside grid");
  const std::size_t x = p % width;
  const std::size_t y = p / width;
  Neighbors nb;
  if (x > 0) nb.idx[nb.count++] = p - 1;
  if (x + 1 < width) nb.idx[nb.count++] = p + 1;
  if (y > 0) nb.idx[nb.count++] = p - width;
  if (y + 1 < height) nb.idx[nb.count++] = p + width;
  return nb;
}

std::vector<double> potts_conditional_weights(const LabelMap& labels,
                                              std::size_t p,
                                              const PottsParams& params) {
  check_params(params);
  validate_labels(labels, params.num_classes);
  const Neighbors nb = neighbors4(p, labels.width, labels.height);
  std::vector<double> w(static_cast<std::size_t>(params.num_classes), 1.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    int count = 0;
    for (std::size_t i = 0; i < nb.count; ++i)
      if (labels.labels[nb.idx[i]] == static_cast<int>(k) + 1) ++count;
    w[k] = std::exp(params.beta * count);
  }
  return w;
}

double potts_log_density(const LabelMap& labels, const PottsParams& params) {
  check_params(params);
  validate_labels(labels, params.num_classes);
  // Count each edge once via its right/down endpoint.
  std::size_t same = 0;
  for (std::size_t y = 0; y < labels.height; ++y) {
    for (std::size_t x = 0; x < labels.width; ++x) {
      const std::size_t p = y * labels.width + x;
      if (x + 1 < labels.width && labels.labels[p] == labels.labels[p + 1])
        ++same;
      if (y + 1 < labels.height &&
          labels.labels[p] == labels.labels[p + labels.width])
        ++same;
    }
  }
  return params.beta * static_cast<double>(same);
}

LabelMap sample_potts_field(std::size_t width, std::size_t height,
                            const PottsParams& params, std::size_t n_sweeps,
                            Rng& rng, SweepOrder order) {
  check_params(params);
  if (width == 0 || height == 0)
    throw InputError("field dimensions must be positive");
  if (n_sweeps == 0) throw InputError("need at least one sweep");

  LabelMap map;
  map.width = width;
  map.height = height;
  map.labels.resize(width * height);
  for (int& c : map.labels) c = 1 + rng.uniform_int(params.num_classes);

  for (std::size_t sweep = 0; sweep < n_sweeps; ++sweep) {
    if (order == SweepOrder::Raster) {
      for (std::size_t p = 0; p < map.pixels(); ++p)
        map.labels[p] = draw_conditional_label(map, p, params, rng);
    } else {
      for (int color = 0; color < 2; ++color) {
        for (std::size_t y = 0; y < height; ++y) {
          for (std::size_t x = 0; x < width; ++x) {
            if (static_cast<int>((x + y) % 2) != color) continue;
            const std::size_t p = y * width + x;
            map.labels[p] = draw_conditional_label(map, p, params, rng);
          }
        }
      }
    }
  }
  return map;
}

}  // namespace unmix
