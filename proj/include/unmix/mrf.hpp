#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

enum class Neighborhood {
  FourPixel,
  EightPixel,  // reserved, rejected at use sites
};

struct PottsParams {
  double beta = 1.1;
  int num_classes = 3;
  Neighborhood neighborhood = Neighborhood::FourPixel;
};

enum class SweepOrder {
  Raster,
  Checkerboard,  // two-color schedule; the 4-neighborhood grid is bipartite
};

// In-bounds subset of {left, right, up, down} of pixel p (no wraparound).
struct Neighbors {
  std::array<std::size_t, 4> idx;
  std::size_t count = 0;
};
Neighbors neighbors4(std::size_t p, std::size_t width, std::size_t height);

// Unnormalized conditional weights w_k = exp(beta * #{neighbors of p with
// label k}), k = 1..K.
std::vector<double> potts_conditional_weights(const LabelMap& labels,
                                              std::size_t p,
                                              const PottsParams& params);

// Unnormalized log joint density: beta * #{neighbor pairs with equal
// labels}, each grid edge counted once. Consistent with the conditionals
// above; diagnostics and tests only (no partition function).
double potts_log_density(const LabelMap& labels, const PottsParams& params);

// Gibbs simulation of the Potts prior from i.i.d. uniform labels.
LabelMap sample_potts_field(std::size_t width, std::size_t height,
                            const PottsParams& params, std::size_t n_sweeps,
                            Rng& rng, SweepOrder order = SweepOrder::Raster);

}  // namespace unmix
