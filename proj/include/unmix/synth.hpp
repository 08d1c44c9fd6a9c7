#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "unmix/types.hpp"

namespace unmix {

enum class MixingModel { LMM, GBM, PPNMM };

// "lmm", "gbm", "ppnmm"
std::string_view mixing_model_name(MixingModel model);
MixingModel mixing_model_from_name(std::string_view name);

struct SceneSpec {
  std::size_t width = 25;
  std::size_t height = 25;
  int num_classes = 3;
  MixingModel model = MixingModel::PPNMM;
  std::vector<AbundanceVector> class_abundances;  // K rows, length R
  double b = 0.1;             // PPNMM amplitude
  std::vector<double> gamma;  // GBM, lexicographic over active pairs
  double sigma2 = 0.001;
  double beta = 1.1;
  std::size_t mrf_sweeps = 200;  // label-map burn-in sweeps
  std::uint64_t seed = 0;
};

struct GroundTruth {
  LabelMap labels;
  AbundanceMatrix class_abundances;  // K x R, mirrors the spec rows
  HyperCube clean_cube;
  HyperCube noisy_cube;
};

// Labels from a Potts simulation at spec.beta, per-pixel spectra from the
// class abundance under spec.model, then i.i.d. Gaussian noise. Fully
// deterministic in spec.seed.
GroundTruth generate_scene(const SceneSpec& spec, const SpectralLibrary& lib);

// R smooth nonnegative spectra in [0.05, 1.0] (sums of random Gaussian
// bumps rescaled to that range) with pairwise spectral angle >= 5 degrees.
// Stands in for real endmember exports so the pipeline is self-contained.
SpectralLibrary make_synthetic_library(std::size_t bands,
                                       std::size_t endmembers,
                                       std::uint64_t seed);

// Built-in scene presets: "paper-i1" (LMM), "paper-i2" (GBM), "paper-i3"
// (PPNMM), each 25x25, K = 3, three active endmembers of an 8-endmember
// library, noise variance 0.001. Seed left at 0 for the caller.
SceneSpec preset_scene(std::string_view name);

// 10 log10(signal power / noise power) over the whole cube.
double realized_snr_db(const HyperCube& clean, const HyperCube& noisy);

}  // namespace unmix
