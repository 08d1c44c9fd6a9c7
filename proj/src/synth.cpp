#include "unmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "unmix/errors.hpp"
#include "unmix/kernels.hpp"
#include "unmix/model.hpp"
#include "unmix/mrf.hpp"
#include "unmix/rng.hpp"

namespace unmix {

std::string_view mixing_model_name(MixingModel model) {
  switch (model) {
    case MixingModel::LMM: return "lmm";
    case MixingModel::GBM: return "gbm";
    case MixingModel::PPNMM: return "ppnmm";
  }
  throw InputError("unknown mixing model");
}

MixingModel mixing_model_from_name(std::string_view name) {
  if (name == "lmm") return MixingModel::LMM;
  if (name == "gbm") return MixingModel::GBM;
  if (name == "ppnmm") return MixingModel::PPNMM;
  throw InputError("unknown mixing model: " + std::string(name));
}

namespace {

void check_spec(const SceneSpec& spec, const SpectralLibrary& lib) {
  if (spec.width == 0 || spec.height == 0)
    throw InputError("scene dimensions must be positive");
  if (spec.num_classes < 1) throw InputError("scene needs at least one class");
  if (spec.class_abundances.size() !=
      static_cast<std::size_t>(spec.num_classes))
    throw InputError("scene needs one abundance vector per class");
  for (const auto& a : spec.class_abundances) {
    if (a.size() != lib.endmembers)
      throw InputError("class abundance length does not match library");
    validate_abundance(a);
  }
  if (!(spec.sigma2 > 0.0)) throw InputError("scene sigma2 must be positive");
  if (spec.mrf_sweeps == 0) throw InputError("scene needs at least one sweep");
}

std::vector<double> class_spectrum(const SceneSpec& spec,
                                   const SpectralLibrary& lib,
                                   const AbundanceVector& a) {
  switch (spec.model) {
    case MixingModel::LMM:
      return linear_mix(lib, a);
    case MixingModel::GBM:
      return gbm_forward(lib, a, spec.gamma);
    case MixingModel::PPNMM:
      return ppnm_forward(lib, a, spec.b);
  }
  throw InputError("unknown mixing model");
}

}  // namespace

GroundTruth generate_scene(const SceneSpec& spec, const SpectralLibrary& lib) {
  validate_library(lib);
  check_spec(spec, lib);
  Rng rng(spec.seed);

  GroundTruth gt;
  if (spec.num_classes >= 2) {
    PottsParams potts{spec.beta, spec.num_classes, Neighborhood::FourPixel};
    gt.labels =
        sample_potts_field(spec.width, spec.height, potts, spec.mrf_sweeps,
                           rng);
  } else {
    gt.labels.width = spec.width;
    gt.labels.height = spec.height;
    gt.labels.labels.assign(spec.width * spec.height, 1);
  }

  const std::size_t K = static_cast<std::size_t>(spec.num_classes);
  gt.class_abundances.rows = K;
  gt.class_abundances.cols = lib.endmembers;
  gt.class_abundances.values.reserve(K * lib.endmembers);
  std::vector<std::vector<double>> spectra;
  spectra.reserve(K);
  for (const auto& a : spec.class_abundances) {
    gt.class_abundances.values.insert(gt.class_abundances.values.end(),
                                      a.begin(), a.end());
    spectra.push_back(class_spectrum(spec, lib, a));
  }

  gt.clean_cube.width = spec.width;
  gt.clean_cube.height = spec.height;
  gt.clean_cube.bands = lib.bands;
  gt.clean_cube.data.resize(gt.clean_cube.pixels() * lib.bands);
  for (std::size_t p = 0; p < gt.clean_cube.pixels(); ++p) {
    const auto& s =
        spectra[static_cast<std::size_t>(gt.labels.labels[p] - 1)];
    std::copy(s.begin(), s.end(), gt.clean_cube.pixel(p).begin());
  }

  gt.noisy_cube = gt.clean_cube;
  for (std::size_t p = 0; p < gt.noisy_cube.pixels(); ++p)
    add_noise(gt.noisy_cube.pixel(p), spec.sigma2, rng);
  return gt;
}

SpectralLibrary make_synthetic_library(std::size_t bands,
                                       std::size_t endmembers,
                                       std::uint64_t seed) {
  if (bands < 8 || endmembers < 2)
    throw InputError("synthetic library needs at least 8 bands, 2 endmembers");
  constexpr double kMinAngle = 5.0 * std::numbers::pi / 180.0;
  constexpr int kMaxRetries = 1000;
  Rng rng(seed);

  SpectralLibrary lib;
  lib.bands = bands;
  lib.endmembers = endmembers;
  lib.values.resize(bands * endmembers);

  // Narrow bumps with per-spectrum amplitude ranges balance two needs:
  // enough spectral diversity that abundances stay identifiable (conditioned
  // Gram matrix) while keeping spectra smooth and overlapping so residuals
  // for poor abundance states do not masquerade as a quadratic distortion.
  const auto draw_spectrum = [&](double* out) {
    std::fill(out, out + bands, 0.0);
    const int n_bumps = 6 + rng.uniform_int(6);
    const double fb = static_cast<double>(bands);
    for (int i = 0; i < n_bumps; ++i) {
      const double center = rng.uniform01() * fb;
      const double width = (0.02 + 0.08 * rng.uniform01()) * fb;
      const double amp = 0.2 + 0.8 * rng.uniform01();
      for (std::size_t l = 0; l < bands; ++l) {
        const double d = (static_cast<double>(l) - center) / width;
        out[l] += amp * std::exp(-0.5 * d * d);
      }
    }
    const double floor = 0.05 + 0.30 * rng.uniform01();
    const double span = (0.30 + 0.70 * rng.uniform01()) * (1.0 - floor);
    const auto [lo_it, hi_it] = std::minmax_element(out, out + bands);
    const double lo = *lo_it, range = *hi_it - *lo_it;
    for (std::size_t l = 0; l < bands; ++l)
      out[l] = range > 0.0 ? floor + span * (out[l] - lo) / range
                           : floor + 0.5 * span;
  };

  const auto& kern = kernels::active();
  int retries = 0;
  for (std::size_t r = 0; r < endmembers;) {
    double* col = lib.values.data() + r * bands;
    draw_spectrum(col);
    bool distinct = true;
    for (std::size_t q = 0; q < r && distinct; ++q) {
      const double* other = lib.values.data() + q * bands;
      const double cosine =
          kern.dot(col, other, bands) /
          std::sqrt(kern.dot(col, col, bands) * kern.dot(other, other, bands));
      if (std::acos(std::clamp(cosine, -1.0, 1.0)) < kMinAngle)
        distinct = false;
    }
    if (distinct) {
      ++r;
    } else if (++retries > kMaxRetries) {
      throw std::runtime_error(
          "could not draw spectra with the required angular separation");
    }
  }
  for (std::size_t r = 0; r < endmembers; ++r)
    lib.names.push_back("synthetic-" + std::to_string(r + 1));
  return lib;
}

SceneSpec preset_scene(std::string_view name) {
  SceneSpec spec;
  spec.class_abundances = {
      {0.6, 0.1, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.1, 0.3, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.3, 0.4, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0},
  };
  if (name == "paper-i1") {
    spec.model = MixingModel::LMM;
    spec.b = 0.0;
  } else if (name == "paper-i2") {
    spec.model = MixingModel::GBM;
    spec.gamma = {0.5, 0.1, 0.3};
    spec.b = 0.0;
  } else if (name == "paper-i3") {
    spec.model = MixingModel::PPNMM;
    spec.b = 0.1;
  } else {
    throw InputError("unknown scene preset: " + std::string(name));
  }
  return spec;
}

double realized_snr_db(const HyperCube& clean, const HyperCube& noisy) {
  if (clean.width != noisy.width || clean.height != noisy.height ||
      clean.bands != noisy.bands)
    throw InputError("cube dimensions differ");
  const auto& kern = kernels::active();
  const std::size_t n = clean.data.size();
  const double signal = kern.dot(clean.data.data(), clean.data.data(), n);
  const double noise =
      kern.sum_sq_diff(noisy.data.data(), clean.data.data(), n);
  return 10.0 * std::log10(signal / noise);
}

}  // namespace unmix
