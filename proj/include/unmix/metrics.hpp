#pragma once

#include <cstddef>
#include <vector>

#include "unmix/types.hpp"

namespace unmix {

// sqrt(1/P sum_p ||est_p - truth_p||^2) over per-pixel abundance rows.
double rmse(const AbundanceMatrix& estimated, const AbundanceMatrix& truth);

// sqrt(1/(P L) sum_p ||rec_p - ref_p||^2); the reference is the noiseless
// cube for synthetic scenes.
double reconstruction_error(const HyperCube& reconstructed,
                            const HyperCube& reference);

// Fraction of matching pixels maximized over all K! label permutations
// (class identities are exchangeable under the model). K <= 8.
double label_accuracy(const LabelMap& estimated, const LabelMap& truth,
                      int num_classes);

// Per-pixel abundance rows from per-class rows and a label map.
AbundanceMatrix expand_by_labels(const AbundanceMatrix& class_rows,
                                 const LabelMap& labels);

// Cube of forward spectra: pixel p gets M a_{c_p} + b (M a_{c_p})^2 from its
// class's abundance row.
HyperCube reconstruct_cube(const SpectralLibrary& lib,
                           const AbundanceMatrix& class_rows,
                           const LabelMap& labels, double b);

struct FclsResult {
  AbundanceMatrix abundance;  // pixels x endmembers
  bool converged = true;      // objective change <= 1e-12 everywhere
};

// Per-pixel fully constrained least squares min ||y - Ma||^2 on the simplex,
// projected gradient with Euclidean simplex projection. Stops on objective
// change <= 1e-12 or 10^4 iterations per pixel.
FclsResult fcls_baseline(const HyperCube& cube, const SpectralLibrary& lib);

struct EvalReport {
  double rmse = 0.0;
  double re = 0.0;
  double label_accuracy = 0.0;
  std::vector<double> per_class_abundance_error;  // K, best label permutation
};

// Full synthetic-scene scorecard for estimated class abundances + labels
// against ground truth. The label permutation maximizing pixel accuracy is
// applied to the estimated classes before the abundance metrics.
EvalReport evaluate_scene(const SpectralLibrary& lib,
                          const AbundanceMatrix& est_class_rows,
                          const LabelMap& est_labels, double est_b,
                          const AbundanceMatrix& truth_class_rows,
                          const LabelMap& truth_labels,
                          const HyperCube& clean_cube);

}  // namespace unmix
