#include "unmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unmix/errors.hpp"
#include "unmix/kernels.hpp"
#include "unmix/model.hpp"

namespace unmix {

namespace {

void check_same_shape(const AbundanceMatrix& a, const AbundanceMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw InputError("abundance matrix shapes differ");
}

// Best label permutation: perm[e] is the truth label matched to estimated
// label e+1. Returns (accuracy, perm).
std::pair<double, std::vector<int>> best_label_permutation(
    const LabelMap& estimated, const LabelMap& truth, int num_classes) {
  if (estimated.width != truth.width || estimated.height != truth.height)
    throw InputError("label map dimensions differ");
  if (num_classes < 1 || num_classes > 8)
    throw InputError("label accuracy supports 1..8 classes");
  validate_labels(estimated, num_classes);
  validate_labels(truth, num_classes);

  const std::size_t K = static_cast<std::size_t>(num_classes);
  // Confusion counts once, then each permutation is scored in O(K).
  std::vector<std::size_t> confusion(K * K, 0);
  for (std::size_t p = 0; p < truth.pixels(); ++p)
    ++confusion[static_cast<std::size_t>(estimated.labels[p] - 1) * K +
                static_cast<std::size_t>(truth.labels[p] - 1)];

  std::vector<int> perm(K), best_perm(K);
  std::iota(perm.begin(), perm.end(), 1);
  best_perm = perm;
  std::size_t best_hits = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t e = 0; e < K; ++e)
      hits += confusion[e * K + static_cast<std::size_t>(perm[e] - 1)];
    if (hits > best_hits) {
      best_hits = hits;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {static_cast<double>(best_hits) /
              static_cast<double>(truth.pixels()),
          best_perm};
}

}  // namespace

double rmse(const AbundanceMatrix& estimated, const AbundanceMatrix& truth) {
  check_same_shape(estimated, truth);
  if (estimated.rows == 0) throw InputError("empty abundance matrices");
  const double total = kernels::active().sum_sq_diff(
      estimated.values.data(), truth.values.data(), estimated.values.size());
  return std::sqrt(total / static_cast<double>(estimated.rows));
}

double reconstruction_error(const HyperCube& reconstructed,
                            const HyperCube& reference) {
  if (reconstructed.width != reference.width ||
      reconstructed.height != reference.height ||
      reconstructed.bands != reference.bands)
    throw InputError("cube dimensions differ");
  const double total = kernels::active().sum_sq_diff(
      reconstructed.data.data(), reference.data.data(),
      reference.data.size());
  return std::sqrt(total / static_cast<double>(reference.data.size()));
}

double label_accuracy(const LabelMap& estimated, const LabelMap& truth,
                      int num_classes) {
  return best_label_permutation(estimated, truth, num_classes).first;
}

AbundanceMatrix expand_by_labels(const AbundanceMatrix& class_rows,
                                 const LabelMap& labels) {
  validate_labels(labels, static_cast<int>(class_rows.rows));
  AbundanceMatrix out;
  out.rows = labels.pixels();
  out.cols = class_rows.cols;
  out.values.resize(out.rows * out.cols);
  for (std::size_t p = 0; p < out.rows; ++p) {
    const auto src =
        class_rows.row(static_cast<std::size_t>(labels.labels[p] - 1));
    std::copy(src.begin(), src.end(), out.row(p).begin());
  }
  return out;
}

HyperCube reconstruct_cube(const SpectralLibrary& lib,
                           const AbundanceMatrix& class_rows,
                           const LabelMap& labels, double b) {
  if (class_rows.cols != lib.endmembers)
    throw InputError("abundance columns do not match library endmembers");
  validate_labels(labels, static_cast<int>(class_rows.rows));
  std::vector<std::vector<double>> spectra(class_rows.rows,
                                           std::vector<double>(lib.bands));
  for (std::size_t k = 0; k < class_rows.rows; ++k)
    ppnm_forward_into(lib, class_rows.row(k), b, spectra[k]);

  HyperCube cube;
  cube.width = labels.width;
  cube.height = labels.height;
  cube.bands = lib.bands;
  cube.data.resize(cube.pixels() * cube.bands);
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto& s = spectra[static_cast<std::size_t>(labels.labels[p] - 1)];
    std::copy(s.begin(), s.end(), cube.pixel(p).begin());
  }
  return cube;
}

namespace {

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(std::span<double> a, std::vector<double>& sorted) {
  sorted.assign(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) tau = t;
  }
  for (double& v : a) v = std::max(v - tau, 0.0);
}

}  // namespace

FclsResult fcls_baseline(const HyperCube& cube, const SpectralLibrary& lib) {
  validate_library(lib);
  validate_cube(cube);
  if (cube.bands != lib.bands)
    throw InputError("cube band count does not match library");
  if (lib.endmembers > lib.bands)
    throw InputError("library has more endmembers than bands");

  const auto& kern = kernels::active();
  const std::size_t R = lib.endmembers;
  const std::size_t L = lib.bands;

  // Gram matrix G = M^T M and its largest eigenvalue via power iteration;
  // gradient of ||y - Ma||^2 is 2(Ga - M^T y), Lipschitz constant 2 lam_max.
  std::vector<double> gram(R * R);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j)
      gram[i * R + j] =
          kern.dot(lib.column(i).data(), lib.column(j).data(), L);
  std::vector<double> v(R, 1.0 / std::sqrt(static_cast<double>(R))), gv(R);
  double lam_max = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < R; ++i)
      gv[i] = kern.dot(&gram[i * R], v.data(), R);
    const double norm = std::sqrt(kern.dot(gv.data(), gv.data(), R));
    if (!(norm > 0.0)) break;
    for (std::size_t i = 0; i < R; ++i) v[i] = gv[i] / norm;
    lam_max = norm;
  }
  const double step = 1.0 / (2.0 * lam_max);

  FclsResult result;
  result.abundance.rows = cube.pixels();
  result.abundance.cols = R;
  result.abundance.values.resize(cube.pixels() * R);

  std::vector<double> c(R), grad(R), fit(L), sorted(R);
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto y = cube.pixel(p);
    for (std::size_t i = 0; i < R; ++i)
      c[i] = kern.dot(lib.column(i).data(), y.data(), L);
    auto a = result.abundance.row(p);
    std::fill(a.begin(), a.end(), 1.0 / static_cast<double>(R));

    double prev_obj = 0.0;
    bool have_prev = false;
    for (int it = 0; it < 10000; ++it) {
      for (std::size_t i = 0; i < R; ++i)
        grad[i] = 2.0 * (kern.dot(&gram[i * R], a.data(), R) - c[i]);
      for (std::size_t i = 0; i < R; ++i) a[i] -= step * grad[i];
      project_simplex(a, sorted);
      linear_mix_into(lib, a, fit);
      const double obj = kern.sum_sq_diff(y.data(), fit.data(), L);
      if (have_prev && std::abs(prev_obj - obj) <= 1e-12) break;
      prev_obj = obj;
      have_prev = true;
      if (it == 9999) result.converged = false;
    }
  }
  return result;
}

EvalReport evaluate_scene(const SpectralLibrary& lib,
                          const AbundanceMatrix& est_class_rows,
                          const LabelMap& est_labels, double est_b,
                          const AbundanceMatrix& truth_class_rows,
                          const LabelMap& truth_labels,
                          const HyperCube& clean_cube) {
  check_same_shape(est_class_rows, truth_class_rows);
  const int K = static_cast<int>(truth_class_rows.rows);

  EvalReport report;
  report.rmse = rmse(expand_by_labels(est_class_rows, est_labels),
                     expand_by_labels(truth_class_rows, truth_labels));
  report.re = reconstruction_error(
      reconstruct_cube(lib, est_class_rows, est_labels, est_b), clean_cube);

  const auto [acc, perm] = best_label_permutation(est_labels, truth_labels, K);
  report.label_accuracy = acc;
  // perm[e] = truth label matched to estimated label e+1; report the
  // abundance error per truth class under that matching.
  report.per_class_abundance_error.assign(static_cast<std::size_t>(K), 0.0);
  for (std::size_t e = 0; e < static_cast<std::size_t>(K); ++e) {
    const auto est_row = est_class_rows.row(e);
    const auto truth_row =
        truth_class_rows.row(static_cast<std::size_t>(perm[e] - 1));
    const double err = kernels::active().sum_sq_diff(
        est_row.data(), truth_row.data(), est_row.size());
    report.per_class_abundance_error[static_cast<std::size_t>(perm[e] - 1)] =
        std::sqrt(err);
  }
  return report;
}

}  // namespace unmix
