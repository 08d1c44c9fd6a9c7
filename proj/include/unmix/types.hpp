#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace unmix {

// Endmember reflectance matrix M (L bands x R endmembers), stored
// column-major so each endmember spectrum is contiguous.
struct SpectralLibrary {
  std::size_t bands = 0;       // L
  std::size_t endmembers = 0;  // R
  std::vector<double> values;  // bands * endmembers, column-major
  std::vector<std::string> names;  // optional, size 0 or R

  double& at(std::size_t band, std::size_t em) {
    return values[em * bands + band];
  }
  double at(std::size_t band, std::size_t em) const {
    return values[em * bands + band];
  }
  std::span<const double> column(std::size_t em) const {
    return {values.data() + em * bands, bands};
  }
};

// Entries finite and >= 0, L >= 2, R >= 2, sizes consistent. Throws
// InputError otherwise.
void validate_library(const SpectralLibrary& lib);

// Fractional abundances a, length R.
using AbundanceVector = std::vector<double>;

// Nonnegative components summing to 1 within tol. Throws InputError.
void validate_abundance(const AbundanceVector& a, double tol = 1e-9);

// W x H image of L-band spectra, pixel-major: all bands of pixel 0, then
// pixel 1, ... Pixel p sits at grid position (p mod W, p div W).
struct HyperCube {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t bands = 0;
  std::vector<double> data;  // width * height * bands

  std::size_t pixels() const { return width * height; }
  std::span<double> pixel(std::size_t p) {
    return {data.data() + p * bands, bands};
  }
  std::span<const double> pixel(std::size_t p) const {
    return {data.data() + p * bands, bands};
  }
};

// All values finite, data size = W*H*L. Throws InputError.
void validate_cube(const HyperCube& cube);

// Per-pixel class assignment, labels in {1..K}, same grid convention as
// HyperCube.
struct LabelMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> labels;  // width * height

  std::size_t pixels() const { return width * height; }
};

// Labels in {1..num_classes}, size = W*H. Throws InputError.
void validate_labels(const LabelMap& map, int num_classes);

// Dense rows x cols matrix of abundances (one row per pixel or per class),
// row-major.
struct AbundanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols, row-major

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }
  std::span<double> row(std::size_t r) {
    return {values.data() + r * cols, cols};
  }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

}  // namespace unmix
