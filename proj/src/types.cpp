#include "unmix/types.hpp"

#include <cmath>
#include <string>

#include "unmix/errors.hpp"

namespace unmix {

void validate_library(const SpectralLibrary& lib) {
  if (lib.bands < 2 || lib.endmembers < 2)
    throw InputError("library needs at least 2 bands and 2 endmembers");
  if (lib.values.size() != lib.bands * lib.endmembers)
    throw InputError("library value count does not match bands x endmembers");
  if (!lib.names.empty() && lib.names.size() != lib.endmembers)
    throw InputError("library name count does not match endmember count");
  for (double v : lib.values) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("library entries must be finite and nonnegative");
  }
}

void validate_abundance(const AbundanceVector& a, double tol) {
  if (a.empty()) throw InputError("abundance vector is empty");
  double sum = 0.0;
  for (double v : a) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("abundance components must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw InputError("abundance components must sum to 1 (got " +
                     std::to_string(sum) + ")");
}

void validate_cube(const HyperCube& cube) {
  if (cube.width == 0 || cube.height == 0 || cube.bands == 0)
    throw InputError("cube dimensions must be positive");
  if (cube.data.size() != cube.width * cube.height * cube.bands)
    throw InputError("cube data size does not match width x height x bands");
  for (double v : cube.data) {
    if (!std::isfinite(v)) throw InputError("cube values must be finite");
  }
}

void validate_labels(const LabelMap& map, int num_classes) {
  if (map.width == 0 || map.height == 0)
    throw InputError("label map dimensions must be positive");
  if (map.labels.size() != map.width * map.height)
    throw InputError("label count does not match width x height");
  for (int c : map.labels) {
    if (c < 1 || c > num_classes)
      throw InputError("label " + std::to_string(c) + " outside {1.." +
                       std::to_string(num_classes) + "}");
  }
}

}  // namespace unmix
