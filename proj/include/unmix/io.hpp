#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "unmix/metrics.hpp"
#include "unmix/sampler.hpp"
#include "unmix/synth.hpp"
#include "unmix/types.hpp"

namespace unmix::io {

// All writers are byte-deterministic for identical inputs: floats as
// shortest round-trip decimals, JSON with sorted keys, no timestamps.
// Readers throw IoError on unreadable or structurally broken files and
// InputError on semantic violations.

// CSV, rows = bands, columns = endmembers; a single optional header row
// carries endmember names (written when the library has names).
void write_library_csv(const std::filesystem::path& path,
                       const SpectralLibrary& lib);
SpectralLibrary read_library_csv(const std::filesystem::path& path);

// JSON sidecar {"width","height","bands","dtype":"f64le","layout":
// "pixel-major"} next to a raw file of little-endian f64, pixel-major. The
// raw file shares the sidecar's path with extension ".raw".
void write_cube(const std::filesystem::path& json_path, const HyperCube& cube);
HyperCube read_cube(const std::filesystem::path& json_path);

// CSV grid of integers, height rows x width columns.
void write_labels_csv(const std::filesystem::path& path, const LabelMap& map);
LabelMap read_labels_csv(const std::filesystem::path& path);

// 8-bit binary PGM, labels spread over 0..255 for visual inspection.
void write_labels_pgm(const std::filesystem::path& path, const LabelMap& map,
                      int num_classes);

// Dense CSV, one matrix row per line.
void write_abundance_csv(const std::filesystem::path& path,
                         const AbundanceMatrix& m);
AbundanceMatrix read_abundance_csv(const std::filesystem::path& path);

void write_scene_spec(const std::filesystem::path& path,
                      const SceneSpec& spec);
SceneSpec read_scene_spec(const std::filesystem::path& path);

// One row per stored iteration: flattened class abundances (class-major),
// then b, sigma2, sigma_b2.
void write_chain_trace_csv(const std::filesystem::path& path,
                           const PosteriorChain& chain);

// Post-burn-in label counts, pixels x classes.
void write_label_counts_csv(const std::filesystem::path& path,
                            const PosteriorChain& chain);

// Per-iteration joint log density (up to a constant).
void write_diagnostics_csv(const std::filesystem::path& path,
                           const PosteriorChain& chain);

// Per-class Metropolis acceptance rates and final proposal scales.
void write_acceptance_csv(const std::filesystem::path& path,
                          const PosteriorChain& chain);

void write_eval_report_json(const std::filesystem::path& path,
                            const EvalReport& report,
                            std::optional<double> fcls_rmse = std::nullopt);
EvalReport read_eval_report_json(const std::filesystem::path& path);

// Aligned plain-text scorecard; optional extra row comparing the linear
// least-squares baseline.
void write_eval_report_text(const std::filesystem::path& path,
                            const EvalReport& report,
                            std::optional<double> fcls_rmse = std::nullopt);

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

// Writes pre-rendered text (binary mode, no newline translation).
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace unmix::io
