#include "unmix/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "unmix/errors.hpp"

namespace unmix::io {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed: " + path.string());
  return std::move(ss).str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string tok = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto first = tok.find_first_not_of(" \t\r");
    const auto last = tok.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos
                      ? std::string()
                      : tok.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

double require_double(const std::string& tok,
                      const std::filesystem::path& path) {
  double v = 0.0;
  if (!parse_double(tok, v))
    throw IoError("bad number '" + tok + "' in " + path.string());
  return v;
}

json parse_json_file(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path.string());
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::filesystem::path raw_path_for(const std::filesystem::path& json_path) {
  std::filesystem::path p = json_path;
  p.replace_extension(".raw");
  return p;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_library_csv(const std::filesystem::path& path,
                       const SpectralLibrary& lib) {
  validate_library(lib);
  std::string text;
  if (!lib.names.empty()) {
    for (std::size_t r = 0; r < lib.endmembers; ++r) {
      if (r) text += ',';
      text += lib.names[r];
    }
    text += '\n';
  }
  for (std::size_t l = 0; l < lib.bands; ++l) {
    for (std::size_t r = 0; r < lib.endmembers; ++r) {
      if (r) text += ',';
      text += format_double(lib.at(l, r));
    }
    text += '\n';
  }
  write_text_file(path, text);
}

SpectralLibrary read_library_csv(const std::filesystem::path& path) {
  const auto lines = nonempty_lines(slurp(path));
  if (lines.empty()) throw IoError("empty library file: " + path.string());

  SpectralLibrary lib;
  std::size_t first_data = 0;
  auto head = split_csv_line(lines[0]);
  double probe = 0.0;
  const bool has_header = !parse_double(head[0], probe);
  if (has_header) {
    lib.names.assign(head.begin(), head.end());
    first_data = 1;
  }
  if (first_data >= lines.size())
    throw IoError("library file has no data rows: " + path.string());

  lib.endmembers = split_csv_line(lines[first_data]).size();
  lib.bands = lines.size() - first_data;
  lib.values.resize(lib.bands * lib.endmembers);
  for (std::size_t l = 0; l < lib.bands; ++l) {
    const auto toks = split_csv_line(lines[first_data + l]);
    if (toks.size() != lib.endmembers)
      throw IoError("ragged library row in " + path.string());
    for (std::size_t r = 0; r < lib.endmembers; ++r)
      lib.at(l, r) = require_double(toks[r], path);
  }
  validate_library(lib);
  return lib;
}

void write_cube(const std::filesystem::path& json_path,
                const HyperCube& cube) {
  validate_cube(cube);
  json sidecar;
  sidecar["width"] = cube.width;
  sidecar["height"] = cube.height;
  sidecar["bands"] = cube.bands;
  sidecar["dtype"] = "f64le";
  sidecar["layout"] = "pixel-major";
  write_json_file(json_path, sidecar);

  std::string bytes(cube.data.size() * sizeof(double), '\0');
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(bytes.data(), cube.data.data(), bytes.size());
  } else {
    for (std::size_t i = 0; i < cube.data.size(); ++i) {
      auto raw = std::bit_cast<std::array<char, 8>>(cube.data[i]);
      for (std::size_t b = 0; b < 8; ++b)
        bytes[i * 8 + b] = raw[7 - b];
    }
  }
  write_text_file(raw_path_for(json_path), bytes);
}

HyperCube read_cube(const std::filesystem::path& json_path) {
  const json sidecar = parse_json_file(json_path);
  HyperCube cube;
  try {
    cube.width = sidecar.at("width").get<std::size_t>();
    cube.height = sidecar.at("height").get<std::size_t>();
    cube.bands = sidecar.at("bands").get<std::size_t>();
    if (sidecar.at("dtype").get<std::string>() != "f64le" ||
        sidecar.at("layout").get<std::string>() != "pixel-major")
      throw IoError("unsupported cube encoding in " + json_path.string());
  } catch (const json::exception&) {
    throw IoError("bad cube sidecar: " + json_path.string());
  }

  const std::string bytes = slurp(raw_path_for(json_path));
  const std::size_t n = cube.width * cube.height * cube.bands;
  if (bytes.size() != n * sizeof(double))
    throw IoError("cube raw size does not match sidecar: " +
                  raw_path_for(json_path).string());
  cube.data.resize(n);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(cube.data.data(), bytes.data(), bytes.size());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::array<char, 8> raw;
      for (std::size_t b = 0; b < 8; ++b) raw[b] = bytes[i * 8 + 7 - b];
      cube.data[i] = std::bit_cast<double>(raw);
    }
  }
  validate_cube(cube);
  return cube;
}

void write_labels_csv(const std::filesystem::path& path,
                      const LabelMap& map) {
  std::string text;
  for (std::size_t y = 0; y < map.height; ++y) {
    for (std::size_t x = 0; x < map.width; ++x) {
      if (x) text += ',';
      text += std::to_string(map.labels[y * map.width + x]);
    }
    text += '\n';
  }
  write_text_file(path, text);
}

LabelMap read_labels_csv(const std::filesystem::path& path) {
  const auto lines = nonempty_lines(slurp(path));
  if (lines.empty()) throw IoError("empty label file: " + path.string());
  LabelMap map;
  map.height = lines.size();
  map.width = split_csv_line(lines[0]).size();
  map.labels.reserve(map.width * map.height);
  for (const auto& line : lines) {
    const auto toks = split_csv_line(line);
    if (toks.size() != map.width)
      throw IoError("ragged label row in " + path.string());
    for (const auto& tok : toks) {
      const double v = require_double(tok, path);
      const int label = static_cast<int>(v);
      if (static_cast<double>(label) != v)
        throw IoError("non-integer label '" + tok + "' in " + path.string());
      map.labels.push_back(label);
    }
  }
  return map;
}

void write_labels_pgm(const std::filesystem::path& path, const LabelMap& map,
                      int num_classes) {
  validate_labels(map, num_classes);
  std::string text = "P5\n" + std::to_string(map.width) + " " +
                     std::to_string(map.height) + "\n255\n";
  for (int label : map.labels) {
    const int gray = num_classes > 1
                         ? (label - 1) * 255 / (num_classes - 1)
                         : 0;
    text += static_cast<char>(gray);
  }
  write_text_file(path, text);
}

void write_abundance_csv(const std::filesystem::path& path,
                         const AbundanceMatrix& m) {
  std::string text;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) text += ',';
      text += format_double(m.at(r, c));
    }
    text += '\n';
  }
  write_text_file(path, text);
}

AbundanceMatrix read_abundance_csv(const std::filesystem::path& path) {
  const auto lines = nonempty_lines(slurp(path));
  if (lines.empty()) throw IoError("empty abundance file: " + path.string());
  AbundanceMatrix m;
  m.rows = lines.size();
  m.cols = split_csv_line(lines[0]).size();
  m.values.reserve(m.rows * m.cols);
  for (const auto& line : lines) {
    const auto toks = split_csv_line(line);
    if (toks.size() != m.cols)
      throw IoError("ragged abundance row in " + path.string());
    for (const auto& tok : toks)
      m.values.push_back(require_double(tok, path));
  }
  return m;
}

void write_scene_spec(const std::filesystem::path& path,
                      const SceneSpec& spec) {
  json j;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["num_classes"] = spec.num_classes;
  j["model"] = mixing_model_name(spec.model);
  j["class_abundances"] = spec.class_abundances;
  j["b"] = spec.b;
  j["gamma"] = spec.gamma;
  j["sigma2"] = spec.sigma2;
  j["beta"] = spec.beta;
  j["mrf_sweeps"] = spec.mrf_sweeps;
  j["seed"] = spec.seed;
  write_json_file(path, j);
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  SceneSpec spec;
  try {
    spec.width = j.at("width").get<std::size_t>();
    spec.height = j.at("height").get<std::size_t>();
    spec.num_classes = j.at("num_classes").get<int>();
    spec.model = mixing_model_from_name(j.at("model").get<std::string>());
    spec.class_abundances =
        j.at("class_abundances").get<std::vector<AbundanceVector>>();
    if (j.contains("b")) spec.b = j.at("b").get<double>();
    if (j.contains("gamma"))
      spec.gamma = j.at("gamma").get<std::vector<double>>();
    spec.sigma2 = j.at("sigma2").get<double>();
    if (j.contains("beta")) spec.beta = j.at("beta").get<double>();
    if (j.contains("mrf_sweeps"))
      spec.mrf_sweeps = j.at("mrf_sweeps").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError("bad scene spec " + path.string() + ": " + e.what());
  }
  return spec;
}

void write_chain_trace_csv(const std::filesystem::path& path,
                           const PosteriorChain& chain) {
  std::string text;
  for (std::size_t k = 1; k <= chain.num_classes; ++k)
    for (std::size_t r = 1; r <= chain.endmembers; ++r)
      text += "a_" + std::to_string(k) + "_" + std::to_string(r) + ",";
  text += "b,sigma2,sigma_b2\n";
  const std::size_t kr = chain.num_classes * chain.endmembers;
  for (std::size_t i = 0; i < chain.stored(); ++i) {
    for (std::size_t j = 0; j < kr; ++j) {
      text += format_double(chain.abundance_samples[i * kr + j]);
      text += ',';
    }
    text += format_double(chain.b_samples[i]);
    text += ',';
    text += format_double(chain.sigma2_samples[i]);
    text += ',';
    text += format_double(chain.sigma_b2_samples[i]);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_label_counts_csv(const std::filesystem::path& path,
                            const PosteriorChain& chain) {
  std::string text;
  const std::size_t P = chain.width * chain.height;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t k = 0; k < chain.num_classes; ++k) {
      if (k) text += ',';
      text += std::to_string(chain.label_counts[p * chain.num_classes + k]);
    }
    text += '\n';
  }
  write_text_file(path, text);
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const PosteriorChain& chain) {
  std::string text = "iteration,log_posterior\n";
  for (std::size_t t = 0; t < chain.log_posterior.size(); ++t) {
    text += std::to_string(t);
    text += ',';
    text += format_double(chain.log_posterior[t]);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_acceptance_csv(const std::filesystem::path& path,
                          const PosteriorChain& chain) {
  std::string text =
      "class,acceptance_rate,acceptance_rate_post_burn_in,final_proposal_"
      "scale\n";
  for (std::size_t k = 0; k < chain.num_classes; ++k) {
    text += std::to_string(k + 1);
    text += ',';
    text += format_double(chain.acceptance_rate[k]);
    text += ',';
    text += format_double(chain.acceptance_rate_post[k]);
    text += ',';
    text += format_double(chain.proposal_scale_final[k]);
    text += '\n';
  }
  write_text_file(path, text);
}

namespace {

json report_to_json(const EvalReport& report,
                    std::optional<double> fcls_rmse) {
  json j;
  j["rmse"] = report.rmse;
  j["re"] = report.re;
  j["label_accuracy"] = report.label_accuracy;
  j["per_class_abundance_error"] = report.per_class_abundance_error;
  if (fcls_rmse) j["fcls_rmse"] = *fcls_rmse;
  return j;
}

}  // namespace

void write_eval_report_json(const std::filesystem::path& path,
                            const EvalReport& report,
                            std::optional<double> fcls_rmse) {
  write_json_file(path, report_to_json(report, fcls_rmse));
}

EvalReport read_eval_report_json(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  EvalReport report;
  try {
    report.rmse = j.at("rmse").get<double>();
    report.re = j.at("re").get<double>();
    report.label_accuracy = j.at("label_accuracy").get<double>();
    report.per_class_abundance_error =
        j.at("per_class_abundance_error").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw IoError("bad eval report " + path.string() + ": " + e.what());
  }
  return report;
}

void write_eval_report_text(const std::filesystem::path& path,
                            const EvalReport& report,
                            std::optional<double> fcls_rmse) {
  const auto row = [](const std::string& name, double v) {
    std::string line = name;
    line.append(name.size() < 28 ? 28 - name.size() : 1, ' ');
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return line + buf + "\n";
  };
  std::string text;
  text += row("abundance RMSE", report.rmse);
  if (fcls_rmse) text += row("abundance RMSE (FCLS)", *fcls_rmse);
  text += row("reconstruction error", report.re);
  text += row("label accuracy", report.label_accuracy);
  for (std::size_t k = 0; k < report.per_class_abundance_error.size(); ++k)
    text += row("class " + std::to_string(k + 1) + " abundance error",
                report.per_class_abundance_error[k]);
  write_text_file(path, text);
}

}  // namespace unmix::io
