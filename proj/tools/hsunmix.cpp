// hsunmix: synthetic-scene generation, MCMC unmixing, and evaluation for
// hyperspectral cubes under the post-nonlinear mixing model with a Potts
// label field. Exit codes: 0 success, 2 usage/config error, 3 I/O error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unmix/errors.hpp"
#include "unmix/io.hpp"
#include "unmix/kernels.hpp"
#include "unmix/metrics.hpp"
#include "unmix/mrf.hpp"
#include "unmix/rng.hpp"
#include "unmix/sampler.hpp"
#include "unmix/synth.hpp"
#include "unmix/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultLibrarySeed = 1;

void require_input(const fs::path& path) {
  if (!fs::exists(path))
    throw unmix::InputError("input path does not exist: " + path.string());
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw unmix::IoError("cannot create " + dir.string());
  return dir;
}

void select_kernels_or_throw(const std::string& name) {
  if (!unmix::kernels::select(name))
    throw unmix::InputError("kernel backend unavailable: " + name);
}

// ---------------------------------------------------------------- synth --

struct SynthArgs {
  std::string preset;
  std::string spec_path;
  std::string out = ".";
  std::string library_path;
  std::string model;
  std::vector<double> gamma;
  std::optional<double> b;
  std::optional<double> sigma2;
  std::optional<double> beta;
  std::optional<std::size_t> width, height, mrf_sweeps;
  std::size_t bands = 189;
  std::size_t endmembers = 8;
  std::uint64_t seed = 0;
  std::uint64_t library_seed = kDefaultLibrarySeed;
  std::string kernels = "auto";
};

int run_synth(const SynthArgs& args) {
  select_kernels_or_throw(args.kernels);

  unmix::SceneSpec spec;
  if (!args.spec_path.empty()) {
    require_input(args.spec_path);
    spec = unmix::io::read_scene_spec(args.spec_path);
  } else {
    // Table-1 style defaults; --preset only switches the mixing model.
    spec = unmix::preset_scene(args.preset.empty() ? "paper-i3"
                                                   : args.preset);
  }
  if (!args.model.empty())
    spec.model = unmix::mixing_model_from_name(args.model);
  if (!args.gamma.empty()) spec.gamma = args.gamma;
  if (args.b) spec.b = *args.b;
  if (args.sigma2) spec.sigma2 = *args.sigma2;
  if (args.beta) spec.beta = *args.beta;
  if (args.width) spec.width = *args.width;
  if (args.height) spec.height = *args.height;
  if (args.mrf_sweeps) spec.mrf_sweeps = *args.mrf_sweeps;
  spec.seed = args.seed;

  unmix::SpectralLibrary lib;
  if (!args.library_path.empty()) {
    require_input(args.library_path);
    lib = unmix::io::read_library_csv(args.library_path);
  } else {
    lib = unmix::make_synthetic_library(args.bands, args.endmembers,
                                        args.library_seed);
  }

  const unmix::GroundTruth gt = unmix::generate_scene(spec, lib);
  const fs::path dir = ensure_out_dir(args.out);
  unmix::io::write_library_csv(dir / "library.csv", lib);
  unmix::io::write_cube(dir / "clean.cube.json", gt.clean_cube);
  unmix::io::write_cube(dir / "noisy.cube.json", gt.noisy_cube);
  unmix::io::write_labels_csv(dir / "labels.csv", gt.labels);
  unmix::io::write_labels_pgm(dir / "labels.pgm", gt.labels,
                              spec.num_classes);
  unmix::io::write_abundance_csv(dir / "class_abundances.csv",
                                 gt.class_abundances);
  unmix::io::write_scene_spec(dir / "scene.json", spec);

  json manifest;
  manifest["command"] = "synth";
  if (!args.preset.empty()) manifest["preset"] = args.preset;
  manifest["scene"] = {
      {"width", spec.width},
      {"height", spec.height},
      {"num_classes", spec.num_classes},
      {"model", std::string(unmix::mixing_model_name(spec.model))},
      {"class_abundances", spec.class_abundances},
      {"b", spec.b},
      {"gamma", spec.gamma},
      {"sigma2", spec.sigma2},
      {"beta", spec.beta},
      {"mrf_sweeps", spec.mrf_sweeps},
      {"seed", spec.seed},
  };
  if (!args.library_path.empty()) {
    manifest["library"] = {{"source", args.library_path}};
  } else {
    manifest["library"] = {{"source", "synthetic"},
                           {"bands", args.bands},
                           {"endmembers", args.endmembers},
                           {"seed", args.library_seed}};
  }
  manifest["kernel_backend"] = unmix::kernels::active().name;
  manifest["realized_snr_db"] =
      unmix::realized_snr_db(gt.clean_cube, gt.noisy_cube);
  manifest["outputs"] = {"library.csv",   "clean.cube.json",
                         "clean.cube.raw", "noisy.cube.json",
                         "noisy.cube.raw", "labels.csv",
                         "labels.pgm",     "class_abundances.csv",
                         "scene.json"};
  unmix::io::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- unmix --

struct UnmixArgs {
  std::string cube_path;
  std::string library_path;
  std::string out = ".";
  unmix::SamplerConfig config;
  std::string label_sweep = "raster";
  std::size_t chains = 1;
  std::string kernels = "auto";
};

int run_unmix(const UnmixArgs& args) {
  select_kernels_or_throw(args.kernels);
  require_input(args.cube_path);
  require_input(args.library_path);
  const unmix::HyperCube cube = unmix::io::read_cube(args.cube_path);
  const unmix::SpectralLibrary lib =
      unmix::io::read_library_csv(args.library_path);
  if (args.chains == 0) throw unmix::InputError("need at least one chain");

  unmix::SamplerConfig config = args.config;
  if (args.label_sweep == "raster") {
    config.label_sweep = unmix::SweepOrder::Raster;
  } else if (args.label_sweep == "checkerboard") {
    config.label_sweep = unmix::SweepOrder::Checkerboard;
  } else {
    throw unmix::InputError("unknown label sweep: " + args.label_sweep);
  }

  // Independent chains, one thread each, seeds derived from --seed.
  std::vector<unmix::PosteriorChain> chains(args.chains);
  std::vector<std::string> errors(args.chains);
  {
    std::vector<std::thread> threads;
    threads.reserve(args.chains);
    for (std::size_t c = 0; c < args.chains; ++c) {
      threads.emplace_back([&, c] {
        try {
          unmix::SamplerConfig chain_config = config;
          chain_config.seed = unmix::derive_seed(config.seed + c);
          chains[c] = unmix::run_chain(cube, lib, chain_config);
        } catch (const std::exception& e) {
          errors[c] = e.what();
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw unmix::InputError(err);

  const fs::path dir = ensure_out_dir(args.out);
  json chain_list = json::array();
  for (std::size_t c = 0; c < args.chains; ++c) {
    const std::string suffix =
        args.chains > 1 ? "_c" + std::to_string(c) : "";
    const auto file = [&](const std::string& stem, const std::string& ext) {
      return dir / (stem + suffix + ext);
    };
    const unmix::PosteriorEstimates est =
        unmix::posterior_estimates(chains[c]);
    unmix::io::write_abundance_csv(file("est_class_abundances", ".csv"),
                                   est.abundance);
    unmix::io::write_labels_csv(file("est_labels", ".csv"), est.labels);
    unmix::io::write_labels_pgm(file("est_labels", ".pgm"), est.labels,
                                static_cast<int>(chains[c].num_classes));
    json scalars;
    scalars["b"] = est.b;
    scalars["sigma2"] = est.sigma2;
    scalars["sigma_b2"] = est.sigma_b2;
    unmix::io::write_text_file(file("est_scalars", ".json"),
                               scalars.dump(2) + "\n");
    unmix::io::write_chain_trace_csv(file("trace", ".csv"), chains[c]);
    unmix::io::write_label_counts_csv(file("label_counts", ".csv"),
                                      chains[c]);
    unmix::io::write_diagnostics_csv(file("diagnostics", ".csv"), chains[c]);
    unmix::io::write_acceptance_csv(file("acceptance", ".csv"), chains[c]);
    chain_list.push_back(
        {{"index", c}, {"seed", unmix::derive_seed(config.seed + c)}});
  }

  json manifest;
  manifest["command"] = "unmix";
  manifest["cube"] = args.cube_path;
  manifest["library"] = args.library_path;
  manifest["config"] = {
      {"n_mc", config.n_mc},
      {"burn_in", config.burn_in},
      {"num_classes", config.num_classes},
      {"eta", config.eta},
      {"beta", config.beta},
      {"sigma_b2_prior_shape", config.sigma_b2_prior.shape},
      {"sigma_b2_prior_scale", config.sigma_b2_prior.scale},
      {"proposal_scale", config.proposal_scale},
      {"adapt_target", config.adapt_target},
      {"seed", config.seed},
      {"label_sweep", args.label_sweep},
      {"init_label_sweeps", config.init_label_sweeps},
      {"chains", args.chains},
  };
  manifest["chains"] = chain_list;
  manifest["kernel_backend"] = unmix::kernels::active().name;
  unmix::io::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// ----------------------------------------------------------------- eval --

struct EvalArgs {
  std::string est_dir;
  std::string truth_dir;
  std::string out = ".";
  bool with_fcls = false;
  std::string kernels = "auto";
};

int run_eval(const EvalArgs& args) {
  select_kernels_or_throw(args.kernels);
  const fs::path est(args.est_dir), truth(args.truth_dir);
  for (const char* name :
       {"est_class_abundances.csv", "est_labels.csv", "est_scalars.json"})
    require_input(est / name);
  for (const char* name : {"class_abundances.csv", "labels.csv",
                           "clean.cube.json", "library.csv"})
    require_input(truth / name);

  const auto lib = unmix::io::read_library_csv(truth / "library.csv");
  const auto est_rows =
      unmix::io::read_abundance_csv(est / "est_class_abundances.csv");
  const auto est_labels = unmix::io::read_labels_csv(est / "est_labels.csv");
  const auto truth_rows =
      unmix::io::read_abundance_csv(truth / "class_abundances.csv");
  const auto truth_labels = unmix::io::read_labels_csv(truth / "labels.csv");
  const auto clean = unmix::io::read_cube(truth / "clean.cube.json");

  json scalars = json::parse(
      std::ifstream(est / "est_scalars.json"), nullptr, false);
  if (scalars.is_discarded() || !scalars.contains("b"))
    throw unmix::IoError("bad est_scalars.json in " + est.string());
  const double est_b = scalars["b"].get<double>();

  const unmix::EvalReport report =
      unmix::evaluate_scene(lib, est_rows, est_labels, est_b, truth_rows,
                            truth_labels, clean);

  std::optional<double> fcls_rmse;
  if (args.with_fcls) {
    require_input(truth / "noisy.cube.json");
    const auto noisy = unmix::io::read_cube(truth / "noisy.cube.json");
    const auto fcls = unmix::fcls_baseline(noisy, lib);
    fcls_rmse = unmix::rmse(
        fcls.abundance, unmix::expand_by_labels(truth_rows, truth_labels));
  }

  const fs::path dir = ensure_out_dir(args.out);
  unmix::io::write_eval_report_json(dir / "report.json", report, fcls_rmse);
  unmix::io::write_eval_report_text(dir / "report.txt", report, fcls_rmse);

  json manifest;
  manifest["command"] = "eval";
  manifest["estimates"] = args.est_dir;
  manifest["ground_truth"] = args.truth_dir;
  manifest["with_fcls"] = args.with_fcls;
  manifest["kernel_backend"] = unmix::kernels::active().name;
  manifest["outputs"] = {"report.json", "report.txt"};
  unmix::io::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "rmse " << unmix::io::format_double(report.rmse) << "\n"
            << "re " << unmix::io::format_double(report.re) << "\n"
            << "label_accuracy "
            << unmix::io::format_double(report.label_accuracy) << "\n";
  if (fcls_rmse)
    std::cout << "fcls_rmse " << unmix::io::format_double(*fcls_rmse) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Semi-supervised nonlinear hyperspectral unmixing with a Potts label "
      "field (post-nonlinear mixing, Metropolis-within-Gibbs)"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled scene");
  synth_cmd->add_option("--preset", synth.preset,
                        "paper-i1 (linear), paper-i2 (bilinear), paper-i3 "
                        "(post-nonlinear)");
  synth_cmd->add_option("--spec", synth.spec_path, "Scene spec JSON");
  synth_cmd->add_option("--model", synth.model, "lmm|gbm|ppnmm override");
  synth_cmd->add_option("--gamma", synth.gamma, "Bilinear coefficients")
      ->delimiter(',');
  synth_cmd->add_option("--b", synth.b, "Post-nonlinear amplitude");
  synth_cmd->add_option("--sigma2", synth.sigma2, "Noise variance");
  synth_cmd->add_option("--beta", synth.beta, "Potts granularity");
  synth_cmd->add_option("--width", synth.width);
  synth_cmd->add_option("--height", synth.height);
  synth_cmd->add_option("--mrf-sweeps", synth.mrf_sweeps,
                        "Label-map Gibbs sweeps");
  synth_cmd->add_option("--library", synth.library_path,
                        "Endmember library CSV (default: synthesize)");
  synth_cmd->add_option("--bands", synth.bands, "Synthetic library bands");
  synth_cmd->add_option("--endmembers", synth.endmembers,
                        "Synthetic library endmembers");
  synth_cmd->add_option("--library-seed", synth.library_seed,
                        "Synthetic library seed (independent of --seed)");
  synth_cmd->add_option("--seed", synth.seed, "Scene seed");
  synth_cmd->add_option("--out", synth.out, "Output directory");
  synth_cmd->add_option("--kernels", synth.kernels, "auto|scalar|avx2");

  UnmixArgs unmix_args;
  CLI::App* unmix_cmd =
      app.add_subcommand("unmix", "Run the Gibbs sampler on a cube");
  unmix_cmd->add_option("--cube", unmix_args.cube_path, "Cube sidecar JSON")
      ->required();
  unmix_cmd->add_option("--library", unmix_args.library_path, "Library CSV")
      ->required();
  unmix_cmd->add_option("--classes", unmix_args.config.num_classes,
                        "Label classes K");
  unmix_cmd->add_option("--iters", unmix_args.config.n_mc, "MCMC iterations");
  unmix_cmd->add_option("--burn-in", unmix_args.config.burn_in,
                        "Discarded iterations");
  unmix_cmd->add_option("--eta", unmix_args.config.eta,
                        "Dirichlet concentration");
  unmix_cmd->add_option("--beta", unmix_args.config.beta, "Potts granularity");
  unmix_cmd->add_option("--ig-shape", unmix_args.config.sigma_b2_prior.shape,
                        "sigma_b2 prior shape");
  unmix_cmd->add_option("--ig-scale", unmix_args.config.sigma_b2_prior.scale,
                        "sigma_b2 prior scale");
  unmix_cmd->add_option("--proposal-scale", unmix_args.config.proposal_scale,
                        "Initial random-walk stddev");
  unmix_cmd->add_option("--adapt-target", unmix_args.config.adapt_target,
                        "Burn-in acceptance target");
  unmix_cmd->add_option("--init-label-sweeps",
                        unmix_args.config.init_label_sweeps,
                        "Potts sweeps for the initial label map");
  unmix_cmd->add_option("--label-sweep", unmix_args.label_sweep,
                        "raster|checkerboard");
  unmix_cmd->add_option("--seed", unmix_args.config.seed, "Chain seed");
  unmix_cmd->add_option("--chains", unmix_args.chains,
                        "Independent parallel chains");
  unmix_cmd->add_option("--out", unmix_args.out, "Output directory");
  unmix_cmd->add_option("--kernels", unmix_args.kernels, "auto|scalar|avx2");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Score estimates against synthetic ground truth");
  eval_cmd->add_option("--est", eval.est_dir, "unmix output directory")
      ->required();
  eval_cmd->add_option("--truth", eval.truth_dir, "synth output directory")
      ->required();
  eval_cmd->add_option("--out", eval.out, "Output directory");
  eval_cmd->add_flag("--with-fcls", eval.with_fcls,
                     "Also score the constrained least-squares baseline");
  eval_cmd->add_option("--kernels", eval.kernels, "auto|scalar|avx2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (unmix_cmd->parsed()) return run_unmix(unmix_args);
    if (eval_cmd->parsed()) return run_eval(eval);
  } catch (const unmix::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const unmix::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
