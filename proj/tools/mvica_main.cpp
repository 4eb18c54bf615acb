#include "mvica/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"MultiView ICA: group blind source separation"};
  app.require_subcommand(1);

  // fit ------------------------------------------------------------------
  mvica::FitOptions fit_opts;
  std::string fit_manifest;
  std::string fit_out = ".";
  auto* fit_cmd = app.add_subcommand("fit", "Fit unmixing matrices on a dataset manifest");
  fit_cmd->add_option("manifest", fit_manifest, "Dataset manifest path")->required();
  fit_cmd->add_option("--sigma", fit_opts.sigma, "Noise parameter of the objective");
  fit_cmd->add_option("--tol", fit_opts.tol, "Gradient sup-norm tolerance");
  fit_cmd->add_option("--max-sweeps", fit_opts.max_sweeps, "Sweep budget");
  fit_cmd->add_option("--init", fit_opts.init, "pipeline | identity | permica");
  fit_cmd->add_option("--seed", fit_opts.seed,
                      "Reserved; all supported inits are deterministic");
  fit_cmd->add_option("--out", fit_out, "Output directory");

  // synth-benchmark --------------------------------------------------------
  mvica::BenchmarkCommandOptions bench_opts;
  std::vector<std::string> bench_methods;
  std::string bench_model = "shared";
  std::string bench_out = ".";
  std::string bench_timings = "real";
  auto* bench_cmd =
      app.add_subcommand("synth-benchmark", "Reconstruction-error sweep on synthetic data");
  bench_cmd->add_option("--m", bench_opts.bench.m, "Number of views");
  bench_cmd->add_option("--k", bench_opts.bench.k, "Number of sources");
  bench_cmd->add_option("--n", bench_opts.bench.n, "Number of samples");
  bench_cmd->add_option("--seeds", bench_opts.bench.seeds, "Seeds per cell");
  bench_cmd->add_option("--base-seed", bench_opts.bench.base_seed, "First seed");
  bench_cmd->add_option("--noise-points", bench_opts.bench.noise_points,
                        "Geometric noise grid size");
  bench_cmd->add_option("--noise-min", bench_opts.bench.noise_min, "Smallest noise std");
  bench_cmd->add_option("--noise-max", bench_opts.bench.noise_max, "Largest noise std");
  bench_cmd->add_option("--methods", bench_methods,
                        "Subset of multiview,groupica,pca_groupica,permica")
      ->delimiter(',');
  bench_cmd->add_option("--model", bench_model, "shared | sensor");
  bench_cmd->add_option("--obs-dim", bench_opts.bench.obs_dim,
                        "Observation dimension (sensor model)");
  bench_cmd->add_option("--sigma", bench_opts.bench.sigma, "Solver noise parameter");
  bench_cmd->add_option("--tol", bench_opts.bench.tol, "Solver tolerance");
  bench_cmd->add_option("--max-sweeps", bench_opts.bench.max_sweeps, "Solver sweep budget");
  bench_cmd->add_option("--timings", bench_timings,
                        "real | zero (zero writes a constant timing column)");
  bench_cmd->add_option("--out", bench_out, "Output directory");

  // eval -------------------------------------------------------------------
  mvica::EvalOptions eval_opts;
  std::string eval_est, eval_ref;
  auto* eval_cmd = app.add_subcommand("eval", "Metrics between source CSV files");
  eval_cmd->add_option("metric", eval_opts.metric, "r2 | recon | tsm")->required();
  eval_cmd->add_option("--est", eval_est, "Estimated sources CSV")->required();
  eval_cmd->add_option("--ref", eval_ref, "Reference sources CSV")->required();
  eval_cmd->add_option("--window", eval_opts.window, "Window length for tsm");

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed()) {
    fit_opts.manifest = fit_manifest;
    fit_opts.out_dir = fit_out;
    return mvica::run_fit(fit_opts);
  }
  if (bench_cmd->parsed()) {
    try {
      if (!bench_methods.empty()) {
        bench_opts.bench.methods.clear();
        for (const auto& name : bench_methods)
          bench_opts.bench.methods.push_back(mvica::parse_method(name));
      }
      if (bench_model == "sensor") {
        bench_opts.bench.model = mvica::SynthModel::kSensor;
      } else if (bench_model != "shared") {
        throw mvica::ValidationError("unknown model '" + bench_model + "'");
      }
      if (bench_timings == "zero") {
        bench_opts.bench.record_timings = false;
      } else if (bench_timings != "real") {
        throw mvica::ValidationError("unknown timings mode '" + bench_timings + "'");
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mvica::kExitValidationError;
    }
    bench_opts.out_dir = bench_out;
    return mvica::run_synth_benchmark(bench_opts);
  }
  eval_opts.est_path = eval_est;
  eval_opts.ref_path = eval_ref;
  return mvica::run_eval(eval_opts);
}
