#include "mvica/commands.hpp"

#include "mvica/baselines.hpp"
#include "mvica/csv_io.hpp"
#include "mvica/init.hpp"
#include "mvica/metrics.hpp"
#include "mvica/solver.hpp"

#include <fstream>
#include <iostream>

namespace mvica {

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace

int run_fit(const FitOptions& opts) {
  try {
    const Manifest manifest = load_manifest(opts.manifest);
    const MultiViewDataset data = load_dataset(manifest);

    SolverConfig cfg;
    cfg.sigma = opts.sigma;
    cfg.tol = opts.tol;
    cfg.max_sweeps = opts.max_sweeps;
    cfg.validate();
    const Contrast contrast = Contrast::log_cosh();

    UnmixingSet init = [&]() {
      if (opts.init == "identity")
        return UnmixingSet::identity(data.view_count(), data.components());
      if (opts.init == "permica") return permica(data, contrast, 3, cfg);
      if (opts.init == "pipeline") return init_pipeline(data, cfg, contrast);
      throw ValidationError("unknown init '" + opts.init + "'");
    }();

    const FitResult result = fit(data, cfg, contrast, init);

    std::filesystem::create_directories(opts.out_dir);
    for (int i = 0; i < data.view_count(); ++i)
      store_matrix(result.unmixing.matrix(i),
                   opts.out_dir / ("W_" + std::to_string(i) + ".csv"));
    store_matrix(result.sources.values, opts.out_dir / "sources.csv");

    std::string summary;
    summary += "converged=" + std::string(result.converged ? "true" : "false") + "\n";
    summary += "sweeps=" + std::to_string(result.sweeps) + "\n";
    summary += "final_loss=" + format_double(result.loss_trace.back()) + "\n";
    summary += "final_grad_norm=" +
               format_double(result.grad_trace.empty() ? 0.0 : result.grad_trace.back()) + "\n";
    summary += "m=" + std::to_string(data.view_count()) + "\n";
    summary += "k=" + std::to_string(data.components()) + "\n";
    summary += "n=" + std::to_string(data.samples()) + "\n";
    write_text(opts.out_dir / "summary.txt", summary);

    return result.converged ? kExitOk : kExitNotConverged;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ParseError& e) {
    std::cerr << "error: line " << e.line << ": " << e.what() << "\n";
    return kExitValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  }
}

int run_synth_benchmark(const BenchmarkCommandOptions& opts) {
  try {
    opts.bench.validate();
    const std::vector<BenchmarkRow> rows = run_benchmark(opts.bench);
    std::filesystem::create_directories(opts.out_dir);
    write_text(opts.out_dir / "results.csv", results_csv(rows));
    write_text(opts.out_dir / "summary.csv", summary_csv(summarize(rows)));
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  }
}

int run_eval(const EvalOptions& opts) {
  try {
    const Matrix est = load_matrix(opts.est_path);
    const Matrix ref = load_matrix(opts.ref_path);
    if (est.rows() != ref.rows() || est.cols() != ref.cols())
      throw DimensionError("estimate and reference shapes differ");

    if (opts.metric == "r2") {
      double total = 0.0;
      for (Eigen::Index j = 0; j < est.rows(); ++j) {
        const double r2 = r2_score(est.row(j).transpose(), ref.row(j).transpose());
        std::cout << "r2_" << j << "=" << format_double(r2) << "\n";
        total += r2;
      }
      std::cout << "r2_mean=" << format_double(total / static_cast<double>(est.rows()))
                << "\n";
    } else if (opts.metric == "recon") {
      const double err = reconstruction_error(SharedSources(est), SharedSources(ref));
      std::cout << "reconstruction_error=" << format_double(err) << "\n";
    } else if (opts.metric == "tsm") {
      const double acc =
          time_segment_matching(SharedSources(ref), SharedSources(est), opts.window);
      std::cout << "accuracy=" << format_double(acc) << "\n";
    } else {
      throw ValidationError("unknown metric '" + opts.metric + "'");
    }
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ParseError& e) {
    std::cerr << "error: line " << e.line << ": " << e.what() << "\n";
    return kExitValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  }
}

}  // namespace mvica
