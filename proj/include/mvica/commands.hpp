#pragma once

#include "mvica/benchmark.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace mvica {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIoError = 1;
inline constexpr int kExitValidationError = 2;
inline constexpr int kExitNotConverged = 3;

struct FitOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_dir = ".";
  double sigma = 1.0;
  double tol = 1e-4;
  int max_sweeps = 10000;
  std::string init = "pipeline";  // pipeline | identity | permica
  uint64_t seed = 0;              // reserved; every supported init is deterministic
};

struct BenchmarkCommandOptions {
  BenchmarkOptions bench;
  std::filesystem::path out_dir = ".";
};

struct EvalOptions {
  std::string metric;  // r2 | recon | tsm
  std::filesystem::path est_path;
  std::filesystem::path ref_path;
  int window = 9;
};

/// Fits the model on the manifest's views and writes W_<i>.csv, sources.csv
/// and summary.txt into out_dir.
int run_fit(const FitOptions& opts);

/// Runs the synthetic sweep and writes results.csv and summary.csv.
int run_synth_benchmark(const BenchmarkCommandOptions& opts);

/// Prints the requested metric as key=value lines on stdout.
int run_eval(const EvalOptions& opts);

}  // namespace mvica
