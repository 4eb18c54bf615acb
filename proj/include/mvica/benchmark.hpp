#pragma once

#include "mvica/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvica {

enum class Method { kMultiView, kGroupIca, kPcaGroupIca, kPermIca };

std::string method_name(Method m);

/// Parses "multiview", "groupica", "pca_groupica" or "permica".
Method parse_method(const std::string& name);

enum class SynthModel { kShared, kSensor };

struct BenchmarkOptions {
  int m = 10;
  int k = 15;
  int n = 1000;
  int seeds = 100;
  uint64_t base_seed = 0;
  int noise_points = 10;
  double noise_min = 1e-2;
  double noise_max = 10.0;
  std::vector<Method> methods = {Method::kMultiView, Method::kGroupIca,
                                 Method::kPcaGroupIca, Method::kPermIca};
  SynthModel model = SynthModel::kShared;
  int obs_dim = 50;        // sensor model only
  double sigma = 1.0;      // solver noise parameter
  double tol = 1e-4;
  int max_sweeps = 10000;
  bool record_timings = true;  // when false the timing column is written as 0

  void validate() const;
};

/// One (method, noise, seed) cell of the sweep.
struct BenchmarkRow {
  std::string method;
  double noise_std = 0.0;
  uint64_t seed = 0;
  double reconstruction_error = 0.0;  // NaN when the cell failed
  double wall_time_seconds = 0.0;
  bool converged = false;
  int sweeps = 0;
};

/// Per-(method, noise) quartiles of the error across seeds, NaN cells
/// excluded.
struct BenchmarkSummaryRow {
  std::string method;
  double noise_std = 0.0;
  int seeds = 0;
  double err_q25 = 0.0;
  double err_median = 0.0;
  double err_q75 = 0.0;
  double converged_fraction = 0.0;
};

/// Geometric grid of points values between lo and hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int points);

/// Runs every (method, noise, seed) cell on a worker pool capped by the
/// MVICA_THREADS environment variable. Row order is methods (as given) x
/// noise (ascending) x seed (ascending), independent of the pool size.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& opts);

std::vector<BenchmarkSummaryRow> summarize(const std::vector<BenchmarkRow>& rows);

std::string results_csv(const std::vector<BenchmarkRow>& rows);
std::string summary_csv(const std::vector<BenchmarkSummaryRow>& rows);

/// Worker-pool width: MVICA_THREADS when set (>= 1), else the hardware
/// concurrency.
int thread_cap();

}  // namespace mvica
