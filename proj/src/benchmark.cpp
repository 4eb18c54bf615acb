#include "mvica/benchmark.hpp"

#include "mvica/baselines.hpp"
#include "mvica/init.hpp"
#include "mvica/metrics.hpp"
#include "mvica/simgen.hpp"
#include "mvica/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace mvica {

std::string method_name(Method m) {
  switch (m) {
    case Method::kMultiView: return "multiview";
    case Method::kGroupIca: return "groupica";
    case Method::kPcaGroupIca: return "pca_groupica";
    case Method::kPermIca: return "permica";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "multiview") return Method::kMultiView;
  if (name == "groupica") return Method::kGroupIca;
  if (name == "pca_groupica") return Method::kPcaGroupIca;
  if (name == "permica") return Method::kPermIca;
  throw ValidationError("unknown method '" + name + "'");
}

void BenchmarkOptions::validate() const {
  if (m < 1 || k < 1 || n < 1) throw ValidationError("m, k, n must be >= 1");
  if (seeds < 1) throw ValidationError("seeds must be >= 1");
  if (noise_points < 1) throw ValidationError("noise grid needs at least one point");
  if (!(noise_min > 0.0) || !(noise_max >= noise_min))
    throw ValidationError("noise grid bounds must satisfy 0 < min <= max");
  if (methods.empty()) throw ValidationError("at least one method required");
  if (model == SynthModel::kSensor && obs_dim < k)
    throw ValidationError("obs_dim must be >= k for the sensor model");
  if (!(sigma > 0.0) || !(tol > 0.0) || max_sweeps < 1)
    throw ValidationError("solver parameters must be positive");
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (points < 1) throw ValidationError("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> grid(static_cast<size_t>(points));
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i)
    grid[static_cast<size_t>(i)] = std::exp(std::log(lo) + step * i);
  return grid;
}

int thread_cap() {
  if (const char* env = std::getenv("MVICA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct CellResult {
  double error = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int sweeps = 0;
};

CellResult run_cell(Method method, const MultiViewDataset& data,
                    const SharedSources& truth, int k, const SolverConfig& cfg,
                    const Contrast& c) {
  CellResult out;
  switch (method) {
    case Method::kMultiView: {
      const UnmixingSet init = init_pipeline(data, cfg, c);
      const FitResult fitted = fit(data, cfg, c, init);
      out.error = reconstruction_error(fitted.sources, truth);
      out.converged = fitted.converged;
      out.sweeps = fitted.sweeps;
      break;
    }
    case Method::kGroupIca: {
      const GroupIcaResult r = group_ica(data, k, c, cfg);
      out.error = reconstruction_error(r.shared, truth);
      out.converged = r.converged;
      out.sweeps = r.sweeps;
      break;
    }
    case Method::kPcaGroupIca: {
      const GroupIcaResult r = pca_group_ica(data, k, c, cfg);
      out.error = reconstruction_error(r.shared, truth);
      out.converged = r.converged;
      out.sweeps = r.sweeps;
      break;
    }
    case Method::kPermIca: {
      // Alignment has no iterative stopping rule of its own; a completed
      // run counts as converged and the sweep column stays 0.
      const UnmixingSet w = permica(data, c, 3, cfg);
      const SharedSources est = shared_estimate(w, data);
      out.error = reconstruction_error(est, truth);
      out.converged = true;
      out.sweeps = 0;
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& opts) {
  opts.validate();
  const std::vector<double> grid = geometric_grid(opts.noise_min, opts.noise_max, opts.noise_points);
  const Contrast contrast = Contrast::log_cosh();

  SolverConfig cfg;
  cfg.sigma = opts.sigma;
  cfg.tol = opts.tol;
  cfg.max_sweeps = opts.max_sweeps;

  struct Cell {
    Method method;
    int noise_index;
    int seed_index;
  };
  std::vector<Cell> cells;
  for (const Method method : opts.methods)
    for (int g = 0; g < opts.noise_points; ++g)
      for (int s = 0; s < opts.seeds; ++s) cells.push_back({method, g, s});

  std::vector<BenchmarkRow> rows(cells.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& cell = cells[idx];
      const double noise = grid[static_cast<size_t>(cell.noise_index)];
      const uint64_t seed = opts.base_seed + static_cast<uint64_t>(cell.seed_index);

      BenchmarkRow row;
      row.method = method_name(cell.method);
      row.noise_std = noise;
      row.seed = seed;

      const auto start = std::chrono::steady_clock::now();
      try {
        SynthSpec spec;
        spec.m = opts.m;
        spec.k = opts.k;
        spec.n = opts.n;
        spec.noise_std = noise;
        spec.seed = seed;
        if (opts.model == SynthModel::kSensor) spec.obs_dim = opts.obs_dim;

        SynthInstance instance = opts.model == SynthModel::kSensor
                                     ? gen_sensor_noise_model(spec)
                                     : gen_shared_model(spec);

        // The sensor-noise protocol reduces every view to k components
        // before any method runs.
        MultiViewDataset data = [&]() {
          if (opts.model != SynthModel::kSensor) return std::move(instance.data);
          std::vector<Matrix> reduced;
          reduced.reserve(static_cast<size_t>(opts.m));
          for (int i = 0; i < opts.m; ++i)
            reduced.push_back(pca(instance.data.view(i), opts.k).reduced);
          return MultiViewDataset(std::move(reduced));
        }();

        const CellResult r =
            run_cell(cell.method, data, instance.true_sources, opts.k, cfg, contrast);
        row.reconstruction_error = r.error;
        row.converged = r.converged;
        row.sweeps = r.sweeps;
      } catch (const std::exception&) {
        row.reconstruction_error = std::numeric_limits<double>::quiet_NaN();
        row.converged = false;
        row.sweeps = 0;
      }
      const auto stop = std::chrono::steady_clock::now();
      row.wall_time_seconds =
          opts.record_timings ? std::chrono::duration<double>(stop - start).count() : 0.0;
      rows[idx] = std::move(row);
    }
  };

  const int workers = std::max(1, std::min<int>(thread_cap(), static_cast<int>(cells.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::vector<BenchmarkSummaryRow> summarize(const std::vector<BenchmarkRow>& rows) {
  // Preserve first-seen (method, noise) order, which matches the row order.
  std::vector<BenchmarkSummaryRow> out;
  std::vector<std::vector<double>> errors;
  std::vector<int> converged_counts;
  auto find_group = [&](const std::string& method, double noise) -> size_t {
    for (size_t i = 0; i < out.size(); ++i)
      if (out[i].method == method && out[i].noise_std == noise) return i;
    out.push_back(BenchmarkSummaryRow{method, noise, 0, 0, 0, 0, 0});
    errors.emplace_back();
    converged_counts.push_back(0);
    return out.size() - 1;
  };

  for (const auto& row : rows) {
    const size_t g = find_group(row.method, row.noise_std);
    out[g].seeds += 1;
    if (std::isfinite(row.reconstruction_error))
      errors[g].push_back(row.reconstruction_error);
    if (row.converged) converged_counts[g] += 1;
  }
  for (size_t g = 0; g < out.size(); ++g) {
    std::sort(errors[g].begin(), errors[g].end());
    out[g].err_q25 = quantile(errors[g], 0.25);
    out[g].err_median = quantile(errors[g], 0.5);
    out[g].err_q75 = quantile(errors[g], 0.75);
    out[g].converged_fraction =
        out[g].seeds == 0 ? 0.0 : static_cast<double>(converged_counts[g]) / out[g].seeds;
  }
  return out;
}

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string results_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "method,noise_std,seed,reconstruction_error,wall_time_seconds,converged,sweeps\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_value(r.noise_std) << ',' << r.seed << ','
        << format_value(r.reconstruction_error) << ',' << format_value(r.wall_time_seconds)
        << ',' << (r.converged ? "true" : "false") << ',' << r.sweeps << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<BenchmarkSummaryRow>& rows) {
  std::ostringstream out;
  out << "method,noise_std,seeds,err_q25,err_median,err_q75,converged_fraction\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_value(r.noise_std) << ',' << r.seeds << ','
        << format_value(r.err_q25) << ',' << format_value(r.err_median) << ','
        << format_value(r.err_q75) << ',' << format_value(r.converged_fraction) << '\n';
  }
  return out.str();
}

}  // namespace mvica
