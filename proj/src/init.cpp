#include "mvica/init.hpp"

#include "mvica/baselines.hpp"
#include "mvica/metrics.hpp"
#include "mvica/solver.hpp"

namespace mvica {

namespace {

// Reorders and rescales the rows of w so that its sources line up with the
// reference: new row a = scale_a * sign_a * old row perm[a].
Matrix apply_alignment(const Matrix& w, const Alignment& a) {
  Matrix out(w.rows(), w.cols());
  for (int row = 0; row < w.rows(); ++row) {
    const int src = a.perm[static_cast<size_t>(row)];
    out.row(row) = a.scales[static_cast<size_t>(row)] * a.signs[static_cast<size_t>(row)] *
                   w.row(src);
  }
  return out;
}

}  // namespace

UnmixingSet permica(const MultiViewDataset& data, const Contrast& c, int n_rounds,
                    const SolverConfig& cfg) {
  if (n_rounds < 1) throw ValidationError("n_rounds must be >= 1");
  cfg.validate();
  const int m = data.view_count();

  std::vector<Matrix> w(static_cast<size_t>(m));
  std::vector<Matrix> sources(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    InfomaxResult ica = infomax_ica(data.view(i), c, cfg);
    w[static_cast<size_t>(i)] = std::move(ica.unmixing);
    sources[static_cast<size_t>(i)] = std::move(ica.sources);
  }
  if (m == 1) return UnmixingSet(std::move(w));

  // First pass: view 0 is the reference.
  const SharedSources reference(sources[0]);
  for (int i = 1; i < m; ++i) {
    const Alignment a = align(SharedSources(sources[static_cast<size_t>(i)]), reference);
    w[static_cast<size_t>(i)] = apply_alignment(w[static_cast<size_t>(i)], a);
    sources[static_cast<size_t>(i)].noalias() = w[static_cast<size_t>(i)] * data.view(i);
  }

  // Refinement passes align every view against the current average.
  for (int round = 1; round < n_rounds; ++round) {
    Matrix average = sources[0];
    for (int i = 1; i < m; ++i) average += sources[static_cast<size_t>(i)];
    average /= static_cast<double>(m);
    const SharedSources target(average);
    for (int i = 0; i < m; ++i) {
      const Alignment a = align(SharedSources(sources[static_cast<size_t>(i)]), target);
      w[static_cast<size_t>(i)] = apply_alignment(w[static_cast<size_t>(i)], a);
      sources[static_cast<size_t>(i)].noalias() = w[static_cast<size_t>(i)] * data.view(i);
    }
  }
  return UnmixingSet(std::move(w));
}

UnmixingSet diagonal_scaling(const UnmixingSet& w, const MultiViewDataset& data,
                             const SolverConfig& cfg, const Contrast& c) {
  return detail::diagonal_sweep_loop(data, cfg, c, w).first;
}

UnmixingSet init_pipeline(const MultiViewDataset& data, const SolverConfig& cfg,
                          const Contrast& c) {
  const UnmixingSet aligned = permica(data, c, /*n_rounds=*/3, cfg);
  return diagonal_scaling(aligned, data, cfg, c);
}

}  // namespace mvica
