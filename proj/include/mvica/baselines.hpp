#pragma once

#include "mvica/types.hpp"

namespace mvica {

/// Row-centered PCA without whitening: X - mean = U D V^T, reduced keeps
/// the first k rows of D V^T, projection the first k rows of U^T.
struct PcaResult {
  Matrix projection;  // k x p
  Matrix reduced;     // k x n, rows ordered by non-increasing singular value
  Vector mean;        // length p
};

PcaResult pca(const Matrix& x, int k);

struct InfomaxResult {
  Matrix unmixing;  // k x k
  Matrix sources;   // k x n
  bool converged = false;
  int sweeps = 0;
};

/// Single-view maximum-likelihood ICA (the m = 1 solver) started from a
/// row-variance-normalizing diagonal matrix.
InfomaxResult infomax_ica(const Matrix& x, const Contrast& c, const SolverConfig& cfg);

/// PCA on the views stacked along the row axis (mk x n).
PcaResult group_pca(const MultiViewDataset& data, int k);

struct GroupIcaResult {
  SharedSources shared;
  UnmixingSet per_view_unmixing;
  bool converged = false;
  int sweeps = 0;
};

/// ICA applied after group_pca. Per-view unmixings are the least-squares
/// maps from each view onto the shared sources; views must already be
/// k-dimensional so those maps are square.
GroupIcaResult group_ica(const MultiViewDataset& data, int k, const Contrast& c,
                         const SolverConfig& cfg);

/// group_ica on views first individually reduced to k components by PCA.
GroupIcaResult pca_group_ica(const MultiViewDataset& data, int k, const Contrast& c,
                             const SolverConfig& cfg);

}  // namespace mvica
