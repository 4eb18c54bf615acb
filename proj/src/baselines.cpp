#include "mvica/baselines.hpp"

#include "mvica/solver.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace mvica {

PcaResult pca(const Matrix& x, int k) {
  if (!is_finite(x)) throw ValidationError("pca input must be finite");
  const auto p = x.rows();
  const auto n = x.cols();
  if (k < 1 || k > std::min(p, n)) throw ValidationError("k out of range for pca");

  PcaResult out;
  out.mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - out.mean;
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.projection = svd.matrixU().leftCols(k).transpose();
  out.reduced = svd.singularValues().head(k).asDiagonal() *
                svd.matrixV().leftCols(k).transpose();
  return out;
}

InfomaxResult infomax_ica(const Matrix& x, const Contrast& c, const SolverConfig& cfg) {
  if (!is_finite(x)) throw ValidationError("ica input must be finite");
  const auto k = x.rows();

  // Row-variance-normalizing diagonal start: deterministic and scale-free.
  Vector inv_std(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto row = x.row(j);
    const double var = (row.array() - row.mean()).square().mean();
    if (!(var > 0.0))
      throw ValidationError("ica input row " + std::to_string(j) + " has zero variance");
    inv_std(j) = 1.0 / std::sqrt(var);
  }
  const UnmixingSet init(std::vector<Matrix>{Matrix(inv_std.asDiagonal())});

  const MultiViewDataset data(std::vector<Matrix>{x});
  FitResult fitted = fit(data, cfg, c, init);

  InfomaxResult out;
  out.unmixing = fitted.unmixing.matrix(0);
  out.sources = std::move(fitted.sources.values);
  out.converged = fitted.converged;
  out.sweeps = fitted.sweeps;
  return out;
}

PcaResult group_pca(const MultiViewDataset& data, int k) {
  const int m = data.view_count();
  const auto rows = data.view(0).rows();
  Matrix stacked(rows * m, data.view(0).cols());
  for (int i = 0; i < m; ++i) stacked.middleRows(i * rows, rows) = data.view(i);
  return pca(stacked, k);
}

namespace {

// Least-squares map from a view onto the shared sources:
// argmin_W ||W x - s||_F, solved through the normal equations.
Matrix least_squares_unmixing(const Matrix& x, const Matrix& shared) {
  const Matrix gram = x * x.transpose();
  const Matrix rhs = shared * x.transpose();
  return gram.ldlt().solve(rhs.transpose()).transpose();
}

}  // namespace

GroupIcaResult group_ica(const MultiViewDataset& data, int k, const Contrast& c,
                         const SolverConfig& cfg) {
  if (data.components() != k)
    throw ValidationError("group_ica expects k-dimensional views; reduce per view first");
  const PcaResult reduced = group_pca(data, k);
  const InfomaxResult ica = infomax_ica(reduced.reduced, c, cfg);

  std::vector<Matrix> unmixings;
  unmixings.reserve(static_cast<size_t>(data.view_count()));
  for (int i = 0; i < data.view_count(); ++i)
    unmixings.push_back(least_squares_unmixing(data.view(i), ica.sources));

  GroupIcaResult out{SharedSources(ica.sources), UnmixingSet(std::move(unmixings)),
                     ica.converged, ica.sweeps};
  return out;
}

GroupIcaResult pca_group_ica(const MultiViewDataset& data, int k, const Contrast& c,
                             const SolverConfig& cfg) {
  std::vector<Matrix> reduced_views;
  reduced_views.reserve(static_cast<size_t>(data.view_count()));
  for (int i = 0; i < data.view_count(); ++i)
    reduced_views.push_back(pca(data.view(i), k).reduced);
  return group_ica(MultiViewDataset(std::move(reduced_views)), k, c, cfg);
}

}  // namespace mvica
