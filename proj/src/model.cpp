#include "mvica/model.hpp"

namespace mvica {

namespace {

void check_shapes(const UnmixingSet& w, const MultiViewDataset& data) {
  if (w.view_count() != data.view_count())
    throw DimensionError("unmixing set and dataset disagree on the number of views");
  if (w.components() != data.components())
    throw DimensionError("unmixing set and dataset disagree on k");
}

}  // namespace

SharedSources shared_estimate(const UnmixingSet& w, const MultiViewDataset& data) {
  check_shapes(w, data);
  const int m = data.view_count();
  Matrix acc = w.matrix(0) * data.view(0);
  for (int i = 1; i < m; ++i) acc.noalias() += w.matrix(i) * data.view(i);
  return SharedSources(acc / static_cast<double>(m));
}

double negative_log_likelihood(const UnmixingSet& w, const MultiViewDataset& data,
                               const SolverConfig& cfg, const Contrast& c) {
  check_shapes(w, data);
  cfg.validate();
  const int m = data.view_count();
  const double n = static_cast<double>(data.samples());

  std::vector<Matrix> y(static_cast<size_t>(m));
  double log_det_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    log_det_sum += log_abs_det(w.matrix(i));
    y[static_cast<size_t>(i)].noalias() = w.matrix(i) * data.view(i);
  }

  Matrix shared = y[0];
  for (int i = 1; i < m; ++i) shared += y[static_cast<size_t>(i)];
  shared /= static_cast<double>(m);

  double quad = 0.0;
  if (m > 1) {
    for (int i = 0; i < m; ++i) quad += (y[static_cast<size_t>(i)] - shared).squaredNorm();
  }

  return -log_det_sum + quad / (2.0 * cfg.sigma * cfg.sigma * n) + c.sum_f(shared) / n;
}

double per_subject_loss(int view, const Matrix& w_i, const SharedSources& sminus,
                        const MultiViewDataset& data, const SolverConfig& cfg,
                        const Contrast& c) {
  cfg.validate();
  const int m = data.view_count();
  if (view < 0 || view >= m) throw DimensionError("view index out of range");
  const Matrix& x = data.view(view);
  if (w_i.rows() != x.rows() || w_i.cols() != x.rows())
    throw DimensionError("unmixing matrix shape does not match the view");
  if (sminus.values.rows() != x.rows() || sminus.values.cols() != x.cols())
    throw DimensionError("partial source sum shape does not match the view");

  const Matrix y = w_i * x;
  return detail::per_subject_loss_from_y(y, sminus.values, log_abs_det(w_i), m, cfg, c);
}

namespace detail {

double per_subject_loss_from_y(const Matrix& y, const Matrix& sminus, double log_det,
                               int view_count, const SolverConfig& cfg, const Contrast& c) {
  const double m = static_cast<double>(view_count);
  const double n = static_cast<double>(y.cols());
  double quad = 0.0;
  if (view_count > 1) {
    const double coeff = (1.0 - 1.0 / m) / (2.0 * cfg.sigma * cfg.sigma);
    quad = coeff * (y - (m / (m - 1.0)) * sminus).squaredNorm() / n;
  }
  const double f_term = (view_count == 1 ? c.sum_f(y) : c.sum_f(y / m + sminus)) / n;
  return -log_det + quad + f_term;
}

}  // namespace detail

}  // namespace mvica
