#include "mvica/solver.hpp"

#include <cmath>
#include <utility>

namespace mvica {

namespace {

void check_shapes(const UnmixingSet& w, const MultiViewDataset& data) {
  if (w.view_count() != data.view_count())
    throw DimensionError("unmixing set and dataset disagree on the number of views");
  if (w.components() != data.components())
    throw DimensionError("unmixing set and dataset disagree on k");
}

std::vector<Matrix> unmix_all(const UnmixingSet& w, const MultiViewDataset& data) {
  std::vector<Matrix> y(static_cast<size_t>(data.view_count()));
  for (int i = 0; i < data.view_count(); ++i)
    y[static_cast<size_t>(i)].noalias() = w.matrix(i) * data.view(i);
  return y;
}

Matrix mean_of(const std::vector<Matrix>& y) {
  Matrix acc = y[0];
  for (size_t i = 1; i < y.size(); ++i) acc += y[i];
  return acc / static_cast<double>(y.size());
}

// Gradient of the loss at the current state for one view.
Matrix gradient_from_state(const Matrix& y, const Matrix& sminus,
                           const Matrix& f1_shared, int view_count,
                           const SolverConfig& cfg) {
  const double m = static_cast<double>(view_count);
  const double n = static_cast<double>(y.cols());
  Matrix lhs = f1_shared / m;
  if (view_count > 1) {
    const double coeff = (1.0 - 1.0 / m) / (cfg.sigma * cfg.sigma);
    lhs.noalias() += coeff * (y - (m / (m - 1.0)) * sminus);
  }
  Matrix g = (lhs * y.transpose()) / n;
  g.diagonal().array() -= 1.0;
  return g;
}

Matrix gamma_from_state(const Matrix& y, const Matrix& f2_shared, int view_count,
                        const SolverConfig& cfg) {
  const double m = static_cast<double>(view_count);
  const double n = static_cast<double>(y.cols());
  const double base = (1.0 - 1.0 / m) / (cfg.sigma * cfg.sigma);
  Matrix weights = f2_shared / (m * m);
  if (view_count > 1) weights.array() += base;
  Matrix gamma = (weights * y.cwiseAbs2().transpose()) / n;
  return gamma.cwiseMax(cfg.gamma_floor);
}

// Eigenvalue floor for the 2x2 pair blocks [[G_ab, 1], [1, G_ba]]. Blocks
// whose smallest eigenvalue falls below it (possible far from a solution,
// where the independence assumption behind the approximation fails) are
// shifted up so the closed-form inversion always yields a descent
// direction.
constexpr double kPairEigenvalueFloor = 1e-2;

Matrix quasi_newton_direction(const Matrix& gamma, const Matrix& g,
                              const SolverConfig& cfg) {
  const Eigen::Index k = gamma.rows();
  Matrix d(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    d(a, a) = -g(a, a) / std::max(gamma(a, a) + 1.0, cfg.denom_floor);
    for (Eigen::Index b = a + 1; b < k; ++b) {
      double gab = gamma(a, b);
      double gba = gamma(b, a);
      const double eig_min =
          0.5 * (gab + gba - std::sqrt((gab - gba) * (gab - gba) + 4.0));
      if (eig_min < kPairEigenvalueFloor) {
        const double shift = kPairEigenvalueFloor - eig_min;
        gab += shift;
        gba += shift;
      }
      const double denom = std::max(gab * gba - 1.0, cfg.denom_floor);
      d(a, b) = (-gba * g(a, b) + g(b, a)) / denom;
      d(b, a) = (-gab * g(b, a) + g(a, b)) / denom;
    }
  }
  return d;
}

struct SweepOutcome {
  double max_grad = 0.0;
  double loss_delta = 0.0;
};

// One pass over all views: quasi-Newton step with backtracking per view.
// When diagonal_only is set the search direction keeps only its diagonal.
SweepOutcome sweep_views(const MultiViewDataset& data, const SolverConfig& cfg,
                         const Contrast& c, bool diagonal_only, std::vector<Matrix>& w,
                         std::vector<Matrix>& y, std::vector<double>& log_dets,
                         Matrix& shared) {
  const int m = data.view_count();
  const double md = static_cast<double>(m);
  SweepOutcome out;
  Matrix f1_shared, f2_shared;
  for (int i = 0; i < m; ++i) {
    auto& yi = y[static_cast<size_t>(i)];
    auto& wi = w[static_cast<size_t>(i)];
    const Matrix sminus = shared - yi / md;
    c.eval_f1_f2(shared, f1_shared, f2_shared);

    const Matrix g = gradient_from_state(yi, sminus, f1_shared, m, cfg);
    const double grad_norm = diagonal_only ? g.diagonal().cwiseAbs().maxCoeff()
                                           : g.cwiseAbs().maxCoeff();
    out.max_grad = std::max(out.max_grad, grad_norm);

    const Matrix gamma = gamma_from_state(yi, f2_shared, m, cfg);
    Matrix d = quasi_newton_direction(gamma, g, cfg);
    if (diagonal_only) d = Matrix(d.diagonal().asDiagonal());

    const double current =
        detail::per_subject_loss_from_y(yi, sminus, log_dets[static_cast<size_t>(i)], m, cfg, c);
    const Matrix dy = d * yi;
    const Matrix dw = d * wi;
    double rho = 1.0;
    for (int trial = 0; trial < cfg.ls_max_halvings; ++trial, rho *= 0.5) {
      Matrix w_cand = wi + rho * dw;
      double log_det_cand;
      try {
        log_det_cand = log_abs_det(w_cand);
      } catch (const SingularMatrixError&) {
        continue;
      }
      Matrix y_cand = yi + rho * dy;
      const double cand =
          detail::per_subject_loss_from_y(y_cand, sminus, log_det_cand, m, cfg, c);
      if (cand < current) {
        wi = std::move(w_cand);
        yi = std::move(y_cand);
        log_dets[static_cast<size_t>(i)] = log_det_cand;
        shared = sminus + yi / md;
        out.loss_delta += cand - current;
        break;
      }
    }
  }
  return out;
}

}  // namespace

GradientMatrix relative_gradient(int view, const UnmixingSet& w, const MultiViewDataset& data,
                                 const SolverConfig& cfg, const Contrast& c) {
  check_shapes(w, data);
  cfg.validate();
  const int m = data.view_count();
  if (view < 0 || view >= m) throw DimensionError("view index out of range");

  const auto y = unmix_all(w, data);
  const Matrix shared = mean_of(y);
  const Matrix& yi = y[static_cast<size_t>(view)];
  const Matrix sminus = shared - yi / static_cast<double>(m);
  const Matrix f1_shared = c.eval_f1(shared);
  return GradientMatrix{gradient_from_state(yi, sminus, f1_shared, m, cfg)};
}

HessianDiagonals hessian_diagonals(int view, const UnmixingSet& w, const MultiViewDataset& data,
                                   const SolverConfig& cfg, const Contrast& c) {
  check_shapes(w, data);
  cfg.validate();
  const int m = data.view_count();
  if (view < 0 || view >= m) throw DimensionError("view index out of range");

  const auto y = unmix_all(w, data);
  const Matrix shared = mean_of(y);
  const Matrix f2_shared = c.eval_f2(shared);
  return HessianDiagonals{gamma_from_state(y[static_cast<size_t>(view)], f2_shared, m, cfg)};
}

Matrix apply_inverse_hessian(const HessianDiagonals& gamma, const GradientMatrix& g,
                             const SolverConfig& cfg) {
  if (gamma.gamma.rows() != gamma.gamma.cols())
    throw DimensionError("gamma must be square");
  if (g.values.rows() != gamma.gamma.rows() || g.values.cols() != gamma.gamma.cols())
    throw DimensionError("gradient and gamma must share shape");
  return quasi_newton_direction(gamma.gamma, g.values, cfg);
}

FitResult fit(const MultiViewDataset& data, const SolverConfig& cfg, const Contrast& c,
              const UnmixingSet& init) {
  cfg.validate();
  check_shapes(init, data);
  const int m = data.view_count();
  const double n = static_cast<double>(data.samples());

  std::vector<Matrix> w = init.matrices();
  std::vector<Matrix> y = unmix_all(init, data);
  std::vector<double> log_dets(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) log_dets[static_cast<size_t>(i)] = log_abs_det(w[static_cast<size_t>(i)]);
  Matrix shared = mean_of(y);

  double quad = 0.0;
  if (m > 1)
    for (const auto& yi : y) quad += (yi - shared).squaredNorm();
  double log_det_sum = 0.0;
  for (double ld : log_dets) log_det_sum += ld;
  double loss =
      -log_det_sum + quad / (2.0 * cfg.sigma * cfg.sigma * n) + c.sum_f(shared) / n;

  FitResult result{UnmixingSet(w), SharedSources(shared), {}, {}, false, 0};
  result.loss_trace.push_back(loss);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const SweepOutcome outcome =
        sweep_views(data, cfg, c, /*diagonal_only=*/false, w, y, log_dets, shared);
    loss += outcome.loss_delta;
    result.loss_trace.push_back(loss);
    result.grad_trace.push_back(outcome.max_grad);
    result.sweeps = sweep;
    if (outcome.max_grad < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.unmixing = UnmixingSet(std::move(w));
  result.sources = SharedSources(mean_of(y));
  return result;
}

StabilityReport stability_diagnostic(const UnmixingSet& w, const MultiViewDataset& data,
                                     const SolverConfig& cfg, const Contrast& c) {
  check_shapes(w, data);
  cfg.validate();
  const int m = data.view_count();
  const int k = data.components();
  const double md = static_cast<double>(m);
  const double n = static_cast<double>(data.samples());
  const double sigma2 = cfg.sigma * cfg.sigma;

  const auto y = unmix_all(w, data);
  const Matrix shared = mean_of(y);
  const Matrix f2_shared = c.eval_f2(shared);

  // Lambda^2 read off as the per-component variance of the source estimate.
  const Matrix centered = shared.colwise() - shared.rowwise().mean();
  const Vector lambda2 = centered.cwiseAbs2().rowwise().sum() / n;

  // Residual energy (y^i - shared)^2 summed over views estimates
  // (1 - 1/m) * Lambda^2 sigma'^2 per sample; the m/(m-1) factor debiases.
  Vector nu = Vector::Zero(k);
  Matrix noise_term = Matrix::Zero(k, k);
  if (m > 1) {
    Matrix resid2 = Matrix::Zero(k, static_cast<Eigen::Index>(n));
    for (const auto& yi : y) resid2 += (yi - shared).cwiseAbs2();
    const double debias = md / (md - 1.0);
    nu = debias * resid2.rowwise().sum() / (md * n);
    noise_term = debias * (f2_shared * resid2.transpose()) / (md * n * md * md);
  }

  StabilityReport report;
  report.overall = true;
  const Matrix source_term = (f2_shared * shared.cwiseAbs2().transpose()) / (md * md * n);
  Matrix gamma_e(k, k), gamma_s(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      gamma_e(a, b) = noise_term(a, b) + (1.0 - 1.0 / md) * nu(b) / sigma2 +
                      lambda2(b) / sigma2;
      gamma_s(a, b) = source_term(a, b) - lambda2(b) / (md * sigma2);
    }
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      StabilityReport::Pair pair;
      pair.a = a;
      pair.b = b;
      pair.cond_source = gamma_s(a, b) * gamma_s(b, a) >= 0.0;
      pair.cond_exchange = gamma_e(a, b) * gamma_e(b, a) > 1.0;
      report.overall = report.overall && pair.cond_source && pair.cond_exchange;
      report.pairs.push_back(pair);
    }
  }
  return report;
}

namespace detail {

std::pair<UnmixingSet, bool> diagonal_sweep_loop(const MultiViewDataset& data,
                                                 const SolverConfig& cfg, const Contrast& c,
                                                 const UnmixingSet& init) {
  cfg.validate();
  check_shapes(init, data);
  const int m = data.view_count();

  std::vector<Matrix> w = init.matrices();
  std::vector<Matrix> y = unmix_all(init, data);
  std::vector<double> log_dets(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) log_dets[static_cast<size_t>(i)] = log_abs_det(w[static_cast<size_t>(i)]);
  Matrix shared = mean_of(y);

  bool converged = false;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const SweepOutcome outcome =
        sweep_views(data, cfg, c, /*diagonal_only=*/true, w, y, log_dets, shared);
    if (outcome.max_grad < cfg.tol) {
      converged = true;
      break;
    }
  }
  return {UnmixingSet(std::move(w)), converged};
}

}  // namespace detail

}  // namespace mvica
