#include "mvica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvica {

namespace {

struct RowStats {
  double mean = 0.0;
  double var = 0.0;  // population variance
};

RowStats row_stats(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  RowStats s;
  s.mean = row.mean();
  s.var = (row.array() - s.mean).square().mean();
  return s;
}

// Pearson correlation; 0 when either side has zero variance.
double pearson(const Eigen::Ref<const Eigen::RowVectorXd>& u,
               const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const RowStats su = row_stats(u);
  const RowStats sv = row_stats(v);
  if (!(su.var > 0.0) || !(sv.var > 0.0)) return 0.0;
  const double cov = ((u.array() - su.mean) * (v.array() - sv.mean)).mean();
  return cov / std::sqrt(su.var * sv.var);
}

}  // namespace

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("cost matrix must be square");
  if (!is_finite(cost)) throw ValidationError("cost matrix must be finite");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // Shortest-augmenting-path assignment with potentials (exact optimum).
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> perm(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] > 0) perm[static_cast<size_t>(match[static_cast<size_t>(j)]) - 1] = j - 1;
  return perm;
}

Alignment align(const SharedSources& est, const SharedSources& ref) {
  if (est.values.rows() != ref.values.rows() || est.values.cols() != ref.values.cols())
    throw DimensionError("est and ref must share shape");
  const int k = ref.components();
  const double n = static_cast<double>(ref.samples());

  Matrix cost(k, k);
  Matrix corr(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      corr(a, b) = pearson(est.values.row(b), ref.values.row(a));
      cost(a, b) = 1.0 - std::abs(corr(a, b));
    }
  }

  Alignment out;
  out.perm = hungarian(cost);
  out.signs.resize(static_cast<size_t>(k));
  out.scales.resize(static_cast<size_t>(k));
  out.residuals.resize(static_cast<size_t>(k));
  for (int a = 0; a < k; ++a) {
    const int b = out.perm[static_cast<size_t>(a)];
    const auto est_row = est.values.row(b);
    const auto ref_row = ref.values.row(a);
    const double sign = corr(a, b) < 0.0 ? -1.0 : 1.0;
    const double energy = est_row.squaredNorm();
    double scale = 1.0;
    if (row_stats(est_row).var > 0.0 && energy > 0.0) {
      const double ls = sign * ref_row.dot(est_row) / energy;
      if (ls > 0.0) scale = ls;
    } else {
      // Zero-variance candidate: conventional match with unit scale; the
      // residual reduces to the reference row's variance.
      out.signs[static_cast<size_t>(a)] = 1.0;
      out.scales[static_cast<size_t>(a)] = 1.0;
      out.residuals[static_cast<size_t>(a)] = row_stats(ref_row).var;
      continue;
    }
    out.signs[static_cast<size_t>(a)] = sign;
    out.scales[static_cast<size_t>(a)] = scale;
    out.residuals[static_cast<size_t>(a)] =
        (ref_row - scale * sign * est_row).squaredNorm() / n;
  }
  return out;
}

double reconstruction_error(const SharedSources& est, const SharedSources& truth) {
  if (est.values.rows() != truth.values.rows() || est.values.cols() != truth.values.cols())
    throw DimensionError("est and truth must share shape");
  const int k = truth.components();
  const double n = static_cast<double>(truth.samples());

  // Center and scale every component to unit variance; zero-variance rows
  // are flagged and charged the maximal-mismatch error of 1.
  Matrix est_n = est.values;
  Matrix truth_n = truth.values;
  std::vector<bool> est_bad(static_cast<size_t>(k), false);
  std::vector<bool> truth_bad(static_cast<size_t>(k), false);
  auto normalize = [&](Matrix& mat, int row) {
    const RowStats s = row_stats(mat.row(row));
    if (!(s.var > 0.0)) return false;
    mat.row(row) = (mat.row(row).array() - s.mean) / std::sqrt(s.var);
    return true;
  };
  for (int j = 0; j < k; ++j) {
    est_bad[static_cast<size_t>(j)] = !normalize(est_n, j);
    truth_bad[static_cast<size_t>(j)] = !normalize(truth_n, j);
  }

  const Alignment a = align(SharedSources(est_n), SharedSources(truth_n));
  double total = 0.0;
  for (int comp = 0; comp < k; ++comp) {
    const int matched = a.perm[static_cast<size_t>(comp)];
    if (truth_bad[static_cast<size_t>(comp)] || est_bad[static_cast<size_t>(matched)]) {
      total += 1.0;
      continue;
    }
    const double sign = a.signs[static_cast<size_t>(comp)];
    total += (truth_n.row(comp) - sign * est_n.row(matched)).squaredNorm() / n;
  }
  return total / static_cast<double>(k);
}

double r2_score(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("series must share length");
  if (x.size() < 1) throw DimensionError("series must be non-empty");
  const double n = static_cast<double>(y.size());
  const double mean_y = y.mean();
  const double var_y = (y.array() - mean_y).square().mean();
  if (!(var_y > 0.0)) throw UndefinedVarianceError("Var(y) is zero");
  return 1.0 - (x - y).squaredNorm() / (n * var_y);
}

double time_segment_matching(const SharedSources& shared_ref, const SharedSources& probe,
                             int win) {
  if (shared_ref.values.rows() != probe.values.rows() ||
      shared_ref.values.cols() != probe.values.cols())
    throw DimensionError("shared_ref and probe must share shape");
  const int n = shared_ref.samples();
  const int k = shared_ref.components();
  if (win < 1 || win > n) throw ValidationError("window must be in [1, n]");

  const int positions = n - win + 1;
  const int len = k * win;

  // Flatten every window once; store centered rows and their norms.
  Matrix ref_wins(positions, len), probe_wins(positions, len);
  Vector ref_norm(positions), probe_norm(positions);
  auto fill = [&](const Matrix& src, Matrix& wins, Vector& norms) {
    for (int t = 0; t < positions; ++t) {
      Eigen::Map<const Matrix> block(src.data() + t * k, k, win);
      Eigen::RowVectorXd flat(len);
      for (int c = 0; c < win; ++c) flat.segment(c * k, k) = block.col(c).transpose();
      flat.array() -= flat.mean();
      norms(t) = flat.norm();
      wins.row(t) = flat;
    }
  };
  fill(shared_ref.values, ref_wins, ref_norm);
  fill(probe.values, probe_wins, probe_norm);

  int correct = 0;
  for (int t = 0; t < positions; ++t) {
    auto corr_at = [&](int u) {
      const double denom = ref_norm(t) * probe_norm(u);
      if (!(denom > 0.0)) return 0.0;  // zero-variance windows correlate 0
      return ref_wins.row(t).dot(probe_wins.row(u)) / denom;
    };
    const double true_corr = corr_at(t);
    bool beats_all = true;
    for (int u = 0; u < positions && beats_all; ++u) {
      if (std::abs(u - t) < win) continue;  // overlapping candidates excluded
      if (!(true_corr > corr_at(u))) beats_all = false;
    }
    if (beats_all) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(positions);
}

}  // namespace mvica
