#pragma once

#include "mvica/types.hpp"

namespace mvica {

/// Exact solution of the square assignment problem: returns perm with
/// perm[a] the column matched to row a, minimizing sum_a cost(a, perm[a]).
std::vector<int> hungarian(const Matrix& cost);

/// Component correspondence between an estimated and a reference source
/// matrix: ref row a is matched to est row perm[a], with sign, positive
/// scale, and the per-component mean squared residual after alignment.
struct Alignment {
  std::vector<int> perm;
  std::vector<double> signs;   // +1 or -1
  std::vector<double> scales;  // > 0
  std::vector<double> residuals;
};

Alignment align(const SharedSources& est, const SharedSources& ref);

/// Mean over components of the per-component MSE between est and truth
/// after unit-variance normalization and optimal sign/permutation
/// alignment. Zero-variance components contribute 1.
double reconstruction_error(const SharedSources& est, const SharedSources& truth);

/// R^2(x, y) = 1 - sum_t (x_t - y_t)^2 / (n Var(y)).
double r2_score(const Vector& x, const Vector& y);

/// Maximum-correlation window classifier: a target window of shared_ref is
/// correctly located when its true position in probe strictly beats every
/// candidate window that does not overlap the target. Returns the fraction
/// of correctly located windows.
double time_segment_matching(const SharedSources& shared_ref, const SharedSources& probe,
                             int win);

}  // namespace mvica
