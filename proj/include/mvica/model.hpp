#pragma once

#include "mvica/types.hpp"

namespace mvica {

/// Source estimate (1/m) sum_i W^i x^i.
SharedSources shared_estimate(const UnmixingSet& w, const MultiViewDataset& data);

/// Negative log-likelihood of the unmixing set, up to additive constants:
///
///   L = -sum_i log|W^i|
///       + mean_t [ 1/(2 sigma^2) sum_i ||W^i x^i_t - s~_t||^2 + sum_j f(s~_jt) ]
///
/// Data terms are empirical means over the n samples.
double negative_log_likelihood(const UnmixingSet& w, const MultiViewDataset& data,
                               const SolverConfig& cfg, const Contrast& c);

/// The part of L that depends on W^i, with the other views frozen through
/// their partial source sum sminus = (1/m) sum_{j != i} W^j x^j:
///
///   L^i = -log|W^i| + mean_t [ (1-1/m)/(2 sigma^2) ||y_t - m/(m-1) sminus_t||^2
///                              + sum_j f(y_jt / m + sminus_jt) ],  y = W^i x^i.
///
/// For m = 1 the quadratic term is zero and L^i is the Infomax loss.
double per_subject_loss(int view, const Matrix& w_i, const SharedSources& sminus,
                        const MultiViewDataset& data, const SolverConfig& cfg,
                        const Contrast& c);

namespace detail {

/// per_subject_loss evaluated from precomputed pieces; shared with the
/// solver's line search. y is W^i x^i and log_det = log|W^i|.
double per_subject_loss_from_y(const Matrix& y, const Matrix& sminus,
                               double log_det, int view_count,
                               const SolverConfig& cfg, const Contrast& c);

}  // namespace detail

}  // namespace mvica
