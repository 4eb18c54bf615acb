#pragma once

#include "mvica/model.hpp"
#include "mvica/types.hpp"

#include <utility>

namespace mvica {

/// Relative gradient G^i of the loss with respect to multiplicative
/// perturbations (I + E) W^i.
struct GradientMatrix {
  Matrix values;
};

/// Diagonal data Gamma^i of the sparse Hessian approximation; entry (a,b)
/// couples only (E_ab, E_ba). Regularized to >= gamma_floor.
struct HessianDiagonals {
  Matrix gamma;
};

/// Local-minimum conditions evaluated per component pair (a, b), a < b.
struct StabilityReport {
  struct Pair {
    int a = 0;
    int b = 0;
    bool cond_source = false;   // Gamma^S_ab * Gamma^S_ba >= 0
    bool cond_exchange = false; // Gamma^E_ab * Gamma^E_ba > 1
  };
  std::vector<Pair> pairs;
  bool overall = false;
};

GradientMatrix relative_gradient(int view, const UnmixingSet& w,
                                 const MultiViewDataset& data,
                                 const SolverConfig& cfg, const Contrast& c);

HessianDiagonals hessian_diagonals(int view, const UnmixingSet& w,
                                   const MultiViewDataset& data,
                                   const SolverConfig& cfg, const Contrast& c);

/// Quasi-Newton direction D = -(H^i)^{-1} G^i from the closed-form
/// inversion of the pair-block structure, with floored denominators.
Matrix apply_inverse_hessian(const HessianDiagonals& gamma, const GradientMatrix& g,
                             const SolverConfig& cfg);

/// Alternate quasi-Newton minimization of the loss. One sweep visits each
/// view in order, takes a backtracking line-searched quasi-Newton step on
/// the per-view loss, and maintains the running source estimate.
FitResult fit(const MultiViewDataset& data, const SolverConfig& cfg,
              const Contrast& c, const UnmixingSet& init);

StabilityReport stability_diagnostic(const UnmixingSet& w, const MultiViewDataset& data,
                                     const SolverConfig& cfg, const Contrast& c);

namespace detail {

/// The solver loop with the search direction restricted to its diagonal;
/// stops when the diagonal of every gradient is below cfg.tol. Used by the
/// diagonal-scaling initialization stage.
std::pair<UnmixingSet, bool> diagonal_sweep_loop(const MultiViewDataset& data,
                                                 const SolverConfig& cfg, const Contrast& c,
                                                 const UnmixingSet& init);

}  // namespace detail

}  // namespace mvica
