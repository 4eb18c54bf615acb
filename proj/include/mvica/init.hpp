#pragma once

#include "mvica/types.hpp"

namespace mvica {

/// Per-view single-view ICA followed by Hungarian alignment of components
/// across views: view 0 is the reference on the first pass; each further
/// round realigns every view against the average of the aligned sources.
UnmixingSet permica(const MultiViewDataset& data, const Contrast& c, int n_rounds,
                    const SolverConfig& cfg = SolverConfig{});

/// Diagonal-only variant of the solver loop: the search direction is
/// replaced by its diagonal part, so each view is rescaled row-wise until
/// the diagonal of every gradient is below tolerance.
UnmixingSet diagonal_scaling(const UnmixingSet& w, const MultiViewDataset& data,
                             const SolverConfig& cfg, const Contrast& c);

/// Two-stage initialization: permica (3 rounds) then diagonal_scaling.
UnmixingSet init_pipeline(const MultiViewDataset& data, const SolverConfig& cfg,
                          const Contrast& c);

}  // namespace mvica
