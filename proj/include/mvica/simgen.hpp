#pragma once

#include "mvica/types.hpp"

#include <cstdint>
#include <optional>

namespace mvica {

/// Parameters of a synthetic instance. obs_dim selects the sensor-noise
/// model (p-dimensional observations); when absent the noise sits on the
/// sources and views stay square.
struct SynthSpec {
  int m = 1;
  int k = 1;
  int n = 1;
  double noise_std = 0.0;
  std::optional<int> obs_dim;
  uint64_t seed = 0;

  void validate() const;
};

struct SynthInstance {
  MultiViewDataset data;
  SharedSources true_sources;
  std::vector<Matrix> true_mixings;
};

/// x^i = A^i (s + n^i): i.i.d. Laplace(0,1) sources, square Gaussian
/// mixings (condition number capped at 1e6 by redrawing), Gaussian noise
/// of std noise_std added on the sources.
SynthInstance gen_shared_model(const SynthSpec& spec);

/// x^i = A^i s + n^i with p x k Gaussian mixings and noise added on the
/// p-dimensional observations.
SynthInstance gen_sensor_noise_model(const SynthSpec& spec);

}  // namespace mvica
