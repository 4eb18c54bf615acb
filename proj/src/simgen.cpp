#include "mvica/simgen.hpp"

#include "mvica/rng.hpp"

#include <Eigen/SVD>

#include <limits>

namespace mvica {

namespace {

constexpr double kMaxCondition = 1e6;

// Stream layout per instance: 0 draws the sources, 1 + i the mixing of
// view i, 1 + m + i its noise. Entries fill row-major.
constexpr uint64_t kSourceStream = 0;

Matrix draw_matrix_rowmajor(Rng& rng, int rows, int cols, double (Rng::*draw)()) {
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int col = 0; col < cols; ++col) out(r, col) = (rng.*draw)();
  return out;
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

Matrix draw_conditioned_mixing(Rng& rng, int rows, int cols) {
  while (true) {
    Matrix a = draw_matrix_rowmajor(rng, rows, cols, &Rng::next_gaussian);
    if (condition_number(a) <= kMaxCondition) return a;
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (m < 1 || k < 1 || n < 1) throw ValidationError("m, k, n must all be >= 1");
  if (noise_std < 0.0) throw ValidationError("noise_std must be non-negative");
  if (obs_dim && *obs_dim < k) throw ValidationError("obs_dim must be >= k");
}

SynthInstance gen_shared_model(const SynthSpec& spec) {
  spec.validate();
  if (spec.obs_dim) throw ValidationError("shared model takes no obs_dim");

  Rng source_rng(spec.seed, kSourceStream);
  const Matrix sources =
      draw_matrix_rowmajor(source_rng, spec.k, spec.n, &Rng::next_laplace);

  std::vector<Matrix> mixings;
  std::vector<Matrix> views;
  mixings.reserve(static_cast<size_t>(spec.m));
  views.reserve(static_cast<size_t>(spec.m));
  for (int i = 0; i < spec.m; ++i) {
    Rng mixing_rng(spec.seed, 1 + static_cast<uint64_t>(i));
    Matrix a = draw_conditioned_mixing(mixing_rng, spec.k, spec.k);
    Matrix latent = sources;
    if (spec.noise_std > 0.0) {
      Rng noise_rng(spec.seed, 1 + static_cast<uint64_t>(spec.m) + static_cast<uint64_t>(i));
      latent += spec.noise_std *
                draw_matrix_rowmajor(noise_rng, spec.k, spec.n, &Rng::next_gaussian);
    }
    views.push_back(a * latent);
    mixings.push_back(std::move(a));
  }

  return SynthInstance{MultiViewDataset(std::move(views)), SharedSources(sources),
                       std::move(mixings)};
}

SynthInstance gen_sensor_noise_model(const SynthSpec& spec) {
  spec.validate();
  if (!spec.obs_dim) throw ValidationError("sensor model requires obs_dim");
  const int p = *spec.obs_dim;

  Rng source_rng(spec.seed, kSourceStream);
  const Matrix sources =
      draw_matrix_rowmajor(source_rng, spec.k, spec.n, &Rng::next_laplace);

  std::vector<Matrix> mixings;
  std::vector<Matrix> views;
  mixings.reserve(static_cast<size_t>(spec.m));
  views.reserve(static_cast<size_t>(spec.m));
  for (int i = 0; i < spec.m; ++i) {
    Rng mixing_rng(spec.seed, 1 + static_cast<uint64_t>(i));
    Matrix a = draw_conditioned_mixing(mixing_rng, p, spec.k);
    Matrix x = a * sources;
    if (spec.noise_std > 0.0) {
      Rng noise_rng(spec.seed, 1 + static_cast<uint64_t>(spec.m) + static_cast<uint64_t>(i));
      x += spec.noise_std * draw_matrix_rowmajor(noise_rng, p, spec.n, &Rng::next_gaussian);
    }
    views.push_back(std::move(x));
    mixings.push_back(std::move(a));
  }

  return SynthInstance{MultiViewDataset(std::move(views)), SharedSources(sources),
                       std::move(mixings)};
}

}  // namespace mvica
