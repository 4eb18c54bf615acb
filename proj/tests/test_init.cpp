#include "mvica/init.hpp"

#include "mvica/baselines.hpp"
#include "mvica/metrics.hpp"
#include "mvica/model.hpp"
#include "mvica/simgen.hpp"
#include "mvica/solver.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mvica;
using namespace test_support;

namespace {

double row_corr(const Matrix& a, int ra, const Matrix& b, int rb) {
  const auto u = a.row(ra);
  const auto v = b.row(rb);
  const double mu = u.mean(), mv = v.mean();
  const double cov = ((u.array() - mu) * (v.array() - mv)).mean();
  const double vu = (u.array() - mu).square().mean();
  const double vv = (v.array() - mv).square().mean();
  return cov / std::sqrt(vu * vv);
}

}  // namespace

TEST_CASE("permica on identical views returns identical unmixings") {
  Rng rng(701, 0);
  const Matrix x = laplace_matrix(rng, 3, 4000);
  const MultiViewDataset data({x, x});
  const UnmixingSet w = permica(data, Contrast::log_cosh(), 3);
  CHECK(max_abs(w.matrix(0) - w.matrix(1)) < 1e-9 * std::max(1.0, max_abs(w.matrix(0))));
}

TEST_CASE("permica aligns noiseless views component by component") {
  SynthSpec spec;
  spec.m = 4;
  spec.k = 5;
  spec.n = 20000;
  spec.seed = 33;
  const SynthInstance inst = gen_shared_model(spec);

  const UnmixingSet w = permica(inst.data, Contrast::log_cosh(), 3);
  std::vector<Matrix> sources;
  for (int i = 0; i < spec.m; ++i) sources.push_back(w.matrix(i) * inst.data.view(i));

  for (int i = 0; i < spec.m; ++i)
    for (int j = i + 1; j < spec.m; ++j)
      for (int comp = 0; comp < spec.k; ++comp)
        CHECK(row_corr(sources[i], comp, sources[j], comp) > 0.99);
}

TEST_CASE("a single round leaves the reference view at its plain ICA solution") {
  SynthSpec spec;
  spec.m = 3;
  spec.k = 3;
  spec.n = 3000;
  spec.noise_std = 0.4;
  spec.seed = 35;
  const SynthInstance inst = gen_shared_model(spec);
  const Contrast c = Contrast::log_cosh();
  const SolverConfig cfg;

  const UnmixingSet one_round = permica(inst.data, c, 1, cfg);
  const InfomaxResult reference = infomax_ica(inst.data.view(0), c, cfg);
  CHECK(max_abs(one_round.matrix(0) - reference.unmixing) == 0.0);

  // Refinement rounds move the reference view too.
  const UnmixingSet refined = permica(inst.data, c, 3, cfg);
  CHECK(max_abs(refined.matrix(0) - reference.unmixing) > 0.0);
}

TEST_CASE("permica sources are stable under relabeling the non-reference views") {
  SynthSpec spec;
  spec.m = 4;
  spec.k = 3;
  spec.n = 3000;
  spec.noise_std = 0.3;
  spec.seed = 37;
  const SynthInstance inst = gen_shared_model(spec);
  const Contrast c = Contrast::log_cosh();

  const UnmixingSet base = permica(inst.data, c, 3);

  // Swap views 1 and 3 (view 0 stays the reference).
  std::vector<Matrix> relabeled = {inst.data.view(0), inst.data.view(3),
                                   inst.data.view(2), inst.data.view(1)};
  const UnmixingSet swapped = permica(MultiViewDataset(relabeled), c, 3);

  const int back[] = {0, 3, 2, 1};
  for (int i = 0; i < 4; ++i) {
    const Matrix src_base = base.matrix(i) * inst.data.view(i);
    const Matrix src_swapped = swapped.matrix(back[i]) * inst.data.view(i);
    CHECK(max_abs(src_base - src_swapped) < 1e-6 * std::max(1.0, max_abs(src_base)));
  }
}

TEST_CASE("diagonal scaling leaves a diagonally stationary point unchanged") {
  Rng rng(711, 0);
  const int k = 3, n = 2000;
  const Matrix x = laplace_matrix(rng, k, n);
  const Contrast c = Contrast::log_cosh();

  // Per row, solve mean[tanh(l*u) * l*u] = 1 by bisection so the diagonal
  // gradient vanishes at W = diag(l).
  Vector lambda(k);
  for (int j = 0; j < k; ++j) {
    double lo = 1e-3, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      double value = 0.0;
      for (int t = 0; t < n; ++t) {
        const double y = mid * x(j, t);
        value += std::tanh(y) * y;
      }
      value = value / n - 1.0;
      (value > 0.0 ? hi : lo) = mid;
    }
    lambda(j) = 0.5 * (lo + hi);
  }

  const UnmixingSet w(std::vector<Matrix>{Matrix(lambda.asDiagonal())});
  const MultiViewDataset data({x});
  const UnmixingSet out = diagonal_scaling(w, data, SolverConfig{}, c);
  CHECK(max_abs(out.matrix(0) - w.matrix(0)) < 1e-10 * max_abs(w.matrix(0)));
}

TEST_CASE("diagonal scaling of the true unmixings reaches the stationary point") {
  SynthSpec spec;
  spec.m = 3;
  spec.k = 4;
  spec.n = 100000;
  spec.seed = 39;
  const SynthInstance inst = gen_shared_model(spec);
  const SolverConfig cfg;
  const Contrast c = Contrast::log_cosh();

  std::vector<Matrix> inverses;
  for (const Matrix& a : inst.true_mixings) inverses.push_back(a.inverse());
  const UnmixingSet scaled = diagonal_scaling(UnmixingSet(inverses), inst.data, cfg, c);

  // The scaled set must be a diagonal rescaling of the input.
  for (int i = 0; i < spec.m; ++i) {
    const Matrix ratio = scaled.matrix(i) * inst.true_mixings[i];
    for (int a = 0; a < spec.k; ++a)
      for (int b = 0; b < spec.k; ++b)
        if (a != b)
          CHECK(std::abs(ratio(a, b)) < 1e-8 * std::max(1.0, std::abs(ratio(a, a))));
  }

  // Full (not only diagonal) gradients vanish up to sampling noise.
  const double statistical_tol = 5.0 / std::sqrt(static_cast<double>(spec.n));
  for (int i = 0; i < spec.m; ++i)
    CHECK(max_abs(relative_gradient(i, scaled, inst.data, cfg, c).values) <
          statistical_tol);
}

TEST_CASE("diagonal scaling converges to the same sources from rescaled starts") {
  SynthSpec spec;
  spec.m = 2;
  spec.k = 3;
  spec.n = 2000;
  spec.noise_std = 0.2;
  spec.seed = 41;
  const SynthInstance inst = gen_shared_model(spec);
  const Contrast c = Contrast::log_cosh();
  SolverConfig cfg;
  cfg.tol = 1e-10;

  const UnmixingSet w0 = permica(inst.data, c, 1);
  std::vector<Matrix> rescaled = w0.matrices();
  Vector d(3);
  d << 3.0, 0.2, 1.7;
  for (auto& wi : rescaled) wi = d.asDiagonal() * wi;

  const UnmixingSet a = diagonal_scaling(w0, inst.data, cfg, c);
  const UnmixingSet b = diagonal_scaling(UnmixingSet(rescaled), inst.data, cfg, c);
  const Matrix src_a = shared_estimate(a, inst.data).values;
  const Matrix src_b = shared_estimate(b, inst.data).values;
  CHECK(max_abs(src_a - src_b) < 1e-6 * std::max(1.0, max_abs(src_a)));
}

TEST_CASE("diagonal scaling never increases the loss") {
  const SolverConfig cfg;
  const Contrast c = Contrast::log_cosh();
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const MultiViewDataset data = random_dataset(720 + seed, 3, 3, 400);
    const UnmixingSet w = random_unmixing(740 + seed, 3, 3);
    const double before = negative_log_likelihood(w, data, cfg, c);
    const UnmixingSet out = diagonal_scaling(w, data, cfg, c);
    const double after = negative_log_likelihood(out, data, cfg, c);
    CHECK(after <= before + 1e-12 * std::abs(before));
  }
}

TEST_CASE("pipeline initialization cuts the sweep count against identity") {
  const Contrast c = Contrast::log_cosh();
  SolverConfig cfg;
  cfg.max_sweeps = 600;

  std::vector<double> pipeline_sweeps, identity_sweeps;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.m = 10;
    spec.k = 15;
    spec.n = 1000;
    spec.noise_std = 0.3;
    spec.seed = 100 + seed;
    const SynthInstance inst = gen_shared_model(spec);

    const UnmixingSet init = init_pipeline(inst.data, cfg, c);
    pipeline_sweeps.push_back(fit(inst.data, cfg, c, init).sweeps);
    identity_sweeps.push_back(
        fit(inst.data, cfg, c, UnmixingSet::identity(spec.m, spec.k)).sweeps);
  }
  CHECK(median_of(pipeline_sweeps) < median_of(identity_sweeps));
}

TEST_CASE("pipeline at m=1 is single-view ICA up to row scaling") {
  Rng rng(751, 0);
  const Matrix s = laplace_matrix(rng, 3, 5000);
  const Matrix a = Matrix::Identity(3, 3) + 0.4 * gaussian_matrix(rng, 3, 3);
  const MultiViewDataset data({a * s});
  const Contrast c = Contrast::log_cosh();
  const SolverConfig cfg;

  const UnmixingSet pipe = init_pipeline(data, cfg, c);
  const InfomaxResult ica = infomax_ica(data.view(0), c, cfg);

  const Matrix ratio = pipe.matrix(0) * ica.unmixing.inverse();
  for (int r = 0; r < 3; ++r) {
    CHECK(ratio(r, r) > 0.0);
    for (int col = 0; col < 3; ++col)
      if (col != r) CHECK(std::abs(ratio(r, col)) < 1e-6 * std::abs(ratio(r, r)));
  }
}

TEST_CASE("pipeline output is invertible") {
  SynthSpec spec;
  spec.m = 3;
  spec.k = 4;
  spec.n = 1500;
  spec.noise_std = 1.0;
  spec.seed = 47;
  const SynthInstance inst = gen_shared_model(spec);
  const UnmixingSet out = init_pipeline(inst.data, SolverConfig{}, Contrast::log_cosh());
  for (int i = 0; i < spec.m; ++i) CHECK(std::isfinite(log_abs_det(out.matrix(i))));
}

TEST_CASE("permica validates n_rounds") {
  const MultiViewDataset data = random_dataset(761, 2, 2, 100);
  CHECK_THROWS_AS(permica(data, Contrast::log_cosh(), 0), ValidationError);
}
