#include "mvica/baselines.hpp"

#include "mvica/metrics.hpp"
#include "mvica/simgen.hpp"
#include "mvica/solver.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

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

// Zero-mean rows with disjoint supports: mutually orthogonal by design.
Matrix orthogonal_zero_mean_rows(Rng& rng, int k, int n) {
  Matrix out = Matrix::Zero(k, n);
  const int block = n / k;
  for (int j = 0; j < k; ++j) {
    double mean = 0.0;
    for (int t = 0; t < block; ++t) {
      out(j, j * block + t) = rng.next_gaussian();
      mean += out(j, j * block + t);
    }
    mean /= block;
    for (int t = 0; t < block; ++t) out(j, j * block + t) -= mean;
  }
  return out;
}

}  // namespace

TEST_CASE("pca reproduces orthogonal-row input up to sign and order") {
  Matrix x(2, 4);
  x << 3, 3, -3, -3,  // norm 6, zero mean
      1, -1, 1, -1;   // norm 2, zero mean
  const PcaResult r = pca(x, 2);
  CHECK(r.reduced.row(0).cwiseAbs().isApprox(x.row(0).cwiseAbs(), 1e-12));
  CHECK(r.reduced.row(1).cwiseAbs().isApprox(x.row(1).cwiseAbs(), 1e-12));

  // Ordering follows the norms even when the input is reversed.
  Matrix flipped(2, 4);
  flipped.row(0) = x.row(1);
  flipped.row(1) = x.row(0);
  const PcaResult r2 = pca(flipped, 2);
  CHECK(r2.reduced.row(0).cwiseAbs().isApprox(x.row(0).cwiseAbs(), 1e-12));
}

TEST_CASE("pca beats random rank-k projections") {
  Rng rng(601, 0);
  const Matrix x = gaussian_matrix(rng, 10, 50);
  const Matrix centered = x.colwise() - Vector(x.rowwise().mean());
  for (int k : {1, 2, 4}) {
    const PcaResult r = pca(x, k);
    const double pca_err = (centered - r.projection.transpose() * r.reduced).norm();
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian_matrix(rng, 10, k))
                           .householderQ() *
                       Matrix::Identity(10, k);
      const double rand_err = (centered - q * (q.transpose() * centered)).norm();
      CHECK(pca_err <= rand_err + 1e-12);
    }
  }
}

TEST_CASE("pca on a rank-1 matrix recovers the factor") {
  Rng rng(602, 0);
  Vector u = Vector(gaussian_matrix(rng, 6, 1));
  Vector v = Vector(gaussian_matrix(rng, 20, 1));
  v.array() -= v.mean();  // keep the factor visible after centering
  const Matrix x = u * v.transpose();
  const PcaResult r = pca(x, 1);
  CHECK(std::abs(row_corr(r.reduced, 0, Matrix(v.transpose()), 0)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.reduced.row(0).norm() == doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));
}

TEST_CASE("pca projection maps centered data onto the reduced rows") {
  Rng rng(603, 0);
  const Matrix x = gaussian_matrix(rng, 7, 30);
  const PcaResult r = pca(x, 4);
  const Matrix centered = x.colwise() - r.mean;
  CHECK(max_abs(r.projection * centered - r.reduced) < 1e-10);

  // Rows of the reduced matrix are mutually orthogonal.
  const Matrix gram = r.reduced * r.reduced.transpose();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) CHECK(std::abs(gram(a, b)) < 1e-8 * gram.diagonal().maxCoeff());
}

TEST_CASE("pca validates k") {
  Rng rng(604, 0);
  const Matrix x = gaussian_matrix(rng, 3, 10);
  CHECK_THROWS_AS(pca(x, 0), ValidationError);
  CHECK_THROWS_AS(pca(x, 4), ValidationError);
}

TEST_CASE("infomax separates a prewhitened Laplace mixture") {
  Rng rng(611, 0);
  const int n = 20000;
  const Matrix s = laplace_matrix(rng, 2, n);
  Matrix a(2, 2);
  a << 1.3, 0.7, -0.4, 0.9;
  const Matrix x = a * s;

  const Matrix centered = x.colwise() - Vector(x.rowwise().mean());
  const Matrix cov = centered * centered.transpose() / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Matrix whitener = eig.operatorInverseSqrt();
  const Matrix whitened = whitener * centered;

  const InfomaxResult r = infomax_ica(whitened, Contrast::log_cosh(), SolverConfig{});
  REQUIRE(r.converged);
  CHECK(is_scale_permutation(r.unmixing * whitener * a));
}

TEST_CASE("infomax is near-diagonal on already independent rows") {
  Rng rng(612, 0);
  Matrix x = laplace_matrix(rng, 4, 10000);
  for (int j = 0; j < 4; ++j) {
    const double sd = std::sqrt((x.row(j).array() - x.row(j).mean()).square().mean());
    x.row(j) /= sd;
  }
  const InfomaxResult r = infomax_ica(x, Contrast::log_cosh(), SolverConfig{});
  REQUIRE(r.converged);
  for (int row = 0; row < 4; ++row) {
    const double dmax = r.unmixing.row(row).cwiseAbs().maxCoeff();
    for (int col = 0; col < 4; ++col)
      if (col != row) CHECK(std::abs(r.unmixing(row, col)) / dmax < 0.1);
  }
}

TEST_CASE("infomax solution satisfies its gradient contract") {
  Rng rng(613, 0);
  const Matrix x = laplace_matrix(rng, 3, 4000);
  const SolverConfig cfg;
  const Contrast c = Contrast::log_cosh();
  const InfomaxResult r = infomax_ica(x, c, cfg);
  REQUIRE(r.converged);
  const UnmixingSet w({r.unmixing});
  const MultiViewDataset data({x});
  CHECK(max_abs(relative_gradient(0, w, data, cfg, c).values) < cfg.tol);
  CHECK(max_abs(r.sources - r.unmixing * x) < 1e-12 * std::max(1.0, max_abs(r.sources)));
}

TEST_CASE("infomax rejects zero-variance rows") {
  Matrix x = Matrix::Zero(2, 10);
  x.row(0).setLinSpaced(10, 0.0, 1.0);
  CHECK_THROWS_AS(infomax_ica(x, Contrast::log_cosh(), SolverConfig{}), ValidationError);
}

TEST_CASE("group pca matches single-view pca at m=1") {
  Rng rng(621, 0);
  const Matrix x = gaussian_matrix(rng, 4, 40);
  const MultiViewDataset data({x});
  const PcaResult single = pca(x, 3);
  const PcaResult group = group_pca(data, 3);
  CHECK(max_abs(single.reduced - group.reduced) < 1e-12);
}

TEST_CASE("group pca of duplicated views scales by sqrt(m)") {
  Rng rng(622, 0);
  const Matrix x = gaussian_matrix(rng, 3, 50);
  const MultiViewDataset data({x, x, x, x});
  const PcaResult single = pca(x, 2);
  const PcaResult group = group_pca(data, 2);
  // Same right singular structure; singular values scale by sqrt(4).
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(row_corr(group.reduced, j, single.reduced, j)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(group.reduced.row(j).norm() ==
          doctest::Approx(2.0 * single.reduced.row(j).norm()).epsilon(1e-10));
  }
  CHECK(group.reduced.rows() == 2);
}

TEST_CASE("group ica recovers shared sources from noiseless mixtures") {
  SynthSpec spec;
  spec.m = 3;
  spec.k = 3;
  spec.n = 20000;
  spec.seed = 17;
  const SynthInstance inst = gen_shared_model(spec);

  const GroupIcaResult r = group_ica(inst.data, spec.k, Contrast::log_cosh(), SolverConfig{});
  REQUIRE(r.converged);

  const Alignment a = align(r.shared, inst.true_sources);
  for (int comp = 0; comp < spec.k; ++comp) {
    const double corr =
        row_corr(inst.true_sources.values, comp, r.shared.values, a.perm[comp]);
    CHECK(std::abs(corr) > 0.95);
  }
}

TEST_CASE("group ica per-view unmixing solves the least-squares problem") {
  SynthSpec spec;
  spec.m = 2;
  spec.k = 3;
  spec.n = 500;
  spec.noise_std = 0.3;
  spec.seed = 19;
  const SynthInstance inst = gen_shared_model(spec);
  const GroupIcaResult r = group_ica(inst.data, spec.k, Contrast::log_cosh(), SolverConfig{});

  for (int i = 0; i < spec.m; ++i) {
    const Matrix& x = inst.data.view(i);
    // Normal equations solved with an explicit inverse.
    const Matrix w_oracle = r.shared.values * x.transpose() * (x * x.transpose()).inverse();
    CHECK(max_abs(r.per_view_unmixing.matrix(i) - w_oracle) <
          1e-8 * std::max(1.0, max_abs(w_oracle)));
    const double lib_resid = (r.per_view_unmixing.matrix(i) * x - r.shared.values).norm();
    const double oracle_resid = (w_oracle * x - r.shared.values).norm();
    CHECK(lib_resid <= oracle_resid * (1.0 + 1e-9));
  }
}

TEST_CASE("group ica at m=1 is pca plus infomax") {
  Rng rng(631, 0);
  const Matrix x = laplace_matrix(rng, 3, 2000);
  const MultiViewDataset data({x});
  const GroupIcaResult g = group_ica(data, 3, Contrast::log_cosh(), SolverConfig{});
  const InfomaxResult direct =
      infomax_ica(pca(x, 3).reduced, Contrast::log_cosh(), SolverConfig{});
  CHECK(max_abs(g.shared.values - direct.sources) < 1e-12);
}

TEST_CASE("pca_group_ica matches group_ica when per-view pca only reorders") {
  Rng rng(641, 0);
  const int k = 3, n = 60;
  const Matrix basis = orthogonal_zero_mean_rows(rng, k, n);
  std::vector<Matrix> views;
  for (int i = 0; i < 3; ++i) {
    Vector scales(k);
    for (int j = 0; j < k; ++j) scales(j) = 0.5 + std::abs(rng.next_gaussian());
    views.push_back(scales.asDiagonal() * basis);
  }
  const MultiViewDataset data(views);

  const GroupIcaResult direct = group_ica(data, k, Contrast::log_cosh(), SolverConfig{});
  const GroupIcaResult reduced = pca_group_ica(data, k, Contrast::log_cosh(), SolverConfig{});
  CHECK(reconstruction_error(reduced.shared, direct.shared) < 1e-8);
}

TEST_CASE("pca_group_ica output shapes") {
  SynthSpec spec;
  spec.m = 2;
  spec.k = 4;
  spec.n = 300;
  spec.noise_std = 0.5;
  spec.seed = 23;
  const SynthInstance inst = gen_shared_model(spec);
  const GroupIcaResult r = pca_group_ica(inst.data, 4, Contrast::log_cosh(), SolverConfig{});
  CHECK(r.shared.values.rows() == 4);
  CHECK(r.shared.values.cols() == 300);
  CHECK(r.per_view_unmixing.view_count() == 2);
}

TEST_CASE("pca_group_ica at m=1 reduces to pca plus infomax") {
  Rng rng(642, 0);
  const Matrix x = laplace_matrix(rng, 3, 2000);
  const MultiViewDataset data({x});
  const GroupIcaResult g = pca_group_ica(data, 3, Contrast::log_cosh(), SolverConfig{});
  // Per-view pca rotates the view; the group stage then sees k-dim input.
  const Matrix reduced = pca(x, 3).reduced;
  const InfomaxResult direct =
      infomax_ica(pca(reduced, 3).reduced, Contrast::log_cosh(), SolverConfig{});
  CHECK(max_abs(g.shared.values - direct.sources) < 1e-10);
}
