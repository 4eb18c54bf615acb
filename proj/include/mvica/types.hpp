#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A shape or size inconsistency between inputs.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid values (non-finite data, non-positive config, bad ranges).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A matrix required to be invertible is numerically singular.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Zero-variance series where a variance-normalized quantity is requested.
struct UndefinedVarianceError : std::domain_error {
  using std::domain_error::domain_error;
};

/// m sample-aligned views, each a k x n matrix sharing identical shape.
class MultiViewDataset {
 public:
  explicit MultiViewDataset(std::vector<Matrix> views);

  int view_count() const { return static_cast<int>(views_.size()); }
  int components() const { return static_cast<int>(views_.front().rows()); }
  int samples() const { return static_cast<int>(views_.front().cols()); }

  const Matrix& view(int i) const { return views_.at(static_cast<size_t>(i)); }
  const std::vector<Matrix>& views() const { return views_; }

 private:
  std::vector<Matrix> views_;
};

/// One square unmixing matrix per view; all invertible, all k x k.
class UnmixingSet {
 public:
  explicit UnmixingSet(std::vector<Matrix> matrices);

  /// Identity unmixings of the given shape.
  static UnmixingSet identity(int view_count, int k);

  int view_count() const { return static_cast<int>(matrices_.size()); }
  int components() const { return static_cast<int>(matrices_.front().rows()); }

  const Matrix& matrix(int i) const { return matrices_.at(static_cast<size_t>(i)); }
  const std::vector<Matrix>& matrices() const { return matrices_; }

 private:
  std::vector<Matrix> matrices_;
};

/// The k x n estimated (or generated) common source matrix.
struct SharedSources {
  Matrix values;

  SharedSources() = default;
  explicit SharedSources(Matrix v);

  int components() const { return static_cast<int>(values.rows()); }
  int samples() const { return static_cast<int>(values.cols()); }
};

/// Elementwise contrast (f, f', f'').
///
/// The default is f(x) = log cosh(x), so f' = tanh and f'' = 1 - tanh^2.
/// Custom triples plug in as scalar functions; batch evaluation over
/// matrices is provided for the inner loops of the solver.
class Contrast {
 public:
  using Fn = std::function<double(double)>;

  Contrast(Fn f, Fn df, Fn ddf);

  static Contrast log_cosh();

  double f(double x) const;
  double f1(double x) const;
  double f2(double x) const;

  Matrix eval_f(const Matrix& x) const;
  Matrix eval_f1(const Matrix& x) const;
  Matrix eval_f2(const Matrix& x) const;

  /// Fills d1 = f'(x) and d2 = f''(x) in one pass.
  void eval_f1_f2(const Matrix& x, Matrix& d1, Matrix& d2) const;

  /// Sum of f over all entries; the hot path of the line search.
  double sum_f(const Matrix& x) const;

  /// Central-difference check that f1 = df and f2 = df1 at the given
  /// points, to relative tolerance rtol.
  bool check_derivatives(const std::vector<double>& points,
                         double rtol = 1e-5) const;

 private:
  enum class Kind { kLogCosh, kCustom };

  Contrast(Kind kind, Fn f, Fn df, Fn ddf);

  Kind kind_;
  Fn f_, df_, ddf_;
};

/// Solver hyperparameters; all strictly positive.
struct SolverConfig {
  double sigma = 1.0;        // noise parameter of the objective
  double tol = 1e-4;         // gradient sup-norm stopping tolerance
  int max_sweeps = 10000;
  int ls_max_halvings = 10;  // backtracking budget per view update
  double gamma_floor = 1e-8;
  double denom_floor = 1e-8;

  void validate() const;
};

/// Output of the alternate quasi-Newton fit.
struct FitResult {
  UnmixingSet unmixing;
  SharedSources sources;
  std::vector<double> loss_trace;  // initial loss, then one entry per sweep
  std::vector<double> grad_trace;  // per-sweep max gradient sup-norm
  bool converged = false;
  int sweeps = 0;
};

/// log |det W| via pivoted LU. Throws SingularMatrixError when the
/// absolute determinant underflows 1e-300.
double log_abs_det(const Matrix& w);

bool is_finite(const Matrix& m);

}  // namespace mvica
