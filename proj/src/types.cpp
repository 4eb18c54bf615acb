#include "mvica/types.hpp"

#include <Eigen/LU>

#include <cmath>
#include <utility>

namespace mvica {

namespace {

constexpr double kDetUnderflow = 1e-300;

double log_cosh_stable(double x) {
  // log cosh x = |x| + log1p(exp(-2|x|)) - log 2, safe for large |x|.
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094;
}

}  // namespace

MultiViewDataset::MultiViewDataset(std::vector<Matrix> views) : views_(std::move(views)) {
  if (views_.empty()) throw ValidationError("dataset needs at least one view");
  const auto rows = views_.front().rows();
  const auto cols = views_.front().cols();
  if (rows < 1 || cols < 1) throw ValidationError("views must be non-empty matrices");
  for (size_t i = 0; i < views_.size(); ++i) {
    if (views_[i].rows() != rows || views_[i].cols() != cols)
      throw DimensionError("all views must share the same shape");
    if (!is_finite(views_[i]))
      throw ValidationError("view " + std::to_string(i) + " has non-finite entries");
  }
}

UnmixingSet::UnmixingSet(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw ValidationError("unmixing set needs at least one matrix");
  const auto k = matrices_.front().rows();
  for (size_t i = 0; i < matrices_.size(); ++i) {
    const Matrix& w = matrices_[i];
    if (w.rows() != k || w.cols() != k)
      throw DimensionError("unmixing matrices must be square and share k");
    if (!is_finite(w))
      throw ValidationError("unmixing matrix " + std::to_string(i) + " has non-finite entries");
    log_abs_det(w);  // throws SingularMatrixError on |det| underflow
  }
}

UnmixingSet UnmixingSet::identity(int view_count, int k) {
  std::vector<Matrix> ms(static_cast<size_t>(view_count), Matrix::Identity(k, k));
  return UnmixingSet(std::move(ms));
}

SharedSources::SharedSources(Matrix v) : values(std::move(v)) {
  if (!is_finite(values)) throw ValidationError("sources have non-finite entries");
}

Contrast::Contrast(Fn f, Fn df, Fn ddf)
    : Contrast(Kind::kCustom, std::move(f), std::move(df), std::move(ddf)) {}

Contrast::Contrast(Kind kind, Fn f, Fn df, Fn ddf)
    : kind_(kind), f_(std::move(f)), df_(std::move(df)), ddf_(std::move(ddf)) {
  if (!f_ || !df_ || !ddf_) throw ValidationError("contrast needs f, f', f''");
}

Contrast Contrast::log_cosh() {
  return Contrast(
      Kind::kLogCosh, [](double x) { return log_cosh_stable(x); },
      [](double x) { return std::tanh(x); },
      [](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      });
}

double Contrast::f(double x) const { return f_(x); }
double Contrast::f1(double x) const { return df_(x); }
double Contrast::f2(double x) const { return ddf_(x); }

Matrix Contrast::eval_f(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  const double* in = x.data();
  double* o = out.data();
  const Eigen::Index size = x.size();
  if (kind_ == Kind::kLogCosh) {
    for (Eigen::Index i = 0; i < size; ++i) o[i] = log_cosh_stable(in[i]);
  } else {
    for (Eigen::Index i = 0; i < size; ++i) o[i] = f_(in[i]);
  }
  return out;
}

Matrix Contrast::eval_f1(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  const double* in = x.data();
  double* o = out.data();
  const Eigen::Index size = x.size();
  if (kind_ == Kind::kLogCosh) {
    for (Eigen::Index i = 0; i < size; ++i) o[i] = std::tanh(in[i]);
  } else {
    for (Eigen::Index i = 0; i < size; ++i) o[i] = df_(in[i]);
  }
  return out;
}

Matrix Contrast::eval_f2(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  const double* in = x.data();
  double* o = out.data();
  const Eigen::Index size = x.size();
  if (kind_ == Kind::kLogCosh) {
    for (Eigen::Index i = 0; i < size; ++i) {
      const double t = std::tanh(in[i]);
      o[i] = 1.0 - t * t;
    }
  } else {
    for (Eigen::Index i = 0; i < size; ++i) o[i] = ddf_(in[i]);
  }
  return out;
}

void Contrast::eval_f1_f2(const Matrix& x, Matrix& d1, Matrix& d2) const {
  d1.resize(x.rows(), x.cols());
  d2.resize(x.rows(), x.cols());
  const double* in = x.data();
  double* o1 = d1.data();
  double* o2 = d2.data();
  const Eigen::Index size = x.size();
  if (kind_ == Kind::kLogCosh) {
    for (Eigen::Index i = 0; i < size; ++i) {
      const double t = std::tanh(in[i]);
      o1[i] = t;
      o2[i] = 1.0 - t * t;
    }
  } else {
    for (Eigen::Index i = 0; i < size; ++i) {
      o1[i] = df_(in[i]);
      o2[i] = ddf_(in[i]);
    }
  }
}

double Contrast::sum_f(const Matrix& x) const {
  const double* in = x.data();
  const Eigen::Index size = x.size();
  double acc = 0.0;
  if (kind_ == Kind::kLogCosh) {
    for (Eigen::Index i = 0; i < size; ++i) acc += log_cosh_stable(in[i]);
  } else {
    for (Eigen::Index i = 0; i < size; ++i) acc += f_(in[i]);
  }
  return acc;
}

bool Contrast::check_derivatives(const std::vector<double>& points, double rtol) const {
  const double eps = 1e-6;
  for (double x : points) {
    const double fd1 = (f(x + eps) - f(x - eps)) / (2.0 * eps);
    const double fd2 = (f1(x + eps) - f1(x - eps)) / (2.0 * eps);
    const double scale1 = std::max({std::abs(fd1), std::abs(f1(x)), 1e-8});
    const double scale2 = std::max({std::abs(fd2), std::abs(f2(x)), 1e-8});
    if (std::abs(fd1 - f1(x)) > rtol * scale1) return false;
    if (std::abs(fd2 - f2(x)) > rtol * scale2) return false;
  }
  return true;
}

void SolverConfig::validate() const {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_sweeps < 1) throw ValidationError("max_sweeps must be positive");
  if (ls_max_halvings < 1) throw ValidationError("ls_max_halvings must be positive");
  if (!(gamma_floor > 0.0)) throw ValidationError("gamma_floor must be positive");
  if (!(denom_floor > 0.0)) throw ValidationError("denom_floor must be positive");
}

double log_abs_det(const Matrix& w) {
  Eigen::PartialPivLU<Matrix> lu(w);
  const auto& u = lu.matrixLU();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) log_det += std::log(std::abs(u(i, i)));
  // |det| < 1e-300 is treated as singular; the comparison also rejects NaN.
  if (!(log_det >= std::log(kDetUnderflow)))
    throw SingularMatrixError("singular unmixing matrix");
  return log_det;
}

bool is_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace mvica
