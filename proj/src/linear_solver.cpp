#include "msseg/linear_solver.hpp"

#include "msseg/error.hpp"

#include <algorithm>
#include <limits>

namespace msseg {

SpdSolver::SpdSolver(SparseMatrix matrix, Index direct_limit, double tolerance)
    : matrix_(std::move(matrix)), tolerance_(tolerance) {
  if (matrix_.rows() != matrix_.cols()) throw DimensionError("SpdSolver: matrix is not square");
  matrix_.makeCompressed();
  if (matrix_.rows() <= direct_limit) {
    direct_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(matrix_);
    if (direct_->info() != Eigen::Success) throw NumericError("sparse LDLT factorization failed", 0.0);
  } else {
    iterative_ = std::make_shared<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>>();
    // Tighter than the acceptance threshold so the checked residual passes.
    iterative_->setTolerance(0.1 * tolerance_);
    iterative_->setMaxIterations(std::max<Index>(1000, 4 * matrix_.rows()));
    iterative_->compute(matrix_);
    if (iterative_->info() != Eigen::Success) throw NumericError("CG preconditioner setup failed", 0.0);
  }
}

// P^T L^-T D^-1 L^-1 P b for all columns at once. The right-hand sides are
// kept row-major so every factor entry is read once per sweep, not once per
// column.
Eigen::MatrixXd SpdSolver::direct_solve(const Eigen::MatrixXd& rhs) const {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Index n = rhs.rows(), k = rhs.cols();
  RowMajor y = direct_->permutationP() * rhs;
  const auto& L = direct_->matrixL().nestedExpression();
  const auto& D = direct_->vectorD();
  const int* outer = L.outerIndexPtr();
  const int* inner = L.innerIndexPtr();
  const double* value = L.valuePtr();
  double* Y = y.data();
  for (Index j = 0; j < n; ++j) {
    const double* yj = Y + j * k;
    for (int p = outer[j]; p < outer[j + 1]; ++p) {
      const Index i = inner[p];
      if (i <= j) continue;
      double* yi = Y + i * k;
      const double l = value[p];
      for (Index c = 0; c < k; ++c) yi[c] -= l * yj[c];
    }
  }
  for (Index j = 0; j < n; ++j) {
    const double inv = 1.0 / D(j);
    for (Index c = 0; c < k; ++c) Y[j * k + c] *= inv;
  }
  for (Index j = n - 1; j >= 0; --j) {
    double* yj = Y + j * k;
    for (int p = outer[j]; p < outer[j + 1]; ++p) {
      const Index i = inner[p];
      if (i <= j) continue;
      const double* yi = Y + i * k;
      const double l = value[p];
      for (Index c = 0; c < k; ++c) yj[c] -= l * yi[c];
    }
  }
  return direct_->permutationPinv() * Eigen::MatrixXd(y);
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != matrix_.rows()) throw DimensionError("SpdSolver: right-hand side row mismatch");
  const Eigen::VectorXd bnorm = rhs.colwise().norm().transpose();
  auto worst = [&](const Eigen::MatrixXd& x) {
    const Eigen::VectorXd r = (matrix_ * x - rhs).colwise().norm().transpose();
    double w = 0.0;
    for (Index c = 0; c < rhs.cols(); ++c) {
      if (bnorm(c) > 0.0) w = std::max(w, r(c) / bnorm(c));
      else if (r(c) > 0.0) w = std::numeric_limits<double>::infinity();
    }
    return w;
  };
  if (iterative_) {
    Eigen::MatrixXd x(rhs.rows(), rhs.cols());
    for (Index c = 0; c < rhs.cols(); ++c) {
      x.col(c) = bnorm(c) > 0.0 ? Eigen::VectorXd(iterative_->solve(rhs.col(c))) : Eigen::VectorXd::Zero(rhs.rows());
    }
    const double rel = worst(x);
    if (!(rel <= tolerance_)) throw NumericError("linear solve did not reach tolerance", rel);
    return x;
  }
  Eigen::MatrixXd x = direct_solve(rhs);
  double rel = worst(x);
  // Iterative refinement for badly conditioned systems.
  for (int step = 0; step < 3 && !(rel <= 1e-3 * tolerance_); ++step) {
    x += direct_solve(rhs - matrix_ * x);
    rel = worst(x);
  }
  if (!(rel <= tolerance_)) throw NumericError("linear solve did not reach tolerance", rel);
  return x;
}

}  // namespace msseg
