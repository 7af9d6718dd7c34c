#ifndef MSSEG_LINEAR_SOLVER_HPP
#define MSSEG_LINEAR_SOLVER_HPP

#include "msseg/calculus.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <memory>

namespace msseg {

/// Factor-once SPD solver for multi-column right-hand sides. Uses a sparse
/// LDLT factorization for systems up to `direct_limit` unknowns and
/// diagonally preconditioned conjugate gradients above. Every solve is checked
/// against `tolerance` relative residual; failures raise NumericError.
class SpdSolver {
 public:
  static constexpr Index kDefaultDirectLimit = 50000;

  SpdSolver() = default;
  explicit SpdSolver(SparseMatrix matrix, Index direct_limit = kDefaultDirectLimit, double tolerance = 1e-8);

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  const SparseMatrix& matrix() const { return matrix_; }
  bool is_direct() const { return direct_ != nullptr; }

 private:
  Eigen::MatrixXd direct_solve(const Eigen::MatrixXd& rhs) const;

  SparseMatrix matrix_;
  double tolerance_ = 1e-8;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> direct_;
  std::shared_ptr<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>> iterative_;
};

}  // namespace msseg

#endif  // MSSEG_LINEAR_SOLVER_HPP
