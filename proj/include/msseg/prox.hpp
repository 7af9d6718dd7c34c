#ifndef MSSEG_PROX_HPP
#define MSSEG_PROX_HPP

#include "msseg/calculus.hpp"

#include <Eigen/Core>

#include <vector>

namespace msseg {

/// Row-wise isotropic soft thresholding: each row x becomes
/// x (1 - t / |x|) when |x| > t and 0 otherwise, |.| the row Euclidean norm.
template <typename Derived>
Field<typename Derived::Scalar> shrink_rows(const Eigen::MatrixBase<Derived>& w,
                                            typename Derived::Scalar threshold) {
  using Scalar = typename Derived::Scalar;
  Field<Scalar> out(w.rows(), w.cols());
  for (Index r = 0; r < w.rows(); ++r) {
    const Scalar norm = w.row(r).norm();
    if (norm > threshold) {
      out.row(r) = (Scalar(1) - threshold / norm) * w.row(r);
    } else {
      out.row(r).setZero();
    }
  }
  return out;
}

/// Closed form of min_p |p| + r_p/2 |p - w|^2 per edge row.
template <typename Derived>
Field<typename Derived::Scalar> prox_p(const Eigen::MatrixBase<Derived>& w, double r_p) {
  if (!(r_p > 0.0)) throw ParameterError("prox_p: r_p must be positive");
  using Scalar = typename Derived::Scalar;
  return shrink_rows(w, Scalar(1.0 / r_p));
}

/// Closed form of min_q alpha0 |q| + r_q/2 |q - c|^2 per face row.
template <typename Derived>
Field<typename Derived::Scalar> prox_q(const Eigen::MatrixBase<Derived>& c, double r_q, double alpha0) {
  if (!(r_q > 0.0) || !(alpha0 > 0.0)) throw ParameterError("prox_q: r_q and alpha0 must be positive");
  using Scalar = typename Derived::Scalar;
  return shrink_rows(c, Scalar(alpha0 / r_q));
}

namespace detail {

/// Michelot's finite active-set iteration on a strided row: project onto the
/// affine hull of the current support, drop negative coordinates, repeat
/// until none are negative. `active` must hold n entries.
template <typename Scalar>
void michelot(const Scalar* y, Index ystride, Scalar* x, Index xstride, Index n, char* active) {
  for (Index i = 0; i < n; ++i) active[i] = 1;
  Index support = n;
  while (true) {
    Scalar sum = 0;
    for (Index i = 0; i < n; ++i) {
      if (active[i]) sum += y[i * ystride];
    }
    const Scalar shift = (sum - Scalar(1)) / Scalar(support);
    bool dropped = false;
    for (Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (y[i * ystride] - shift < 0) {
        active[i] = 0;
        --support;
        dropped = true;
      }
    }
    if (!dropped) {
      for (Index i = 0; i < n; ++i) x[i * xstride] = active[i] ? y[i * ystride] - shift : Scalar(0);
      return;
    }
  }
}

}  // namespace detail

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_simplex(
    const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> yy = y;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(yy.size());
  std::vector<char> active(static_cast<size_t>(yy.size()));
  detail::michelot(yy.data(), 1, x.data(), 1, yy.size(), active.data());
  return x;
}

/// Applies project_simplex to every row.
template <typename Derived>
Field<typename Derived::Scalar> project_rows_to_simplex(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Field<Scalar> in = y;
  Field<Scalar> out(in.rows(), in.cols());
  std::vector<char> active(static_cast<size_t>(in.cols()));
  for (Index r = 0; r < in.rows(); ++r) {
    detail::michelot(in.data() + r, in.rows(), out.data() + r, out.rows(), in.cols(), active.data());
  }
  return out;
}

}  // namespace msseg

#endif  // MSSEG_PROX_HPP
