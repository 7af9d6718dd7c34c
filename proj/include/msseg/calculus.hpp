#ifndef MSSEG_CALCULUS_HPP
#define MSSEG_CALCULUS_HPP

#include "msseg/error.hpp"
#include "msseg/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace msseg {

/// Dense field with one row per mesh element and one column per channel.
template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One row per face (the space U_M).
using FaceField = Field<double>;
/// One row per edge (the space V_M).
using EdgeField = Field<double>;

using SparseMatrix = Eigen::SparseMatrix<double>;

namespace detail {

inline void require_rows(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) +
                         " rows, got " + std::to_string(actual));
  }
}

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace detail

/// Signed jump across each interior edge; boundary rows are zero.
template <typename Derived>
Field<typename Derived::Scalar> gradient(const TriMesh& mesh, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  detail::require_rows(u.rows(), mesh.num_faces(), "gradient");
  const auto& ef = mesh.edge_faces();
  const auto& es = mesh.edge_face_signs();
  Field<Scalar> out = Field<Scalar>::Zero(mesh.num_edges(), u.cols());
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (ef(e, 1) < 0) continue;
    out.row(e) = Scalar(es(e, 0)) * u.row(ef(e, 0)) + Scalar(es(e, 1)) * u.row(ef(e, 1));
  }
  return out;
}

/// (div p)_t = -(1/A_t) sum_{e in t} p_e sgn(t,e) l_e, summed over all three
/// edges of t including boundary ones.
template <typename Derived>
Field<typename Derived::Scalar> divergence(const TriMesh& mesh, const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  detail::require_rows(p.rows(), mesh.num_edges(), "divergence");
  const auto& fe = mesh.face_edges();
  const auto& fs = mesh.face_edge_signs();
  const auto& len = mesh.edge_lengths();
  const auto& area = mesh.face_areas();
  Field<Scalar> out(mesh.num_faces(), p.cols());
  for (Index t = 0; t < mesh.num_faces(); ++t) {
    out.row(t) = Scalar(fs(t, 0) * len(fe(t, 0))) * p.row(fe(t, 0)) +
                 Scalar(fs(t, 1) * len(fe(t, 1))) * p.row(fe(t, 1)) +
                 Scalar(fs(t, 2) * len(fe(t, 2))) * p.row(fe(t, 2));
    out.row(t) *= Scalar(-1.0 / area(t));
  }
  return out;
}

/// Area-weighted inner product on face fields.
template <typename A, typename B>
typename A::Scalar inner_U(const TriMesh& mesh, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::require_rows(a.rows(), mesh.num_faces(), "inner_U");
  detail::require_same_shape(a, b, "inner_U");
  using Scalar = typename A::Scalar;
  return (mesh.face_areas().template cast<Scalar>().asDiagonal() * a.cwiseProduct(b)).sum();
}

/// Length-weighted inner product on edge fields.
template <typename A, typename B>
typename A::Scalar inner_V(const TriMesh& mesh, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::require_rows(a.rows(), mesh.num_edges(), "inner_V");
  detail::require_same_shape(a, b, "inner_V");
  using Scalar = typename A::Scalar;
  return (mesh.edge_lengths().template cast<Scalar>().asDiagonal() * a.cwiseProduct(b)).sum();
}

template <typename A>
typename A::Scalar norm_U(const TriMesh& mesh, const Eigen::MatrixBase<A>& a) {
  using std::sqrt;
  return sqrt(inner_U(mesh, a, a));
}

template <typename A>
typename A::Scalar norm_V(const TriMesh& mesh, const Eigen::MatrixBase<A>& a) {
  using std::sqrt;
  return sqrt(inner_V(mesh, a, a));
}

/// sum_e sum_i |p_ei| l_e
template <typename A>
typename A::Scalar l1_V(const TriMesh& mesh, const Eigen::MatrixBase<A>& p) {
  detail::require_rows(p.rows(), mesh.num_edges(), "l1_V");
  using Scalar = typename A::Scalar;
  return (mesh.edge_lengths().template cast<Scalar>().asDiagonal() * p.cwiseAbs()).sum();
}

/// sum_t sum_i |q_ti| A_t
template <typename A>
typename A::Scalar l1_U(const TriMesh& mesh, const Eigen::MatrixBase<A>& q) {
  detail::require_rows(q.rows(), mesh.num_faces(), "l1_U");
  using Scalar = typename A::Scalar;
  return (mesh.face_areas().template cast<Scalar>().asDiagonal() * q.cwiseAbs()).sum();
}

/// First-order regularizer: ||grad u||_1.
template <typename Derived>
typename Derived::Scalar tv_energy(const TriMesh& mesh, const Eigen::MatrixBase<Derived>& u) {
  return l1_V(mesh, gradient(mesh, u));
}

/// Inner objective of the relaxed second-order regularizer evaluated at a given
/// v: ||grad u - v||_1 + alpha0 ||div v||_1. Minimizing over v is the solver's job.
template <typename DU, typename DV>
typename DU::Scalar rtgv_value(const TriMesh& mesh, const Eigen::MatrixBase<DU>& u,
                               const Eigen::MatrixBase<DV>& v, double alpha0) {
  if (!(alpha0 > 0.0)) throw ParameterError("alpha0 must be positive");
  using Scalar = typename DU::Scalar;
  const Field<Scalar> grad = gradient(mesh, u);
  detail::require_same_shape(grad, v, "rtgv_value");
  return l1_V(mesh, grad - v) + Scalar(alpha0) * l1_U(mesh, divergence(mesh, v));
}

/// Delta = div o grad.
template <typename Derived>
Field<typename Derived::Scalar> laplacian(const TriMesh& mesh, const Eigen::MatrixBase<Derived>& b) {
  return divergence(mesh, gradient(mesh, b));
}

/// Assembled gradient, |E| x |T|, rows of boundary edges empty.
SparseMatrix gradient_matrix(const TriMesh& mesh);
/// Assembled divergence, |T| x |E|, including boundary edge columns.
SparseMatrix divergence_matrix(const TriMesh& mesh);
/// Boundary edge rows zeroed: the projection onto the range of the gradient's
/// support. Fields produced by the solver always lie in this subspace, where
/// -div is the exact adjoint of grad.
EdgeField restrict_to_interior(const TriMesh& mesh, const EdgeField& p);

}  // namespace msseg

#endif  // MSSEG_CALCULUS_HPP
