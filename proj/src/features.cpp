#include "msseg/features.hpp"

#include "msseg/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <random>
#include <vector>

namespace msseg {

namespace {

// Orthonormal basis of the complement of the constant vector: columns 1..n-1
// of the Householder reflection that swaps e_0 and 1/sqrt(n).
Eigen::MatrixXd constant_complement_basis(Index n) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  w(0) -= 1.0;
  const double wn = w.norm();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (wn > 0.0) {
    w /= wn;
    H.noalias() -= 2.0 * w * w.transpose();
  }
  return H.rightCols(n - 1);
}

void remove_column_means(Eigen::MatrixXd& X) {
  X.rowwise() -= X.colwise().mean();
}

void fix_signs(Eigen::MatrixXd& X) {
  for (Index c = 0; c < X.cols(); ++c) {
    const double cutoff = 1e-8 * X.col(c).cwiseAbs().maxCoeff();
    for (Index r = 0; r < X.rows(); ++r) {
      if (std::abs(X(r, c)) > cutoff) {
        if (X(r, c) < 0.0) X.col(c) *= -1.0;
        break;
      }
    }
  }
}

Eigen::VectorXd column_residuals(const SparseSym& L, const Eigen::MatrixXd& X, const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd R = L * X - X * theta.asDiagonal();
  Eigen::VectorXd out(X.cols());
  for (Index c = 0; c < X.cols(); ++c) out(c) = R.col(c).norm() / X.col(c).norm();
  return out;
}

FeatureField dense_embedding(const SparseSym& L, Index count) {
  const Index n = L.rows();
  const Eigen::MatrixXd Q = constant_complement_basis(n);
  const Eigen::MatrixXd T = Q.transpose() * (L * Q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (T + T.transpose()));
  if (eig.info() != Eigen::Success) throw NumericError("dense eigensolver failed", 0.0);
  FeatureField out;
  out.values = Q * eig.eigenvectors().leftCols(count);
  out.eigenvalues = eig.eigenvalues().head(count);
  return out;
}

// Shift-invert subspace iteration with Rayleigh-Ritz, restricted to the
// complement of the constant vector.
FeatureField iterative_embedding(const SparseSym& L, Index count, const EigenOptions& options) {
  const Index n = L.rows();
  const Index block = std::min<Index>(n - 1, std::max<Index>(2 * count, count + 8));
  const double max_diag = L.diagonal().maxCoeff();
  const double threshold = std::min(1e-9, options.tolerance * std::max(1.0, max_diag));

  SparseSym shifted = L;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-6 * max_diag;
  Eigen::SimplicialLDLT<SparseSym> factor(shifted);
  if (factor.info() != Eigen::Success) throw NumericError("factorization of shifted Laplacian failed", 0.0);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, block);
  for (Index c = 0; c < block; ++c) {
    for (Index r = 0; r < n; ++r) X(r, c) = normal(rng);
  }
  remove_column_means(X);

  Eigen::VectorXd theta;
  Eigen::VectorXd residuals;
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::MatrixXd Y = factor.solve(X);
    remove_column_means(Y);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    remove_column_means(Q);
    const Eigen::MatrixXd T = Q.transpose() * (L * Q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (T + T.transpose()));
    theta = eig.eigenvalues();
    X = Q * eig.eigenvectors();
    residuals = column_residuals(L, X.leftCols(count), theta.head(count));
    if (residuals.maxCoeff() <= threshold) {
      FeatureField out;
      out.values = X.leftCols(count);
      out.eigenvalues = theta.head(count);
      return out;
    }
  }
  throw NumericError("eigensolver did not converge in " + std::to_string(options.max_iterations) +
                         " iterations",
                     residuals.size() ? residuals.maxCoeff() : 0.0);
}

}  // namespace

double normal_distance(const TriMesh& mesh, Index face_i, Index face_j, Ring ring) {
  if (face_i < 0 || face_i >= mesh.num_faces() || face_j < 0 || face_j >= mesh.num_faces()) {
    throw PreconditionError("normal_distance: face index out of range");
  }
  const auto& nb = mesh.edge_neighbors(face_i);
  if (!std::binary_search(nb.begin(), nb.end(), static_cast<int>(face_j))) {
    throw PreconditionError("normal_distance: faces " + std::to_string(face_i) + " and " +
                            std::to_string(face_j) + " do not share an edge");
  }
  return (smoothed_normal(mesh, face_i, ring) - smoothed_normal(mesh, face_j, ring)).squaredNorm();
}

SparseSym build_laplacian(const TriMesh& mesh, Ring ring) {
  if (mesh.num_faces() < 2 || mesh.num_interior_edges() < 1) {
    throw FeatureError("Laplacian needs at least two faces sharing an edge");
  }
  const VertexMatrix normals = smoothed_normals(mesh, ring);
  const auto& ef = mesh.edge_faces();

  std::vector<Index> interior;
  std::vector<double> dist;
  interior.reserve(static_cast<size_t>(mesh.num_interior_edges()));
  dist.reserve(interior.capacity());
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (ef(e, 1) < 0) continue;
    interior.push_back(e);
    dist.push_back((normals.row(ef(e, 0)) - normals.row(ef(e, 1))).squaredNorm());
  }
  double mean = 0.0;
  for (double d : dist) mean += d;
  mean /= static_cast<double>(dist.size());
  const bool flat = mean < 1e-12;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * interior.size());
  for (size_t k = 0; k < interior.size(); ++k) {
    const Index e = interior[k];
    const int i = ef(e, 0), j = ef(e, 1);
    const double w = mesh.edge_lengths()(e) * (flat ? 1.0 : std::exp(-dist[k] / mean));
    triplets.emplace_back(i, j, -w);
    triplets.emplace_back(j, i, -w);
    triplets.emplace_back(i, i, w);
    triplets.emplace_back(j, j, w);
  }
  SparseSym L(mesh.num_faces(), mesh.num_faces());
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

FeatureField spectral_embedding(const SparseSym& L, Index count, const EigenOptions& options) {
  const Index n = L.rows();
  if (L.cols() != n) throw DimensionError("spectral_embedding: matrix is not square");
  if (count < 1) throw ParameterError("spectral_embedding: need at least one channel");
  if (count > n - 1) {
    throw FeatureError("requested " + std::to_string(count) + " informative eigenvectors but only " +
                       std::to_string(n - 1) + " exist");
  }
  FeatureField out = n <= options.dense_threshold ? dense_embedding(L, count)
                                                  : iterative_embedding(L, count, options);
  for (Index c = 0; c < out.values.cols(); ++c) out.values.col(c).normalize();
  fix_signs(out.values);
  out.residuals = column_residuals(L, out.values, out.eigenvalues);
  out.scales = Eigen::VectorXd::Ones(count);
  return out;
}

void normalize_channels(const Eigen::VectorXd& areas, FeatureField& features) {
  detail::require_rows(features.values.rows(), areas.size(), "normalize_channels");
  const double total = areas.sum();
  features.scales.resize(features.values.cols());
  for (Index c = 0; c < features.values.cols(); ++c) {
    auto x = features.values.col(c);
    x.array() -= x.mean();
    const double mean_a = areas.dot(x) / total;
    const double var = areas.dot((x.array() - mean_a).square().matrix()) / total;
    if (!(var > 0.0)) throw FeatureError("feature channel " + std::to_string(c) + " is constant");
    const double s = 1.0 / std::sqrt(var);
    x *= s;
    features.scales(c) = s;
  }
}

FeatureField feature_field(const TriMesh& mesh, int K, Ring ring, const EigenOptions& options) {
  if (K < 2) throw ParameterError("feature_field: K must be at least 2");
  if (K - 1 >= mesh.num_faces()) {
    throw FeatureError("feature_field: K-1 must be smaller than the face count");
  }
  const SparseSym L = build_laplacian(mesh, ring);
  FeatureField f = spectral_embedding(L, K - 1, options);
  normalize_channels(mesh.face_areas(), f);
  return f;
}

void write_feature_table(std::ostream& out, const FeatureField& features) {
  out << std::setprecision(17);
  for (Index r = 0; r < features.values.rows(); ++r) {
    for (Index c = 0; c < features.values.cols(); ++c) {
      if (c) out << ' ';
      out << features.values(r, c);
    }
    out << '\n';
  }
}

}  // namespace msseg
