#ifndef MSSEG_FEATURES_HPP
#define MSSEG_FEATURES_HPP

#include "msseg/calculus.hpp"
#include "msseg/mesh.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>

namespace msseg {

/// Symmetric face Laplacian with full (both triangles) storage.
using SparseSym = Eigen::SparseMatrix<double>;

/// Squared distance between the smoothed unit normals of two edge-adjacent
/// faces, in [0, 4].
double normal_distance(const TriMesh& mesh, Index face_i, Index face_j, Ring ring);

/// Normal-affinity Laplacian: L_ij = -l_e exp(-d_ij / mean(d)) for faces
/// sharing edge e, L_ii = sum of the row's weights. On a perfectly flat mesh
/// (mean(d) < 1e-12) every exponential is taken as 1.
SparseSym build_laplacian(const TriMesh& mesh, Ring ring = Ring::N2);

struct EigenOptions {
  /// Meshes up to this many faces use a dense symmetric eigensolver.
  Index dense_threshold = 400;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
};

/// Spectral embedding of a face mesh.
struct FeatureField {
  /// |T| x (K-1), one eigenvector per column.
  FaceField values;
  Eigen::VectorXd eigenvalues;
  /// Factor applied to each unit-norm eigenvector to reach unit area-weighted variance.
  Eigen::VectorXd scales;
  /// Residual ||L x - lambda x|| / ||x|| per channel.
  Eigen::VectorXd residuals;
};

/// Lowest `count` eigenpairs of L restricted to the complement of the constant
/// vector. Columns are unit-norm, mutually orthogonal, signed so that the first
/// entry with non-negligible magnitude is positive.
FeatureField spectral_embedding(const SparseSym& L, Index count, const EigenOptions& options = {});

/// Feature field for a K-segment problem: the K-1 informative eigenvectors of
/// build_laplacian(mesh, ring), each rescaled to unit area-weighted variance.
FeatureField feature_field(const TriMesh& mesh, int K, Ring ring = Ring::N2,
                           const EigenOptions& options = {});

/// Rescale unit eigenvectors in place to unit area-weighted variance.
void normalize_channels(const Eigen::VectorXd& areas, FeatureField& features);

/// One row per face, whitespace separated, for visualization.
void write_feature_table(std::ostream& out, const FeatureField& features);

}  // namespace msseg

#endif  // MSSEG_FEATURES_HPP
