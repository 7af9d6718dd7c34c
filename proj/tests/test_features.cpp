#include "msseg/error.hpp"
#include "msseg/features.hpp"
#include "msseg/synthetic.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <sstream>

using namespace msseg;
using namespace msseg::testing;

namespace {

SparseSym path_laplacian() {
  Eigen::MatrixXd dense(3, 3);
  dense << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  return dense.sparseView();
}

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace

TEST(NormalDistance, CoplanarIsZero) {
  const TriMesh m = unit_square();
  EXPECT_NEAR(normal_distance(m, 0, 1, Ring::N2), 0.0, 1e-15);
}

TEST(NormalDistance, RightAngleRawNormals) {
  const TriMesh m = mesh_from_off("OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n");
  EXPECT_NEAR(normal_distance(m, 0, 1, Ring::Face), 2.0, 1e-14);
}

TEST(NormalDistance, AntipodalIsFour) {
  const TriMesh m = mesh_from_off("OFF\n4 2 0\n0 0 0\n1 0 0\n0.5 1 0\n0.5 2 0\n3 0 1 2\n3 1 0 3\n");
  EXPECT_NEAR(normal_distance(m, 0, 1, Ring::Face), 4.0, 1e-14);
}

TEST(NormalDistance, NonAdjacentRejected) {
  const TriMesh m = make_grid_patch(3, 3);
  EXPECT_THROW(normal_distance(m, 0, 17, Ring::N1), PreconditionError);
}

TEST(BuildLaplacian, FlatPairUsesUnitExponential) {
  const TriMesh m = two_face_mesh();
  const Eigen::MatrixXd L = Eigen::MatrixXd(build_laplacian(m, Ring::N2));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_LT((L - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildLaplacian, ZeroRowSumsAndPsd) {
  std::mt19937_64 rng(1);
  for (const TriMesh& m : {make_blob(16, 10), make_dumbbell({1.0, 1.1, 0.3, 10, 11}), make_grid_patch(6, 5, 0.3, 2)}) {
    const SparseSym L = build_laplacian(m);
    EXPECT_LT((L * Eigen::VectorXd::Ones(m.num_faces())).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ((Eigen::MatrixXd(L) - Eigen::MatrixXd(L).transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = random_matrix(rng, m.num_faces(), 1);
      EXPECT_GE(x.dot(L * x), -1e-10);
    }
    for (int k = 0; k < L.outerSize(); ++k) {
      for (SparseSym::InnerIterator it(L, k); it; ++it) {
        if (it.row() != it.col()) EXPECT_LE(it.value(), 0.0);
      }
    }
  }
}

TEST(BuildLaplacian, NeedsAnInteriorEdge) {
  EXPECT_THROW(build_laplacian(single_triangle()), FeatureError);
  const TriMesh apart = mesh_from_off("OFF\n6 2 0\n0 0 0\n1 0 0\n0 1 0\n5 0 0\n6 0 0\n5 1 0\n3 0 1 2\n3 3 4 5\n");
  EXPECT_THROW(build_laplacian(apart), FeatureError);
}

TEST(SpectralEmbedding, PathGraphFiedler) {
  const FeatureField ff = spectral_embedding(path_laplacian(), 1);
  EXPECT_NEAR(ff.eigenvalues(0), 1.0, 1e-12);
  EXPECT_GT(abs_cosine(ff.values.col(0), Eigen::Vector3d(1, 0, -1)), 1.0 - 1e-12);
  EXPECT_GT(ff.values(0, 0), 0.0);
}

TEST(SpectralEmbedding, IterativePathMatchesDense) {
  // Long path graph through the iterative branch.
  const Index n = 600;
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i + 1, -1.0);
    t.emplace_back(i + 1, i, -1.0);
    t.emplace_back(i, i, 1.0);
    t.emplace_back(i + 1, i + 1, 1.0);
  }
  SparseSym L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  EigenOptions dense_opts;
  dense_opts.dense_threshold = n;
  EigenOptions sparse_opts;
  sparse_opts.dense_threshold = 10;
  const FeatureField a = spectral_embedding(L, 3, dense_opts);
  const FeatureField b = spectral_embedding(L, 3, sparse_opts);
  for (int c = 0; c < 3; ++c) {
    const double exact = 2.0 - 2.0 * std::cos(M_PI * (c + 1) / n);
    EXPECT_NEAR(a.eigenvalues(c), exact, 1e-12);
    EXPECT_NEAR(b.eigenvalues(c), exact, 1e-12);
    EXPECT_GT(abs_cosine(a.values.col(c), b.values.col(c)), 1.0 - 1e-8);
    EXPECT_LE(b.residuals(c), 1e-8);
  }
}

TEST(SpectralEmbedding, TooManyChannels) {
  EXPECT_THROW(spectral_embedding(path_laplacian(), 3), FeatureError);
}

TEST(FeatureField, StripReturnsFiedlerDirection) {
  const TriMesh m = equilateral_strip();
  const FeatureField ff = feature_field(m, 2);
  EXPECT_GT(abs_cosine(ff.values.col(0), Eigen::Vector3d(1, 0, -1)), 1.0 - 1e-8);
}

TEST(FeatureField, DisconnectedComponentsSeparate) {
  const TriMesh m = mesh_from_off(
      "OFF\n8 4 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n5 0 0\n6 0 0\n6 1 0\n5 1 0\n"
      "3 0 1 2\n3 0 2 3\n3 4 5 6\n3 4 6 7\n");
  const FeatureField ff = feature_field(m, 2);
  const auto& x = ff.values.col(0);
  EXPECT_NEAR(x(0), x(1), 1e-10);
  EXPECT_NEAR(x(2), x(3), 1e-10);
  EXPECT_GT(std::abs(x(0) - x(2)), 0.5);
}

TEST(FeatureField, ResidualOrthogonalityAndNormalization) {
  for (const TriMesh& m : {make_dumbbell(), make_random_closed_mesh(4, 1800), make_grid_patch(12, 10, 0.2, 4)}) {
    const FeatureField ff = feature_field(m, 4);
    const SparseSym L = build_laplacian(m);
    ASSERT_EQ(ff.values.cols(), 3);
    for (Index c = 0; c < 3; ++c) {
      const Eigen::VectorXd x = ff.values.col(c);
      EXPECT_LE((L * x - ff.eigenvalues(c) * x).norm(), 1e-8 * x.norm());
      const double total = m.face_areas().sum();
      const double mean = m.face_areas().dot(x) / total;
      const double var = m.face_areas().dot((x.array() - mean).square().matrix()) / total;
      EXPECT_NEAR(var, 1.0, 1e-10);
      EXPECT_NEAR(x.sum(), 0.0, 1e-8 * x.norm());
      for (Index d = c + 1; d < 3; ++d) EXPECT_LE(abs_cosine(x, ff.values.col(d)), 1e-8);
    }
    for (Index c = 1; c < 3; ++c) EXPECT_LE(ff.eigenvalues(c - 1), ff.eigenvalues(c) + 1e-12);
  }
}

TEST(FeatureField, InvariantUnderFaceReordering) {
  const TriMesh m = make_random_closed_mesh(6, 300);
  std::mt19937_64 rng(6);
  std::vector<int> perm(static_cast<size_t>(m.num_faces()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  FaceMatrix F(m.num_faces(), 3);
  for (Index t = 0; t < m.num_faces(); ++t) F.row(t) = m.faces().row(perm[t]);
  const TriMesh shuffled = TriMesh::from_arrays(m.vertices(), F);
  const FeatureField a = feature_field(m, 2), b = feature_field(shuffled, 2);
  Eigen::VectorXd back(m.num_faces());
  for (Index t = 0; t < m.num_faces(); ++t) back(perm[t]) = b.values(t, 0);
  EXPECT_GT(abs_cosine(a.values.col(0), back), 1.0 - 1e-8);
}

TEST(FeatureField, ParameterChecks) {
  const TriMesh m = make_grid_patch(1, 1);
  EXPECT_THROW(feature_field(m, 1), ParameterError);
  EXPECT_THROW(feature_field(m, 3), FeatureError);
}

TEST(FeatureField, Deterministic) {
  const TriMesh m = make_random_closed_mesh(8, 1500);
  EigenOptions opts;
  opts.dense_threshold = 100;
  const FeatureField a = feature_field(m, 3, Ring::N2, opts), b = feature_field(m, 3, Ring::N2, opts);
  EXPECT_EQ(a.values, b.values);
}

TEST(FeatureTable, OneRowPerFace) {
  const TriMesh m = make_grid_patch(2, 2);
  const FeatureField ff = feature_field(m, 3);
  std::ostringstream out;
  write_feature_table(out, ff);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), m.num_faces());
}
