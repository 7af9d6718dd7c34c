#include "msseg/calculus.hpp"

#include <vector>

namespace msseg {

SparseMatrix gradient_matrix(const TriMesh& mesh) {
  const auto& ef = mesh.edge_faces();
  const auto& es = mesh.edge_face_signs();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(2 * mesh.num_edges()));
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (ef(e, 1) < 0) continue;
    triplets.emplace_back(e, ef(e, 0), es(e, 0));
    triplets.emplace_back(e, ef(e, 1), es(e, 1));
  }
  SparseMatrix G(mesh.num_edges(), mesh.num_faces());
  G.setFromTriplets(triplets.begin(), triplets.end());
  return G;
}

SparseMatrix divergence_matrix(const TriMesh& mesh) {
  const auto& fe = mesh.face_edges();
  const auto& fs = mesh.face_edge_signs();
  const auto& len = mesh.edge_lengths();
  const auto& area = mesh.face_areas();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(3 * mesh.num_faces()));
  for (Index t = 0; t < mesh.num_faces(); ++t) {
    for (int j = 0; j < 3; ++j) {
      triplets.emplace_back(t, fe(t, j), -fs(t, j) * len(fe(t, j)) / area(t));
    }
  }
  SparseMatrix D(mesh.num_faces(), mesh.num_edges());
  D.setFromTriplets(triplets.begin(), triplets.end());
  return D;
}

EdgeField restrict_to_interior(const TriMesh& mesh, const EdgeField& p) {
  detail::require_rows(p.rows(), mesh.num_edges(), "restrict_to_interior");
  EdgeField out = p;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) out.row(e).setZero();
  }
  return out;
}

}  // namespace msseg
