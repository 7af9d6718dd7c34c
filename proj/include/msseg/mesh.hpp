#ifndef MSSEG_MESH_HPP
#define MSSEG_MESH_HPP

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace msseg {

using Index = Eigen::Index;
using Vec3 = Eigen::Vector3d;
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

enum class MeshFormat { OBJ, OFF };

/// Neighborhood used when averaging face normals.
///   Face: the face alone
///   N1:   the face plus its edge-adjacent faces
///   N2:   the face plus every face sharing a vertex with it
enum class Ring { Face, N1, N2 };

/// Immutable triangle mesh with the oriented face/edge incidence used by the
/// discrete calculus.
///
/// Edges are stored once, directed from the smaller to the larger vertex index.
/// For face t with vertex triple (a, b, c) its local edge j runs from vertex j
/// to vertex (j + 1) % 3, and `face_edge_sign(t, j)` is +1 when that traversal
/// agrees with the stored edge direction, -1 otherwise.
class TriMesh {
 public:
  /// Builds the incidence structure. Throws TopologyError for repeated vertices
  /// in a face, out-of-range indices or non-manifold edges, and DegenerateError
  /// for zero-area faces.
  static TriMesh from_arrays(VertexMatrix vertices, FaceMatrix faces);

  Index num_vertices() const { return vertices_.rows(); }
  Index num_faces() const { return faces_.rows(); }
  Index num_edges() const { return edges_.rows(); }

  const VertexMatrix& vertices() const { return vertices_; }
  const FaceMatrix& faces() const { return faces_; }
  /// Edge endpoints (lo, hi) with lo < hi.
  const Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>& edges() const { return edges_; }
  const FaceMatrix& face_edges() const { return face_edges_; }
  const FaceMatrix& face_edge_signs() const { return face_edge_signs_; }
  /// Incident faces of each edge; the second entry is -1 for boundary edges.
  const Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>& edge_faces() const {
    return edge_faces_;
  }
  /// Sign of face `edge_faces(e, k)` with respect to edge e.
  const Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>& edge_face_signs() const {
    return edge_face_signs_;
  }

  bool is_boundary_edge(Index e) const { return edge_faces_(e, 1) < 0; }
  Index num_boundary_edges() const;
  Index num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  const Eigen::VectorXd& face_areas() const { return face_areas_; }
  const Eigen::VectorXd& edge_lengths() const { return edge_lengths_; }
  const VertexMatrix& face_normals() const { return face_normals_; }
  Vec3 face_centroid(Index t) const;

  /// Edge-adjacent faces of t (excluding t), ascending.
  const std::vector<int>& edge_neighbors(Index t) const { return edge_neighbors_[t]; }
  /// Vertex-adjacent faces of t (excluding t), ascending.
  const std::vector<int>& vertex_neighbors(Index t) const { return vertex_neighbors_[t]; }

  /// Connected components of the face adjacency graph (edge-adjacency).
  std::vector<int> face_components(int* count = nullptr) const;

  /// Non-fatal findings from construction, e.g. inconsistent winding.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  TriMesh() = default;

  VertexMatrix vertices_;
  FaceMatrix faces_;
  Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> edges_;
  FaceMatrix face_edges_;
  FaceMatrix face_edge_signs_;
  Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> edge_faces_;
  Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> edge_face_signs_;
  Eigen::VectorXd face_areas_;
  Eigen::VectorXd edge_lengths_;
  VertexMatrix face_normals_;
  std::vector<std::vector<int>> edge_neighbors_;
  std::vector<std::vector<int>> vertex_neighbors_;
  std::vector<std::string> warnings_;
};

TriMesh load_mesh(std::istream& source, MeshFormat format);
/// Format is taken from the extension (.off / .obj, case-insensitive).
TriMesh load_mesh_file(const std::string& path);
MeshFormat format_from_path(const std::string& path);

void write_off(std::ostream& out, const TriMesh& mesh);

/// Area-weighted, renormalized average of the face normals over `ring`.
/// Throws DegenerateError when the averaged vector vanishes.
Vec3 smoothed_normal(const TriMesh& mesh, Index face, Ring ring);
VertexMatrix smoothed_normals(const TriMesh& mesh, Ring ring);

}  // namespace msseg

#endif  // MSSEG_MESH_HPP
