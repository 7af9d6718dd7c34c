#ifndef MSSEG_SYNTHETIC_HPP
#define MSSEG_SYNTHETIC_HPP

#include "msseg/eval.hpp"
#include "msseg/mesh.hpp"

#include <cstdint>

namespace msseg {

struct DumbbellShape {
  double sphere_radius = 1.0;
  /// Distance of each sphere center from the origin along x.
  double center_offset = 1.1;
  double neck_radius = 0.3;
  int segments = 24;
  /// Vertex rings between the two poles; odd so one ring sits at x = 0.
  int rings = 41;
};

/// Two spheres joined by a cylindrical neck, as a closed surface of revolution
/// about the x axis. Mirror symmetric in x with a vertex ring on x = 0, so no
/// face straddles the midplane.
TriMesh make_dumbbell(const DumbbellShape& shape = {});

/// Label 0 for faces with centroid x < 0, label 1 otherwise.
FaceLabeling dumbbell_ground_truth(const TriMesh& mesh);

/// Latitude/longitude sphere with `rings` interior vertex rings and pole fans:
/// 2 * segments * rings faces.
TriMesh make_uv_sphere(int segments, int rings, double radius = 1.0);

/// Torus with smooth bumps, 2 * around * across faces (12k at the defaults).
TriMesh make_blob(int around = 100, int across = 60, double amplitude = 0.25);

/// Tetrahedron refined `levels` times by 1-to-4 splits and pushed to the unit sphere.
TriMesh make_subdivided_tetrahedron(int levels);

/// Random closed mesh with at most `max_faces` faces (at least 4), vertices
/// jittered radially. Deterministic in `seed`.
TriMesh make_random_closed_mesh(std::uint64_t seed, Index max_faces = 2000);

/// Flat nx x ny grid of squares split into triangles, z jittered. Has boundary.
TriMesh make_grid_patch(int nx, int ny, double jitter = 0.0, std::uint64_t seed = 0);

}  // namespace msseg

#endif  // MSSEG_SYNTHETIC_HPP
