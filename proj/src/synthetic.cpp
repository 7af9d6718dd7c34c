#include "msseg/synthetic.hpp"

#include "msseg/error.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

namespace msseg {

namespace {

constexpr double kPi = std::numbers::pi;

/// Faces oriented so the enclosed signed volume is positive.
FaceMatrix orient_outward(const VertexMatrix& V, FaceMatrix F) {
  double volume = 0.0;
  for (Index t = 0; t < F.rows(); ++t) {
    const Vec3 a = V.row(F(t, 0)), b = V.row(F(t, 1)), c = V.row(F(t, 2));
    volume += a.dot(b.cross(c));
  }
  if (volume < 0.0) F.col(1).swap(F.col(2));
  return F;
}

/// Closed surface of revolution about x from a profile (x_i, rho_i) whose
/// first and last points are poles (rho = 0).
TriMesh revolve(const std::vector<double>& xs, const std::vector<double>& rhos, int segments,
                const std::function<double(double, double, double)>& radial = {}) {
  const int n = static_cast<int>(xs.size());
  const int inner = n - 2;
  VertexMatrix V(2 + inner * segments, 3);
  V.row(0) << xs.front(), 0.0, 0.0;
  for (int i = 0; i < inner; ++i) {
    for (int j = 0; j < segments; ++j) {
      const double theta = 2.0 * kPi * j / segments;
      const double scale = radial ? radial(xs[i + 1], theta, rhos[i + 1]) : 1.0;
      V.row(1 + i * segments + j) << xs[i + 1], scale * rhos[i + 1] * std::cos(theta),
          scale * rhos[i + 1] * std::sin(theta);
    }
  }
  const int north = 1 + inner * segments;
  V.row(north) << xs.back(), 0.0, 0.0;

  auto ring = [&](int i, int j) { return 1 + i * segments + (j % segments); };
  std::vector<std::array<int, 3>> faces;
  for (int j = 0; j < segments; ++j) faces.push_back({0, ring(0, j + 1), ring(0, j)});
  for (int i = 0; i + 1 < inner; ++i) {
    for (int j = 0; j < segments; ++j) {
      faces.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j + 1)});
      faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i + 1, j)});
    }
  }
  for (int j = 0; j < segments; ++j) faces.push_back({north, ring(inner - 1, j), ring(inner - 1, j + 1)});

  FaceMatrix F(static_cast<Index>(faces.size()), 3);
  for (Index t = 0; t < F.rows(); ++t) F.row(t) << faces[t][0], faces[t][1], faces[t][2];
  F = orient_outward(V, std::move(F));
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

}  // namespace

TriMesh make_dumbbell(const DumbbellShape& shape) {
  const double R = shape.sphere_radius, r = shape.neck_radius, c = shape.center_offset;
  if (!(r > 0.0 && r < R)) throw ParameterError("dumbbell: neck radius must lie in (0, sphere radius)");
  const double join = c - std::sqrt(R * R - r * r);
  if (!(join > 0.0)) throw ParameterError("dumbbell: spheres overlap; increase center_offset");
  if (shape.rings < 3 || shape.rings % 2 == 0) throw ParameterError("dumbbell: rings must be odd and >= 3");
  if (shape.segments < 3) throw ParameterError("dumbbell: segments must be >= 3");

  // Right half of the profile, parameterized by arclength from x = 0:
  // neck segment [0, join], then the sphere arc out to the pole.
  const double phi0 = std::asin(r / R);  // angle of the junction seen from the sphere center
  const double arc = R * (kPi - phi0);
  const double half = join + arc;
  auto profile = [&](double s, double& x, double& rho) {
    if (s <= join) {
      x = s;
      rho = r;
    } else {
      const double phi = phi0 + (s - join) / R;  // 0 at the far pole side measured from -x axis
      x = c - R * std::cos(phi);
      rho = R * std::sin(phi);
    }
  };

  const int intervals = shape.rings + 1;  // between the poles
  std::vector<double> xs(intervals + 1), rhos(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double s = -half + 2.0 * half * i / intervals;
    double x = 0.0, rho = 0.0;
    profile(std::abs(s), x, rho);
    xs[i] = s < 0 ? -x : x;
    rhos[i] = rho;
  }
  xs[intervals / 2] = 0.0;
  rhos.front() = rhos.back() = 0.0;
  return revolve(xs, rhos, shape.segments);
}

FaceLabeling dumbbell_ground_truth(const TriMesh& mesh) {
  FaceLabeling gt;
  gt.labels.resize(static_cast<std::size_t>(mesh.num_faces()));
  for (Index t = 0; t < mesh.num_faces(); ++t) gt.labels[t] = mesh.face_centroid(t).x() < 0.0 ? 0 : 1;
  return gt;
}

TriMesh make_uv_sphere(int segments, int rings, double radius) {
  if (segments < 3 || rings < 1) throw ParameterError("uv sphere: need segments >= 3 and rings >= 1");
  std::vector<double> xs(rings + 2), rhos(rings + 2);
  for (int i = 0; i <= rings + 1; ++i) {
    const double phi = kPi * i / (rings + 1);
    xs[i] = -radius * std::cos(phi);
    rhos[i] = radius * std::sin(phi);
  }
  rhos.front() = rhos.back() = 0.0;
  return revolve(xs, rhos, segments);
}

TriMesh make_blob(int around, int across, double amplitude) {
  if (around < 3 || across < 3) throw ParameterError("blob: need at least 3 samples in each direction");
  constexpr double major = 2.0, minor = 0.8;
  VertexMatrix V(around * across, 3);
  auto id = [&](int i, int j) { return (i % around) * across + (j % across); };
  for (int i = 0; i < around; ++i) {
    const double theta = 2.0 * kPi * i / around;
    for (int j = 0; j < across; ++j) {
      const double phi = 2.0 * kPi * j / across;
      const double r = minor * (1.0 + amplitude * std::cos(3.0 * theta) * std::sin(2.0 * phi));
      const double ring = major + r * std::cos(phi);
      V.row(id(i, j)) << ring * std::cos(theta), ring * std::sin(theta),
          r * std::sin(phi) + 0.5 * amplitude * std::sin(2.0 * theta);
    }
  }
  FaceMatrix F(2 * around * across, 3);
  Index t = 0;
  for (int i = 0; i < around; ++i) {
    for (int j = 0; j < across; ++j) {
      F.row(t++) << id(i, j), id(i + 1, j), id(i + 1, j + 1);
      F.row(t++) << id(i, j), id(i + 1, j + 1), id(i, j + 1);
    }
  }
  F = orient_outward(V, std::move(F));
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

TriMesh make_subdivided_tetrahedron(int levels) {
  if (levels < 0) throw ParameterError("tetrahedron: levels must be >= 0");
  std::vector<Vec3> verts = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = mid.emplace(key, static_cast<int>(verts.size()));
      if (inserted) verts.push_back(0.5 * (verts[a] + verts[b]));
      return it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  VertexMatrix V(static_cast<Index>(verts.size()), 3);
  for (Index i = 0; i < V.rows(); ++i) V.row(i) = verts[i].normalized();
  FaceMatrix F(static_cast<Index>(faces.size()), 3);
  for (Index t = 0; t < F.rows(); ++t) F.row(t) << faces[t][0], faces[t][1], faces[t][2];
  F = orient_outward(V, std::move(F));
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

TriMesh make_random_closed_mesh(std::uint64_t seed, Index max_faces) {
  if (max_faces < 4) throw ParameterError("random mesh: max_faces must be >= 4");
  std::mt19937_64 rng(seed);
  VertexMatrix V;
  FaceMatrix F;
  const bool tetra = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
  if (tetra || max_faces < 12) {
    int levels = 0;
    while (4 * static_cast<Index>(std::pow(4, levels + 1)) <= max_faces) ++levels;
    const int pick = std::uniform_int_distribution<int>(0, levels)(rng);
    TriMesh m = make_subdivided_tetrahedron(pick);
    V = m.vertices();
    F = m.faces();
  } else {
    // 2 * s * r faces
    const int s = std::uniform_int_distribution<int>(3, 30)(rng);
    const int r_max = std::max<int>(1, static_cast<int>(max_faces / (2 * s)));
    const int r = std::uniform_int_distribution<int>(1, r_max)(rng);
    TriMesh m = make_uv_sphere(s, r);
    V = m.vertices();
    F = m.faces();
  }
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  for (Index i = 0; i < V.rows(); ++i) V.row(i) *= jitter(rng);
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

TriMesh make_grid_patch(int nx, int ny, double jitter, std::uint64_t seed) {
  if (nx < 1 || ny < 1) throw ParameterError("grid: need at least one cell per side");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dz(-jitter, jitter);
  VertexMatrix V((nx + 1) * (ny + 1), 3);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) V.row(id(i, j)) << i, j, jitter > 0.0 ? dz(rng) : 0.0;
  }
  FaceMatrix F(2 * nx * ny, 3);
  Index t = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      F.row(t++) << id(i, j), id(i + 1, j), id(i + 1, j + 1);
      F.row(t++) << id(i, j), id(i + 1, j + 1), id(i, j + 1);
    }
  }
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

}  // namespace msseg
