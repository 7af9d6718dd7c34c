#include "msseg/mesh.hpp"

#include "msseg/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace msseg {

namespace {

struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

// Reads the next non-blank, comment-stripped line; returns false at EOF.
bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    line = strip_comment(raw);
    if (!is_blank(line)) return true;
  }
  return false;
}

RawMesh parse_off(std::istream& in) {
  RawMesh raw;
  std::string line;
  int line_no = 0;
  if (!next_content_line(in, line, line_no)) throw FormatError(1, "empty OFF stream");

  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") throw FormatError(line_no, "expected OFF header, got '" + magic + "'");

  long nv = -1, nf = -1, ne = 0;
  // Counts may follow the magic on the same line.
  if (!(header >> nv)) {
    if (!next_content_line(in, line, line_no)) throw FormatError(line_no, "missing counts line");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw FormatError(line_no, "malformed counts line");
    counts >> ne;
  } else if (!(header >> nf)) {
    throw FormatError(line_no, "malformed counts line");
  }
  if (nv < 0 || nf < 0) throw FormatError(line_no, "negative element count");

  raw.vertices.reserve(static_cast<size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line, line_no)) throw FormatError(line_no + 1, "unexpected end of vertex list");
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x() >> p.y() >> p.z())) throw FormatError(line_no, "malformed vertex line");
    raw.vertices.push_back(p);
  }
  raw.faces.reserve(static_cast<size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_content_line(in, line, line_no)) throw FormatError(line_no + 1, "unexpected end of face list");
    std::istringstream ls(line);
    long n = 0;
    if (!(ls >> n)) throw FormatError(line_no, "malformed face line");
    if (n != 3) {
      throw TopologyError("line " + std::to_string(line_no) + ": face with " + std::to_string(n) +
                          " vertices; only triangles are supported");
    }
    std::array<int, 3> f{};
    for (int k = 0; k < 3; ++k) {
      long idx = 0;
      if (!(ls >> idx)) throw FormatError(line_no, "malformed face line");
      if (idx < 0 || idx >= nv) throw FormatError(line_no, "vertex index out of range");
      f[k] = static_cast<int>(idx);
    }
    raw.faces.push_back(f);
  }
  return raw;
}

// OBJ face token "i", "i/t", "i//n" or "i/t/n"; negative indices are relative.
int parse_obj_index(const std::string& token, long nv, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try {
    size_t used = 0;
    idx = std::stol(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw FormatError(line_no, "malformed face index '" + token + "'");
  }
  if (idx < 0) idx = nv + idx + 1;
  if (idx < 1 || idx > nv) throw FormatError(line_no, "vertex index out of range");
  return static_cast<int>(idx - 1);
}

RawMesh parse_obj(std::istream& in) {
  RawMesh raw;
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = strip_comment(raw_line);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw FormatError(line_no, "malformed vertex line");
      raw.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.size() < 3) throw FormatError(line_no, "face with fewer than 3 vertices");
      if (tokens.size() != 3) {
        throw TopologyError("line " + std::to_string(line_no) + ": face with " +
                            std::to_string(tokens.size()) + " vertices; only triangles are supported");
      }
      const long nv = static_cast<long>(raw.vertices.size());
      raw.faces.push_back({parse_obj_index(tokens[0], nv, line_no),
                           parse_obj_index(tokens[1], nv, line_no),
                           parse_obj_index(tokens[2], nv, line_no)});
    }
    // vn, vt, usemtl, mtllib, o, g, s ... are ignored.
  }
  return raw;
}

TriMesh from_raw(const RawMesh& raw) {
  VertexMatrix V(static_cast<Index>(raw.vertices.size()), 3);
  for (size_t i = 0; i < raw.vertices.size(); ++i) V.row(static_cast<Index>(i)) = raw.vertices[i].transpose();
  FaceMatrix F(static_cast<Index>(raw.faces.size()), 3);
  for (size_t i = 0; i < raw.faces.size(); ++i) {
    for (int k = 0; k < 3; ++k) F(static_cast<Index>(i), k) = raw.faces[i][k];
  }
  return TriMesh::from_arrays(std::move(V), std::move(F));
}

std::string lowercase_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

TriMesh TriMesh::from_arrays(VertexMatrix vertices, FaceMatrix faces) {
  TriMesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  const Index nv = m.vertices_.rows();
  const Index nf = m.faces_.rows();

  for (Index t = 0; t < nf; ++t) {
    for (int k = 0; k < 3; ++k) {
      if (m.faces_(t, k) < 0 || m.faces_(t, k) >= nv) {
        throw TopologyError("face " + std::to_string(t) + " references vertex out of range");
      }
    }
    const int a = m.faces_(t, 0), b = m.faces_(t, 1), c = m.faces_(t, 2);
    if (a == b || b == c || a == c) {
      throw TopologyError("face " + std::to_string(t) + " has repeated vertices");
    }
  }

  // Edge enumeration in order of first appearance keeps indices deterministic.
  std::map<std::pair<int, int>, int> edge_ids;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<std::pair<int, int>>> incident;  // (face, sign)
  m.face_edges_.resize(nf, 3);
  m.face_edge_signs_.resize(nf, 3);
  for (Index t = 0; t < nf; ++t) {
    for (int j = 0; j < 3; ++j) {
      const int from = m.faces_(t, j);
      const int to = m.faces_(t, (j + 1) % 3);
      const auto key = std::minmax(from, to);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, static_cast<int>(edges.size()));
      if (inserted) {
        edges.push_back({key.first, key.second});
        incident.emplace_back();
      }
      const int e = it->second;
      const int sign = (from == key.first) ? 1 : -1;
      m.face_edges_(t, j) = e;
      m.face_edge_signs_(t, j) = sign;
      incident[static_cast<size_t>(e)].emplace_back(static_cast<int>(t), sign);
    }
  }

  const Index ne = static_cast<Index>(edges.size());
  m.edges_.resize(ne, 2);
  m.edge_faces_.resize(ne, 2);
  m.edge_face_signs_.resize(ne, 2);
  int inconsistent = 0;
  for (Index e = 0; e < ne; ++e) {
    const auto& inc = incident[static_cast<size_t>(e)];
    m.edges_(e, 0) = edges[static_cast<size_t>(e)][0];
    m.edges_(e, 1) = edges[static_cast<size_t>(e)][1];
    if (inc.size() > 2) {
      throw TopologyError("non-manifold edge (" + std::to_string(m.edges_(e, 0)) + ", " +
                          std::to_string(m.edges_(e, 1)) + ") has " + std::to_string(inc.size()) +
                          " incident faces");
    }
    m.edge_faces_(e, 0) = inc[0].first;
    m.edge_face_signs_(e, 0) = inc[0].second;
    if (inc.size() == 2) {
      if (inc[0].first == inc[1].first) {
        throw TopologyError("face " + std::to_string(inc[0].first) + " uses an edge twice");
      }
      m.edge_faces_(e, 1) = inc[1].first;
      m.edge_face_signs_(e, 1) = inc[1].second;
      if (inc[0].second == inc[1].second) ++inconsistent;
    } else {
      m.edge_faces_(e, 1) = -1;
      m.edge_face_signs_(e, 1) = 0;
    }
  }
  if (inconsistent > 0) {
    m.warnings_.push_back("inconsistent face winding on " + std::to_string(inconsistent) +
                          " interior edge(s); orientation is not repaired");
  }

  m.edge_lengths_.resize(ne);
  for (Index e = 0; e < ne; ++e) {
    m.edge_lengths_(e) = (m.vertices_.row(m.edges_(e, 1)) - m.vertices_.row(m.edges_(e, 0))).norm();
  }

  m.face_areas_.resize(nf);
  m.face_normals_.resize(nf, 3);
  for (Index t = 0; t < nf; ++t) {
    const Vec3 p0 = m.vertices_.row(m.faces_(t, 0)).transpose();
    const Vec3 p1 = m.vertices_.row(m.faces_(t, 1)).transpose();
    const Vec3 p2 = m.vertices_.row(m.faces_(t, 2)).transpose();
    const Vec3 cross = (p1 - p0).cross(p2 - p0);
    const double norm = cross.norm();
    const double scale = std::max({(p1 - p0).squaredNorm(), (p2 - p1).squaredNorm(), (p0 - p2).squaredNorm()});
    if (!(norm > 1e-14 * scale) || !std::isfinite(norm)) {
      throw DegenerateError(static_cast<int>(t), "zero-area triangle");
    }
    m.face_areas_(t) = 0.5 * norm;
    m.face_normals_.row(t) = (cross / norm).transpose();
  }

  m.edge_neighbors_.assign(static_cast<size_t>(nf), {});
  for (Index e = 0; e < ne; ++e) {
    if (m.edge_faces_(e, 1) < 0) continue;
    m.edge_neighbors_[static_cast<size_t>(m.edge_faces_(e, 0))].push_back(m.edge_faces_(e, 1));
    m.edge_neighbors_[static_cast<size_t>(m.edge_faces_(e, 1))].push_back(m.edge_faces_(e, 0));
  }
  std::vector<std::vector<int>> vertex_faces(static_cast<size_t>(nv));
  for (Index t = 0; t < nf; ++t) {
    for (int k = 0; k < 3; ++k) vertex_faces[static_cast<size_t>(m.faces_(t, k))].push_back(static_cast<int>(t));
  }
  m.vertex_neighbors_.assign(static_cast<size_t>(nf), {});
  for (Index t = 0; t < nf; ++t) {
    auto& nb = m.vertex_neighbors_[static_cast<size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      for (int s : vertex_faces[static_cast<size_t>(m.faces_(t, k))]) {
        if (s != t) nb.push_back(s);
      }
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    auto& en = m.edge_neighbors_[static_cast<size_t>(t)];
    std::sort(en.begin(), en.end());
  }
  return m;
}

Index TriMesh::num_boundary_edges() const {
  return (edge_faces_.col(1).array() < 0).count();
}

Vec3 TriMesh::face_centroid(Index t) const {
  return (vertices_.row(faces_(t, 0)) + vertices_.row(faces_(t, 1)) + vertices_.row(faces_(t, 2))).transpose() / 3.0;
}

std::vector<int> TriMesh::face_components(int* count) const {
  std::vector<int> comp(static_cast<size_t>(num_faces()), -1);
  int next = 0;
  std::vector<int> stack;
  for (Index seed = 0; seed < num_faces(); ++seed) {
    if (comp[static_cast<size_t>(seed)] >= 0) continue;
    comp[static_cast<size_t>(seed)] = next;
    stack.push_back(static_cast<int>(seed));
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int s : edge_neighbors_[static_cast<size_t>(t)]) {
        if (comp[static_cast<size_t>(s)] < 0) {
          comp[static_cast<size_t>(s)] = next;
          stack.push_back(s);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

TriMesh load_mesh(std::istream& source, MeshFormat format) {
  return from_raw(format == MeshFormat::OFF ? parse_off(source) : parse_obj(source));
}

MeshFormat format_from_path(const std::string& path) {
  const std::string ext = lowercase_extension(path);
  if (ext == "off") return MeshFormat::OFF;
  if (ext == "obj") return MeshFormat::OBJ;
  throw ParameterError("unrecognized mesh extension for '" + path + "' (expected .off or .obj)");
}

TriMesh load_mesh_file(const std::string& path) {
  const MeshFormat format = format_from_path(path);
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  return load_mesh(in, format);
}

void write_off(std::ostream& out, const TriMesh& mesh) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  out << std::setprecision(17);
  for (Index i = 0; i < mesh.num_vertices(); ++i) {
    out << mesh.vertices()(i, 0) << ' ' << mesh.vertices()(i, 1) << ' ' << mesh.vertices()(i, 2) << '\n';
  }
  for (Index t = 0; t < mesh.num_faces(); ++t) {
    out << "3 " << mesh.faces()(t, 0) << ' ' << mesh.faces()(t, 1) << ' ' << mesh.faces()(t, 2) << '\n';
  }
}

Vec3 smoothed_normal(const TriMesh& mesh, Index face, Ring ring) {
  if (face < 0 || face >= mesh.num_faces()) {
    throw PreconditionError("face index " + std::to_string(face) + " out of range");
  }
  const auto& A = mesh.face_areas();
  const auto& N = mesh.face_normals();
  Vec3 sum = A(face) * N.row(face).transpose();
  if (ring != Ring::Face) {
    const auto& nb = ring == Ring::N1 ? mesh.edge_neighbors(face) : mesh.vertex_neighbors(face);
    for (int s : nb) sum += A(s) * N.row(s).transpose();
  }
  const double norm = sum.norm();
  if (norm < 1e-12) throw DegenerateError(static_cast<int>(face), "averaged normal vanishes");
  return sum / norm;
}

VertexMatrix smoothed_normals(const TriMesh& mesh, Ring ring) {
  VertexMatrix out(mesh.num_faces(), 3);
  for (Index t = 0; t < mesh.num_faces(); ++t) out.row(t) = smoothed_normal(mesh, t, ring).transpose();
  return out;
}

}  // namespace msseg
