#pragma once

// Simplicial meshes of (0,1) and (0,1)^2 with Dirichlet boundary markers.
//
// Plain-text format (whitespace separated, '#' starts a comment):
//   dim <1|2>
//   vertices <count>
//   <x> [y]                  one line per vertex
//   cells <count>
//   <i> <j> [k]              zero-based vertex indices, triangles counterclockwise
//   boundary <count>
//   <vertex index>           one line per Dirichlet vertex

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgtime::fem {

using Point = Eigen::Vector2d;

enum class Domain { interval, unit_square };

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Mesh {
  int dim = 1;
  std::vector<Point> vertices;             ///< y = 0 in 1D
  std::vector<std::array<int, 3>> cells;   ///< 1D cells use the first two entries
  std::vector<char> on_boundary;           ///< per vertex

  [[nodiscard]] int vertices_per_cell() const { return dim + 1; }
  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_cells() const { return cells.size(); }

  /// Signed length (1D) or signed area (2D).
  [[nodiscard]] double measure(std::size_t c) const {
    const auto& v = cells[c];
    if (dim == 1) return vertices[v[1]].x() - vertices[v[0]].x();
    const Point e1 = vertices[v[1]] - vertices[v[0]];
    const Point e2 = vertices[v[2]] - vertices[v[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }

  [[nodiscard]] double diameter(std::size_t c) const {
    const auto& v = cells[c];
    if (dim == 1) return std::abs(measure(c));
    return std::max({(vertices[v[0]] - vertices[v[1]]).norm(), (vertices[v[1]] - vertices[v[2]]).norm(),
                     (vertices[v[2]] - vertices[v[0]]).norm()});
  }

  /// h = max cell diameter.
  [[nodiscard]] double h() const {
    double out = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) out = std::max(out, diameter(c));
    return out;
  }

  /// max over cells of diameter / inradius (1 in 1D).
  [[nodiscard]] double shape_regularity() const {
    if (dim == 1) return 1.0;
    double out = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& v = cells[c];
      const double perimeter = (vertices[v[0]] - vertices[v[1]]).norm() + (vertices[v[1]] - vertices[v[2]]).norm() +
                               (vertices[v[2]] - vertices[v[0]]).norm();
      const double inradius = 2.0 * std::abs(measure(c)) / perimeter;
      out = std::max(out, diameter(c) / inradius);
    }
    return out;
  }
};

/// Throws MeshError if indices are out of range, a cell is degenerate or
/// clockwise, an edge is shared by more than two cells, or a boundary facet
/// has an unmarked vertex (which is how a hanging node shows up).
inline void validate(const Mesh& mesh) {
  if (mesh.dim != 1 && mesh.dim != 2) throw MeshError("mesh: dimension must be 1 or 2");
  if (mesh.on_boundary.size() != mesh.vertices.size()) throw MeshError("mesh: boundary marker count mismatch");
  if (mesh.cells.empty()) throw MeshError("mesh: no cells");
  const int nv = static_cast<int>(mesh.vertices.size());
  const int k = mesh.vertices_per_cell();
  std::map<std::vector<int>, int> facets;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (int i = 0; i < k; ++i) {
      const int v = mesh.cells[c][i];
      if (v < 0 || v >= nv) throw MeshError("mesh: cell " + std::to_string(c) + " has an invalid vertex index");
    }
    const double meas = mesh.measure(c);
    const double scale = mesh.dim == 1 ? 1.0 : mesh.diameter(c) * mesh.diameter(c);
    if (!(meas > 1e-14 * scale)) {
      throw MeshError("mesh: cell " + std::to_string(c) + (meas < 0 ? " is clockwise or reversed" : " is degenerate"));
    }
    if (mesh.dim == 1) {
      for (int i = 0; i < 2; ++i) ++facets[{mesh.cells[c][i]}];
    } else {
      for (int i = 0; i < 3; ++i) {
        int a = mesh.cells[c][i], b = mesh.cells[c][(i + 1) % 3];
        if (a > b) std::swap(a, b);
        ++facets[{a, b}];
      }
    }
  }
  for (const auto& [facet, count] : facets) {
    if (count > 2) throw MeshError("mesh: facet shared by more than two cells");
    if (count == 1) {
      for (int v : facet)
        if (!mesh.on_boundary[v]) throw MeshError("mesh: boundary facet with unmarked vertex " + std::to_string(v));
    }
  }
}

/// interval: n equal segments of (0,1). unit_square: n x n squares, each cut
/// into two right triangles along the (0,0)-(1,1) diagonal direction.
inline Mesh build_mesh(Domain domain, int n) {
  if (n < 1) throw std::invalid_argument("build_mesh: n must be >= 1");
  Mesh mesh;
  if (domain == Domain::interval) {
    mesh.dim = 1;
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(double(i) / n, 0.0);
      mesh.on_boundary.push_back(i == 0 || i == n);
    }
    for (int i = 0; i < n; ++i) mesh.cells.push_back({i, i + 1, -1});
    return mesh;
  }
  mesh.dim = 2;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(double(i) / n, double(j) / n);
      mesh.on_boundary.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

/// Uniform refinement: segments are halved, triangles split into four through
/// their edge midpoints. Orientation and boundary markers carry over.
inline Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.dim = mesh.dim;
  out.vertices = mesh.vertices;
  out.on_boundary = mesh.on_boundary;
  if (mesh.dim == 1) {
    for (const auto& c : mesh.cells) {
      const int mid = static_cast<int>(out.vertices.size());
      out.vertices.push_back(0.5 * (mesh.vertices[c[0]] + mesh.vertices[c[1]]));
      out.on_boundary.push_back(0);
      out.cells.push_back({c[0], mid, -1});
      out.cells.push_back({mid, c[1], -1});
    }
    return out;
  }
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& c : mesh.cells)
    for (int i = 0; i < 3; ++i) ++edge_count[std::minmax(c[i], c[(i + 1) % 3])];
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    out.on_boundary.push_back(edge_count[key] == 1);
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& c : mesh.cells) {
    const int ab = mid(c[0], c[1]), bc = mid(c[1], c[2]), ca = mid(c[2], c[0]);
    out.cells.push_back({c[0], ab, ca});
    out.cells.push_back({ab, c[1], bc});
    out.cells.push_back({ca, bc, c[2]});
    out.cells.push_back({ab, bc, ca});
  }
  return out;
}

/// Bucket grid over the bounding box for point-in-cell queries.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh) : mesh_(&mesh) {
    lo_ = hi_ = mesh.vertices.front();
    for (const auto& v : mesh.vertices) {
      lo_ = lo_.cwiseMin(v);
      hi_ = hi_.cwiseMax(v);
    }
    const double cells = static_cast<double>(mesh.num_cells());
    nx_ = std::max(1, static_cast<int>(mesh.dim == 1 ? cells : std::sqrt(cells)));
    ny_ = mesh.dim == 1 ? 1 : nx_;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      Point a = mesh.vertices[mesh.cells[c][0]], b = a;
      for (int i = 1; i < mesh.vertices_per_cell(); ++i) {
        a = a.cwiseMin(mesh.vertices[mesh.cells[c][i]]);
        b = b.cwiseMax(mesh.vertices[mesh.cells[c][i]]);
      }
      const auto [i0, j0] = bucket(a);
      const auto [i1, j1] = bucket(b);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(static_cast<int>(c));
    }
  }

  /// Cell containing x and the reference coordinates of x in it; -1 if outside.
  [[nodiscard]] std::pair<int, Point> locate(const Point& x, double tol = 1e-12) const {
    const auto [i, j] = bucket(x);
    for (int c : buckets_[j * nx_ + i]) {
      const Point r = reference_coords(c, x);
      const bool inside = mesh_->dim == 1 ? (r.x() >= -tol && r.x() <= 1 + tol)
                                          : (r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1 + tol);
      if (inside) return {c, r};
    }
    return {-1, Point::Zero()};
  }

  [[nodiscard]] Point reference_coords(int c, const Point& x) const {
    const auto& v = mesh_->cells[c];
    const Point& a = mesh_->vertices[v[0]];
    if (mesh_->dim == 1) return {(x.x() - a.x()) / (mesh_->vertices[v[1]].x() - a.x()), 0.0};
    Eigen::Matrix2d jac;
    jac.col(0) = mesh_->vertices[v[1]] - a;
    jac.col(1) = mesh_->vertices[v[2]] - a;
    return jac.inverse() * (x - a);
  }

 private:
  [[nodiscard]] std::pair<int, int> bucket(const Point& x) const {
    auto clampi = [](double s, int n) { return std::clamp(static_cast<int>(std::floor(s * n)), 0, n - 1); };
    const Point span = (hi_ - lo_).cwiseMax(Point::Constant(1e-300));
    return {clampi((x.x() - lo_.x()) / span.x(), nx_), mesh_->dim == 1 ? 0 : clampi((x.y() - lo_.y()) / span.y(), ny_)};
  }

  const Mesh* mesh_;
  Point lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(17);
  os << "dim " << mesh.dim << "\n";
  os << "vertices " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices) {
    os << v.x();
    if (mesh.dim == 2) os << " " << v.y();
    os << "\n";
  }
  os << "cells " << mesh.num_cells() << "\n";
  for (const auto& c : mesh.cells) {
    for (int i = 0; i < mesh.vertices_per_cell(); ++i) os << (i ? " " : "") << c[i];
    os << "\n";
  }
  std::vector<int> marked;
  for (std::size_t i = 0; i < mesh.on_boundary.size(); ++i)
    if (mesh.on_boundary[i]) marked.push_back(static_cast<int>(i));
  os << "boundary " << marked.size() << "\n";
  for (int v : marked) os << v << "\n";
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  /// Next non-empty, comment-stripped line split into tokens.
  std::vector<std::string> next(const char* expecting) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      std::vector<std::string> tok;
      for (std::string t; ss >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    throw MeshError("mesh line " + std::to_string(line_no_) + ": unexpected end of input, expecting " + expecting);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("mesh line " + std::to_string(line_no_) + ": " + msg);
  }

  template <class T>
  T number(const std::string& s) {
    std::istringstream ss(s);
    T v{};
    if (!(ss >> v) || !ss.eof()) fail("cannot parse '" + s + "'");
    return v;
  }

  std::size_t header(const char* key) {
    const auto tok = next(key);
    if (tok.size() != 2 || tok[0] != key) fail(std::string("expected '") + key + " <count>'");
    const long n = number<long>(tok[1]);
    if (n < 0) fail("negative count");
    return static_cast<std::size_t>(n);
  }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

}  // namespace detail

/// Parses the plain-text format and validates the result.
inline Mesh read_mesh(std::istream& is) {
  detail::LineReader in(is);
  Mesh mesh;
  {
    const auto tok = in.next("dim");
    if (tok.size() != 2 || tok[0] != "dim") in.fail("expected 'dim <1|2>'");
    mesh.dim = in.number<int>(tok[1]);
    if (mesh.dim != 1 && mesh.dim != 2) in.fail("dim must be 1 or 2");
  }
  const std::size_t nv = in.header("vertices");
  for (std::size_t i = 0; i < nv; ++i) {
    const auto tok = in.next("vertex coordinates");
    if (static_cast<int>(tok.size()) != mesh.dim) in.fail("vertex needs " + std::to_string(mesh.dim) + " coordinate(s)");
    mesh.vertices.emplace_back(in.number<double>(tok[0]), mesh.dim == 2 ? in.number<double>(tok[1]) : 0.0);
  }
  const std::size_t nc = in.header("cells");
  for (std::size_t i = 0; i < nc; ++i) {
    const auto tok = in.next("cell vertex indices");
    if (static_cast<int>(tok.size()) != mesh.dim + 1) in.fail("cell needs " + std::to_string(mesh.dim + 1) + " indices");
    std::array<int, 3> cell{-1, -1, -1};
    for (int k = 0; k <= mesh.dim; ++k) {
      cell[k] = in.number<int>(tok[k]);
      if (cell[k] < 0 || static_cast<std::size_t>(cell[k]) >= nv) in.fail("vertex index out of range");
    }
    mesh.cells.push_back(cell);
  }
  mesh.on_boundary.assign(nv, 0);
  const std::size_t nb = in.header("boundary");
  for (std::size_t i = 0; i < nb; ++i) {
    const auto tok = in.next("boundary vertex index");
    if (tok.size() != 1) in.fail("expected a single vertex index");
    const int v = in.number<int>(tok[0]);
    if (v < 0 || static_cast<std::size_t>(v) >= nv) in.fail("boundary vertex index out of range");
    mesh.on_boundary[v] = 1;
  }
  validate(mesh);
  return mesh;
}

inline Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(is);
}

inline void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw MeshError("cannot write mesh file '" + path + "'");
  write_mesh(os, mesh);
}

}  // namespace dgtime::fem
