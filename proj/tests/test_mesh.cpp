#include "dgtime/fem/mesh.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dgtime::fem;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream is(text);
  try {
    read_mesh(is);
  } catch (const MeshError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(BuildMesh, IntervalTwo) {
  const Mesh m = build_mesh(Domain::interval, 2);
  ASSERT_EQ(m.num_vertices(), 3u);
  EXPECT_EQ(m.vertices[1].x(), 0.5);
  EXPECT_EQ(m.num_cells(), 2u);
  int interior = 0;
  for (char b : m.on_boundary) interior += b ? 0 : 1;
  EXPECT_EQ(interior, 1);
}

TEST(BuildMesh, SquareTwo) {
  const Mesh m = build_mesh(Domain::unit_square, 2);
  EXPECT_EQ(m.num_cells(), 8u);
  int interior = 0;
  for (char b : m.on_boundary) interior += b ? 0 : 1;
  EXPECT_EQ(interior, 1);
  for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_NEAR(m.measure(c), 0.125, 1e-15);
  EXPECT_NO_THROW(validate(m));
}

TEST(BuildMesh, MeshSize) {
  for (int n : {1, 3, 10}) EXPECT_NEAR(build_mesh(Domain::interval, n).h(), 1.0 / n, 1e-15);
  EXPECT_NEAR(build_mesh(Domain::unit_square, 4).h(), std::sqrt(2.0) / 4, 1e-15);
  EXPECT_THROW(build_mesh(Domain::interval, 0), std::invalid_argument);
  EXPECT_THROW(build_mesh(Domain::unit_square, 0), std::invalid_argument);
}

TEST(Refine, CountsSizeAndShapeRegularity) {
  Mesh m = build_mesh(Domain::unit_square, 2);
  const double sigma = m.shape_regularity();
  for (int level = 0; level < 3; ++level) {
    const Mesh f = refine_uniform(m);
    EXPECT_EQ(f.num_cells(), 4 * m.num_cells());
    EXPECT_NEAR(f.h(), 0.5 * m.h(), 1e-14);
    EXPECT_NEAR(f.shape_regularity(), sigma, 1e-12);
    EXPECT_NO_THROW(validate(f));
    m = f;
  }
  const Mesh line = refine_uniform(build_mesh(Domain::interval, 3));
  EXPECT_EQ(line.num_cells(), 6u);
  EXPECT_NEAR(line.h(), 1.0 / 6, 1e-15);
}

TEST(Validate, HangingNodeDetected) {
  Mesh m;
  m.dim = 2;
  m.vertices = {{0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 1}};
  m.cells = {{0, 1, 2}, {1, 3, 4}, {4, 3, 2}};
  m.on_boundary = {1, 1, 1, 1, 0};
  EXPECT_THROW(validate(m), MeshError);
  // the conforming version: split the lower triangle at the same point
  m.cells = {{0, 1, 4}, {0, 4, 2}, {1, 3, 4}, {4, 3, 2}};
  EXPECT_NO_THROW(validate(m));
}

TEST(Validate, BadCells) {
  Mesh m = build_mesh(Domain::unit_square, 1);
  std::swap(m.cells[0][1], m.cells[0][2]);
  EXPECT_THROW(validate(m), MeshError);
  m = build_mesh(Domain::unit_square, 1);
  m.cells[0][2] = 7;
  EXPECT_THROW(validate(m), MeshError);
  Mesh d;
  d.dim = 2;
  d.vertices = {{0, 0}, {1, 0}, {2, 0}};
  d.cells = {{0, 1, 2}};
  d.on_boundary = {1, 1, 1};
  EXPECT_THROW(validate(d), MeshError);
}

TEST(MeshIo, RoundTrip) {
  for (const Mesh& m : {build_mesh(Domain::interval, 5), build_mesh(Domain::unit_square, 3)}) {
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    ASSERT_EQ(r.dim, m.dim);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_cells(), m.num_cells());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) EXPECT_EQ((r.vertices[i] - m.vertices[i]).norm(), 0.0);
    EXPECT_EQ(r.cells, m.cells);
    EXPECT_EQ(r.on_boundary, m.on_boundary);
  }
}

TEST(MeshIo, CommentsAndBlankLines) {
  const std::string text =
      "# two segments\n\ndim 1\nvertices 3  # count\n0\n0.5\n1\ncells 2\n0 1\n1 2\nboundary 2\n0\n2\n";
  std::istringstream is(text);
  const Mesh m = read_mesh(is);
  EXPECT_EQ(m.num_cells(), 2u);
  EXPECT_TRUE(m.on_boundary[0] && m.on_boundary[2] && !m.on_boundary[1]);
}

TEST(MeshIo, LineNumberedErrors) {
  EXPECT_NE(error_of("dim 3\n").find("mesh line 1"), std::string::npos);
  EXPECT_NE(error_of("dim 1\nvertices 2\n0\nabc\n").find("mesh line 4"), std::string::npos);
  EXPECT_NE(error_of("dim 1\nvertices 2\n0\n1\ncells 1\n0 5\n").find("mesh line 6"), std::string::npos);
  EXPECT_NE(error_of("dim 1\nvertices 2\n0\n1\ncells 1\n0 1\n").find("end of input"), std::string::npos);
  EXPECT_NE(error_of("dim 2\nvertices 1\n0\n").find("mesh line 3"), std::string::npos);
}

TEST(PointLocator, FindsCells) {
  const Mesh m = build_mesh(Domain::unit_square, 4);
  const PointLocator loc(m);
  for (const Point x : {Point(0.1, 0.1), Point(0.99, 0.01), Point(0.5, 0.5), Point(0.3, 0.77)}) {
    const auto [c, r] = loc.locate(x);
    ASSERT_GE(c, 0);
    const auto& v = m.cells[c];
    const Point back = m.vertices[v[0]] + r.x() * (m.vertices[v[1]] - m.vertices[v[0]]) +
                       r.y() * (m.vertices[v[2]] - m.vertices[v[0]]);
    EXPECT_LT((back - x).norm(), 1e-14);
  }
  EXPECT_EQ(loc.locate(Point(1.5, 0.5)).first, -1);
}
