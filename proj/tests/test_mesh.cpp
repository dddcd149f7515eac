// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "dlsfem/mesh.hpp"

using namespace dlsfem;

namespace
{

using FaceKey = std::array<int, 3>;

// Multiplicity of every (dim-1)-simplex, from all cells, without using build_faces.
std::map<FaceKey, int> enumerate_faces(const SimplicialMesh &mesh)
{
  std::map<FaceKey, int> count;
  const int dim = mesh.dim();
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (int skip = 0; skip <= dim; ++skip)
    {
      FaceKey key{-1, -1, -1};
      int pos = 0;
      for (int i = 0; i <= dim; ++i)
      {
        if (i != skip)
        {
          key[pos++] = cell[i];
        }
      }
      std::sort(key.begin(), key.begin() + dim);
      ++count[key];
    }
  }
  return count;
}

bool on_unit_box_boundary(const SimplicialMesh &mesh, std::span<const int> ids)
{
  for (int d = 0; d < mesh.dim(); ++d)
  {
    for (double side : {0.0, 1.0})
    {
      bool all = true;
      for (int v : ids)
      {
        all = all && std::abs(mesh.vertex(v)(d) - side) < 1e-14;
      }
      if (all)
      {
        return true;
      }
    }
  }
  return false;
}

bool on_l_boundary_point(const Vec &x)
{
  const double e = 1e-14;
  const bool in_closure = x(0) >= -1 - e && x(0) <= 1 + e && x(1) >= -1 - e && x(1) <= 1 + e &&
                          !(x(0) > e && x(1) < -e);
  if (!in_closure)
  {
    return false;
  }
  return std::abs(x(0) + 1) < e || std::abs(x(1) - 1) < e ||
         (std::abs(x(0) - 1) < e && x(1) >= -e) || (std::abs(x(1) + 1) < e && x(0) <= e) ||
         (std::abs(x(0)) < e && x(1) <= e) || (std::abs(x(1)) < e && x(0) >= -e);
}

bool on_l_boundary(const SimplicialMesh &mesh, std::span<const int> ids)
{
  // An edge is on the boundary iff both ends and its midpoint are.
  const Vec a = mesh.vertex(ids[0]);
  const Vec b = mesh.vertex(ids[1]);
  return on_l_boundary_point(a) && on_l_boundary_point(b) && on_l_boundary_point(0.5 * (a + b));
}

template <typename Predicate>
void expect_conforming(const SimplicialMesh &mesh, Predicate on_boundary)
{
  for (const auto &[key, mult] : enumerate_faces(mesh))
  {
    ASSERT_LE(mult, 2);
    if (mult == 1)
    {
      EXPECT_TRUE(on_boundary(mesh, std::span<const int>(key.data(), mesh.dim())));
    }
  }
}

void expect_faces_match_enumeration(const SimplicialMesh &mesh)
{
  const auto count = enumerate_faces(mesh);
  std::size_t interior = 0, boundary = 0;
  for (const auto &[key, mult] : count)
  {
    (mult == 2 ? interior : boundary)++;
  }
  const FaceSet faces = build_faces(mesh);
  EXPECT_EQ(faces.interior.size(), interior);
  EXPECT_EQ(faces.boundary.size(), boundary);
  EXPECT_EQ(faces.interior.size() + faces.boundary.size(), count.size());
}

Vec centroid(const SimplicialMesh &mesh, std::span<const int> ids)
{
  Vec c = Vec::Zero(mesh.dim());
  for (int v : ids)
  {
    c += mesh.vertex(v);
  }
  return c / static_cast<double>(ids.size());
}

// Unit normal of the face, pointing away from the opposite cell vertex.
Vec outward_normal(const SimplicialMesh &mesh, int cell, std::span<const int> face)
{
  const int dim = mesh.dim();
  Vec n(dim);
  if (dim == 2)
  {
    const Vec t = mesh.vertex(face[1]) - mesh.vertex(face[0]);
    n << t(1), -t(0);
  }
  else
  {
    const Eigen::Vector3d a = mesh.vertex(face[1]) - mesh.vertex(face[0]);
    const Eigen::Vector3d b = mesh.vertex(face[2]) - mesh.vertex(face[0]);
    n = a.cross(b);
  }
  n.normalize();
  const Vec inward = centroid(mesh, mesh.cell(cell)) - centroid(mesh, face);
  return n.dot(inward) > 0 ? Vec(-n) : n;
}

double min_angle_2d(const SimplicialMesh &mesh)
{
  double best = std::numbers::pi;
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (int i = 0; i < 3; ++i)
    {
      const Vec a = mesh.vertex(cell[(i + 1) % 3]) - mesh.vertex(cell[i]);
      const Vec b = mesh.vertex(cell[(i + 2) % 3]) - mesh.vertex(cell[i]);
      best = std::min(best, std::acos(a.dot(b) / (a.norm() * b.norm())));
    }
  }
  return best;
}

double max_shape_ratio(const SimplicialMesh &mesh)
{
  double r = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    r = std::max(r, mesh.cell_diameter(c) / mesh.cell_inball_diameter(c));
  }
  return r;
}

std::set<int> all_cells(const SimplicialMesh &mesh)
{
  std::set<int> s;
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    s.insert(c);
  }
  return s;
}

}  // namespace

TEST(UnitSquareMesh, SmallestPartition)
{
  const auto mesh = unit_square_mesh(1);
  EXPECT_EQ(mesh.num_cells(), 2);
  EXPECT_EQ(mesh.num_vertices(), 4);
  EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-14);
}

TEST(UnitSquareMesh, TenByTen)
{
  const auto mesh = unit_square_mesh(10);
  EXPECT_EQ(mesh.num_cells(), 200);
  EXPECT_EQ(mesh.num_vertices(), 121);
  EXPECT_NEAR(mesh.mesh_size(), std::sqrt(2.0) / 10, 1e-14);
  EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-12);
}

TEST(UnitSquareMesh, FacesMatchEnumeration)
{
  const auto mesh = unit_square_mesh(4);
  expect_faces_match_enumeration(mesh);
  const FaceSet faces = build_faces(mesh);
  // 3 edges per cell, interior edges counted twice
  EXPECT_EQ(2 * faces.interior.size() + faces.boundary.size(), 3u * mesh.num_cells());
  EXPECT_EQ(faces.boundary.size(), 16u);
}

TEST(UnitCubeMesh, Counts)
{
  const auto one = unit_cube_mesh(1);
  EXPECT_EQ(one.num_cells(), 6);
  EXPECT_NEAR(one.total_volume(), 1.0, 1e-14);
  const auto four = unit_cube_mesh(4);
  EXPECT_EQ(four.num_cells(), 384);
  EXPECT_NEAR(four.total_volume(), 1.0, 1e-12);
  expect_faces_match_enumeration(one);
  expect_faces_match_enumeration(unit_cube_mesh(2));
  // every boundary square splits into two triangles
  EXPECT_EQ(build_faces(unit_cube_mesh(2)).boundary.size(), 6u * 4u * 2u);
}

TEST(UnitCubeMesh, Conforming)
{
  const auto mesh = unit_cube_mesh(3);
  expect_conforming(mesh, on_unit_box_boundary);
}

TEST(LShapedMesh, Counts)
{
  const auto one = l_shaped_mesh(1);
  EXPECT_EQ(one.num_cells(), 6);
  EXPECT_NEAR(one.total_volume(), 3.0, 1e-14);
  const auto five = l_shaped_mesh(5);
  EXPECT_EQ(five.num_cells(), 150);
  EXPECT_NEAR(five.mesh_size(), std::sqrt(2.0) / 5, 1e-14);
  const auto two = l_shaped_mesh(2);
  expect_faces_match_enumeration(two);
  // perimeter 8 with edge length 1/2
  EXPECT_EQ(build_faces(two).boundary.size(), 16u);
  expect_conforming(two, on_l_boundary);
  bool has_corner = false;
  for (const auto &v : five.vertices())
  {
    has_corner = has_corner || v.norm() < 1e-15;
  }
  EXPECT_TRUE(has_corner);
}

TEST(BuildFaces, SingleDiagonal)
{
  const FaceSet faces = build_faces(unit_square_mesh(1));
  EXPECT_EQ(faces.interior.size(), 1u);
  EXPECT_EQ(faces.boundary.size(), 4u);
}

TEST(BuildFaces, NormalsAndOrientation)
{
  for (const auto &mesh : {unit_square_mesh(3), l_shaped_mesh(2), unit_cube_mesh(2)})
  {
    const FaceSet faces = build_faces(mesh);
    const int dim = mesh.dim();
    for (const auto &f : faces.interior)
    {
      const std::span<const int> ids(f.vertices.data(), dim);
      EXPECT_LT(f.cell_plus, f.cell_minus);
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-14);
      EXPECT_LT((f.normal - outward_normal(mesh, f.cell_plus, ids)).norm(), 1e-14);
      EXPECT_LT((f.normal + outward_normal(mesh, f.cell_minus, ids)).norm(), 1e-14);
      const int opposite = mesh.cell(f.cell_plus)[f.local_face_plus];
      EXPECT_EQ(std::find(ids.begin(), ids.end(), opposite), ids.end());
    }
    for (const auto &f : faces.boundary)
    {
      const std::span<const int> ids(f.vertices.data(), dim);
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-14);
      EXPECT_LT((f.normal - outward_normal(mesh, f.cell, ids)).norm(), 1e-14);
      EXPECT_GT(f.measure, 0.0);
    }
  }
}

TEST(BuildFaces, RejectsNonManifold)
{
  // three triangles on one edge
  std::vector<Vec> v = {Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}, Vec{{0.0, -1.0}},
                        Vec{{1.0, 1.0}}};
  const SimplicialMesh mesh(2, v, {0, 1, 2, 0, 1, 3, 0, 1, 4});
  EXPECT_THROW(build_faces(mesh), std::runtime_error);
}

TEST(SimplicialMesh, OrientsCellsAndRejectsDegenerate)
{
  std::vector<Vec> v = {Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}};
  const SimplicialMesh mesh(2, v, {0, 2, 1});
  EXPECT_NEAR(mesh.cell_volume(0), 0.5, 1e-15);
  std::vector<Vec> flat = {Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Vec{{2.0, 0.0}}};
  EXPECT_THROW(SimplicialMesh(2, flat, {0, 1, 2}), std::invalid_argument);
}

TEST(UniformRefine, Square)
{
  const auto refined = uniform_refine(unit_square_mesh(1));
  EXPECT_EQ(refined.num_cells(), 8);
  const auto five = uniform_refine(unit_square_mesh(5));
  EXPECT_EQ(five.num_vertices(), 11 * 11);
  EXPECT_NEAR(five.total_volume(), 1.0, 1e-12);
  EXPECT_NEAR(five.mesh_size(), unit_square_mesh(5).mesh_size() / 2, 1e-14);
  expect_conforming(five, on_unit_box_boundary);
}

TEST(UniformRefine, LShapeAndCube)
{
  const auto l = uniform_refine(uniform_refine(l_shaped_mesh(1)));
  EXPECT_NEAR(l.total_volume(), 3.0, 1e-12);
  expect_conforming(l, on_l_boundary);

  const auto cube = uniform_refine(unit_cube_mesh(1));
  EXPECT_EQ(cube.num_cells(), 48);
  EXPECT_NEAR(cube.total_volume(), 1.0, 1e-12);
  expect_conforming(cube, on_unit_box_boundary);
  const auto twice = uniform_refine(cube);
  EXPECT_LT(max_shape_ratio(twice), 2.0 * max_shape_ratio(cube) + 1e-12);
}

TEST(Bisect, EmptyMarkingIsIdentity)
{
  const auto mesh = unit_square_mesh(2);
  const auto out = bisect(mesh, {});
  EXPECT_EQ(out.cell_vertex_data(), mesh.cell_vertex_data());
  EXPECT_EQ(out.num_vertices(), mesh.num_vertices());
}

TEST(Bisect, SingleCellClosure)
{
  const auto mesh = unit_square_mesh(1);
  const auto out = bisect(mesh, {0});
  EXPECT_GT(out.num_cells(), 2);
  EXPECT_NEAR(out.total_volume(), 1.0, 1e-14);
  expect_conforming(out, on_unit_box_boundary);
  EXPECT_NO_THROW(build_faces(out));
}

TEST(Bisect, ClosurePropagatesOnLShape)
{
  auto mesh = l_shaped_mesh(2);
  for (int gen = 0; gen < 6; ++gen)
  {
    // refine the cells touching the reentrant corner
    std::set<int> marked;
    for (int c = 0; c < mesh.num_cells(); ++c)
    {
      for (int v : mesh.cell(c))
      {
        if (mesh.vertex(v).norm() < 1e-14)
        {
          marked.insert(c);
        }
      }
    }
    mesh = bisect(mesh, marked);
    expect_conforming(mesh, on_l_boundary);
    EXPECT_NEAR(mesh.total_volume(), 3.0, 1e-12);
  }
}

TEST(Bisect, ShapeRegularCascade)
{
  auto mesh = unit_square_mesh(1);
  const double initial_angle = min_angle_2d(mesh);
  for (int gen = 0; gen < 8; ++gen)
  {
    mesh = bisect(mesh, {0, mesh.num_cells() / 2});
    EXPECT_LT(max_shape_ratio(mesh), 50.0);
  }
  auto uniform = unit_square_mesh(2);
  for (int gen = 0; gen < 3; ++gen)
  {
    uniform = bisect(uniform, all_cells(uniform));
  }
  EXPECT_GE(min_angle_2d(uniform), initial_angle / 2 - 1e-12);
  EXPECT_NEAR(uniform.total_volume(), 1.0, 1e-12);
}

TEST(Bisect, TetrahedraStayConforming)
{
  auto mesh = unit_cube_mesh(1);
  for (int gen = 0; gen < 4; ++gen)
  {
    mesh = bisect(mesh, {0});
    expect_conforming(mesh, on_unit_box_boundary);
    EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-12);
  }
}

TEST(Bisect, LongestEdgeIsSplit)
{
  // right triangle: the hypotenuse is the unique longest edge
  std::vector<Vec> v = {Vec{{0.0, 0.0}}, Vec{{2.0, 0.0}}, Vec{{0.0, 1.0}}};
  const auto out = bisect(SimplicialMesh(2, v, {0, 1, 2}), {0});
  ASSERT_EQ(out.num_cells(), 2);
  ASSERT_EQ(out.num_vertices(), 4);
  EXPECT_LT((out.vertex(3) - Vec{{1.0, 0.5}}).norm(), 1e-15);
}

TEST(Bisect, RejectsInvalidCell)
{
  EXPECT_THROW(bisect(unit_square_mesh(1), {5}), std::out_of_range);
}

TEST(MeshIo, RoundTrip)
{
  for (const auto &mesh : {l_shaped_mesh(2), unit_cube_mesh(1)})
  {
    std::stringstream ss;
    write_mesh(ss, mesh);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, std::to_string(mesh.dim()) + " " + std::to_string(mesh.num_cells()) + " " +
                        std::to_string(mesh.num_vertices()));
    ss.seekg(0);
    const auto back = read_mesh(ss);
    EXPECT_EQ(back.cell_vertex_data(), mesh.cell_vertex_data());
    for (int v = 0; v < mesh.num_vertices(); ++v)
    {
      EXPECT_EQ(back.vertex(v), mesh.vertex(v));
    }
  }
}
