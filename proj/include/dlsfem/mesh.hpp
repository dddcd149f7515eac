// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_MESH_HPP
#define DLSFEM_MESH_HPP

#include <array>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dlsfem/types.hpp"

namespace dlsfem
{

//
// Conforming simplicial partition of a 2D polygon (triangles) or a 3D polyhedron
// (tetrahedra). Cells are stored as flat (dim+1)-tuples of vertex indices and are
// always positively oriented.
//
class SimplicialMesh
{
public:
  SimplicialMesh() = default;
  SimplicialMesh(int dim, std::vector<Vec> vertices, std::vector<int> cell_vertices);

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()) / (dim_ + 1); }

  const Vec &vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec> &vertices() const { return vertices_; }
  std::span<const int> cell(int c) const
  {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  const std::vector<int> &cell_vertex_data() const { return cells_; }

  // Local index (into local_edges(dim)) of the edge the cell is bisected at.
  int refinement_edge(int c) const { return refinement_edges_[c]; }

  double cell_volume(int c) const;
  double cell_diameter(int c) const;
  // Diameter of the largest inscribed ball.
  double cell_inball_diameter(int c) const;
  double total_volume() const;
  // h := max over cells of the cell diameter.
  double mesh_size() const;

  // Pairs of local vertex indices forming the edges of a simplex.
  static std::span<const std::array<int, 2>> local_edges(int dim);

private:
  void orient_and_tag();

  int dim_ = 2;
  std::vector<Vec> vertices_;
  std::vector<int> cells_;
  std::vector<int> refinement_edges_;
};

struct InteriorFace
{
  int cell_plus = -1;
  int cell_minus = -1;
  int local_face_plus = -1;   // local index of the vertex of cell_plus opposite the face
  int local_face_minus = -1;
  std::array<int, 3> vertices{-1, -1, -1};  // first dim entries used
  Vec normal;                 // unit, pointing from plus to minus
  double diameter = 0.0;
  double measure = 0.0;
};

struct BoundaryFace
{
  int cell = -1;
  int local_face = -1;
  std::array<int, 3> vertices{-1, -1, -1};
  Vec normal;                 // outward unit normal
  double diameter = 0.0;
  double measure = 0.0;
};

struct FaceSet
{
  std::vector<InteriorFace> interior;
  std::vector<BoundaryFace> boundary;
};

// Structured mesh of (0,1)^2, every subsquare cut along the same diagonal.
SimplicialMesh unit_square_mesh(int n);

// Structured mesh of (0,1)^3, every subcube split into 6 Kuhn tetrahedra.
SimplicialMesh unit_cube_mesh(int n);

// Structured mesh of (-1,1)^2 \ [0,1)x(-1,0] with h = 1/n per unit block.
SimplicialMesh l_shaped_mesh(int n);

// Classifies faces as interior/boundary. The lower cell index is the plus side.
// Throws std::runtime_error for non-manifold input.
FaceSet build_faces(const SimplicialMesh &mesh);

// Red refinement: 4 children per triangle, 8 per tetrahedron.
SimplicialMesh uniform_refine(const SimplicialMesh &mesh);

// Longest-edge bisection of the marked cells followed by a conforming closure.
SimplicialMesh bisect(const SimplicialMesh &mesh, const std::set<int> &marked);

// Plain-text exchange format: header "dim ncells nverts", vertices, cells.
void write_mesh(std::ostream &os, const SimplicialMesh &mesh);
SimplicialMesh read_mesh(std::istream &is);
void write_mesh(const std::string &path, const SimplicialMesh &mesh);

}  // namespace dlsfem

#endif  // DLSFEM_MESH_HPP
