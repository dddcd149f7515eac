// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace dlsfem
{

namespace
{

constexpr std::array<std::array<int, 2>, 3> kEdges2d{{{0, 1}, {0, 2}, {1, 2}}};
constexpr std::array<std::array<int, 2>, 6> kEdges3d{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

using EdgeKey = std::pair<int, int>;

EdgeKey make_edge(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_volume(int dim, const std::vector<Vec> &verts, std::span<const int> cell)
{
  SmallMat jac(dim, dim);
  for (int i = 0; i < dim; ++i)
  {
    jac.col(i) = verts[cell[i + 1]] - verts[cell[0]];
  }
  return jac.determinant() / (dim == 2 ? 2.0 : 6.0);
}

// Longest edge of a cell; near-ties (relative 1e-12) go to the lexicographically
// smallest (min index, max index) global vertex pair so neighbours agree.
int longest_edge(int dim, const std::vector<Vec> &verts, std::span<const int> cell)
{
  const auto edges = SimplicialMesh::local_edges(dim);
  int best = -1;
  double best_len = -1.0;
  EdgeKey best_key{};
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
  {
    const int a = cell[edges[e][0]];
    const int b = cell[edges[e][1]];
    const double len = (verts[a] - verts[b]).squaredNorm();
    const EdgeKey key = make_edge(a, b);
    if (best < 0)
    {
      best = e;
      best_len = len;
      best_key = key;
      continue;
    }
    const double tol = 1e-12 * std::max(len, best_len);
    if (len > best_len + tol || (std::abs(len - best_len) <= tol && key < best_key))
    {
      best = e;
      best_len = std::max(len, best_len);
      best_key = key;
    }
  }
  return best;
}

double max_pairwise_distance(const std::vector<Vec> &verts, std::span<const int> ids)
{
  double d = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
  {
    for (std::size_t j = i + 1; j < ids.size(); ++j)
    {
      d = std::max(d, (verts[ids[i]] - verts[ids[j]]).norm());
    }
  }
  return d;
}

// Outward unit normal and measure of the face of `cell` opposite local vertex `opp`.
std::pair<Vec, double> face_normal(int dim, const std::vector<Vec> &verts,
                                   std::span<const int> cell, int opp,
                                   std::array<int, 3> &face_verts)
{
  int k = 0;
  for (int i = 0; i <= dim; ++i)
  {
    if (i != opp)
    {
      face_verts[k++] = cell[i];
    }
  }
  const Vec &a = verts[face_verts[0]];
  const Vec &b = verts[face_verts[1]];
  Vec n(dim);
  double measure = 0.0;
  if (dim == 2)
  {
    const Vec t = b - a;
    n << t(1), -t(0);
    measure = t.norm();
  }
  else
  {
    const Vec &c = verts[face_verts[2]];
    const Eigen::Vector3d cr = Eigen::Vector3d(b - a).cross(Eigen::Vector3d(c - a));
    n = cr;
    measure = 0.5 * cr.norm();
  }
  if (measure <= 0.0)
  {
    throw std::runtime_error("degenerate face encountered");
  }
  n.normalize();
  if (n.dot(verts[cell[opp]] - a) > 0.0)
  {
    n = -n;
  }
  return {n, measure};
}

}  // namespace

SimplicialMesh::SimplicialMesh(int dim, std::vector<Vec> vertices, std::vector<int> cell_vertices)
  : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cell_vertices))
{
  if (dim_ != 2 && dim_ != 3)
  {
    throw std::invalid_argument("mesh dimension must be 2 or 3");
  }
  if (cells_.size() % static_cast<std::size_t>(dim_ + 1) != 0)
  {
    throw std::invalid_argument("cell connectivity length is not a multiple of dim+1");
  }
  for (const auto &v : vertices_)
  {
    if (v.size() != dim_)
    {
      throw std::invalid_argument("vertex coordinate length does not match mesh dimension");
    }
  }
  for (int id : cells_)
  {
    if (id < 0 || id >= num_vertices())
    {
      throw std::invalid_argument("cell references a vertex out of range");
    }
  }
  orient_and_tag();
}

void SimplicialMesh::orient_and_tag()
{
  const int nc = num_cells();
  refinement_edges_.assign(nc, 0);
  for (int c = 0; c < nc; ++c)
  {
    int *ids = cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1);
    const double vol = signed_volume(dim_, vertices_, cell(c));
    if (vol == 0.0)
    {
      throw std::invalid_argument("zero-volume cell " + std::to_string(c));
    }
    if (vol < 0.0)
    {
      std::swap(ids[dim_ - 1], ids[dim_]);
    }
    refinement_edges_[c] = longest_edge(dim_, vertices_, cell(c));
  }
}

std::span<const std::array<int, 2>> SimplicialMesh::local_edges(int dim)
{
  if (dim == 2)
  {
    return kEdges2d;
  }
  return kEdges3d;
}

double SimplicialMesh::cell_volume(int c) const { return signed_volume(dim_, vertices_, cell(c)); }

double SimplicialMesh::cell_diameter(int c) const
{
  return max_pairwise_distance(vertices_, cell(c));
}

double SimplicialMesh::cell_inball_diameter(int c) const
{
  double boundary = 0.0;
  std::array<int, 3> fv{};
  for (int i = 0; i <= dim_; ++i)
  {
    boundary += face_normal(dim_, vertices_, cell(c), i, fv).second;
  }
  // r = dim * |K| / |dK|
  return 2.0 * dim_ * cell_volume(c) / boundary;
}

double SimplicialMesh::total_volume() const
{
  double v = 0.0;
  for (int c = 0; c < num_cells(); ++c)
  {
    v += cell_volume(c);
  }
  return v;
}

double SimplicialMesh::mesh_size() const
{
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c)
  {
    h = std::max(h, cell_diameter(c));
  }
  return h;
}

SimplicialMesh unit_square_mesh(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("unit_square_mesh: n must be >= 1");
  }
  std::vector<Vec> verts;
  verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
  {
    for (int i = 0; i <= n; ++i)
    {
      verts.push_back(Vec{{static_cast<double>(i) / n, static_cast<double>(j) / n}});
    }
  }
  auto id = [n](int i, int j) { return i + (n + 1) * j; };
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(6) * n * n);
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      cells.insert(cells.end(), {id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.insert(cells.end(), {id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return {2, std::move(verts), std::move(cells)};
}

SimplicialMesh unit_cube_mesh(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("unit_cube_mesh: n must be >= 1");
  }
  const int np = n + 1;
  std::vector<Vec> verts;
  verts.reserve(static_cast<std::size_t>(np) * np * np);
  for (int k = 0; k <= n; ++k)
  {
    for (int j = 0; j <= n; ++j)
    {
      for (int i = 0; i <= n; ++i)
      {
        verts.push_back(Vec{{static_cast<double>(i) / n, static_cast<double>(j) / n,
                             static_cast<double>(k) / n}});
      }
    }
  }
  auto id = [np](std::array<int, 3> ijk) { return ijk[0] + np * (ijk[1] + np * ijk[2]); };
  constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(24) * n * n * n);
  for (int k = 0; k < n; ++k)
  {
    for (int j = 0; j < n; ++j)
    {
      for (int i = 0; i < n; ++i)
      {
        for (const auto &perm : perms)
        {
          std::array<int, 3> p{i, j, k};
          cells.push_back(id(p));
          for (int axis : perm)
          {
            ++p[axis];
            cells.push_back(id(p));
          }
        }
      }
    }
  }
  return {3, std::move(verts), std::move(cells)};
}

SimplicialMesh l_shaped_mesh(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("l_shaped_mesh: n must be >= 1");
  }
  const int m = 2 * n;
  // Squares (i, j) with i >= n and j < n form the excluded quadrant.
  auto excluded = [n](int i, int j) { return i >= n && j < n; };
  std::vector<int> index(static_cast<std::size_t>(m + 1) * (m + 1), -1);
  std::vector<Vec> verts;
  auto vid = [&](int i, int j) {
    int &slot = index[i + (m + 1) * j];
    if (slot < 0)
    {
      slot = static_cast<int>(verts.size());
      verts.push_back(Vec{{-1.0 + static_cast<double>(i) / n, -1.0 + static_cast<double>(j) / n}});
    }
    return slot;
  };
  std::vector<int> cells;
  for (int j = 0; j < m; ++j)
  {
    for (int i = 0; i < m; ++i)
    {
      if (excluded(i, j))
      {
        continue;
      }
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      cells.insert(cells.end(), {v00, v10, v11});
      cells.insert(cells.end(), {v00, v11, v01});
    }
  }
  return {2, std::move(verts), std::move(cells)};
}

FaceSet build_faces(const SimplicialMesh &mesh)
{
  const int dim = mesh.dim();
  struct Entry
  {
    std::array<int, 3> key;
    int cell;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(mesh.num_cells()) * (dim + 1));
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (int i = 0; i <= dim; ++i)
    {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int j = 0; j <= dim; ++j)
      {
        if (j != i)
        {
          key[k++] = cell[j];
        }
      }
      std::sort(key.begin(), key.begin() + dim);
      entries.push_back({key, c, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
    return std::tie(a.key, a.cell, a.local) < std::tie(b.key, b.cell, b.local);
  });

  FaceSet faces;
  const auto &verts = mesh.vertices();
  for (std::size_t s = 0; s < entries.size();)
  {
    std::size_t e = s + 1;
    while (e < entries.size() && entries[e].key == entries[s].key)
    {
      ++e;
    }
    const std::size_t mult = e - s;
    if (mult > 2)
    {
      throw std::runtime_error("non-manifold mesh: a face is shared by more than two cells");
    }
    const Entry &plus = entries[s];
    std::array<int, 3> fv{-1, -1, -1};
    auto [normal, measure] = face_normal(dim, verts, mesh.cell(plus.cell), plus.local, fv);
    const double diameter = max_pairwise_distance(verts, std::span<const int>(fv.data(), dim));
    if (mult == 1)
    {
      faces.boundary.push_back({plus.cell, plus.local, fv, normal, diameter, measure});
    }
    else
    {
      const Entry &minus = entries[s + 1];
      faces.interior.push_back(
          {plus.cell, minus.cell, plus.local, minus.local, fv, normal, diameter, measure});
    }
    s = e;
  }
  return faces;
}

SimplicialMesh uniform_refine(const SimplicialMesh &mesh)
{
  const int dim = mesh.dim();
  std::vector<Vec> verts = mesh.vertices();
  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    const EdgeKey key = make_edge(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end())
    {
      return it->second;
    }
    const int id = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<int> cells;
  cells.reserve(mesh.cell_vertex_data().size() * (dim == 2 ? 4 : 8));
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto v = mesh.cell(c);
    if (dim == 2)
    {
      const int m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m12 = mid(v[1], v[2]);
      cells.insert(cells.end(), {v[0], m01, m02, m01, v[1], m12, m02, m12, v[2], m01, m12, m02});
    }
    else
    {
      const int m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m03 = mid(v[0], v[3]);
      const int m12 = mid(v[1], v[2]), m13 = mid(v[1], v[3]), m23 = mid(v[2], v[3]);
      cells.insert(cells.end(), {v[0], m01, m02, m03, m01, v[1], m12, m13,
                                 m02, m12, v[2], m23, m03, m13, m23, v[3]});
      // octahedron split along the m02--m13 diagonal
      cells.insert(cells.end(), {m02, m13, m01, m03, m02, m13, m03, m23,
                                 m02, m13, m23, m12, m02, m13, m12, m01});
    }
  }
  return {dim, std::move(verts), std::move(cells)};
}

SimplicialMesh bisect(const SimplicialMesh &mesh, const std::set<int> &marked)
{
  const int dim = mesh.dim();
  const int nv = dim + 1;
  for (int c : marked)
  {
    if (c < 0 || c >= mesh.num_cells())
    {
      throw std::out_of_range("bisect: marked cell index out of range");
    }
  }
  if (marked.empty())
  {
    return mesh;
  }

  std::vector<Vec> verts = mesh.vertices();
  std::vector<int> cells = mesh.cell_vertex_data();
  std::map<EdgeKey, int> midpoint;
  const auto edges = SimplicialMesh::local_edges(dim);

  auto split = [&](int c) {
    int *ids = cells.data() + static_cast<std::size_t>(c) * nv;
    const int e = longest_edge(dim, verts, std::span<const int>(ids, nv));
    const int la = edges[e][0];
    const int lb = edges[e][1];
    const EdgeKey key = make_edge(ids[la], ids[lb]);
    int m = 0;
    if (auto it = midpoint.find(key); it != midpoint.end())
    {
      m = it->second;
    }
    else
    {
      m = static_cast<int>(verts.size());
      verts.push_back(0.5 * (verts[ids[la]] + verts[ids[lb]]));
      midpoint.emplace(key, m);
    }
    std::vector<int> child(ids, ids + nv);
    child[la] = m;
    ids[lb] = m;
    cells.insert(cells.end(), child.begin(), child.end());
  };

  for (int c : marked)
  {
    split(c);
  }

  // Closure: any cell still carrying a split edge is bisected at its own longest edge.
  const int max_passes = 10000;
  for (int pass = 0;; ++pass)
  {
    if (pass >= max_passes)
    {
      throw std::runtime_error("bisect: conforming closure did not terminate");
    }
    bool changed = false;
    const int nc = static_cast<int>(cells.size()) / nv;
    for (int c = 0; c < nc; ++c)
    {
      const int *ids = cells.data() + static_cast<std::size_t>(c) * nv;
      bool hanging = false;
      for (const auto &e : edges)
      {
        if (midpoint.count(make_edge(ids[e[0]], ids[e[1]])) != 0)
        {
          hanging = true;
          break;
        }
      }
      if (hanging)
      {
        split(c);
        changed = true;
      }
    }
    if (!changed)
    {
      break;
    }
  }
  return {dim, std::move(verts), std::move(cells)};
}

void write_mesh(std::ostream &os, const SimplicialMesh &mesh)
{
  os << mesh.dim() << ' ' << mesh.num_cells() << ' ' << mesh.num_vertices() << '\n';
  os << std::setprecision(17);
  for (const auto &v : mesh.vertices())
  {
    for (int i = 0; i < mesh.dim(); ++i)
    {
      os << (i ? " " : "") << v(i);
    }
    os << '\n';
  }
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (std::size_t i = 0; i < cell.size(); ++i)
    {
      os << (i ? " " : "") << cell[i];
    }
    os << '\n';
  }
}

void write_mesh(const std::string &path, const SimplicialMesh &mesh)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_mesh(os, mesh);
}

SimplicialMesh read_mesh(std::istream &is)
{
  int dim = 0, ncells = 0, nverts = 0;
  if (!(is >> dim >> ncells >> nverts) || ncells < 0 || nverts < 0)
  {
    throw std::runtime_error("read_mesh: malformed header");
  }
  if (dim != 2 && dim != 3)
  {
    throw std::runtime_error("read_mesh: dimension must be 2 or 3");
  }
  std::vector<Vec> verts(nverts, Vec::Zero(dim));
  for (auto &v : verts)
  {
    for (int i = 0; i < dim; ++i)
    {
      if (!(is >> v(i)))
      {
        throw std::runtime_error("read_mesh: truncated vertex block");
      }
    }
  }
  std::vector<int> cells(static_cast<std::size_t>(ncells) * (dim + 1));
  for (int &id : cells)
  {
    if (!(is >> id))
    {
      throw std::runtime_error("read_mesh: truncated cell block");
    }
  }
  return {dim, std::move(verts), std::move(cells)};
}

}  // namespace dlsfem
