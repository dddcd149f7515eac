// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/assembly.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace dlsfem
{

ReferenceShapes::ReferenceShapes(const ScalarBasis &basis, const QuadratureRule &rule)
  : rule_(rule), values_(rule.size()), gradients_(rule.size())
{
  if (rule.dim != basis.dim())
  {
    throw std::invalid_argument("ReferenceShapes: rule and basis dimensions differ");
  }
  for (int q = 0; q < rule.size(); ++q)
  {
    basis.evaluate(rule.points[q], values_[q], gradients_[q]);
  }
}

LocalSystem local_cell_block(const DgSpace &space, int cell, const ManufacturedProblem &problem,
                             const ReferenceShapes &shapes)
{
  const DofMap &dofs = space.dofs();
  const CellGeometry &geo = space.geometry(cell);
  const int block = dofs.block_size();
  const double k = problem.k;
  LocalSystem out{DenseMatrix::Zero(block, block), Vector::Zero(block)};

  LocalOperators ops;
  DenseMatrix grads;
  DenseMatrix r1, r2;
  const QuadratureRule &rule = shapes.rule();
  for (int q = 0; q < rule.size(); ++q)
  {
    grads.noalias() = shapes.gradients(q) * geo.inverse;
    build_local_operators(dofs, shapes.values(q), grads, ops);
    const Vec x = geo.origin + geo.jacobian * rule.points[q];
    const double w = rule.weights[q] * geo.abs_det;
    r1 = ops.curl_p - k * ops.u;
    r2 = ops.curl_u - k * ops.p;
    out.matrix.noalias() += w * (r1.transpose() * r1);
    out.matrix.noalias() += w * (r2.transpose() * r2);
    out.rhs.noalias() += w * (r1.transpose() * problem.scaled_source(x));
  }
  return out;
}

DenseMatrix local_interior_face_block(const DgSpace &space, const InteriorFace &face, double mu,
                                      const QuadratureRule &face_rule)
{
  const DofMap &dofs = space.dofs();
  const int dim = dofs.dim;
  const int block = dofs.block_size();
  const auto quad = map_rule_to_face(face_rule, space.mesh(),
                                     std::span<const int>(face.vertices.data(), dim));
  const SmallMat tu = tangential_trace_matrix(dim, face.normal, dofs.u_components);
  const SmallMat tp = tangential_trace_matrix(dim, face.normal, dofs.p_components);
  const double scale = mu / face.diameter;

  DenseMatrix out = DenseMatrix::Zero(2 * block, 2 * block);
  LocalOperators plus, minus;
  DenseMatrix ju(tu.rows(), 2 * block), jp(tp.rows(), 2 * block);
  for (std::size_t q = 0; q < quad.points.size(); ++q)
  {
    space.operators(face.cell_plus, quad.points[q], plus);
    space.operators(face.cell_minus, quad.points[q], minus);
    // [n x v] = n+ x (v+ - v-)
    ju.leftCols(block).noalias() = tu * plus.u;
    ju.rightCols(block).noalias() = -tu * minus.u;
    jp.leftCols(block).noalias() = tp * plus.p;
    jp.rightCols(block).noalias() = -tp * minus.p;
    const double w = scale * quad.weights[q];
    out.noalias() += w * (ju.transpose() * ju);
    out.noalias() += w * (jp.transpose() * jp);
  }
  return out;
}

LocalSystem local_boundary_face_block(const DgSpace &space, const BoundaryFace &face,
                                      const ManufacturedProblem &problem, double mu,
                                      const QuadratureRule &face_rule)
{
  const DofMap &dofs = space.dofs();
  const int dim = dofs.dim;
  const int block = dofs.block_size();
  const auto quad = map_rule_to_face(face_rule, space.mesh(),
                                     std::span<const int>(face.vertices.data(), dim));
  const SmallMat tu = tangential_trace_matrix(dim, face.normal, dofs.u_components);
  const double scale = mu / face.diameter;

  LocalSystem out{DenseMatrix::Zero(block, block), Vector::Zero(block)};
  LocalOperators ops;
  DenseMatrix bu;
  for (std::size_t q = 0; q < quad.points.size(); ++q)
  {
    space.operators(face.cell, quad.points[q], ops);
    bu.noalias() = tu * ops.u;
    const double w = scale * quad.weights[q];
    out.matrix.noalias() += w * (bu.transpose() * bu);
    out.rhs.noalias() += w * (bu.transpose() * problem.boundary_trace(quad.points[q], face.normal));
  }
  return out;
}

namespace
{

std::vector<std::vector<int>> cell_neighbours(int num_cells, const FaceSet &faces)
{
  std::vector<std::vector<int>> nb(num_cells);
  for (int c = 0; c < num_cells; ++c)
  {
    nb[c].push_back(c);
  }
  for (const auto &f : faces.interior)
  {
    nb[f.cell_plus].push_back(f.cell_minus);
    nb[f.cell_minus].push_back(f.cell_plus);
  }
  for (auto &list : nb)
  {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return nb;
}

class BlockAccumulator
{
public:
  BlockAccumulator(CsrMatrix &matrix, const DofMap &dofs, std::vector<std::vector<int>> neighbours)
    : matrix_(matrix), block_(dofs.block_size()), neighbours_(std::move(neighbours))
  {
  }

  template <typename Derived>
  void add(int row_cell, int col_cell, const Eigen::MatrixBase<Derived> &values)
  {
    const auto &list = neighbours_[row_cell];
    const auto it = std::lower_bound(list.begin(), list.end(), col_cell);
    if (it == list.end() || *it != col_cell)
    {
      throw std::logic_error("block outside of the assembled sparsity pattern");
    }
    const int pos = static_cast<int>(it - list.begin());
    for (int i = 0; i < block_; ++i)
    {
      double *dst = matrix_.values.data() + matrix_.row_offsets[row_cell * block_ + i] + pos * block_;
      for (int j = 0; j < block_; ++j)
      {
        dst[j] += values(i, j);
      }
    }
  }

private:
  CsrMatrix &matrix_;
  int block_;
  std::vector<std::vector<int>> neighbours_;
};

}  // namespace

CsrMatrix block_pattern(const DofMap &dofs, const FaceSet &faces)
{
  const auto nb = cell_neighbours(dofs.num_cells, faces);
  const int block = dofs.block_size();
  CsrMatrix a;
  a.rows = dofs.total_dofs();
  a.row_offsets.assign(1, 0);
  a.row_offsets.reserve(a.rows + 1);
  std::size_t nnz = 0;
  for (const auto &list : nb)
  {
    nnz += list.size() * static_cast<std::size_t>(block) * block;
  }
  a.col_indices.reserve(nnz);
  for (int c = 0; c < dofs.num_cells; ++c)
  {
    for (int i = 0; i < block; ++i)
    {
      for (int other : nb[c])
      {
        for (int j = 0; j < block; ++j)
        {
          a.col_indices.push_back(other * block + j);
        }
      }
      a.row_offsets.push_back(static_cast<int>(a.col_indices.size()));
    }
  }
  a.values.assign(a.col_indices.size(), 0.0);
  return a;
}

SparseSystem assemble(const DgSpace &space, const FaceSet &faces,
                      const ManufacturedProblem &problem, const AssemblyOptions &options)
{
  const DofMap &dofs = space.dofs();
  const int dim = dofs.dim;
  if (problem.dim != dim || space.mesh().num_cells() != dofs.num_cells)
  {
    throw std::invalid_argument("assemble: problem, mesh and dof map dimensions are inconsistent");
  }
  if (!(problem.k > 0.0) || !(options.mu > 0.0))
  {
    throw std::invalid_argument("assemble: k and mu must be positive");
  }
  const int min_degree = 2 * (dofs.degree + 1);
  const int degree = options.quad_degree < 0 ? min_degree : options.quad_degree;
  if (degree < min_degree)
  {
    throw std::invalid_argument("assemble: quadrature degree must be at least 2(m+1)");
  }

  SparseSystem sys;
  sys.k = problem.k;
  sys.mu = options.mu;
  sys.matrix = block_pattern(dofs, faces);
  sys.rhs = Vector::Zero(dofs.total_dofs());
  BlockAccumulator acc(sys.matrix, dofs, cell_neighbours(dofs.num_cells, faces));
  const int block = dofs.block_size();

  const ReferenceShapes shapes(space.basis(), simplex_rule(dim, degree));
  for (int c = 0; c < dofs.num_cells; ++c)
  {
    const LocalSystem local = local_cell_block(space, c, problem, shapes);
    acc.add(c, c, local.matrix);
    sys.rhs.segment(dofs.cell_offset(c), block) += local.rhs;
  }

  const QuadratureRule face_rule = simplex_rule(dim - 1, degree);
  for (const auto &f : faces.interior)
  {
    const DenseMatrix local = local_interior_face_block(space, f, options.mu, face_rule);
    acc.add(f.cell_plus, f.cell_plus, local.topLeftCorner(block, block));
    acc.add(f.cell_plus, f.cell_minus, local.topRightCorner(block, block));
    acc.add(f.cell_minus, f.cell_plus, local.bottomLeftCorner(block, block));
    acc.add(f.cell_minus, f.cell_minus, local.bottomRightCorner(block, block));
  }
  for (const auto &f : faces.boundary)
  {
    const LocalSystem local = local_boundary_face_block(space, f, problem, options.mu, face_rule);
    acc.add(f.cell, f.cell, local.matrix);
    sys.rhs.segment(dofs.cell_offset(f.cell), block) += local.rhs;
  }
  return sys;
}

DiscreteSolution solve_discrete(const DgSpace &space, const FaceSet &faces,
                                const ManufacturedProblem &problem,
                                const AssemblyOptions &options, const SolverSettings &solver)
{
  DiscreteSolution out;
  out.system = assemble(space, faces, problem, options);
  SolverSettings settings = solver;
  settings.block_size = space.dofs().block_size();
  SolveResult res = solve(out.system.matrix, out.system.rhs, settings);
  out.field = FieldPair(space.dofs(), std::move(res.x));
  out.stats = res.stats;
  return out;
}

}  // namespace dlsfem
