// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_ASSEMBLY_HPP
#define DLSFEM_ASSEMBLY_HPP

#include <vector>

#include "dlsfem/femspace.hpp"
#include "dlsfem/mesh.hpp"
#include "dlsfem/problems.hpp"
#include "dlsfem/quadrature.hpp"
#include "dlsfem/sparse.hpp"

namespace dlsfem
{

//
// Reference basis values and gradients tabulated at the points of a rule on
// the reference cell. Shared by every affine cell of a mesh.
//
class ReferenceShapes
{
public:
  ReferenceShapes(const ScalarBasis &basis, const QuadratureRule &rule);

  const QuadratureRule &rule() const { return rule_; }
  const Vector &values(int q) const { return values_[q]; }
  const DenseMatrix &gradients(int q) const { return gradients_[q]; }

private:
  QuadratureRule rule_;
  std::vector<Vector> values_;
  std::vector<DenseMatrix> gradients_;
};

struct AssemblyOptions
{
  double mu = 1.0;
  int quad_degree = -1;  // -1: 2(m+1)
};

// Euler-Lagrange system of the discrete least-squares functional.
struct SparseSystem
{
  CsrMatrix matrix;
  Vector rhs;
  double k = 1.0;
  double mu = 1.0;

  int size() const { return matrix.rows; }
};

struct LocalSystem
{
  DenseMatrix matrix;
  Vector rhs;
};

// Volume terms (curl p - k u, curl q - k v) + (curl u - k p, curl v - k q) and
// the source part (curl q - k v, f/k) of the right-hand side.
LocalSystem local_cell_block(const DgSpace &space, int cell, const ManufacturedProblem &problem,
                             const ReferenceShapes &shapes);

// (mu/h_f) int [n x u].[n x v] + [n x p].[n x q] over one interior face. The
// returned matrix is (2B x 2B) ordered as (plus block, minus block).
DenseMatrix local_interior_face_block(const DgSpace &space, const InteriorFace &face, double mu,
                                      const QuadratureRule &face_rule);

// (mu/h_f) int (n x u).(n x v) and the datum part (mu/h_f) int (n x v).(n x u_exact).
LocalSystem local_boundary_face_block(const DgSpace &space, const BoundaryFace &face,
                                      const ManufacturedProblem &problem, double mu,
                                      const QuadratureRule &face_rule);

// Block sparsity: each cell couples with itself and its face neighbours.
CsrMatrix block_pattern(const DofMap &dofs, const FaceSet &faces);

// The wave number is the problem's k.
SparseSystem assemble(const DgSpace &space, const FaceSet &faces,
                      const ManufacturedProblem &problem, const AssemblyOptions &options = {});

struct DiscreteSolution
{
  FieldPair field;
  SolveStats stats;
  SparseSystem system;
};

DiscreteSolution solve_discrete(const DgSpace &space, const FaceSet &faces,
                                const ManufacturedProblem &problem,
                                const AssemblyOptions &options, const SolverSettings &solver);

}  // namespace dlsfem

#endif  // DLSFEM_ASSEMBLY_HPP
