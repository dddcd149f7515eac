// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_FEMSPACE_HPP
#define DLSFEM_FEMSPACE_HPP

#include <array>
#include <vector>

#include "dlsfem/mesh.hpp"
#include "dlsfem/types.hpp"

namespace dlsfem
{

//
// Orthonormal basis of P_m on the reference simplex, obtained by Cholesky-based
// Gram-Schmidt on the monomials x^a y^b z^c with a+b+c <= m.
//
class ScalarBasis
{
public:
  ScalarBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }

  // values: size(); gradients: size() x dim, with respect to reference coordinates.
  void evaluate(const Vec &ref_point, Vector &values, DenseMatrix &gradients) const;

private:
  int dim_;
  int degree_;
  std::vector<std::array<int, 3>> exponents_;
  DenseMatrix coeffs_;  // basis_i = sum_j coeffs_(i, j) * monomial_j
};

struct BasisEvaluation
{
  Vector values;
  DenseMatrix gradients;
};

BasisEvaluation eval_scalar_basis(int dim, int degree, const Vec &ref_point);

//
// Element-local layout of (u_h, p_h): cell-major, then component (u before p),
// then basis index. No dof is shared between cells.
//
struct DofMap
{
  DofMap() = default;
  DofMap(int dim, int degree, int num_cells);

  int dim = 2;
  int degree = 1;
  int n_basis = 0;
  int u_components = 2;
  int p_components = 1;
  int num_cells = 0;

  int components() const { return u_components + p_components; }
  int block_size() const { return components() * n_basis; }
  int cell_offset(int cell) const { return cell * block_size(); }
  int u_index(int cell, int comp, int basis) const
  {
    return cell_offset(cell) + comp * n_basis + basis;
  }
  int p_index(int cell, int comp, int basis) const
  {
    return cell_offset(cell) + (u_components + comp) * n_basis + basis;
  }
  int total_dofs() const { return num_cells * block_size(); }
};

struct FieldPair
{
  FieldPair() = default;
  explicit FieldPair(const DofMap &map) : dofs(map), coeffs(Vector::Zero(map.total_dofs())) {}
  FieldPair(const DofMap &map, Vector values);

  auto cell_block(int cell) const { return coeffs.segment(dofs.cell_offset(cell), dofs.block_size()); }
  auto cell_block(int cell) { return coeffs.segment(dofs.cell_offset(cell), dofs.block_size()); }
  auto u_block(int cell, int comp) const
  {
    return coeffs.segment(dofs.u_index(cell, comp, 0), dofs.n_basis);
  }
  auto p_block(int cell, int comp) const
  {
    return coeffs.segment(dofs.p_index(cell, comp, 0), dofs.n_basis);
  }

  DofMap dofs;
  Vector coeffs;
};

// Affine map x = origin + jacobian * xi from the reference simplex.
struct CellGeometry
{
  Vec origin;
  SmallMat jacobian;
  SmallMat inverse;
  double abs_det = 0.0;
};

//
// Pointwise linear maps from a cell's local coefficient block to u, p, curl u,
// curl p. Rows are field components, columns are local dofs.
//
struct LocalOperators
{
  DenseMatrix u;       // dim x block
  DenseMatrix p;       // (2dim-3) x block
  DenseMatrix curl_u;  // (2dim-3) x block
  DenseMatrix curl_p;  // dim x block
};

void build_local_operators(const DofMap &dofs, const Vector &values,
                           const DenseMatrix &physical_gradients, LocalOperators &ops);

//
// Discontinuous space V_h^m x Sigma_h^m on a mesh. Holds a reference to the mesh,
// which must outlive it.
//
class DgSpace
{
public:
  DgSpace(const SimplicialMesh &mesh, int degree);

  const SimplicialMesh &mesh() const { return *mesh_; }
  const DofMap &dofs() const { return dofs_; }
  const ScalarBasis &basis() const { return basis_; }
  const CellGeometry &geometry(int cell) const { return geometry_[cell]; }
  int dim() const { return dofs_.dim; }
  int degree() const { return dofs_.degree; }

  Vec to_reference(int cell, const Vec &x) const;

  // Shape values and physical gradients at a physical point of `cell`.
  void shape(int cell, const Vec &x, Vector &values, DenseMatrix &gradients) const;

  // Operators at a physical point of `cell`.
  void operators(int cell, const Vec &x, LocalOperators &ops) const;

private:
  const SimplicialMesh *mesh_;
  DofMap dofs_;
  ScalarBasis basis_;
  std::vector<CellGeometry> geometry_;
};

Vec eval_u(const DgSpace &space, const FieldPair &field, int cell, const Vec &x);
Vec eval_p(const DgSpace &space, const FieldPair &field, int cell, const Vec &x);
Vec eval_curl_u(const DgSpace &space, const FieldPair &field, int cell, const Vec &x);
Vec eval_curl_p(const DgSpace &space, const FieldPair &field, int cell, const Vec &x);

// n x v. In 2D a vector argument gives the scalar n1 v2 - n2 v1 and a scalar
// argument q gives (q n2, -q n1); in 3D it is the cross product.
Vec tangential_trace(int dim, const Vec &normal, const Vec &v);

// Matrix T with T * v == tangential_trace(dim, normal, v) for v of length `input_components`.
SmallMat tangential_trace_matrix(int dim, const Vec &normal, int input_components);

}  // namespace dlsfem

#endif  // DLSFEM_FEMSPACE_HPP
