// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/femspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace dlsfem
{

namespace
{

double factorial(int n)
{
  double f = 1.0;
  for (int i = 2; i <= n; ++i)
  {
    f *= i;
  }
  return f;
}

// Exact integral of x^a y^b z^c over the reference simplex.
double monomial_integral(int dim, const std::array<int, 3> &e)
{
  int total = 0;
  double num = 1.0;
  for (int i = 0; i < dim; ++i)
  {
    num *= factorial(e[i]);
    total += e[i];
  }
  return num / factorial(total + dim);
}

double ipow(double x, int p)
{
  double r = 1.0;
  for (int i = 0; i < p; ++i)
  {
    r *= x;
  }
  return r;
}

void add_curl_3d(DenseMatrix &op, int first_component, int n, const DenseMatrix &grad)
{
  // curl v = (dy v3 - dz v2, dz v1 - dx v3, dx v2 - dy v1)
  const int c0 = first_component * n, c1 = c0 + n, c2 = c1 + n;
  for (int a = 0; a < n; ++a)
  {
    const double dx = grad(a, 0), dy = grad(a, 1), dz = grad(a, 2);
    op(0, c2 + a) = dy;
    op(0, c1 + a) = -dz;
    op(1, c0 + a) = dz;
    op(1, c2 + a) = -dx;
    op(2, c1 + a) = dx;
    op(2, c0 + a) = -dy;
  }
}

}  // namespace

ScalarBasis::ScalarBasis(int dim, int degree) : dim_(dim), degree_(degree)
{
  if (dim < 1 || dim > 3)
  {
    throw std::invalid_argument("ScalarBasis: dim must be 1, 2 or 3");
  }
  if (degree < 0)
  {
    throw std::invalid_argument("ScalarBasis: negative degree");
  }
  for (int total = 0; total <= degree; ++total)
  {
    if (dim == 1)
    {
      exponents_.push_back({total, 0, 0});
      continue;
    }
    for (int c = 0; c <= (dim == 3 ? total : 0); ++c)
    {
      for (int b = 0; b <= total - c; ++b)
      {
        exponents_.push_back({total - b - c, b, c});
      }
    }
  }
  const int n = size();
  DenseMatrix gram(n, n);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      std::array<int, 3> e{};
      for (int d = 0; d < 3; ++d)
      {
        e[d] = exponents_[i][d] + exponents_[j][d];
      }
      gram(i, j) = monomial_integral(dim, e);
    }
  }
  Eigen::LLT<DenseMatrix> llt(gram);
  if (llt.info() != Eigen::Success)
  {
    throw std::runtime_error("ScalarBasis: monomial Gram matrix is not positive definite");
  }
  // basis = L^{-1} monomials  =>  Gram of the basis is the identity
  const DenseMatrix lower = llt.matrixL();
  coeffs_ = lower.triangularView<Eigen::Lower>().solve(DenseMatrix::Identity(n, n));
}

void ScalarBasis::evaluate(const Vec &xi, Vector &values, DenseMatrix &gradients) const
{
  const int n = size();
  Vector mono(n);
  DenseMatrix dmono = DenseMatrix::Zero(n, dim_);
  for (int j = 0; j < n; ++j)
  {
    const auto &e = exponents_[j];
    double v = 1.0;
    for (int d = 0; d < dim_; ++d)
    {
      v *= ipow(xi(d), e[d]);
    }
    mono(j) = v;
    for (int d = 0; d < dim_; ++d)
    {
      if (e[d] == 0)
      {
        continue;
      }
      double g = e[d] * ipow(xi(d), e[d] - 1);
      for (int o = 0; o < dim_; ++o)
      {
        if (o != d)
        {
          g *= ipow(xi(o), e[o]);
        }
      }
      dmono(j, d) = g;
    }
  }
  values.noalias() = coeffs_ * mono;
  gradients.noalias() = coeffs_ * dmono;
}

BasisEvaluation eval_scalar_basis(int dim, int degree, const Vec &ref_point)
{
  const ScalarBasis basis(dim, degree);
  BasisEvaluation out;
  basis.evaluate(ref_point, out.values, out.gradients);
  return out;
}

DofMap::DofMap(int dim_, int degree_, int num_cells_)
  : dim(dim_), degree(degree_), u_components(dim_), p_components(curl_components(dim_)),
    num_cells(num_cells_)
{
  if (dim != 2 && dim != 3)
  {
    throw std::invalid_argument("DofMap: dim must be 2 or 3");
  }
  if (degree < 0)
  {
    throw std::invalid_argument("DofMap: negative degree");
  }
  // C(m + dim, dim)
  long nb = 1;
  for (int i = 1; i <= dim; ++i)
  {
    nb = nb * (degree + i) / i;
  }
  n_basis = static_cast<int>(nb);
}

FieldPair::FieldPair(const DofMap &map, Vector values) : dofs(map), coeffs(std::move(values))
{
  if (coeffs.size() != map.total_dofs())
  {
    throw std::invalid_argument("FieldPair: coefficient vector length does not match the dof map");
  }
}

void build_local_operators(const DofMap &dofs, const Vector &phi, const DenseMatrix &grad,
                           LocalOperators &ops)
{
  const int dim = dofs.dim;
  const int c = dofs.p_components;
  const int n = dofs.n_basis;
  const int block = dofs.block_size();
  ops.u.setZero(dim, block);
  ops.p.setZero(c, block);
  ops.curl_u.setZero(c, block);
  ops.curl_p.setZero(dim, block);
  for (int i = 0; i < dim; ++i)
  {
    ops.u.block(i, i * n, 1, n) = phi.transpose();
  }
  for (int j = 0; j < c; ++j)
  {
    ops.p.block(j, (dim + j) * n, 1, n) = phi.transpose();
  }
  if (dim == 2)
  {
    // curl u = dx u2 - dy u1;  curl q = (dy q, -dx q)
    for (int a = 0; a < n; ++a)
    {
      ops.curl_u(0, a) = -grad(a, 1);
      ops.curl_u(0, n + a) = grad(a, 0);
      ops.curl_p(0, 2 * n + a) = grad(a, 1);
      ops.curl_p(1, 2 * n + a) = -grad(a, 0);
    }
  }
  else
  {
    add_curl_3d(ops.curl_u, 0, n, grad);
    add_curl_3d(ops.curl_p, 3, n, grad);
  }
}

DgSpace::DgSpace(const SimplicialMesh &mesh, int degree)
  : mesh_(&mesh), dofs_(mesh.dim(), degree, mesh.num_cells()), basis_(mesh.dim(), degree)
{
  const int dim = mesh.dim();
  geometry_.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto ids = mesh.cell(c);
    CellGeometry &g = geometry_[c];
    g.origin = mesh.vertex(ids[0]);
    g.jacobian.resize(dim, dim);
    for (int i = 0; i < dim; ++i)
    {
      g.jacobian.col(i) = mesh.vertex(ids[i + 1]) - g.origin;
    }
    const double det = g.jacobian.determinant();
    if (det == 0.0)
    {
      throw std::runtime_error("DgSpace: degenerate cell " + std::to_string(c));
    }
    g.abs_det = std::abs(det);
    g.inverse = g.jacobian.inverse();
  }
}

Vec DgSpace::to_reference(int cell, const Vec &x) const
{
  const CellGeometry &g = geometry_[cell];
  return g.inverse * (x - g.origin);
}

void DgSpace::shape(int cell, const Vec &x, Vector &values, DenseMatrix &gradients) const
{
  DenseMatrix ref_grad;
  basis_.evaluate(to_reference(cell, x), values, ref_grad);
  gradients.noalias() = ref_grad * geometry_[cell].inverse;
}

void DgSpace::operators(int cell, const Vec &x, LocalOperators &ops) const
{
  Vector values;
  DenseMatrix grads;
  shape(cell, x, values, grads);
  build_local_operators(dofs_, values, grads, ops);
}

namespace
{

enum class Quantity
{
  u,
  p,
  curl_u,
  curl_p
};

Vec evaluate(const DgSpace &space, const FieldPair &field, int cell, const Vec &x, Quantity q)
{
  LocalOperators ops;
  space.operators(cell, x, ops);
  const auto block = field.cell_block(cell);
  switch (q)
  {
    case Quantity::u:
      return ops.u * block;
    case Quantity::p:
      return ops.p * block;
    case Quantity::curl_u:
      return ops.curl_u * block;
    case Quantity::curl_p:
      return ops.curl_p * block;
  }
  return {};
}

}  // namespace

Vec eval_u(const DgSpace &space, const FieldPair &field, int cell, const Vec &x)
{
  return evaluate(space, field, cell, x, Quantity::u);
}

Vec eval_p(const DgSpace &space, const FieldPair &field, int cell, const Vec &x)
{
  return evaluate(space, field, cell, x, Quantity::p);
}

Vec eval_curl_u(const DgSpace &space, const FieldPair &field, int cell, const Vec &x)
{
  return evaluate(space, field, cell, x, Quantity::curl_u);
}

Vec eval_curl_p(const DgSpace &space, const FieldPair &field, int cell, const Vec &x)
{
  return evaluate(space, field, cell, x, Quantity::curl_p);
}

SmallMat tangential_trace_matrix(int dim, const Vec &n, int input_components)
{
  if (dim == 3)
  {
    SmallMat t(3, 3);
    t << 0.0, -n(2), n(1), n(2), 0.0, -n(0), -n(1), n(0), 0.0;
    return t;
  }
  if (input_components == 2)
  {
    SmallMat t(1, 2);
    t << -n(1), n(0);
    return t;
  }
  SmallMat t(2, 1);
  t << n(1), -n(0);
  return t;
}

Vec tangential_trace(int dim, const Vec &normal, const Vec &v)
{
  return tangential_trace_matrix(dim, normal, static_cast<int>(v.size())) * v;
}

}  // namespace dlsfem
