// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace dlsfem
{

namespace
{

// Legendre polynomial P_n and its derivative at x in (-1,1).
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k)
  {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double pn = (n == 0) ? 1.0 : p1;
  const double pnm1 = (n <= 1) ? 1.0 : p0;
  const double dpn = (n == 0) ? 0.0 : n * (x * pn - pnm1) / (x * x - 1.0);
  return {pn, dpn};
}

}  // namespace

void gauss_legendre(int npoints, std::vector<double> &points, std::vector<double> &weights)
{
  if (npoints < 1)
  {
    throw std::invalid_argument("gauss_legendre: need at least one point");
  }
  const int n = npoints;
  points.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it)
    {
      const auto [pn, dpn] = legendre(n, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    const double dpn = legendre(n, x).second;
    const double w = 1.0 / ((1.0 - x * x) * dpn * dpn);  // half of the [-1,1] weight
    points[i] = 0.5 * (1.0 - x);
    points[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double reference_measure(int dim)
{
  switch (dim)
  {
    case 1:
      return 1.0;
    case 2:
      return 0.5;
    case 3:
      return 1.0 / 6.0;
    default:
      throw std::invalid_argument("reference_measure: dim must be 1, 2 or 3");
  }
}

QuadratureRule simplex_rule(int dim, int degree)
{
  if (dim < 1 || dim > 3)
  {
    throw std::invalid_argument("simplex_rule: dim must be 1, 2 or 3");
  }
  if (degree < 0 || degree > kMaxQuadratureDegree)
  {
    throw std::invalid_argument("simplex_rule: unsupported degree " + std::to_string(degree));
  }
  // The collapse Jacobian adds up to dim-1 degrees in the collapsed directions.
  const int npts = (degree + dim - 1) / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(npts, x, w);

  QuadratureRule rule;
  rule.dim = dim;
  rule.exact_degree = degree;
  if (dim == 1)
  {
    for (int i = 0; i < npts; ++i)
    {
      rule.points.push_back(Vec::Constant(1, x[i]));
      rule.weights.push_back(w[i]);
    }
  }
  else if (dim == 2)
  {
    for (int j = 0; j < npts; ++j)
    {
      for (int i = 0; i < npts; ++i)
      {
        const double a = x[i], b = x[j];
        rule.points.push_back(Vec{{a * (1.0 - b), b}});
        rule.weights.push_back(w[i] * w[j] * (1.0 - b));
      }
    }
  }
  else
  {
    for (int k = 0; k < npts; ++k)
    {
      for (int j = 0; j < npts; ++j)
      {
        for (int i = 0; i < npts; ++i)
        {
          const double a = x[i], b = x[j], c = x[k];
          rule.points.push_back(Vec{{a * (1.0 - b) * (1.0 - c), b * (1.0 - c), c}});
          rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - b) * (1.0 - c) * (1.0 - c));
        }
      }
    }
  }
  return rule;
}

MappedQuadrature map_rule_to_cell(const QuadratureRule &rule, const SimplicialMesh &mesh, int cell)
{
  if (cell < 0 || cell >= mesh.num_cells())
  {
    throw std::out_of_range("map_rule_to_cell: cell index out of range");
  }
  const int dim = mesh.dim();
  if (rule.dim != dim)
  {
    throw std::invalid_argument("map_rule_to_cell: rule dimension does not match mesh");
  }
  const auto ids = mesh.cell(cell);
  SmallMat jac(dim, dim);
  for (int i = 0; i < dim; ++i)
  {
    jac.col(i) = mesh.vertex(ids[i + 1]) - mesh.vertex(ids[0]);
  }
  const double det = std::abs(jac.determinant());
  if (det <= 0.0)
  {
    throw std::runtime_error("map_rule_to_cell: degenerate cell");
  }
  MappedQuadrature out;
  out.points.reserve(rule.points.size());
  out.weights.reserve(rule.weights.size());
  for (int q = 0; q < rule.size(); ++q)
  {
    out.points.push_back(mesh.vertex(ids[0]) + jac * rule.points[q]);
    out.weights.push_back(rule.weights[q] * det);
  }
  return out;
}

MappedQuadrature map_rule_to_face(const QuadratureRule &rule, const SimplicialMesh &mesh,
                                  std::span<const int> face_vertices)
{
  const int dim = mesh.dim();
  if (rule.dim != dim - 1 || static_cast<int>(face_vertices.size()) < dim)
  {
    throw std::invalid_argument("map_rule_to_face: rule/face dimension mismatch");
  }
  const Vec &v0 = mesh.vertex(face_vertices[0]);
  SmallMat tangents(dim, dim - 1);
  for (int i = 0; i < dim - 1; ++i)
  {
    tangents.col(i) = mesh.vertex(face_vertices[i + 1]) - v0;
  }
  double measure = 0.0;
  if (dim == 2)
  {
    measure = tangents.col(0).norm();
  }
  else
  {
    measure = 0.5 * Eigen::Vector3d(tangents.col(0)).cross(Eigen::Vector3d(tangents.col(1))).norm();
  }
  if (measure <= 0.0)
  {
    throw std::runtime_error("map_rule_to_face: degenerate face");
  }
  const double scale = measure / reference_measure(dim - 1);
  MappedQuadrature out;
  out.points.reserve(rule.points.size());
  out.weights.reserve(rule.weights.size());
  for (int q = 0; q < rule.size(); ++q)
  {
    out.points.push_back(v0 + tangents * rule.points[q]);
    out.weights.push_back(rule.weights[q] * scale);
  }
  return out;
}

}  // namespace dlsfem
