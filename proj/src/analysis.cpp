// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dlsfem/assembly.hpp"
#include "dlsfem/quadrature.hpp"

namespace dlsfem
{

namespace
{

int resolve_degree(const DgSpace &space, int quad_degree)
{
  const int degree = quad_degree < 0 ? error_quadrature_degree(space.degree()) : quad_degree;
  return std::min(degree, kMaxQuadratureDegree);
}

// int_K |curl p_h - k u_h - f/k|^2 + |curl u_h - k p_h|^2
double cell_residual(const DgSpace &space, int cell, const FieldPair &field,
                     const ManufacturedProblem &problem, const ReferenceShapes &shapes)
{
  const CellGeometry &geo = space.geometry(cell);
  const auto coeffs = field.cell_block(cell);
  const QuadratureRule &rule = shapes.rule();
  const double k = problem.k;
  LocalOperators ops;
  DenseMatrix grads;
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q)
  {
    grads.noalias() = shapes.gradients(q) * geo.inverse;
    build_local_operators(space.dofs(), shapes.values(q), grads, ops);
    const Vec x = geo.origin + geo.jacobian * rule.points[q];
    const Vec r1 = ops.curl_p * coeffs - k * (ops.u * coeffs) - problem.scaled_source(x);
    const Vec r2 = ops.curl_u * coeffs - k * (ops.p * coeffs);
    sum += rule.weights[q] * geo.abs_det * (r1.squaredNorm() + r2.squaredNorm());
  }
  return sum;
}

struct JumpIntegrals
{
  double u = 0.0;
  double p = 0.0;
};

// int_f |[n x u_h]|^2 and int_f |[n x p_h]|^2
JumpIntegrals interior_jumps(const DgSpace &space, const InteriorFace &face,
                             const FieldPair &field, const QuadratureRule &rule)
{
  const int dim = space.dim();
  const auto quad = map_rule_to_face(rule, space.mesh(),
                                     std::span<const int>(face.vertices.data(), dim));
  const auto plus = field.cell_block(face.cell_plus);
  const auto minus = field.cell_block(face.cell_minus);
  LocalOperators op_plus, op_minus;
  JumpIntegrals out;
  for (std::size_t q = 0; q < quad.points.size(); ++q)
  {
    space.operators(face.cell_plus, quad.points[q], op_plus);
    space.operators(face.cell_minus, quad.points[q], op_minus);
    const Vec du = op_plus.u * plus - op_minus.u * minus;
    const Vec dp = op_plus.p * plus - op_minus.p * minus;
    out.u += quad.weights[q] * tangential_trace(dim, face.normal, du).squaredNorm();
    out.p += quad.weights[q] * tangential_trace(dim, face.normal, dp).squaredNorm();
  }
  return out;
}

// int_f |n x u_h - n x u|^2
double boundary_mismatch(const DgSpace &space, const BoundaryFace &face, const FieldPair &field,
                         const ManufacturedProblem &problem, const QuadratureRule &rule)
{
  const int dim = space.dim();
  const auto quad = map_rule_to_face(rule, space.mesh(),
                                     std::span<const int>(face.vertices.data(), dim));
  const auto coeffs = field.cell_block(face.cell);
  LocalOperators ops;
  double sum = 0.0;
  for (std::size_t q = 0; q < quad.points.size(); ++q)
  {
    space.operators(face.cell, quad.points[q], ops);
    const Vec trace = tangential_trace(dim, face.normal, Vec(ops.u * coeffs));
    sum += quad.weights[q] * (trace - problem.boundary_trace(quad.points[q], face.normal)).squaredNorm();
  }
  return sum;
}

void check_field(const DgSpace &space, const FieldPair &field, const ManufacturedProblem &problem)
{
  if (field.coeffs.size() != space.dofs().total_dofs() || problem.dim != space.dim())
  {
    throw std::invalid_argument("field, space and problem are inconsistent");
  }
}

}  // namespace

int error_quadrature_degree(int degree) { return 2 * degree + 4; }

double functional_value(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                        const ManufacturedProblem &problem, double mu, int quad_degree)
{
  check_field(space, field, problem);
  const int degree = resolve_degree(space, quad_degree);
  const ReferenceShapes shapes(space.basis(), simplex_rule(space.dim(), degree));
  const QuadratureRule face_rule = simplex_rule(space.dim() - 1, degree);
  double j = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c)
  {
    j += cell_residual(space, c, field, problem, shapes);
  }
  for (const auto &f : faces.interior)
  {
    const JumpIntegrals jumps = interior_jumps(space, f, field, face_rule);
    j += mu / f.diameter * (jumps.u + jumps.p);
  }
  for (const auto &f : faces.boundary)
  {
    j += mu / f.diameter * boundary_mismatch(space, f, field, problem, face_rule);
  }
  return j;
}

double energy_error(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                    const ManufacturedProblem &problem, int quad_degree)
{
  check_field(space, field, problem);
  const int degree = resolve_degree(space, quad_degree);
  const ReferenceShapes shapes(space.basis(), simplex_rule(space.dim(), degree));
  const QuadratureRule &rule = shapes.rule();
  LocalOperators ops;
  DenseMatrix grads;
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c)
  {
    const CellGeometry &geo = space.geometry(c);
    const auto coeffs = field.cell_block(c);
    for (int q = 0; q < rule.size(); ++q)
    {
      grads.noalias() = shapes.gradients(q) * geo.inverse;
      build_local_operators(space.dofs(), shapes.values(q), grads, ops);
      const Vec x = geo.origin + geo.jacobian * rule.points[q];
      const double e = (problem.u(x) - ops.u * coeffs).squaredNorm() +
                       (problem.curl_u(x) - ops.curl_u * coeffs).squaredNorm() +
                       (problem.p(x) - ops.p * coeffs).squaredNorm() +
                       (problem.curl_p(x) - ops.curl_p * coeffs).squaredNorm();
      sum += rule.weights[q] * geo.abs_det * e;
    }
  }
  // The exact fields have no tangential jumps across interior faces.
  const QuadratureRule face_rule = simplex_rule(space.dim() - 1, degree);
  for (const auto &f : faces.interior)
  {
    const JumpIntegrals jumps = interior_jumps(space, f, field, face_rule);
    sum += (jumps.u + jumps.p) / f.diameter;
  }
  for (const auto &f : faces.boundary)
  {
    sum += boundary_mismatch(space, f, field, problem, face_rule) / f.diameter;
  }
  return std::sqrt(sum);
}

std::pair<double, double> l2_errors(const DgSpace &space, const FieldPair &field,
                                    const ManufacturedProblem &problem, int quad_degree)
{
  check_field(space, field, problem);
  const int degree = resolve_degree(space, quad_degree);
  const ReferenceShapes shapes(space.basis(), simplex_rule(space.dim(), degree));
  const QuadratureRule &rule = shapes.rule();
  const DofMap &dofs = space.dofs();
  double eu = 0.0, ep = 0.0;
  for (int c = 0; c < dofs.num_cells; ++c)
  {
    const CellGeometry &geo = space.geometry(c);
    for (int q = 0; q < rule.size(); ++q)
    {
      const Vector &phi = shapes.values(q);
      const Vec x = geo.origin + geo.jacobian * rule.points[q];
      const Vec u = problem.u(x);
      const Vec p = problem.p(x);
      const double w = rule.weights[q] * geo.abs_det;
      for (int i = 0; i < dofs.u_components; ++i)
      {
        const double d = u(i) - phi.dot(field.u_block(c, i));
        eu += w * d * d;
      }
      for (int i = 0; i < dofs.p_components; ++i)
      {
        const double d = p(i) - phi.dot(field.p_block(c, i));
        ep += w * d * d;
      }
    }
  }
  return {std::sqrt(eu), std::sqrt(ep)};
}

std::vector<double> indicators(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                               const ManufacturedProblem &problem, int quad_degree)
{
  check_field(space, field, problem);
  const int degree = resolve_degree(space, quad_degree);
  const ReferenceShapes shapes(space.basis(), simplex_rule(space.dim(), degree));
  const QuadratureRule face_rule = simplex_rule(space.dim() - 1, degree);
  const int nc = space.mesh().num_cells();
  std::vector<double> eta2(nc, 0.0);
  for (int c = 0; c < nc; ++c)
  {
    eta2[c] = cell_residual(space, c, field, problem, shapes);
  }
  for (const auto &f : faces.interior)
  {
    const JumpIntegrals jumps = interior_jumps(space, f, field, face_rule);
    const double contrib = (jumps.u + jumps.p) / f.diameter;
    eta2[f.cell_plus] += contrib;
    eta2[f.cell_minus] += contrib;
  }
  for (const auto &f : faces.boundary)
  {
    eta2[f.cell] += boundary_mismatch(space, f, field, problem, face_rule) / f.diameter;
  }
  for (double &e : eta2)
  {
    e = std::sqrt(e);
  }
  return eta2;
}

std::vector<std::optional<double>> convergence_orders(std::span<const double> errors)
{
  std::vector<std::optional<double>> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
  {
    if (errors[i] > 0.0 && errors[i + 1] > 0.0)
    {
      orders.emplace_back(std::log2(errors[i] / errors[i + 1]));
    }
    else
    {
      orders.emplace_back(std::nullopt);
    }
  }
  return orders;
}

namespace
{

template <typename Getter>
std::vector<std::optional<double>> orders_of(const ConvergenceRecord &rec, Getter get)
{
  std::vector<double> e;
  e.reserve(rec.reports.size());
  for (const auto &r : rec.reports)
  {
    e.push_back(get(r));
  }
  return convergence_orders(e);
}

std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string order_cell(const std::vector<std::optional<double>> &orders, std::size_t row)
{
  if (row == 0 || !orders[row - 1])
  {
    return "";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *orders[row - 1]);
  return buf;
}

}  // namespace

std::vector<std::optional<double>> ConvergenceRecord::energy_orders() const
{
  return orders_of(*this, [](const ErrorReport &r) { return r.energy_error; });
}

std::vector<std::optional<double>> ConvergenceRecord::l2_u_orders() const
{
  return orders_of(*this, [](const ErrorReport &r) { return r.l2_u; });
}

std::vector<std::optional<double>> ConvergenceRecord::l2_p_orders() const
{
  return orders_of(*this, [](const ErrorReport &r) { return r.l2_p; });
}

void write_convergence_csv(std::ostream &os, const ConvergenceRecord &record)
{
  const auto oe = record.energy_orders();
  const auto ou = record.l2_u_orders();
  const auto op = record.l2_p_orders();
  os << "h,n_cells,n_dofs,energy,order_energy,l2_u,order_u,l2_p,order_p,Jh,solver_iters\n";
  for (std::size_t i = 0; i < record.reports.size(); ++i)
  {
    const ErrorReport &r = record.reports[i];
    os << sci(r.h) << ',' << r.n_cells << ',' << r.n_dofs << ',' << sci(r.energy_error) << ','
       << order_cell(oe, i) << ',' << sci(r.l2_u) << ',' << order_cell(ou, i) << ','
       << sci(r.l2_p) << ',' << order_cell(op, i) << ',' << sci(r.j_h) << ','
       << r.solver_iterations << '\n';
  }
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
  {
    throw std::invalid_argument("loglog_slope: need at least two matching samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dlsfem
