// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_ANALYSIS_HPP
#define DLSFEM_ANALYSIS_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dlsfem/femspace.hpp"
#include "dlsfem/mesh.hpp"
#include "dlsfem/problems.hpp"

namespace dlsfem
{

// Default quadrature degree for non-polynomial integrands: 2m + 4.
int error_quadrature_degree(int degree);

// Discrete least-squares functional J_h of a field pair. quad_degree < 0 selects
// error_quadrature_degree(m).
double functional_value(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                        const ManufacturedProblem &problem, double mu = 1.0,
                        int quad_degree = -1);

// Energy norm of (u - u_h, p - p_h): broken L2 norms of the errors and their
// curls, (1/h_f)-weighted tangential jumps of u_h on all faces (boundary jump
// against the exact trace) and of p_h on interior faces.
double energy_error(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                    const ManufacturedProblem &problem, int quad_degree = -1);

// (||u - u_h||, ||p - p_h||) in L2(Omega).
std::pair<double, double> l2_errors(const DgSpace &space, const FieldPair &field,
                                    const ManufacturedProblem &problem, int quad_degree = -1);

// Element indicators eta_K (not squared). Each interior face contributes to both
// neighbours with weight 1/h_f.
std::vector<double> indicators(const DgSpace &space, const FaceSet &faces, const FieldPair &field,
                               const ManufacturedProblem &problem, int quad_degree = -1);

struct ErrorReport
{
  double h = 0.0;          // max cell diameter
  double nominal_h = 0.0;  // structured resolution 1/n, 0 if not applicable
  int n_cells = 0;
  int n_dofs = 0;
  double energy_error = 0.0;
  double l2_u = 0.0;
  double l2_p = 0.0;
  double j_h = 0.0;
  int solver_iterations = 0;
};

// Orders log2(e_i / e_{i+1}); absent when either error is not strictly positive.
std::vector<std::optional<double>> convergence_orders(std::span<const double> errors);

struct ConvergenceRecord
{
  std::vector<ErrorReport> reports;

  std::vector<std::optional<double>> energy_orders() const;
  std::vector<std::optional<double>> l2_u_orders() const;
  std::vector<std::optional<double>> l2_p_orders() const;
};

// Columns: h, n_cells, n_dofs, energy, order_energy, l2_u, order_u, l2_p, order_p, Jh, solver_iters.
void write_convergence_csv(std::ostream &os, const ConvergenceRecord &record);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace dlsfem

#endif  // DLSFEM_ANALYSIS_HPP
