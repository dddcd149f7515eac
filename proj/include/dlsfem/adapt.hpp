// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_ADAPT_HPP
#define DLSFEM_ADAPT_HPP

#include <functional>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dlsfem/mesh.hpp"
#include "dlsfem/problems.hpp"
#include "dlsfem/sparse.hpp"

namespace dlsfem
{

// Smallest set of cells whose squared indicators reach theta * sum(eta^2).
// Cells are taken by decreasing eta, ties by index. Empty if all eta vanish.
std::set<int> dorfler_mark(std::span<const double> etas, double theta);

struct AdaptiveStep
{
  int step = 0;
  int n_cells = 0;
  int n_dofs = 0;
  double l2_u = 0.0;
  double l2_p = 0.0;
  double energy_error = 0.0;
  double sum_eta2 = 0.0;
  int marked = 0;  // cells marked for the next refinement, 0 on the last step
  int solver_iterations = 0;
};

struct AdaptiveHistory
{
  std::vector<AdaptiveStep> steps;
  SimplicialMesh final_mesh;
  bool aborted = false;  // solver failure; steps hold the completed part
  std::string message;
};

struct AdaptiveOptions
{
  int degree = 1;
  double theta = 0.25;
  int max_steps = 10;   // number of refinements; max_steps + 1 solves
  long dof_budget = 0;  // stop once n_dofs exceeds it; 0 disables
  double mu = 1.0;
  SolverSettings solver;
  std::function<void(int, const SimplicialMesh &)> on_mesh;  // called with each solved mesh
};

AdaptiveHistory adaptive_solve(const ManufacturedProblem &problem, const SimplicialMesh &initial,
                               const AdaptiveOptions &options = {});

// Columns: step, n_cells, n_dofs, l2_u, l2_p, energy, sum_eta2, marked.
void write_history_csv(std::ostream &os, const AdaptiveHistory &history);

}  // namespace dlsfem

#endif  // DLSFEM_ADAPT_HPP
