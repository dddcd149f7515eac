// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/adapt.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "dlsfem/analysis.hpp"
#include "dlsfem/assembly.hpp"

namespace dlsfem
{

std::set<int> dorfler_mark(std::span<const double> etas, double theta)
{
  if (!(theta > 0.0 && theta < 1.0))
  {
    throw std::invalid_argument("dorfler_mark: theta must lie in (0,1)");
  }
  double total = 0.0;
  for (double e : etas)
  {
    if (!(e >= 0.0))
    {
      throw std::invalid_argument("dorfler_mark: indicators must be non-negative");
    }
    total += e * e;
  }
  std::set<int> marked;
  if (total == 0.0)
  {
    return marked;
  }
  std::vector<int> order(etas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return etas[a] > etas[b]; });
  const double target = theta * total;
  double acc = 0.0;
  for (int c : order)
  {
    if (acc >= target)
    {
      break;
    }
    marked.insert(c);
    acc += etas[c] * etas[c];
  }
  return marked;
}

AdaptiveHistory adaptive_solve(const ManufacturedProblem &problem, const SimplicialMesh &initial,
                               const AdaptiveOptions &options)
{
  if (!(options.theta > 0.0 && options.theta < 1.0))
  {
    throw std::invalid_argument("adaptive_solve: theta must lie in (0,1)");
  }
  if (options.degree < 1 || options.max_steps < 0)
  {
    throw std::invalid_argument("adaptive_solve: need degree >= 1 and max_steps >= 0");
  }
  AdaptiveHistory history;
  SimplicialMesh mesh = initial;
  const AssemblyOptions assembly{options.mu, -1};
  for (int step = 0;; ++step)
  {
    if (options.on_mesh)
    {
      options.on_mesh(step, mesh);
    }
    const FaceSet faces = build_faces(mesh);
    const DgSpace space(mesh, options.degree);
    DiscreteSolution sol = solve_discrete(space, faces, problem, assembly, options.solver);
    if (!sol.stats.converged && options.solver.preconditioner == PreconditionerKind::block_jacobi)
    {
      // second attempt with ILU(0)
      SolverSettings retry = options.solver;
      retry.preconditioner = PreconditionerKind::ilu0;
      sol = solve_discrete(space, faces, problem, assembly, retry);
    }
    if (!sol.stats.converged)
    {
      history.aborted = true;
      history.message = "solver failed at step " + std::to_string(step);
      history.final_mesh = mesh;
      return history;
    }
    const std::vector<double> etas = indicators(space, faces, sol.field, problem);
    const auto [eu, ep] = l2_errors(space, sol.field, problem);

    AdaptiveStep rec;
    rec.step = step;
    rec.n_cells = mesh.num_cells();
    rec.n_dofs = space.dofs().total_dofs();
    rec.l2_u = eu;
    rec.l2_p = ep;
    rec.energy_error = energy_error(space, faces, sol.field, problem);
    for (double e : etas)
    {
      rec.sum_eta2 += e * e;
    }
    rec.solver_iterations = sol.stats.iterations;

    const bool budget_hit = options.dof_budget > 0 && rec.n_dofs > options.dof_budget;
    if (step == options.max_steps || budget_hit)
    {
      history.steps.push_back(rec);
      break;
    }
    const std::set<int> marked = dorfler_mark(etas, options.theta);
    rec.marked = static_cast<int>(marked.size());
    history.steps.push_back(rec);
    if (marked.empty())
    {
      break;
    }
    mesh = bisect(mesh, marked);
  }
  history.final_mesh = std::move(mesh);
  return history;
}

void write_history_csv(std::ostream &os, const AdaptiveHistory &history)
{
  os << "step,n_cells,n_dofs,l2_u,l2_p,energy,sum_eta2,marked\n";
  char buf[160];
  for (const auto &s : history.steps)
  {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.3e,%.3e,%.3e,%.3e,%d\n", s.step, s.n_cells,
                  s.n_dofs, s.l2_u, s.l2_p, s.energy_error, s.sum_eta2, s.marked);
    os << buf;
  }
}

}  // namespace dlsfem
