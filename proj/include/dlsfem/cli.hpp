// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_CLI_HPP
#define DLSFEM_CLI_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlsfem/adapt.hpp"
#include "dlsfem/analysis.hpp"
#include "dlsfem/mesh.hpp"
#include "dlsfem/sparse.hpp"

namespace dlsfem
{

enum ExitCode
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
};

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  std::string command = "converge";  // converge | adapt | solve-once
  std::string problem = "example1";
  double k = 1.0;
  std::optional<double> alpha;
  int degree = 1;
  std::vector<int> levels;  // converge: the n of each mesh; adapt/solve-once: first entry
  double theta = 0.25;
  int steps = 10;
  long dof_budget = 0;
  double mu = 1.0;
  SolverKind solver = SolverKind::cg;
  PreconditionerKind precond = PreconditionerKind::block_jacobi;
  double tol = 1e-10;
  std::string out;          // CSV path, stdout when empty
  std::string dump_mesh;    // path prefix
  std::string dump_matrix;  // MatrixMarket path

  bool operator==(const RunConfig &) const = default;
};

// Throws UsageError for invalid values. Fills a default level for adapt and
// solve-once when none is given.
void validate(RunConfig &config);

// Flat key=value lines; '#' starts a comment.
RunConfig parse_config_text(const std::string &text, RunConfig base = {});
std::string serialize_config(const RunConfig &config);

// Parses the command line; flags override values read from --config. An empty
// argument list is a usage error. --help throws UsageError carrying the help text.
RunConfig parse_config(const std::vector<std::string> &args);

std::string usage_text();

// Mesh of the problem's domain at resolution n.
SimplicialMesh problem_mesh(const std::string &problem, int n);

ConvergenceRecord run_converge(const RunConfig &config, std::ostream &log);
AdaptiveHistory run_adapt(const RunConfig &config, std::ostream &log);

class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Runs the configured command and writes the CSV to config.out or `out`.
// Returns an ExitCode; numerical failures map to kExitNumerical.
int run(const RunConfig &config, std::ostream &out, std::ostream &log);

// Entry point used by the executable.
int main_entry(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace dlsfem

#endif  // DLSFEM_CLI_HPP
