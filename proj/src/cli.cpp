// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dlsfem/assembly.hpp"
#include "dlsfem/problems.hpp"

namespace dlsfem
{

namespace
{

constexpr std::array<const char *, 16> kKeys = {
  "command", "problem", "k",   "alpha",     "m",          "levels",  "theta", "steps",
  "dof-budget", "mu",   "solver", "precond", "tol",        "out",     "dump-mesh", "dump-matrix"};

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &value)
{
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(value, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used == 0 || used != value.size())
  {
    throw UsageError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

long to_long(const std::string &key, const std::string &value)
{
  std::size_t used = 0;
  long v = 0;
  try
  {
    v = std::stol(value, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used == 0 || used != value.size())
  {
    throw UsageError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

std::vector<int> to_levels(const std::string &value)
{
  std::vector<int> levels;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    item = trim(item);
    if (!item.empty())
    {
      levels.push_back(static_cast<int>(to_long("levels", item)));
    }
  }
  return levels;
}

std::string fmt_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply(RunConfig &c, const std::string &key, const std::string &value)
{
  if (key == "command")
  {
    c.command = value;
  }
  else if (key == "problem")
  {
    c.problem = value;
  }
  else if (key == "k")
  {
    c.k = to_double(key, value);
  }
  else if (key == "alpha")
  {
    c.alpha = to_double(key, value);
  }
  else if (key == "m")
  {
    c.degree = static_cast<int>(to_long(key, value));
  }
  else if (key == "levels")
  {
    c.levels = to_levels(value);
  }
  else if (key == "theta")
  {
    c.theta = to_double(key, value);
  }
  else if (key == "steps")
  {
    c.steps = static_cast<int>(to_long(key, value));
  }
  else if (key == "dof-budget")
  {
    c.dof_budget = to_long(key, value);
  }
  else if (key == "mu")
  {
    c.mu = to_double(key, value);
  }
  else if (key == "solver")
  {
    if (value == "bicgstab")
    {
      c.solver = SolverKind::bicgstab;
    }
    else if (value == "cg")
    {
      c.solver = SolverKind::cg;
    }
    else
    {
      throw UsageError("solver: expected bicgstab or cg, got '" + value + "'");
    }
  }
  else if (key == "precond")
  {
    if (value == "block-jacobi")
    {
      c.precond = PreconditionerKind::block_jacobi;
    }
    else if (value == "ilu0")
    {
      c.precond = PreconditionerKind::ilu0;
    }
    else if (value == "jacobi")
    {
      c.precond = PreconditionerKind::jacobi;
    }
    else
    {
      throw UsageError("precond: expected block-jacobi, ilu0 or jacobi, got '" + value + "'");
    }
  }
  else if (key == "tol")
  {
    c.tol = to_double(key, value);
  }
  else if (key == "out")
  {
    c.out = value;
  }
  else if (key == "dump-mesh")
  {
    c.dump_mesh = value;
  }
  else if (key == "dump-matrix")
  {
    c.dump_matrix = value;
  }
  else
  {
    throw UsageError("unknown key '" + key + "'");
  }
}

struct RawFlags
{
  std::string command;
  std::string config;
  std::array<std::string, kKeys.size()> values;
  std::array<CLI::Option *, kKeys.size()> options{};
};

void build_app(CLI::App &app, RawFlags &raw)
{
  app.name("dlsfem");
  app.description("Discontinuous least-squares FEM for time-harmonic Maxwell problems");
  app.add_option("command", raw.command, "converge | adapt | solve-once");
  app.add_option("--config", raw.config, "key=value file; flags override its values");
  const std::array<const char *, kKeys.size()> help = {
    "",
    "example1 .. example5",
    "wave number",
    "singular exponent (example3/4/5)",
    "polynomial degree, 1..3",
    "comma-separated mesh resolutions n; adapt uses the first as initial mesh",
    "Dorfler parameter in (0,1)",
    "number of adaptive refinements",
    "stop adapting once the dof count exceeds this (0: off)",
    "face penalty weight",
    "bicgstab | cg",
    "block-jacobi | ilu0 | jacobi",
    "relative residual tolerance",
    "CSV output path (default: stdout)",
    "write meshes to <prefix>_<tag>.mesh",
    "write the system matrix in MatrixMarket format",
  };
  for (std::size_t i = 1; i < kKeys.size(); ++i)
  {
    raw.options[i] = app.add_option(std::string("--") + kKeys[i], raw.values[i], help[i]);
  }
}

const char *precond_name(PreconditionerKind kind)
{
  switch (kind)
  {
  case PreconditionerKind::ilu0:
    return "ilu0";
  case PreconditionerKind::jacobi:
    return "jacobi";
  case PreconditionerKind::block_jacobi:
    break;
  }
  return "block-jacobi";
}

std::string tagged(const std::string &path, const std::string &tag, const std::string &ext)
{
  return path + "_" + tag + ext;
}

bool uses_square(const std::string &p) { return p == "example1"; }
bool uses_cube(const std::string &p) { return p == "example2" || p == "example4"; }
bool uses_lshape(const std::string &p) { return p == "example3" || p == "example5"; }

ManufacturedProblem config_problem(const RunConfig &c)
{
  try
  {
    return make_problem(c.problem, c.k, c.alpha);
  }
  catch (const std::invalid_argument &e)
  {
    throw UsageError(e.what());
  }
}

SolverSettings config_solver(const RunConfig &c)
{
  SolverSettings s;
  s.kind = c.solver;
  s.preconditioner = c.precond;
  s.tol = c.tol;
  return s;
}

void log_line(std::ostream &log, const char *fmt, double a, double b, int c, int d, int e, double f)
{
  char buf[200];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d, e, f);
  log << buf;
}

}  // namespace

void validate(RunConfig &c)
{
  if (c.command != "converge" && c.command != "adapt" && c.command != "solve-once")
  {
    throw UsageError("command must be converge, adapt or solve-once");
  }
  if (!uses_square(c.problem) && !uses_cube(c.problem) && !uses_lshape(c.problem))
  {
    throw UsageError("unknown problem '" + c.problem + "'");
  }
  if (c.degree < 1 || c.degree > 3)
  {
    throw UsageError("m: degree must be 1, 2 or 3");
  }
  if (!(c.k > 0.0))
  {
    throw UsageError("k must be positive");
  }
  if (c.problem == "example4" && c.k != 1.0)
  {
    throw UsageError("example4 is defined for k = 1 only");
  }
  if (c.alpha && !(*c.alpha > 0.0))
  {
    throw UsageError("alpha must be positive");
  }
  if (!(c.theta > 0.0 && c.theta < 1.0))
  {
    throw UsageError("theta must lie in (0,1)");
  }
  if (c.steps < 0 || c.dof_budget < 0)
  {
    throw UsageError("steps and dof-budget must be non-negative");
  }
  if (!(c.mu > 0.0) || !(c.tol > 0.0))
  {
    throw UsageError("mu and tol must be positive");
  }
  for (int n : c.levels)
  {
    if (n < 1)
    {
      throw UsageError("levels must be positive");
    }
  }
  if (c.levels.empty())
  {
    if (c.command == "converge")
    {
      throw UsageError("converge needs --levels");
    }
    c.levels = {5};
  }
}

RunConfig parse_config_text(const std::string &text, RunConfig base)
{
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    apply(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

std::string serialize_config(const RunConfig &c)
{
  std::ostringstream os;
  os << "command=" << c.command << '\n';
  os << "problem=" << c.problem << '\n';
  os << "k=" << fmt_double(c.k) << '\n';
  if (c.alpha)
  {
    os << "alpha=" << fmt_double(*c.alpha) << '\n';
  }
  os << "m=" << c.degree << '\n';
  os << "levels=";
  for (std::size_t i = 0; i < c.levels.size(); ++i)
  {
    os << (i ? "," : "") << c.levels[i];
  }
  os << '\n';
  os << "theta=" << fmt_double(c.theta) << '\n';
  os << "steps=" << c.steps << '\n';
  os << "dof-budget=" << c.dof_budget << '\n';
  os << "mu=" << fmt_double(c.mu) << '\n';
  os << "solver=" << (c.solver == SolverKind::cg ? "cg" : "bicgstab") << '\n';
  os << "precond=" << precond_name(c.precond) << '\n';
  os << "tol=" << fmt_double(c.tol) << '\n';
  os << "out=" << c.out << '\n';
  os << "dump-mesh=" << c.dump_mesh << '\n';
  os << "dump-matrix=" << c.dump_matrix << '\n';
  return os.str();
}

RunConfig parse_config(const std::vector<std::string> &args)
{
  if (args.empty())
  {
    throw UsageError(usage_text());
  }
  CLI::App app{"dlsfem"};
  RawFlags raw;
  build_app(app, raw);
  std::vector<const char *> argv{"dlsfem"};
  for (const auto &a : args)
  {
    argv.push_back(a.c_str());
  }
  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::CallForHelp &)
  {
    throw UsageError(app.help());
  }
  catch (const CLI::ParseError &e)
  {
    throw UsageError(e.what());
  }

  RunConfig c;
  if (!raw.config.empty())
  {
    std::ifstream in(raw.config);
    if (!in)
    {
      throw UsageError("cannot read config file '" + raw.config + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    c = parse_config_text(ss.str(), c);
  }
  if (!raw.command.empty())
  {
    c.command = raw.command;
  }
  for (std::size_t i = 1; i < kKeys.size(); ++i)
  {
    if (raw.options[i]->count() > 0)
    {
      apply(c, kKeys[i], raw.values[i]);
    }
  }
  validate(c);
  return c;
}

std::string usage_text()
{
  CLI::App app{"dlsfem"};
  RawFlags raw;
  build_app(app, raw);
  return app.help();
}

SimplicialMesh problem_mesh(const std::string &problem, int n)
{
  if (uses_square(problem))
  {
    return unit_square_mesh(n);
  }
  if (uses_cube(problem))
  {
    return unit_cube_mesh(n);
  }
  if (uses_lshape(problem))
  {
    return l_shaped_mesh(n);
  }
  throw UsageError("unknown problem '" + problem + "'");
}

ConvergenceRecord run_converge(const RunConfig &config, std::ostream &log)
{
  const ManufacturedProblem problem = config_problem(config);
  const SolverSettings solver = config_solver(config);
  const AssemblyOptions assembly{config.mu, -1};
  ConvergenceRecord record;
  for (int n : config.levels)
  {
    const SimplicialMesh mesh = problem_mesh(config.problem, n);
    const std::string tag = "n" + std::to_string(n);
    if (!config.dump_mesh.empty())
    {
      write_mesh(tagged(config.dump_mesh, tag, ".mesh"), mesh);
    }
    const FaceSet faces = build_faces(mesh);
    const DgSpace space(mesh, config.degree);
    const DiscreteSolution sol = solve_discrete(space, faces, problem, assembly, solver);
    if (!config.dump_matrix.empty())
    {
      const std::string path =
        config.levels.size() == 1 ? config.dump_matrix : tagged(config.dump_matrix, tag, ".mtx");
      std::ofstream os(path);
      write_matrix_market(os, sol.system.matrix);
    }
    if (!sol.stats.converged)
    {
      throw NumericalFailure("solver did not converge on level n = " + std::to_string(n) +
                             " (relative residual " + fmt_double(sol.stats.relative_residual) + ")");
    }
    ErrorReport r;
    r.h = mesh.mesh_size();
    r.nominal_h = 1.0 / n;
    r.n_cells = mesh.num_cells();
    r.n_dofs = space.dofs().total_dofs();
    r.energy_error = energy_error(space, faces, sol.field, problem);
    std::tie(r.l2_u, r.l2_p) = l2_errors(space, sol.field, problem);
    r.j_h = functional_value(space, faces, sol.field, problem, config.mu);
    r.solver_iterations = sol.stats.iterations;
    record.reports.push_back(r);
    log_line(log, "1/n=%.3e h=%.3e cells=%d dofs=%d iters=%d relres=%.2e\n", r.nominal_h, r.h,
             r.n_cells, r.n_dofs, r.solver_iterations, sol.stats.relative_residual);
  }
  return record;
}

AdaptiveHistory run_adapt(const RunConfig &config, std::ostream &log)
{
  const ManufacturedProblem problem = config_problem(config);
  AdaptiveOptions opts;
  opts.degree = config.degree;
  opts.theta = config.theta;
  opts.max_steps = config.steps;
  opts.dof_budget = config.dof_budget;
  opts.mu = config.mu;
  opts.solver = config_solver(config);
  if (!config.dump_mesh.empty())
  {
    opts.on_mesh = [&](int step, const SimplicialMesh &mesh)
    { write_mesh(tagged(config.dump_mesh, "step" + std::to_string(step), ".mesh"), mesh); };
  }
  AdaptiveHistory history = adaptive_solve(problem, problem_mesh(config.problem, config.levels.front()), opts);
  for (const auto &s : history.steps)
  {
    log << "step " << s.step << " cells=" << s.n_cells << " dofs=" << s.n_dofs
        << " marked=" << s.marked << " iters=" << s.solver_iterations << '\n';
  }
  return history;
}

int run(const RunConfig &config, std::ostream &out, std::ostream &log)
{
  std::ofstream file;
  if (!config.out.empty())
  {
    file.open(config.out);
    if (!file)
    {
      log << "cannot open '" << config.out << "' for writing\n";
      return kExitUsage;
    }
  }
  std::ostream &csv = config.out.empty() ? out : file;
  try
  {
    if (config.command == "adapt")
    {
      const AdaptiveHistory history = run_adapt(config, log);
      write_history_csv(csv, history);
      if (history.aborted)
      {
        log << history.message << '\n';
        return kExitNumerical;
      }
      return kExitOk;
    }
    RunConfig c = config;
    if (c.command == "solve-once")
    {
      c.levels.resize(1);
    }
    write_convergence_csv(csv, run_converge(c, log));
    return kExitOk;
  }
  catch (const NumericalFailure &e)
  {
    log << e.what() << '\n';
    return kExitNumerical;
  }
}

int main_entry(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  for (const auto &a : args)
  {
    if (a == "-h" || a == "--help")
    {
      out << usage_text();
      return kExitOk;
    }
  }
  RunConfig config;
  try
  {
    config = parse_config(args);
  }
  catch (const UsageError &e)
  {
    err << e.what() << '\n';
    if (!args.empty())
    {
      err << "run with --help for usage\n";
    }
    return kExitUsage;
  }
  try
  {
    return run(config, out, err);
  }
  catch (const UsageError &e)
  {
    err << e.what() << '\n';
    return kExitUsage;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace dlsfem
