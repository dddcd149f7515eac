// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_PROBLEMS_HPP
#define DLSFEM_PROBLEMS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dlsfem/types.hpp"

namespace dlsfem
{

using VectorField = std::function<Vec(const Vec &)>;

//
// Exact solution of curl curl u - k^2 u = f with n x u = n x u_exact on the
// boundary, together with p = curl u / k and the curls needed by the
// first-order residuals.
//
struct ManufacturedProblem
{
  std::string name;
  int dim = 2;
  double k = 1.0;
  VectorField u;       // dim components
  VectorField p;       // 2dim-3 components
  VectorField curl_u;  // 2dim-3 components
  VectorField curl_p;  // dim components
  VectorField f;       // dim components
  std::string regularity_note;
  std::vector<Vec> singular_points;

  // f / k, the source of the first first-order equation.
  Vec scaled_source(const Vec &x) const { return f(x) / k; }

  // n x u_exact(x); used as the tangential boundary datum.
  Vec boundary_trace(const Vec &x, const Vec &normal) const;
};

// (0,1)^2, u = (sin ky, sin kx).
ManufacturedProblem example1(double k);

// (0,1)^3, u = (sin ky sin kz, sin kx sin kz, sin kx sin ky).
ManufacturedProblem example2(double k);

// L-shape, u = grad((kr)^alpha sin(alpha theta)) + (sin ky, sin kx), theta in [0, 2pi).
ManufacturedProblem example3(double k, double alpha = 2.0 / 3.0);

// (0,1)^3, u = grad(|x|^alpha), k = 1.
ManufacturedProblem example4(double alpha = 1.2);

// Homogeneous data: f = 0, n x u = 0. The exact solution is zero.
ManufacturedProblem zero_problem(int dim, double k);

// Looks up a problem by CLI name ("example1" ... "example5"; example5 is example3).
// Without alpha the problem's default exponent is used.
ManufacturedProblem make_problem(const std::string &name, double k,
                                 std::optional<double> alpha = std::nullopt);

}  // namespace dlsfem

#endif  // DLSFEM_PROBLEMS_HPP
