// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dlsfem/femspace.hpp"

namespace dlsfem
{

Vec ManufacturedProblem::boundary_trace(const Vec &x, const Vec &normal) const
{
  return tangential_trace(dim, normal, u(x));
}

namespace
{

void require_positive_k(double k)
{
  if (!(k > 0.0))
  {
    throw std::invalid_argument("wave number k must be positive");
  }
}

Vec smooth2d_u(double k, const Vec &x) { return Vec{{std::sin(k * x(1)), std::sin(k * x(0))}}; }

Vec smooth2d_p(double k, const Vec &x)
{
  return Vec::Constant(1, std::cos(k * x(0)) - std::cos(k * x(1)));
}

// Gradient of (kr)^alpha sin(alpha theta) with theta in [0, 2pi).
Vec corner_gradient(double k, double alpha, const Vec &x)
{
  const double r = x.norm();
  if (r == 0.0)
  {
    throw std::domain_error("corner singular function evaluated at the singular point");
  }
  double theta = std::atan2(x(1), x(0));
  if (theta < 0.0)
  {
    theta += 2.0 * std::numbers::pi;
  }
  const double scale = alpha * std::pow(k, alpha) * std::pow(r, alpha - 1.0);
  return Vec{{scale * std::sin((alpha - 1.0) * theta), scale * std::cos((alpha - 1.0) * theta)}};
}

}  // namespace

ManufacturedProblem example1(double k)
{
  require_positive_k(k);
  ManufacturedProblem pb;
  pb.name = "example1";
  pb.dim = 2;
  pb.k = k;
  pb.u = [k](const Vec &x) { return smooth2d_u(k, x); };
  pb.p = [k](const Vec &x) { return smooth2d_p(k, x); };
  pb.curl_u = [k](const Vec &x) { return Vec(k * smooth2d_p(k, x)); };
  // curl p = k u, so curl curl u = k^2 u and the source vanishes.
  pb.curl_p = [k](const Vec &x) { return Vec(k * smooth2d_u(k, x)); };
  pb.f = [](const Vec &) { return Vec(Vec::Zero(2)); };
  pb.regularity_note = "smooth";
  return pb;
}

ManufacturedProblem example2(double k)
{
  require_positive_k(k);
  ManufacturedProblem pb;
  pb.name = "example2";
  pb.dim = 3;
  pb.k = k;
  auto u = [k](const Vec &x) {
    const double sx = std::sin(k * x(0)), sy = std::sin(k * x(1)), sz = std::sin(k * x(2));
    return Vec{{sy * sz, sx * sz, sx * sy}};
  };
  auto p = [k](const Vec &x) {
    const double sx = std::sin(k * x(0)), sy = std::sin(k * x(1)), sz = std::sin(k * x(2));
    const double cx = std::cos(k * x(0)), cy = std::cos(k * x(1)), cz = std::cos(k * x(2));
    return Vec{{sx * (cy - cz), sy * (cz - cx), sz * (cx - cy)}};
  };
  pb.u = u;
  pb.p = p;
  pb.curl_u = [k, p](const Vec &x) { return Vec(k * p(x)); };
  // u is divergence free with -laplace u = 2 k^2 u.
  pb.curl_p = [k, u](const Vec &x) { return Vec(2.0 * k * u(x)); };
  pb.f = [k, u](const Vec &x) { return Vec(k * k * u(x)); };
  pb.regularity_note = "smooth";
  return pb;
}

ManufacturedProblem example3(double k, double alpha)
{
  require_positive_k(k);
  if (!(alpha > 0.0 && alpha < 1.0))
  {
    throw std::invalid_argument("example3: alpha must lie in (0, 1)");
  }
  ManufacturedProblem pb;
  pb.name = "example3";
  pb.dim = 2;
  pb.k = k;
  pb.u = [k, alpha](const Vec &x) { return Vec(corner_gradient(k, alpha, x) + smooth2d_u(k, x)); };
  // The gradient part is curl free.
  pb.p = [k](const Vec &x) { return smooth2d_p(k, x); };
  pb.curl_u = [k](const Vec &x) { return Vec(k * smooth2d_p(k, x)); };
  pb.curl_p = [k](const Vec &x) { return Vec(k * smooth2d_u(k, x)); };
  pb.f = [k, alpha](const Vec &x) { return Vec(-k * k * corner_gradient(k, alpha, x)); };
  pb.regularity_note = "u in H^{alpha - eps}; singular at the reentrant corner";
  pb.singular_points = {Vec::Zero(2)};
  return pb;
}

ManufacturedProblem example4(double alpha)
{
  if (!(alpha > 1.0 && alpha < 2.0))
  {
    throw std::invalid_argument("example4: alpha must lie in (1, 2)");
  }
  ManufacturedProblem pb;
  pb.name = "example4";
  pb.dim = 3;
  pb.k = 1.0;
  auto u = [alpha](const Vec &x) {
    const double r = x.norm();
    if (r == 0.0)
    {
      throw std::domain_error("example4 evaluated at the singular point");
    }
    return Vec(alpha * std::pow(r, alpha - 2.0) * x);
  };
  auto zero = [](const Vec &) { return Vec(Vec::Zero(3)); };
  pb.u = u;
  pb.p = zero;
  pb.curl_u = zero;
  pb.curl_p = zero;
  pb.f = [u](const Vec &x) { return Vec(-u(x)); };
  pb.regularity_note = "u in H^{alpha - 1/2 - eps}; singular at the origin";
  pb.singular_points = {Vec::Zero(3)};
  return pb;
}

ManufacturedProblem zero_problem(int dim, double k)
{
  require_positive_k(k);
  if (dim != 2 && dim != 3)
  {
    throw std::invalid_argument("zero_problem: dim must be 2 or 3");
  }
  ManufacturedProblem pb;
  pb.name = "zero";
  pb.dim = dim;
  pb.k = k;
  const int c = curl_components(dim);
  pb.u = [dim](const Vec &) { return Vec(Vec::Zero(dim)); };
  pb.p = [c](const Vec &) { return Vec(Vec::Zero(c)); };
  pb.curl_u = pb.p;
  pb.curl_p = pb.u;
  pb.f = pb.u;
  pb.regularity_note = "zero";
  return pb;
}

ManufacturedProblem make_problem(const std::string &name, double k, std::optional<double> alpha)
{
  if (name == "example1")
  {
    return example1(k);
  }
  if (name == "example2")
  {
    return example2(k);
  }
  if (name == "example3" || name == "example5")
  {
    return example3(k, alpha.value_or(2.0 / 3.0));
  }
  if (name == "example4")
  {
    if (k != 1.0)
    {
      throw std::invalid_argument("example4 is defined for k = 1 only");
    }
    return example4(alpha.value_or(1.2));
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace dlsfem
