// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dlsfem/problems.hpp"

using namespace dlsfem;

namespace
{

using Field = std::function<Vec(const Vec &)>;

Vec fd_curl(int dim, const Field &v, const Vec &x, double h = 1e-5)
{
  auto d = [&](int comp, int dir)
  {
    Vec e = Vec::Zero(dim);
    e(dir) = h;
    return (v(x + e)(comp) - v(x - e)(comp)) / (2 * h);
  };
  if (dim == 3)
  {
    return Vec{{d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)}};
  }
  if (v(x).size() == 2)
  {
    return Vec::Constant(1, d(1, 0) - d(0, 1));
  }
  return Vec{{d(0, 1), -d(0, 0)}};
}

std::vector<Vec> sample_points(int dim, int count, double lo, double hi, unsigned seed)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i)
  {
    Vec x(dim);
    for (int d = 0; d < dim; ++d)
    {
      x(d) = u(gen);
    }
    pts.push_back(x);
  }
  return pts;
}

// Points of the L-shape at distance >= 0.1 from its boundary.
std::vector<Vec> l_shape_points(int count, unsigned seed)
{
  std::vector<Vec> pts;
  for (const auto &x : sample_points(2, 4 * count, -0.9, 0.9, seed))
  {
    const bool excluded = x(0) > -0.1 && x(1) < 0.1;
    if (!excluded && static_cast<int>(pts.size()) < count)
    {
      pts.push_back(x);
    }
  }
  return pts;
}

void check_consistency(const ManufacturedProblem &pb, const std::vector<Vec> &pts)
{
  const int dim = pb.dim;
  for (const auto &x : pts)
  {
    ASSERT_EQ(pb.u(x).size(), dim);
    ASSERT_EQ(pb.p(x).size(), 2 * dim - 3);
    EXPECT_LT((pb.p(x) - pb.curl_u(x) / pb.k).norm(), 1e-10);
    EXPECT_LT((pb.curl_u(x) - fd_curl(dim, pb.u, x)).norm(), 1e-7);
    EXPECT_LT((pb.curl_p(x) - fd_curl(dim, pb.p, x)).norm(), 1e-7);
    // f = curl curl u - k^2 u
    const Vec ccu = fd_curl(dim, pb.curl_u, x);
    EXPECT_LT((pb.f(x) - (ccu - pb.k * pb.k * pb.u(x))).norm(), 1e-6 * std::max(1.0, pb.k * pb.k));
  }
}

}  // namespace

TEST(Example1, ValuesAndConsistency)
{
  const auto pb = example1(1.0);
  EXPECT_EQ(pb.u(Vec::Zero(2)).norm(), 0.0);
  EXPECT_EQ(pb.p(Vec::Zero(2))(0), 0.0);
  for (double k : {1.0, 2.0, 8.0})
  {
    check_consistency(example1(k), sample_points(2, 100, 0.0, 1.0, 1));
  }
  EXPECT_THROW(example1(0.0), std::invalid_argument);
}

TEST(Example2, ValuesSymmetryAndConsistency)
{
  const auto pb = example2(1.0);
  EXPECT_EQ(pb.u(Vec::Zero(3)).norm(), 0.0);
  for (const auto &x : sample_points(3, 20, 0.0, 1.0, 2))
  {
    const Vec swapped{{x(1), x(0), x(2)}};
    EXPECT_NEAR(pb.u(x)(0), pb.u(swapped)(1), 1e-15);
  }
  check_consistency(pb, sample_points(3, 100, 0.0, 1.0, 3));
  check_consistency(example2(2.5), sample_points(3, 30, 0.0, 1.0, 4));
}

TEST(Example3, SingularPart)
{
  const double alpha = 2.0 / 3.0;
  for (double k : {1.0, 2.0})
  {
    const auto pb = example3(k, alpha);
    const auto smooth = example1(k);
    const Field grad_part = [&](const Vec &x) { return Vec(pb.u(x) - smooth.u(x)); };
    for (const auto &x : l_shape_points(50, 5))
    {
      EXPECT_LT(fd_curl(2, grad_part, x).norm(), 1e-6);
      EXPECT_LT((pb.p(x) - smooth.p(x)).norm(), 1e-15);
      // (kr)^alpha sin(alpha theta) by finite differences of its polar form
      const auto phi = [&](const Vec &y)
      {
        double th = std::atan2(y(1), y(0));
        if (th < 0)
        {
          th += 2 * std::numbers::pi;
        }
        return std::pow(k * y.norm(), alpha) * std::sin(alpha * th);
      };
      const double h = 1e-6;
      const Vec fd{{(phi(x + Vec{{h, 0.0}}) - phi(x - Vec{{h, 0.0}})) / (2 * h),
                    (phi(x + Vec{{0.0, h}}) - phi(x - Vec{{0.0, h}})) / (2 * h)}};
      EXPECT_LT((grad_part(x) - fd).norm(), 1e-6);
    }
    check_consistency(pb, l_shape_points(100, 6));
    // along theta = 0 the singular gradient is alpha k^alpha r^(alpha-1) (0, 1)
    for (double r : {0.1, 0.5, 1.0})
    {
      const Vec x{{r, 0.0}};
      const Vec expected{{0.0, alpha * std::pow(k, alpha) * std::pow(r, alpha - 1.0)}};
      EXPECT_LT((grad_part(x) - expected).norm(), 1e-13);
    }
  }
  const auto pb = example3(1.0);
  EXPECT_THROW(pb.u(Vec::Zero(2)), std::domain_error);
  ASSERT_EQ(pb.singular_points.size(), 1u);
  EXPECT_EQ(pb.singular_points[0].norm(), 0.0);
  EXPECT_THROW(example3(1.0, 1.5), std::invalid_argument);
}

TEST(Example4, Values)
{
  const double alpha = 1.2;
  const auto pb = example4(alpha);
  EXPECT_EQ(pb.k, 1.0);
  const Vec one{{1.0, 1.0, 1.0}};
  const Vec expected = alpha * std::pow(3.0, alpha / 2 - 1) * one;
  EXPECT_LT((pb.u(one) - expected).norm(), 1e-14);
  // finite-difference gradient of |x|^alpha
  const double h = 1e-6;
  for (int d = 0; d < 3; ++d)
  {
    Vec e = Vec::Zero(3);
    e(d) = h;
    const double fd = (std::pow((one + e).norm(), alpha) - std::pow((one - e).norm(), alpha)) / (2 * h);
    EXPECT_NEAR(pb.u(one)(d), fd, 1e-8);
  }
  for (const auto &x : sample_points(3, 100, 0.05, 1.0, 7))
  {
    EXPECT_EQ(pb.p(x).norm(), 0.0);
    EXPECT_LT((pb.f(x) + pb.u(x)).norm(), 1e-15);
  }
  check_consistency(pb, sample_points(3, 50, 0.1, 1.0, 8));
  EXPECT_THROW(pb.u(Vec::Zero(3)), std::domain_error);
  EXPECT_THROW(example4(0.5), std::invalid_argument);
}

TEST(BoundaryTrace, AntisymmetricInNormal)
{
  std::mt19937 gen(10);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (const auto &pb : {example1(2.0), example2(1.0)})
  {
    for (const auto &x : sample_points(pb.dim, 20, 0.0, 1.0, 9))
    {
      Vec n(pb.dim);
      for (int d = 0; d < pb.dim; ++d)
      {
        n(d) = nd(gen);
      }
      n.normalize();
      EXPECT_LT((pb.boundary_trace(x, n) + pb.boundary_trace(x, Vec(-n))).norm(), 1e-15);
    }
  }
}

TEST(MakeProblem, Lookup)
{
  EXPECT_EQ(make_problem("example1", 2.0).k, 2.0);
  EXPECT_EQ(make_problem("example2", 1.0).dim, 3);
  const auto five = make_problem("example5", 1.0);
  const auto three = example3(1.0);
  const Vec x{{-0.3, 0.4}};
  EXPECT_LT((five.u(x) - three.u(x)).norm(), 1e-15);
  const auto custom = make_problem("example3", 1.0, 0.5);
  EXPECT_GT((custom.u(x) - three.u(x)).norm(), 1e-3);
  EXPECT_THROW(make_problem("example4", 2.0), std::invalid_argument);
  EXPECT_THROW(make_problem("nope", 1.0), std::invalid_argument);
  const auto zero = zero_problem(3, 1.5);
  EXPECT_EQ(zero.f(Vec::Ones(3)).norm(), 0.0);
  EXPECT_EQ(zero.u(Vec::Ones(3)).norm(), 0.0);
}
