// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dlsfem/adapt.hpp"

using namespace dlsfem;

TEST(Dorfler, SmallExamples)
{
  const std::vector<double> a = {3, 1, 1, 1};
  EXPECT_EQ(dorfler_mark(a, 0.5), (std::set<int>{0}));
  const std::vector<double> tie(8, 1.0);
  EXPECT_EQ(dorfler_mark(tie, 0.25), (std::set<int>{0, 1}));
  EXPECT_EQ(dorfler_mark(tie, 0.999).size(), 8u);
  const std::vector<double> zero(5, 0.0);
  EXPECT_TRUE(dorfler_mark(zero, 0.5).empty());
  EXPECT_THROW(dorfler_mark(a, 0.0), std::invalid_argument);
  EXPECT_THROW(dorfler_mark(a, 1.0), std::invalid_argument);
  const std::vector<double> neg = {1, -1};
  EXPECT_THROW(dorfler_mark(neg, 0.5), std::invalid_argument);
}

TEST(Dorfler, UniformMarksCeilFraction)
{
  for (int n : {4, 7, 10, 33})
  {
    const std::vector<double> eta(n, 0.3);
    EXPECT_EQ(static_cast<int>(dorfler_mark(eta, 0.25).size()), static_cast<int>(std::ceil(0.25 * n - 1e-12)));
  }
}

TEST(Dorfler, BulkCriterionAndMinimality)
{
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t)
  {
    std::vector<double> eta(40);
    for (double &e : eta)
    {
      e = u(gen);
    }
    const double theta = 0.1 + 0.8 * u(gen);
    const auto marked = dorfler_mark(eta, theta);
    double total = 0.0, got = 0.0;
    for (double e : eta)
    {
      total += e * e;
    }
    for (int i : marked)
    {
      got += eta[i] * eta[i];
    }
    EXPECT_GE(got, theta * total - 1e-12);
    // no set of smaller cardinality reaches the bulk: take the largest |marked| - 1 values
    std::vector<double> sorted = eta;
    std::sort(sorted.rbegin(), sorted.rend());
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < marked.size(); ++i)
    {
      best += sorted[i] * sorted[i];
    }
    EXPECT_LT(best, theta * total);
  }
}

TEST(AdaptiveSolve, SmoothProblemImproves)
{
  AdaptiveOptions opts;
  opts.max_steps = 3;
  int meshes = 0;
  opts.on_mesh = [&](int, const SimplicialMesh &) { ++meshes; };
  const auto hist = adaptive_solve(example1(1.0), unit_square_mesh(3), opts);
  ASSERT_FALSE(hist.aborted) << hist.message;
  ASSERT_EQ(hist.steps.size(), 4u);
  EXPECT_EQ(meshes, 4);
  for (std::size_t i = 1; i < hist.steps.size(); ++i)
  {
    EXPECT_EQ(hist.steps[i].step, static_cast<int>(i));
    EXPECT_GT(hist.steps[i].n_cells, hist.steps[i - 1].n_cells);
    EXPECT_LT(hist.steps[i].energy_error, hist.steps[i - 1].energy_error);
    EXPECT_GT(hist.steps[i - 1].marked, 0);
  }
  EXPECT_EQ(hist.steps.back().marked, 0);
  EXPECT_EQ(hist.final_mesh.num_cells(), hist.steps.back().n_cells);
}

TEST(AdaptiveSolve, LShapeEstimatorDecreases)
{
  AdaptiveOptions opts;
  opts.max_steps = 4;
  const auto hist = adaptive_solve(example3(1.0), l_shaped_mesh(3), opts);
  ASSERT_FALSE(hist.aborted) << hist.message;
  for (std::size_t i = 1; i < hist.steps.size(); ++i)
  {
    EXPECT_GT(hist.steps[i].n_cells, hist.steps[i - 1].n_cells);
    EXPECT_LT(hist.steps[i].sum_eta2, hist.steps[i - 1].sum_eta2);
  }
}

TEST(AdaptiveSolve, DofBudgetStops)
{
  AdaptiveOptions opts;
  opts.max_steps = 50;
  opts.dof_budget = 2000;
  const auto hist = adaptive_solve(example3(1.0), l_shaped_mesh(2), opts);
  ASSERT_FALSE(hist.aborted) << hist.message;
  EXPECT_LT(hist.steps.size(), 51u);
  EXPECT_GT(hist.steps.back().n_dofs, 2000);
  for (std::size_t i = 0; i + 1 < hist.steps.size(); ++i)
  {
    EXPECT_LE(hist.steps[i].n_dofs, 2000);
  }
}

TEST(AdaptiveSolve, HistoryCsv)
{
  AdaptiveHistory hist;
  AdaptiveStep s;
  s.step = 0;
  s.n_cells = 24;
  s.n_dofs = 216;
  s.l2_u = 0.5;
  s.l2_p = 0.25;
  s.energy_error = 1.0;
  s.sum_eta2 = 2.0;
  s.marked = 6;
  hist.steps.push_back(s);
  std::ostringstream os;
  write_history_csv(os, hist);
  EXPECT_EQ(os.str(), "step,n_cells,n_dofs,l2_u,l2_p,energy,sum_eta2,marked\n"
                      "0,24,216,5.000e-01,2.500e-01,1.000e+00,2.000e+00,6\n");
}
