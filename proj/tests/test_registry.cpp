#include "dgtime/harness/registry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dgtime;
using namespace dgtime::harness;

TEST(Registry, IdsAndLabels) {
  EXPECT_EQ(problem_ids(), (std::vector<std::string>{"scalar", "system2", "heat1d", "heat2d"}));
  EXPECT_EQ(find_problem("b").id, "system2");
  EXPECT_EQ(find_problem("heat2d").label, "d");
  EXPECT_THROW(find_problem("heat3d"), std::invalid_argument);
  for (const auto& p : registry()) {
    EXPECT_EQ(p.abstract_case.has_value(), p.kind == ProblemKind::abstract);
    EXPECT_EQ(p.heat_case.has_value(), p.kind == ProblemKind::heat);
  }
}

TEST(Registry, HomogeneousProblemsHaveNoSource) {
  EXPECT_FALSE(find_problem("scalar").abstract_case->problem.source);
  EXPECT_FALSE(find_problem("heat2d").heat_case->heat.source);
}

TEST(Registry, AbstractClosedFormsSatisfyTheEquation) {
  for (const char* id : {"scalar", "system2"}) {
    const auto mp = find_problem(id);
    const auto& ac = *mp.abstract_case;
    EXPECT_LE((ac.exact(0.0) - ac.problem.u0).norm(), 1e-15);
    for (double t : {0.0, 0.3, 1.7}) {
      const Vec f = ac.problem.source_at(t);
      const Vec r = ac.problem.triple.mass_h() * ac.exact_dt(t) + ac.problem.op.at(t) * ac.exact(t) - f;
      EXPECT_LE(r.norm(), 1e-14) << id << " t = " << t;
      const double h = 1e-6;
      EXPECT_NEAR(((ac.exact(t + h) - ac.exact(t - h)) / (2 * h) - ac.exact_dt(t)).norm(), 0.0, 1e-8);
    }
  }
}

TEST(Registry, SystemOperatorCoercivityComesFromK) {
  const auto mp = find_problem("system2");
  const auto& p = mp.abstract_case->problem;
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Vec v = Vec::NullaryExpr(2, [&] { return g(rng); });
    const double t = 3.0 * i / 20.0;
    EXPECT_NEAR(v.dot(p.op.at(t) * v), v.dot(p.triple.gram_v() * v), 1e-13);
  }
}

TEST(Registry, HeatClosedFormsSatisfyTheEquation) {
  for (const char* id : {"heat1d", "heat2d"}) {
    const auto mp = find_problem(id);
    const auto& hc = *mp.heat_case;
    const double h = 1e-4;
    for (const fem::Point x : {fem::Point(0.3, 0.4), fem::Point(0.71, 0.2)}) {
      for (double t : {0.0, 0.05}) {
        auto u = [&](const fem::Point& y, double s) { return hc.exact.value(y, s); };
        double lap = (u(x + fem::Point(h, 0), t) - 2 * u(x, t) + u(x - fem::Point(h, 0), t)) / (h * h);
        if (hc.space_dim == 2) lap += (u(x + fem::Point(0, h), t) - 2 * u(x, t) + u(x - fem::Point(0, h), t)) / (h * h);
        const double f = hc.heat.source ? hc.heat.source(x, t) : 0.0;
        const double scale = 1.0 + std::abs(hc.exact.dt(x, t));
        EXPECT_NEAR(hc.exact.dt(x, t) - lap, f, 1e-5 * scale) << id;
        if (t == 0.0) {
          EXPECT_NEAR(hc.heat.u0(x), u(x, 0.0), 1e-15);
        }
      }
    }
  }
}
