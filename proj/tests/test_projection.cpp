#include "dgtime/harness/rates.hpp"
#include "dgtime/projection.hpp"

#include "problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dgtime;
using namespace dgtime::testing;

namespace {

/// Random smooth slab function in the reference variable: trig + polynomial mix.
SlabFunction random_reference_function(int m, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat c(m, 4);
  for (auto& x : c.reshaped()) x = g(rng);
  const double w = 1.0 + 3.0 * std::uniform_real_distribution<double>()(rng);
  return [c, w](double s) -> Vec {
    return c.col(0) + s * c.col(1) + std::sin(w * s) * c.col(2) + std::exp(-s) * c.col(3);
  };
}

double moment_residual(const SlabFunction& v, const SlabPoly& p, double t0, double tau, int q, const Mat& metric) {
  const auto rule = gauss_rule(q + 10);
  double worst = 0.0, scale = 0.0;
  for (int l = 0; l < q; ++l) {
    const Vec r = rule.integrate([&](double t) -> Vec { return (metric * (v(t) - p(t))) * std::pow((t - t0) / tau, l); },
                                 t0, t0 + tau);
    const Vec s = rule.integrate([&](double t) -> Vec { return (metric * v(t)) * std::pow((t - t0) / tau, l); }, t0,
                                 t0 + tau);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
    scale = std::max(scale, s.cwiseAbs().maxCoeff());
  }
  return scale > 0 ? worst / scale : worst;
}

}  // namespace

TEST(ProjectPi, ConstantInput) {
  const double t0 = 0.3, tau = 0.2, c = 1.7;
  const auto p = project_pi_n([c](double) { return Vec::Constant(1, c); }, t0, tau, 1);
  for (double t : {0.3, 0.35, 0.42, 0.5}) EXPECT_NEAR(p(t)(0), 2 * c * (t - t0) / tau, 1e-13);
}

TEST(ProjectPi, ReproducesZeroTracePolynomials) {
  for (int q = 1; q <= 4; ++q) {
    auto v = [q](double t) -> Vec {
      Vec x(2);
      x << (t - 1) * std::pow(t, q - 1), 3 * (t - 1);
      return x;
    };
    const auto p = project_pi_n(v, 1.0, 0.5, q);
    for (double t : {1.0, 1.1, 1.33, 1.5}) EXPECT_LE((p(t) - v(t)).norm(), 1e-12);
  }
}

TEST(ProjectPi, ZeroTraceAndMomentsOnRandomFunctions) {
  std::mt19937 rng(2);
  const int m = 3;
  const Mat metric = random_spd(m, rng);
  for (int q = 1; q <= 3; ++q) {
    for (int k = 0; k < 100; ++k) {
      const auto w = random_reference_function(m, rng);
      const double t0 = 0.7, tau = 0.05;
      SlabFunction v = [&](double t) { return w((t - t0) / tau); };
      const auto p = project_pi_n(v, t0, tau, q);
      EXPECT_LE(p.left().norm(), 1e-11 * (1 + p.coeffs.norm()));
      EXPECT_LE(moment_residual(v, p, t0, tau, q, metric), 1e-11);
    }
  }
}

TEST(ProjectPi, Idempotent) {
  std::mt19937 rng(3);
  for (int q = 1; q <= 3; ++q) {
    const auto w = random_reference_function(2, rng);
    const auto p = project_pi_n(w, 0.0, 1.0, q);
    const auto pp = project_pi_n([&p](double t) { return p(t); }, 0.0, 1.0, q);
    EXPECT_LE((p.coeffs - pp.coeffs).norm(), 1e-12 * p.coeffs.norm());
  }
}

TEST(ProjectPi, CommutesWithCongruence) {
  std::mt19937 rng(5);
  const Mat s = random_spd(3, rng);
  for (int q = 1; q <= 3; ++q) {
    const auto w = random_reference_function(3, rng);
    const auto p = project_pi_n(w, 0.0, 1.0, q);
    const auto ps = project_pi_n([&](double t) -> Vec { return s * w(t); }, 0.0, 1.0, q);
    EXPECT_LE((ps.coeffs - s * p.coeffs).norm(), 1e-10 * ps.coeffs.norm());
  }
}

TEST(ProjectPi, RejectsQ0) {
  EXPECT_THROW(project_pi_n([](double) { return Vec::Ones(1); }, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(check_pi_stability(0, Mat::Identity(1, 1), {}), std::invalid_argument);
}

TEST(PiStability, RatioOneOnRangeAndScaleInvariant) {
  std::mt19937 rng(9);
  const Mat metric = random_spd(2, rng);
  auto in_range = [](double t) -> Vec {
    Vec x(2);
    x << t * (1 - 2 * t), 3 * t;
    return x;
  };
  EXPECT_NEAR(pi_stability_ratio(in_range, 0.0, 1.0, 2, metric), 1.0, 1e-12);
  std::vector<SlabFunction> samples;
  for (int k = 0; k < 20; ++k) samples.push_back(random_reference_function(2, rng));
  for (int q = 1; q <= 3; ++q) {
    const double ref = check_pi_stability(q, metric, samples, 0.0, 1.0);
    EXPECT_GT(ref, 0.0);
    EXPECT_TRUE(std::isfinite(ref));
    for (double tau : {0.5, 1e-2, 1e-4}) {
      EXPECT_NEAR(check_pi_stability(q, metric, samples, 3.0, tau), ref, 1e-10 * ref) << "tau " << tau;
    }
  }
}

TEST(LagrangeInterp, ReproducesPolynomials) {
  for (int q = 1; q <= 4; ++q) {
    auto v = [q](double t) { return Vec::Constant(1, std::pow(t, q) - 2 * t + 1); };
    const auto p = lagrange_interp(v, 0.5, 0.25, q);
    for (double t : {0.5, 0.6, 0.7, 0.75}) EXPECT_NEAR(p(t)(0), v(t)(0), 1e-12);
  }
  const auto p0 = lagrange_interp([](double t) { return Vec::Constant(1, t); }, 0.0, 0.5, 0);
  EXPECT_NEAR(p0(0.1)(0), 0.5, 1e-15);
}

TEST(LagrangeInterp, ConvergenceRates) {
  std::vector<double> err, derr, steps;
  for (double tau = 0.4; tau > 0.02; tau /= 2) {
    const double t0 = 1.0;
    const auto p = lagrange_interp([](double t) { return Vec::Constant(1, std::sin(t)); }, t0, tau, 1);
    double e = 0, de = 0;
    for (int i = 0; i <= 200; ++i) {
      const double t = t0 + tau * i / 200.0;
      e = std::max(e, std::abs(p(t)(0) - std::sin(t)));
      de = std::max(de, std::abs(p.derivative(t)(0) - std::cos(t)));
    }
    err.push_back(e);
    derr.push_back(de);
    steps.push_back(tau);
  }
  const auto r = harness::estimate_rates(err, steps);
  const auto dr = harness::estimate_rates(derr, steps);
  ASSERT_TRUE(r.slope && dr.slope);
  EXPECT_NEAR(*r.slope, 2.0, 0.1);
  EXPECT_NEAR(*dr.slope, 1.0, 0.1);
}

TEST(DiscreteCharacteristic, Examples) {
  const SlabBasis b1(1);
  const Mat metric = Mat::Identity(1, 1);
  // v_tilde(t) = (t - t0)/tau, s = t_{n+1}: v_hat = v_tilde
  const SlabPoly vt = SlabPoly::interpolate(2.0, 0.5, b1, [](double t) { return Vec::Constant(1, (t - 2.0) / 0.5); });
  const auto same = discrete_characteristic(vt, 2.5, metric);
  EXPECT_LE((same.value.coeffs - vt.coeffs).norm(), 1e-12);
  EXPECT_NEAR(same.stability_ratio, 1.0, 1e-12);

  const SlabPoly zero{2.0, 0.5, b1, Mat::Zero(1, 2)};
  EXPECT_EQ(discrete_characteristic(zero, 2.2, metric).value.coeffs.norm(), 0.0);

  // s = t_n: v_hat(t_{n+1}) = 1 and zero mean
  const auto at_start = discrete_characteristic(vt, 2.0, metric);
  EXPECT_NEAR(at_start.value.right()(0), 1.0, 1e-12);
  const double mean = gauss_rule(2).integrate([&](double t) { return at_start.value(t)(0); }, 2.0, 2.5);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_THROW(discrete_characteristic(vt, 3.0, metric), std::invalid_argument);
}

TEST(DiscreteCharacteristic, DefiningConditionsRandom) {
  std::mt19937 rng(13);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01;
  for (int q = 1; q <= 3; ++q) {
    const SlabBasis b(q);
    for (int k = 0; k < 20; ++k) {
      Mat c(2, q + 1);
      for (auto& x : c.reshaped()) x = g(rng);
      const SlabPoly vt{0.5, 0.25, b, c};
      const double s = 0.5 + 0.25 * u01(rng);
      const auto vh = discrete_characteristic(vt, s, Mat::Identity(2, 2)).value;
      EXPECT_LE((vh.right() - vt.right()).norm(), 1e-12);
      const auto rule = gauss_rule(q + 2);
      for (int l = 0; l < q; ++l) {
        auto chi = [l](double t) { return std::pow((t - 0.5) / 0.25, l); };
        const Vec lhs = rule.integrate([&](double t) -> Vec { return vh(t) * chi(t); }, 0.5, 0.75);
        const Vec rhs = rule.integrate([&](double t) -> Vec { return vt(t) * chi(t); }, 0.5, s);
        EXPECT_LE((lhs - rhs).norm(), 1e-12);
      }
    }
  }
}

TEST(TraceInequality, Examples) {
  const HilbertTriple id(Mat::Identity(2, 2), Mat::Identity(2, 2));
  Vec c(2);
  c << 3, -4;
  auto v = [c](double) { return c; };
  auto dv = [](double) -> Vec { return Vec::Zero(2); };
  EXPECT_NEAR(check_trace_inequality(v, dv, 0.0, 0.3, id), 1.0, 1e-12);
  EXPECT_EQ(check_trace_inequality(dv, dv, 0.0, 0.3, id), 0.0);
}

TEST(TraceInequality, ScaleInvariance) {
  std::mt19937 rng(17);
  const HilbertTriple tr(random_spd(2, rng), random_spd(2, rng));
  auto w = [](double s) -> Vec {
    Vec x(2);
    x << std::sin(4 * s) + s, std::cos(2 * s);
    return x;
  };
  auto dw = [](double s) -> Vec {
    Vec x(2);
    x << 4 * std::cos(4 * s) + 1, -2 * std::sin(2 * s);
    return x;
  };
  std::vector<double> ratios;
  for (double tau = 1.0; tau >= 1.0 / 64; tau /= 2) {
    const double t0 = 0.25;
    ratios.push_back(check_trace_inequality([&](double t) { return w((t - t0) / tau); },
                                            [&](double t) -> Vec { return dw((t - t0) / tau) / tau; }, t0, tau, tr));
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  EXPECT_LE(hi - lo, 1e-10 * lo);
}
