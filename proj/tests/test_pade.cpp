#include "dgtime/pade.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace dgtime;
using cplx = std::complex<double>;

TEST(Amplification, Examples) {
  EXPECT_NEAR(amplification(0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(amplification(1, 1.0), 4.0 / 11.0, 1e-15);
  for (int q = 0; q <= 5; ++q) EXPECT_NEAR(amplification(q, 0.0), 1.0, 1e-14);
  EXPECT_THROW(amplification(-1, 1.0), std::invalid_argument);
}

TEST(Pade, ClosedForms) {
  const auto p0 = pade_subdiagonal(0);
  ASSERT_EQ(p0.num.size(), 1u);
  ASSERT_EQ(p0.den.size(), 2u);
  EXPECT_DOUBLE_EQ(p0.den[1], 1.0);
  const auto p1 = pade_subdiagonal(1);
  EXPECT_NEAR(p1.num[1], -1.0 / 3.0, 1e-16);
  EXPECT_NEAR(p1.den[1], 2.0 / 3.0, 1e-16);
  EXPECT_NEAR(p1.den[2], 1.0 / 6.0, 1e-16);
  for (int q = 0; q <= 10; ++q) EXPECT_EQ(pade_subdiagonal(q)(0.0), 1.0);
  EXPECT_THROW(pade_subdiagonal(-1), std::invalid_argument);
}

TEST(Pade, TaylorMatchThroughOrder2qPlus1) {
  // den * exp(-z) - num = O(z^{2q+2}): compare series coefficients
  for (int q = 0; q <= 10; ++q) {
    const auto r = pade_subdiagonal(q);
    const int order = 2 * q + 1;
    std::vector<double> e(order + 1);
    e[0] = 1.0;
    for (int k = 1; k <= order; ++k) e[k] = -e[k - 1] / k;
    for (int k = 0; k <= order; ++k) {
      double c = 0.0;
      for (int i = 0; i <= std::min<int>(k, q + 1); ++i) c += r.den[i] * e[k - i];
      if (k <= q) c -= r.num[k];
      EXPECT_NEAR(c, 0.0, 1e-13) << "q = " << q << ", z^" << k;
    }
  }
}

TEST(Amplification, EqualsPadeOnRealGrid) {
  for (int q = 0; q <= 6; ++q) {
    const auto r = pade_subdiagonal(q);
    for (int i = 0; i <= 100; ++i) {
      const double z = double(i);
      EXPECT_NEAR(amplification(q, z), r(z), 1e-12) << "q = " << q << ", z = " << z;
    }
  }
}

TEST(Amplification, ComplexArgumentMatchesPade) {
  for (int q = 0; q <= 3; ++q) {
    const auto r = pade_subdiagonal(q);
    for (const cplx z : {cplx(1, 2), cplx(0.1, -5), cplx(20, 20), cplx(0, 7)}) {
      EXPECT_LT(std::abs(amplification(q, z) - r(z)), 1e-12);
    }
  }
}

TEST(Amplification, StrongAStability) {
  for (int q = 0; q <= 3; ++q) {
    for (double x : {1e-3, 0.5, 2.0, 30.0})
      for (double y : {-50.0, -1.0, 0.0, 3.0, 100.0}) EXPECT_LT(std::abs(amplification(q, cplx(x, y))), 1.0);
    // R(z) ~ (n_q / d_{q+1}) / z as z -> infinity
    const auto r = pade_subdiagonal(q);
    const double lead = std::abs(r.num.back() / r.den.back());
    for (double z = 1e4; z <= 1e7; z *= 10.0) EXPECT_NEAR(z * std::abs(amplification(q, z)), lead, 1e-2 * lead);
    EXPECT_LT(std::abs(amplification(q, 1e8)), 1e-7);
  }
}

TEST(Amplification, OneStepOrder) {
  // |R(tau) - e^{-tau}| / tau^{2q+2} stays bounded as tau -> 0
  for (int q = 0; q <= 2; ++q) {
    std::vector<double> scaled;
    for (double tau = 0.4; tau >= 0.05; tau /= 2) {
      scaled.push_back(std::abs(amplification(q, tau) - std::exp(-tau)) / std::pow(tau, 2 * q + 2));
    }
    const double lo = *std::min_element(scaled.begin(), scaled.end());
    const double hi = *std::max_element(scaled.begin(), scaled.end());
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi / lo, 2.0) << "q = " << q;
  }
}
