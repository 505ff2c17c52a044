#include "dgtime/infsup.hpp"
#include "dgtime/norms.hpp"

#include "problems.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dgtime;
using namespace dgtime::testing;

namespace {

PiecewisePoly random_poly(const TimePartition& part, int q, int m, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vec flat(static_cast<Eigen::Index>(part.num_slabs()) * (q + 1) * m);
  for (auto& x : flat) x = g(rng);
  return PiecewisePoly::unflatten(part, q, m, flat);
}

PiecewisePoly constant(const TimePartition& part, int q, double w) {
  return PiecewisePoly::interpolate(part, q, [w](double) { return Vec::Constant(1, w); });
}

}  // namespace

TEST(DgNorm, ZeroForAllKinds) {
  const HilbertTriple tr(scalar_mat(1), scalar_mat(1));
  const auto part = make_partition(1.0, 3);
  const PiecewisePoly zero(part, 2, 1);
  for (NormKind k : kAllNormKinds) EXPECT_EQ(dg_norm(zero, tr, k, part), 0.0);
}

TEST(DgNorm, HandValuesSingleSlab) {
  const HilbertTriple tr(scalar_mat(1), scalar_mat(1));
  const auto part = make_partition(1.0, 1);
  const double w = 1.7;
  const auto v = constant(part, 2, w);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::X, part), 2 * w * w, 1e-13);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Y_hash, part), 2 * w * w, 1e-13);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Y, part), 2 * w * w, 1e-13);
}

TEST(DgNorm, JumpTermsAndWeights) {
  // slab 0 constant 1, slab 1 constant 3 on nodes {0, 0.5, 1}
  const HilbertTriple tr(scalar_mat(1), scalar_mat(1));
  const TimePartition part({0.0, 0.5, 1.0});
  const auto v = PiecewisePoly::interpolate(part, 0, [](double t) { return Vec::Constant(1, t <= 0.5 ? 1.0 : 3.0); });
  const double l2 = 0.5 * 1 + 0.5 * 9;
  // nu: int ||v||_V^2 + ||v^{0,+}||^2 + sum_{n>=1} k_n ||jump||^2  (derivative vanishes)
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::X, part), l2 + 1 + 4, 1e-13);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::X_sharp, part), l2 + 1 + 4 / 0.5, 1e-13);
  // eta: int ||v||_V^2 + ||v^{0,+}||^2 + sum_{n>=1} k_n ||v^{n,+}||^2
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Y, part), l2 + 1 + 9, 1e-13);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Y_hash, part), l2 + 1 + 0.5 * 9, 1e-13);
  // eta*: int ||v||_V^2 + ||v^N||^2 + sum_{n>=1} k_n ||v^n||^2
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Ystar, part), l2 + 9 + 1, 1e-13);
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Ystar_hash, part), l2 + 9 + 0.5 * 1, 1e-13);
  // nu*: int ||v||_V^2 + ||v^N||^2 + sum_{n>=1} k_n ||jump||^2
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::Xstar, part), l2 + 9 + 4, 1e-13);
}

TEST(DgNorm, PositiveHomogeneousTriangle) {
  std::mt19937 rng(4);
  const int m = 3, q = 2;
  const HilbertTriple tr(random_spd(m, rng), random_spd(m, rng));
  const auto part = make_partition(1.0, 4, 1.3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_poly(part, q, m, rng);
    const auto b = random_poly(part, q, m, rng);
    const auto sum = PiecewisePoly::unflatten(part, q, m, a.flatten() + b.flatten());
    const auto scaled = PiecewisePoly::unflatten(part, q, m, -2.5 * a.flatten());
    for (NormKind k : kAllNormKinds) {
      const double na = dg_norm(a, tr, k, part), nb = dg_norm(b, tr, k, part);
      EXPECT_GT(na, 0.0);
      EXPECT_NEAR(dg_norm(scaled, tr, k, part), 2.5 * na, 1e-10 * na);
      EXPECT_LE(dg_norm(sum, tr, k, part), na + nb + 1e-10);
    }
  }
}

TEST(DgNorm, OrderingForShortSlabs) {
  std::mt19937 rng(6);
  const int m = 2, q = 1;
  const HilbertTriple tr(random_spd(m, rng), random_spd(m, rng));
  const auto part = make_partition(2.0, 5, 0.8);
  ASSERT_LE(part.max_width(), 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_poly(part, q, m, rng);
    EXPECT_LE(dg_norm(v, tr, NormKind::X, part), dg_norm(v, tr, NormKind::X_sharp, part) + 1e-12);
    EXPECT_LE(dg_norm(v, tr, NormKind::Y_hash, part), dg_norm(v, tr, NormKind::Y, part) + 1e-12);
    EXPECT_LE(dg_norm(v, tr, NormKind::Xstar, part), dg_norm(v, tr, NormKind::Xstar_sharp, part) + 1e-12);
    EXPECT_LE(dg_norm(v, tr, NormKind::Ystar_hash, part), dg_norm(v, tr, NormKind::Ystar, part) + 1e-12);
  }
}

TEST(DgNorm, GramMatrixAgrees) {
  std::mt19937 rng(7);
  const int m = 2;
  const HilbertTriple tr(random_spd(m, rng), random_spd(m, rng));
  const auto part = make_partition(1.0, 3, 1.5);
  for (int q : {0, 1, 3}) {
    for (NormKind k : kAllNormKinds) {
      const Mat g = gram_matrix(tr, part, q, k);
      EXPECT_LE((g - g.transpose()).norm(), 1e-12 * g.norm());
      EXPECT_EQ(Eigen::LLT<Mat>(g).info(), Eigen::Success) << norm_name(k);
      for (int trial = 0; trial < 5; ++trial) {
        const auto v = random_poly(part, q, m, rng);
        const Vec x = v.flatten();
        const double n2 = dg_norm2(v, tr, k, part);
        EXPECT_NEAR(x.dot(g * x), n2, 1e-11 * n2) << norm_name(k) << ", q = " << q;
      }
    }
  }
}

TEST(DgNorm, DerivativeTermUsesVdualOfHElement) {
  // M_H = 2, K_V = 8: v(t) = t on (0,1], ||v'||_{V'}^2 = (2*1)^2 / 8 = 0.5
  const HilbertTriple tr(scalar_mat(2), scalar_mat(8));
  const auto part = make_partition(1.0, 1);
  const auto v = PiecewisePoly::interpolate(part, 1, [](double t) { return Vec::Constant(1, t); });
  // nu = int 8 t^2 + 0.5 + ||v^{0,+}||_H^2 (= 0)
  EXPECT_NEAR(dg_norm2(v, tr, NormKind::X, part), 8.0 / 3.0 + 0.5, 1e-13);
}

TEST(DgNorm, PartitionMismatch) {
  const HilbertTriple tr(scalar_mat(1), scalar_mat(1));
  const auto v = constant(make_partition(1.0, 2), 0, 1.0);
  EXPECT_THROW(dg_norm(v, tr, NormKind::X, make_partition(1.0, 3)), std::invalid_argument);
}
