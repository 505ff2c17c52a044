#pragma once

// Gauss-Legendre and right Gauss-Radau rules on the reference interval (0,1).

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dgtime {

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness = 0;  ///< highest monomial degree integrated exactly

  [[nodiscard]] std::size_t size() const { return points.size(); }

  /// Integrates f over (a, b) by affine mapping of the reference rule.
  template <class F>
  [[nodiscard]] auto integrate(F&& f, double a = 0.0, double b = 1.0) const {
    const double len = b - a;
    auto acc = f(a + len * points[0]);
    acc *= weights[0] * len;
    for (std::size_t i = 1; i < points.size(); ++i) {
      acc += f(a + len * points[i]) * (weights[i] * len);
    }
    return acc;
  }
};

namespace detail {

/// Legendre P_n(x) and P_{n-1}(x) on [-1,1] by the three-term recurrence.
inline std::pair<double, double> legendre_pair(int n, double x) {
  double p_prev = 1.0;  // P_0
  if (n == 0) return {1.0, 0.0};
  double p = x;  // P_1
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
    p_prev = p;
    p = next;
  }
  return {p, p_prev};
}

/// P_n'(x) from P_n, P_{n-1}; valid for |x| < 1.
inline double legendre_derivative(int n, double x, double pn, double pn1) {
  return n * (x * pn - pn1) / (x * x - 1.0);
}

}  // namespace detail

/// Gauss-Legendre rule with `points` nodes, exact to degree 2*points-1.
inline QuadratureRule gauss_rule(int points) {
  if (points < 1) throw std::invalid_argument("gauss_rule: points must be >= 1");
  const int n = points;
  QuadratureRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [pn, pn1] = detail::legendre_pair(n, x);
      const double dp = detail::legendre_derivative(n, x, pn, pn1);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [pn, pn1] = detail::legendre_pair(n, x);
    const double dp = detail::legendre_derivative(n, x, pn, pn1);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order on (0,1)
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

/// Right Gauss-Radau rule with `points` nodes on (0,1]; the last node is 1.
/// Exact to degree 2*points-2.
inline QuadratureRule radau_right_rule(int points) {
  if (points < 1) throw std::invalid_argument("radau_right_rule: points must be >= 1");
  const int n = points;
  QuadratureRule rule;
  rule.exactness = 2 * n - 2;
  if (n == 1) {
    rule.points = {1.0};
    rule.weights = {1.0};
    return rule;
  }
  // Golub's modification of the Legendre Jacobi matrix prescribing the node +1.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  auto beta = [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); };
  for (int k = 1; k < n; ++k) {
    jac(k - 1, k) = jac(k, k - 1) = beta(k);
  }
  Eigen::MatrixXd shifted = jac.topLeftCorner(n - 1, n - 1) - Eigen::MatrixXd::Identity(n - 1, n - 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
  rhs(n - 2) = beta(n - 1) * beta(n - 1);
  const Eigen::VectorXd delta = shifted.partialPivLu().solve(rhs);
  jac(n - 1, n - 1) = 1.0 + delta(n - 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac, Eigen::EigenvaluesOnly);

  std::vector<double> xs(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  xs.back() = 1.0;
  // Newton polish on P_n - P_{n-1}, whose roots are the Radau nodes.
  for (int i = 0; i < n - 1; ++i) {
    double x = xs[i];
    for (int it = 0; it < 50; ++it) {
      auto [pn, pn1] = detail::legendre_pair(n, x);
      const double f = pn - pn1;
      const double df = detail::legendre_derivative(n, x, pn, pn1) -
                        detail::legendre_derivative(n - 1, x, pn1, detail::legendre_pair(n - 1, x).second);
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    xs[i] = x;
  }
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = xs[i];
    double w;
    if (i == n - 1) {
      w = 2.0 / (double(n) * n);
    } else {
      const double pn1 = detail::legendre_pair(n - 1, x).first;
      w = (1.0 + x) / (double(n) * n * pn1 * pn1);
    }
    rule.points[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 0.5 * w;
  }
  return rule;
}

/// Number of Gauss points integrating a polynomial of `degree` exactly.
inline int gauss_points_for_degree(int degree) { return degree < 0 ? 1 : degree / 2 + 1; }

}  // namespace dgtime
