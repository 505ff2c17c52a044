#pragma once

// Slab-local operators used in the stability analysis: the zero-trace moment
// projection pi_n, the equispaced Lagrange interpolant I_n, the modified
// discrete characteristic function and the scaled trace inequality.

#include "dgtime/hilbert.hpp"
#include "dgtime/piecewise.hpp"
#include "dgtime/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dgtime {

using SlabFunction = std::function<Vec(double)>;

namespace detail {

/// Nodal values at the basis nodes of sum_l coeffs(:, l) sigma^l.
inline Mat monomials_to_nodal(const Mat& mono, const SlabBasis& basis) {
  Mat out = Mat::Zero(mono.rows(), basis.size());
  for (int j = 0; j < basis.size(); ++j) {
    const double s = basis.nodes()[j];
    double p = 1.0;
    for (Eigen::Index l = 0; l < mono.cols(); ++l, p *= s) out.col(j) += p * mono.col(l);
  }
  return out;
}

/// L^2(t0, t0+tau; U) norm squared for the metric matrix U.
inline double l2_norm2(const SlabFunction& v, double t0, double tau, const Mat& metric, int points) {
  const auto rule = gauss_rule(points);
  return rule.integrate([&](double t) { const Vec x = v(t); return x.dot(metric * x); }, t0, t0 + tau);
}

}  // namespace detail

/// pi_n v: the degree-q polynomial vanishing at t_n (right limit) whose moments
/// against (t - t_n)^l, l < q, match those of v. Solved in sigma = (t - t_n)/tau_n.
inline SlabPoly project_pi_n(const SlabFunction& v, double t0, double tau, int q, int quad_points = 0) {
  if (q < 1) throw std::invalid_argument("project_pi_n: defined only for q >= 1");
  if (quad_points <= 0) quad_points = q + 8;
  const auto rule = gauss_rule(quad_points);
  const Eigen::Index m = v(t0 + 0.5 * tau).size();
  // H(l, l') = int_0^1 sigma^{l + l'} dsigma, l = 0..q-1, l' = 1..q
  Mat h(q, q);
  for (int l = 0; l < q; ++l)
    for (int lp = 1; lp <= q; ++lp) h(l, lp - 1) = 1.0 / (l + lp + 1);
  Mat moments = Mat::Zero(q, m);
  for (std::size_t g = 0; g < rule.size(); ++g) {
    const double s = rule.points[g];
    const Vec val = v(t0 + tau * s);
    double p = 1.0;
    for (int l = 0; l < q; ++l, p *= s) moments.row(l) += rule.weights[g] * p * val.transpose();
  }
  const Mat a = h.fullPivLu().solve(moments);  // q x m, coefficients of sigma^1..sigma^q
  Mat mono = Mat::Zero(m, q + 1);
  mono.rightCols(q) = a.transpose();
  const SlabBasis basis(q);
  return SlabPoly{t0, tau, basis, detail::monomials_to_nodal(mono, basis)};
}

/// ||pi_n v||_{L^2(J_n;U)} / ||v||_{L^2(J_n;U)}
inline double pi_stability_ratio(const SlabFunction& v, double t0, double tau, int q, const Mat& metric,
                                 int quad_points = 0) {
  if (quad_points <= 0) quad_points = q + 8;
  const SlabPoly p = project_pi_n(v, t0, tau, q, quad_points);
  const double num = detail::l2_norm2([&p](double t) { return p(t); }, t0, tau, metric, quad_points);
  const double den = detail::l2_norm2(v, t0, tau, metric, quad_points);
  return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

/// Largest observed pi_n stability ratio; samples are given in the reference
/// variable sigma in (0,1] and mapped to the slab (t0, t0+tau].
inline double check_pi_stability(int q, const Mat& metric, const std::vector<SlabFunction>& reference_samples,
                                  double t0 = 0.0, double tau = 1.0) {
  if (q < 1) throw std::invalid_argument("check_pi_stability: q must be >= 1");
  double worst = 0.0;
  for (const auto& w : reference_samples) {
    SlabFunction v = [&w, t0, tau](double t) { return w((t - t0) / tau); };
    worst = std::max(worst, pi_stability_ratio(v, t0, tau, q, metric));
  }
  return worst;
}

/// I_n v: interpolation at t_n + j tau_n / q, j = 0..q. For q = 0 the constant
/// right-endpoint value.
inline SlabPoly lagrange_interp(const SlabFunction& v, double t0, double tau, int q) {
  if (q < 0) throw std::invalid_argument("lagrange_interp: q must be >= 0");
  const SlabBasis basis(q);
  if (q == 0) {
    const Vec r = v(t0 + tau);
    return SlabPoly{t0, tau, basis, r};
  }
  std::vector<double> eq(q + 1);
  for (int j = 0; j <= q; ++j) eq[j] = double(j) / q;
  const SlabBasis equi(q, eq);
  const Vec probe = v(t0);
  Mat vals(probe.size(), q + 1);
  for (int j = 0; j <= q; ++j) vals.col(j) = v(t0 + tau * eq[j]);
  Mat nodal(probe.size(), q + 1);
  for (int j = 0; j <= q; ++j) nodal.col(j) = vals * equi.values(basis.nodes()[j]);
  return SlabPoly{t0, tau, basis, nodal};
}

struct DiscreteCharacteristic {
  SlabPoly value;
  double stability_ratio = 0.0;  ///< ||v_hat||_{L^2(J_n;U)} / ||v_tilde||_{L^2(J_n;U)}
};

/// v_hat of degree q with v_hat(t_{n+1}) = v_tilde(t_{n+1}) and
/// int_{J_n} (v_hat, chi)_U dt = int_{t_n}^{s} (v_tilde, chi)_U dt for chi of degree <= q-1.
/// Both conditions act componentwise, so the metric only enters the stability ratio.
inline DiscreteCharacteristic discrete_characteristic(const SlabPoly& v_tilde, double s, const Mat& metric) {
  const int q = v_tilde.basis.degree();
  if (q < 1) throw std::invalid_argument("discrete_characteristic: q must be >= 1");
  const double t0 = v_tilde.t0, tau = v_tilde.tau;
  if (s < t0 || s > t0 + tau) throw std::invalid_argument("discrete_characteristic: s outside the slab");
  const Eigen::Index m = v_tilde.coeffs.rows();
  const double sigma_s = (s - t0) / tau;

  Mat sys = Mat::Zero(q + 1, q + 1);
  Mat rhs = Mat::Zero(q + 1, m);
  sys.row(0).setOnes();
  rhs.row(0) = v_tilde.right().transpose();
  for (int l = 0; l < q; ++l)
    for (int k = 0; k <= q; ++k) sys(l + 1, k) = 1.0 / (k + l + 1);
  if (sigma_s > 0.0) {
    const auto rule = gauss_rule(q + 1);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double x = sigma_s * rule.points[g];
      const Vec val = v_tilde(t0 + tau * x);
      double p = 1.0;
      for (int l = 0; l < q; ++l, p *= x) rhs.row(l + 1) += sigma_s * rule.weights[g] * p * val.transpose();
    }
  }
  Eigen::FullPivLU<Mat> lu(sys);
  if (!lu.isInvertible()) throw std::logic_error("discrete_characteristic: singular defining system");
  const Mat b = lu.solve(rhs);  // (q+1) x m monomial coefficients
  DiscreteCharacteristic out{SlabPoly{t0, tau, v_tilde.basis, detail::monomials_to_nodal(b.transpose(), v_tilde.basis)},
                             0.0};
  const int pts = q + 2;
  const double den = detail::l2_norm2([&v_tilde](double t) { return v_tilde(t); }, t0, tau, metric, pts);
  const double num = detail::l2_norm2([&out](double t) { return out.value(t); }, t0, tau, metric, pts);
  out.stability_ratio = den == 0.0 ? 0.0 : std::sqrt(num / den);
  return out;
}

/// max_t ||v(t)||_H / [tau^{-1/2} (||v||^2_{L^2(J_n;V)} + tau^2 ||v'||^2_{L^2(J_n;V')})^{1/2}].
/// The maximum is taken over a fixed reference grid, so the ratio is exactly
/// invariant under affine rescaling of the slab. Returns 0 for v = 0.
inline double check_trace_inequality(const SlabFunction& v, const SlabFunction& dv, double t0, double tau,
                                     const HilbertTriple& triple, int quad_points = 12, int grid = 1000) {
  const auto rule = gauss_rule(quad_points);
  const double lv = rule.integrate([&](double t) { return triple.v_norm2(v(t)); }, t0, t0 + tau);
  const double ld = rule.integrate([&](double t) { return triple.embedded_vdual_norm2(dv(t)); }, t0, t0 + tau);
  double peak = 0.0;
  for (int i = 0; i <= grid; ++i) peak = std::max(peak, triple.h_norm(v(t0 + tau * double(i) / grid)));
  const double bound = std::sqrt((lv + tau * tau * ld) / tau);
  if (bound == 0.0) return 0.0;
  return peak / bound;
}

}  // namespace dgtime
