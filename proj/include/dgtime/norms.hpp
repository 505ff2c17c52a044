#pragma once

// The DG norm family on S_tau. Each norm is one of four functionals
//   nu    : int(||v'||_{V'}^2 + ||v||_V^2) + ||v^{0,+}||^2 + sum_{n>=1} k_n ||v^{n,+} - v^n||^2
//   eta   : int ||v||_V^2                  + ||v^{0,+}||^2 + sum_{n>=1} k_n ||v^{n,+}||^2
//   nu*   : int(||v'||_{V'}^2 + ||v||_V^2) + ||v^N||^2     + sum_{n>=1} k_n ||v^{n,+} - v^n||^2
//   eta*  : int ||v||_V^2                  + ||v^N||^2     + sum_{n>=1} k_n ||v^n||^2
// with weights k_n in {1, tau_n^{-1}, tau_n}. eta* is the mirror image of eta
// and weighs the left traces v^n, which are what B_tau pairs with in its
// integrated-by-parts form.

#include "dgtime/hilbert.hpp"
#include "dgtime/piecewise.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dgtime {

enum class Functional { nu, eta, nu_star, eta_star };
enum class Weights { ones, inv_tau, tau };

enum class NormKind {
  X,           ///< nu,   k_n = 1
  X_sharp,     ///< nu,   k_n = 1/tau_n
  Y,           ///< eta,  k_n = 1
  Y_hash,      ///< eta,  k_n = tau_n
  Xstar,       ///< nu*,  k_n = 1
  Xstar_sharp, ///< nu*,  k_n = 1/tau_n
  Ystar,       ///< eta*, k_n = 1
  Ystar_hash,  ///< eta*, k_n = tau_n
};

inline constexpr std::array<NormKind, 8> kAllNormKinds{
    NormKind::X,     NormKind::X_sharp,     NormKind::Y,     NormKind::Y_hash,
    NormKind::Xstar, NormKind::Xstar_sharp, NormKind::Ystar, NormKind::Ystar_hash};

struct NormSpec {
  Functional functional;
  Weights weights;
};

constexpr NormSpec norm_spec(NormKind kind) {
  switch (kind) {
    case NormKind::X: return {Functional::nu, Weights::ones};
    case NormKind::X_sharp: return {Functional::nu, Weights::inv_tau};
    case NormKind::Y: return {Functional::eta, Weights::ones};
    case NormKind::Y_hash: return {Functional::eta, Weights::tau};
    case NormKind::Xstar: return {Functional::nu_star, Weights::ones};
    case NormKind::Xstar_sharp: return {Functional::nu_star, Weights::inv_tau};
    case NormKind::Ystar: return {Functional::eta_star, Weights::ones};
    case NormKind::Ystar_hash: return {Functional::eta_star, Weights::tau};
  }
  return {Functional::nu, Weights::ones};
}

constexpr std::string_view norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::X: return "X,tau";
    case NormKind::X_sharp: return "X,tau,sharp";
    case NormKind::Y: return "Y,tau";
    case NormKind::Y_hash: return "Y,tau,#";
    case NormKind::Xstar: return "X*,tau";
    case NormKind::Xstar_sharp: return "X*,tau,sharp";
    case NormKind::Ystar: return "Y*,tau";
    case NormKind::Ystar_hash: return "Y*,tau,#";
  }
  return "?";
}

constexpr bool has_derivative_term(Functional f) { return f == Functional::nu || f == Functional::nu_star; }
constexpr bool has_initial_trace(Functional f) { return f == Functional::nu || f == Functional::eta; }
constexpr bool has_jump_term(Functional f) { return f == Functional::nu || f == Functional::nu_star; }

inline double node_weight(Weights w, double tau_n) {
  switch (w) {
    case Weights::ones: return 1.0;
    case Weights::inv_tau: return 1.0 / tau_n;
    case Weights::tau: return tau_n;
  }
  return 1.0;
}

/// Squared DG norm. The weight k_n at node t_n uses tau_n = t_{n+1} - t_n.
inline double dg_norm2(const PiecewisePoly& v, const HilbertTriple& triple, NormKind kind,
                       const TimePartition& partition) {
  if (v.partition().nodes() != partition.nodes()) throw std::invalid_argument("dg_norm: mismatched partition");
  if (v.dim() != triple.dim()) throw std::invalid_argument("dg_norm: dimension mismatch");
  const auto ns = norm_spec(kind);
  const auto rule = gauss_rule(v.degree() + 1);  // ||v||_V^2 has degree 2q
  const std::size_t N = partition.num_slabs();
  double sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const SlabPoly p = v.slab(n);
    const double a = partition.node(n), b = partition.node(n + 1);
    sum += rule.integrate([&](double t) { return triple.v_norm2(p(t)); }, a, b);
    if (has_derivative_term(ns.functional) && v.degree() > 0) {
      sum += rule.integrate([&](double t) { return triple.embedded_vdual_norm2(p.derivative(t)); }, a, b);
    }
  }
  if (has_initial_trace(ns.functional)) {
    sum += triple.h_norm2(v.trace_plus(0));
  } else {
    sum += triple.h_norm2(v.trace_minus(N));
  }
  for (std::size_t n = 1; n < N; ++n) {
    const double k = node_weight(ns.weights, partition.width(n));
    Vec node_term;
    if (has_jump_term(ns.functional)) {
      node_term = v.trace_plus(n) - v.trace_minus(n);
    } else {
      node_term = has_initial_trace(ns.functional) ? v.trace_plus(n) : v.trace_minus(n);
    }
    sum += k * triple.h_norm2(node_term);
  }
  return sum;
}

inline double dg_norm(const PiecewisePoly& v, const HilbertTriple& triple, NormKind kind,
                      const TimePartition& partition) {
  return std::sqrt(std::max(0.0, dg_norm2(v, triple, kind, partition)));
}

}  // namespace dgtime
