#pragma once

// dG(q) in time on top of cG(k) in space for u_t - Laplace(u) = f with
// homogeneous Dirichlet data: the triple is (M, K), A = K and F(t) is the
// load vector of f(., t).

#include "dgtime/fem/space.hpp"
#include "dgtime/partition.hpp"
#include "dgtime/quadrature.hpp"
#include "dgtime/stepper.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dgtime::fem {

using SpaceTimeField = std::function<double(const Point&, double)>;

struct HeatProblem {
  ScalarField u0;
  SpaceTimeField source;  ///< empty means f = 0
};

/// Closed-form solution data used by the error functionals.
struct ExactHeat {
  SpaceTimeField value;
  std::function<Point(const Point&, double)> grad;
  SpaceTimeField dt;
};

inline ParabolicProblem heat_problem(const HeatProblem& heat, const FeSpace& space, const AssembledOps& ops) {
  ParabolicProblem p;
  p.triple = ops.triple();
  p.op = OperatorFamily::constant(ops.stiffness, 1.0, 1.0);
  if (heat.source) {
    p.source = [&space, f = heat.source](double t) {
      return load_vector(space, [&](const Point& x) { return f(x, t); });
    };
    p.source_degree = -1;
  }
  p.u0 = heat.u0 ? l2_project(space, ops, heat.u0) : Vec(Vec::Zero(space.dim()));
  return p;
}

/// Fully discrete dG(q)cG(k) trajectory; u(0) is realized as P_h u_0.
inline DGSolution run_dg_cg(const HeatProblem& heat, const TimePartition& partition, int q, const FeSpace& space,
                            const AssembledOps& ops) {
  return solve_trajectory(heat_problem(heat, space, ops), partition, q);
}

/// Each slab split into ceil(8 tau_n / tau_min) equal pieces, so the coarse nodes are kept.
inline TimePartition refine_partition(const TimePartition& coarse, int factor = 8) {
  std::vector<double> nodes{coarse.node(0)};
  const double tau_ref = coarse.min_width() / factor;
  for (std::size_t n = 0; n < coarse.num_slabs(); ++n) {
    const int pieces = static_cast<int>(std::ceil(coarse.width(n) / tau_ref - 1e-9));
    for (int j = 1; j <= pieces; ++j) {
      nodes.push_back(j == pieces ? coarse.node(n + 1) : coarse.node(n) + coarse.width(n) * double(j) / pieces);
    }
  }
  return TimePartition(std::move(nodes));
}

/// Over-resolved time stepping used as a stand-in for the semi-discrete solution u_h:
/// dG(q+2) on the partition refined to tau_min / 8.
inline DGSolution semidiscrete_reference(const HeatProblem& heat, const TimePartition& partition, int q,
                                         const FeSpace& space, const AssembledOps& ops) {
  return run_dg_cg(heat, refine_partition(partition), q + 2, space, ops);
}

struct FemErrors {
  double nodal_l2 = 0.0;   ///< max_n ||u(t_n) - u^n||
  double l2_h1 = 0.0;      ///< ||u - u_h||_{L^2(J; H^1_0)}
  double dt_xhdual = 0.0;  ///< (sum_n int ||u' - u_h'||^2_{X_h'})^{1/2}
  double jump = 0.0;       ///< (sum_{n=1}^{N-1} tau_n ||u^{n,+} - u^n||^2)^{1/2}
};

/// Error functionals against the exact solution with (q+4)-point Gauss per slab.
inline FemErrors fem_errors(const FeSpace& space, const AssembledOps& ops, const DGSolution& sol,
                            const ExactHeat& exact) {
  const auto& part = sol.partition();
  const int q = sol.degree();
  const auto rule = gauss_rule(q + 4);
  FemErrors e;
  for (std::size_t n = 1; n <= part.num_slabs(); ++n) {
    const double t = part.node(n);
    e.nodal_l2 = std::max(e.nodal_l2, l2_error(space, sol.trace_minus[n], [&](const Point& x) { return exact.value(x, t); }));
  }
  double h1 = 0.0, dual = 0.0, jump = 0.0;
  for (std::size_t n = 0; n < part.num_slabs(); ++n) {
    const SlabPoly p = sol.u.slab(n);
    const double t0 = part.node(n), tau = part.width(n);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = t0 + tau * rule.points[g];
      const double w = tau * rule.weights[g];
      const double eh = h1_error(space, p(t), [&](const Point& x) { return exact.grad(x, t); });
      h1 += w * eh * eh;
      const Vec b = load_vector(space, [&](const Point& x) { return exact.dt(x, t); }) - ops.mass * p.derivative(t);
      dual += w * b.dot(ops.stiffness_solver.solve(b));
    }
    if (n >= 1) {
      const Vec d = sol.trace_plus[n] - sol.trace_minus[n];
      jump += tau * d.dot(ops.mass * d);
    }
  }
  e.l2_h1 = std::sqrt(h1);
  e.dt_xhdual = std::sqrt(std::max(0.0, dual));
  e.jump = std::sqrt(jump);
  return e;
}

}  // namespace dgtime::fem
