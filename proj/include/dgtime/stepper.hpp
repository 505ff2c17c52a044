#pragma once

// dG(q) time stepping: slab-local assembly and sequential solution.
//
// Each slab n solves, for all test polynomials v of degree <= q,
//   int_{J_n} [(u', v)_H + <A(t)u, v>] dt + (u^{n,+}, v^{n,+})_H
//     = int_{J_n} <F, v> dt + (u^n, v^{n,+})_H,
// with u^0 = u_0. The jump coupling only reaches backwards in time, so the
// global system is block lower triangular and slab-sequential solving is exact.

#include "dgtime/hilbert.hpp"
#include "dgtime/piecewise.hpp"
#include "dgtime/quadrature.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

namespace detail {

/// Adds kron(coeff, block) into triplets at the given offsets.
inline void kron_add(std::vector<Eigen::Triplet<double>>& trip, const Mat& coeff, const SpMat& block,
                     Eigen::Index row0 = 0, Eigen::Index col0 = 0) {
  const Eigen::Index m = block.rows();
  for (Eigen::Index i = 0; i < coeff.rows(); ++i) {
    for (Eigen::Index j = 0; j < coeff.cols(); ++j) {
      const double c = coeff(i, j);
      if (c == 0.0) continue;
      for (int k = 0; k < block.outerSize(); ++k) {
        for (SpMat::InnerIterator it(block, k); it; ++it) {
          trip.emplace_back(row0 + i * m + it.row(), col0 + j * m + it.col(), c * it.value());
        }
      }
    }
  }
}

}  // namespace detail

/// Dense LU up to this size, sparse LU beyond.
inline constexpr Eigen::Index kDenseSlabLimit = 3000;

struct SlabSystem {
  SpMat matrix;  ///< m(q+1) x m(q+1), rows = test functions
  Vec rhs;
  Vec u_in;
};

/// Slab time integrals of the bilinear form, without the incoming trace.
inline SpMat assemble_slab_matrix(const ParabolicProblem& problem, const TimePartition& partition,
                                  const SlabBasis& basis, std::size_t n) {
  const int m = problem.dim();
  const int nb = basis.size();
  const double t0 = partition.node(n);
  const double tau = partition.width(n);
  const auto& mh = problem.triple.mass_h();
  std::vector<Eigen::Triplet<double>> trip;

  // (u', v)_H: tau cancels between dt and d/dt
  Mat time_part = basis.advection() + basis.at_left() * basis.at_left().transpose();
  detail::kron_add(trip, time_part, mh);

  const auto rule = gauss_rule(problem.quadrature_points(basis.degree()));
  if (problem.op.is_constant()) {
    detail::kron_add(trip, tau * basis.mass(), problem.op.at(t0));
  } else {
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Vec l = basis.values(rule.points[g]);
      detail::kron_add(trip, (tau * rule.weights[g]) * (l * l.transpose()),
                       problem.op.at(t0 + tau * rule.points[g]));
    }
  }
  SpMat mat(static_cast<Eigen::Index>(m) * nb, static_cast<Eigen::Index>(m) * nb);
  mat.setFromTriplets(trip.begin(), trip.end());
  return mat;
}

/// int_{J_n} <F, L_i> dt + L_i(0) M_H u_in, stacked by basis node.
inline Vec assemble_slab_rhs(const ParabolicProblem& problem, const TimePartition& partition,
                             const SlabBasis& basis, std::size_t n, const Vec& u_in) {
  const int m = problem.dim();
  const int nb = basis.size();
  if (u_in.size() != m) throw std::invalid_argument("assemble_slab: incoming trace dimension mismatch");
  const double t0 = partition.node(n);
  const double tau = partition.width(n);
  Vec rhs = Vec::Zero(static_cast<Eigen::Index>(m) * nb);
  if (problem.source) {
    const auto rule = gauss_rule(problem.quadrature_points(basis.degree()));
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Vec f = problem.source(t0 + tau * rule.points[g]);
      const Vec l = basis.values(rule.points[g]);
      for (int i = 0; i < nb; ++i) rhs.segment(i * m, m) += (tau * rule.weights[g] * l(i)) * f;
    }
  }
  const Vec mu = problem.triple.mass_h() * u_in;
  for (int i = 0; i < nb; ++i) rhs.segment(i * m, m) += basis.at_left()(i) * mu;
  return rhs;
}

inline SlabSystem assemble_slab(const ParabolicProblem& problem, const TimePartition& partition, int q,
                                std::size_t n, const Vec& u_in) {
  if (n >= partition.num_slabs()) throw std::out_of_range("assemble_slab: slab index out of range");
  const SlabBasis basis(q);
  return {assemble_slab_matrix(problem, partition, basis, n),
          assemble_slab_rhs(problem, partition, basis, n, u_in), u_in};
}

/// Factorized slab operator; dense or sparse LU by size.
class SlabSolver {
 public:
  explicit SlabSolver(const SpMat& a) {
    if (a.rows() <= kDenseSlabLimit) {
      dense_ = std::make_unique<Eigen::PartialPivLU<Mat>>(Mat(a));
      const double rcond = dense_->rcond();
      if (!(rcond > 1e-14)) throw std::runtime_error("singular slab system (rcond " + std::to_string(rcond) + ")");
    } else {
      sparse_ = std::make_unique<Eigen::SparseLU<SpMat>>();
      sparse_->analyzePattern(a);
      sparse_->factorize(a);
      if (sparse_->info() != Eigen::Success) throw std::runtime_error("singular slab system (sparse LU failed)");
    }
  }
  [[nodiscard]] Vec solve(const Vec& b) const { return dense_ ? Vec(dense_->solve(b)) : Vec(sparse_->solve(b)); }

 private:
  std::unique_ptr<Eigen::PartialPivLU<Mat>> dense_;
  std::unique_ptr<Eigen::SparseLU<SpMat>> sparse_;
};

inline Vec solve_slab(const SlabSystem& sys) { return SlabSolver(sys.matrix).solve(sys.rhs); }

/// Relative residual ||A x - b|| / max(||b||, ||A|| ||x||).
inline double slab_residual(const SlabSystem& sys, const Vec& x) {
  const double scale = std::max(sys.rhs.norm(), sys.matrix.norm() * x.norm());
  return scale == 0.0 ? 0.0 : (sys.matrix * x - sys.rhs).norm() / scale;
}

/// Discrete trajectory u_tau with its node traces.
struct DGSolution {
  PiecewisePoly u;
  std::vector<Vec> trace_plus;   ///< u^{n,+}, n = 0..N-1
  std::vector<Vec> trace_minus;  ///< u^n, n = 0..N with u^0 = u_0

  [[nodiscard]] const TimePartition& partition() const { return u.partition(); }
  [[nodiscard]] int degree() const { return u.degree(); }
  [[nodiscard]] int dim() const { return u.dim(); }
};

inline DGSolution solve_trajectory(const ParabolicProblem& problem, const TimePartition& partition, int q) {
  problem.validate();
  if (q < 0) throw std::invalid_argument("solve_trajectory: q must be >= 0");
  const int m = problem.dim();
  const SlabBasis basis(q);
  DGSolution sol{PiecewisePoly(partition, q, m), {}, {problem.u0}};
  std::optional<SlabSolver> cached;
  double cached_tau = -1.0;
  Vec u_in = problem.u0;
  for (std::size_t n = 0; n < partition.num_slabs(); ++n) {
    const double tau = partition.width(n);
    // constant A on equal widths gives the same slab operator
    const bool reuse = cached && problem.op.is_constant() && std::abs(tau - cached_tau) <= 1e-14 * tau;
    if (!reuse) {
      try {
        cached.emplace(assemble_slab_matrix(problem, partition, basis, n));
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("solve_trajectory: slab " + std::to_string(n) + ": " + e.what());
      }
      cached_tau = tau;
    }
    const Vec x = cached->solve(assemble_slab_rhs(problem, partition, basis, n, u_in));
    sol.u.slab_coeffs(n) = Eigen::Map<const Mat>(x.data(), m, q + 1);
    sol.trace_plus.push_back(sol.u.trace_plus(n));
    u_in = sol.u.trace_minus(n + 1);
    sol.trace_minus.push_back(u_in);
  }
  return sol;
}

/// The degree-q reconstruction of the time derivative: per slab,
///   int (D u, v)_H dt = int (u', v)_H dt + (u^{n,+} - u^n, v^{n,+})_H,  u^0 = u_0.
/// M_H appears on both sides and cancels, leaving a (q+1)x(q+1) mass solve.
inline PiecewisePoly reconstruct_derivative(const DGSolution& sol, const Vec& u0) {
  const auto& basis = sol.u.basis();
  const auto& part = sol.partition();
  PiecewisePoly out(part, sol.degree(), sol.dim());
  Eigen::LLT<Mat> mass(basis.mass());
  if (mass.info() != Eigen::Success) throw std::logic_error("reconstruct_derivative: singular local mass");
  for (std::size_t n = 0; n < part.num_slabs(); ++n) {
    const Mat& c = sol.u.slab_coeffs(n);
    const Vec jump = sol.u.trace_plus(n) - (n == 0 ? u0 : sol.u.trace_minus(n));
    // rhs(:, i) = sum_j adv(i, j) c(:, j) + L_i(0) jump
    Mat rhs = c * basis.advection().transpose() + jump * basis.at_left().transpose();
    // W * (tau * mass)^T = rhs
    Mat w = mass.solve(rhs.transpose()).transpose() / part.width(n);
    out.slab_coeffs(n) = w;
  }
  return out;
}

/// Node values u^1..u^N of the backward Euler recursion with slab-averaged data
/// (M_H + tau A_n) u^{n+1} = M_H u^n + tau F_n; used as a reference for dG(0).
inline std::vector<Vec> backward_euler_averaged(const ParabolicProblem& problem, const TimePartition& partition,
                                                int avg_points = 8) {
  const auto rule = gauss_rule(avg_points);
  std::vector<Vec> out;
  Vec u = problem.u0;
  const Mat mh = Mat(problem.triple.mass_h());
  for (std::size_t n = 0; n < partition.num_slabs(); ++n) {
    const double t0 = partition.node(n), tau = partition.width(n);
    Mat a_avg = Mat::Zero(problem.dim(), problem.dim());
    Vec f_avg = Vec::Zero(problem.dim());
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = t0 + tau * rule.points[g];
      a_avg += rule.weights[g] * Mat(problem.op.at(t));
      f_avg += rule.weights[g] * problem.source_at(t);
    }
    u = (mh + tau * a_avg).partialPivLu().solve(mh * u + tau * f_avg);
    out.push_back(u);
  }
  return out;
}

}  // namespace dgtime
