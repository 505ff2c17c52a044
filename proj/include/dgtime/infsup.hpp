#pragma once

// Matrices of B_tau and of the DG norms on the nodal basis of S_tau, and the
// discrete inf-sup / boundedness constants as extreme generalized eigenvalues.
//
// Basis enumeration: slab-major, then basis node, then component. B(i, j) is
// B_tau(phi_j, phi_i), so rows index test functions and columns trial functions.

#include "dgtime/hilbert.hpp"
#include "dgtime/norms.hpp"
#include "dgtime/parallel.hpp"
#include "dgtime/piecewise.hpp"
#include "dgtime/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

inline constexpr Eigen::Index kEigenDimensionCap = 2000;

namespace detail {

inline void kron_add_dense(Mat& target, const Mat& coeff, const Mat& block, Eigen::Index row0, Eigen::Index col0) {
  const Eigen::Index m = block.rows();
  for (Eigen::Index i = 0; i < coeff.rows(); ++i)
    for (Eigen::Index j = 0; j < coeff.cols(); ++j)
      if (coeff(i, j) != 0.0) target.block(row0 + i * m, col0 + j * m, m, m) += coeff(i, j) * block;
}

struct SpaceLayout {
  std::size_t slabs;
  int nb;
  int m;
  [[nodiscard]] Eigen::Index block() const { return static_cast<Eigen::Index>(nb) * m; }
  [[nodiscard]] Eigen::Index offset(std::size_t n) const { return static_cast<Eigen::Index>(n) * block(); }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(slabs) * block(); }
};

inline SpaceLayout checked_layout(const TimePartition& partition, int q, int m) {
  SpaceLayout lay{partition.num_slabs(), q + 1, m};
  if (lay.size() > kEigenDimensionCap) {
    throw std::length_error("S_tau dimension " + std::to_string(lay.size()) + " exceeds the eigensolver cap " +
                            std::to_string(kEigenDimensionCap));
  }
  return lay;
}

/// tau * sum_g w_g L(s_g) L(s_g)^T (x) A(t_g) for one slab.
inline Mat slab_operator_block(const ParabolicProblem& problem, const SlabBasis& basis, double t0, double tau) {
  const int m = problem.dim();
  Mat out = Mat::Zero(static_cast<Eigen::Index>(basis.size()) * m, static_cast<Eigen::Index>(basis.size()) * m);
  const auto rule = gauss_rule(problem.quadrature_points(basis.degree()));
  for (std::size_t g = 0; g < rule.size(); ++g) {
    const Vec l = basis.values(rule.points[g]);
    kron_add_dense(out, (tau * rule.weights[g]) * (l * l.transpose()), Mat(problem.op.at(t0 + tau * rule.points[g])),
                   0, 0);
  }
  return out;
}

}  // namespace detail

struct BilinearMatrix {
  Mat matrix;
  int degree = 0;
  int dim = 0;
  std::size_t slabs = 0;
};

/// B_tau from  sum int [(w', v) + <A w, v>] + (w^{0,+}, v^{0,+}) + sum_{n>=1} (w^{n,+} - w^n, v^{n,+}).
inline BilinearMatrix assemble_btau(const ParabolicProblem& problem, const TimePartition& partition, int q) {
  const auto lay = detail::checked_layout(partition, q, problem.dim());
  const SlabBasis basis(q);
  const Mat mh = Mat(problem.triple.mass_h());
  BilinearMatrix b{Mat::Zero(lay.size(), lay.size()), q, lay.m, lay.slabs};
  const Mat diag_time = basis.advection() + basis.at_left() * basis.at_left().transpose();
  const Mat coupling = -basis.at_left() * basis.at_right().transpose();
  for (std::size_t n = 0; n < lay.slabs; ++n) {
    const Eigen::Index o = lay.offset(n);
    detail::kron_add_dense(b.matrix, diag_time, mh, o, o);
    b.matrix.block(o, o, lay.block(), lay.block()) +=
        detail::slab_operator_block(problem, basis, partition.node(n), partition.width(n));
    if (n > 0) detail::kron_add_dense(b.matrix, coupling, mh, o, lay.offset(n - 1));
  }
  return b;
}

/// B_tau from the integrated-by-parts form
///   sum int [-(w, v') + <A w, v>] + (w^N, v^N) + sum_{n>=1} (w^n, v^n - v^{n,+}).
inline BilinearMatrix assemble_btau_alternate(const ParabolicProblem& problem, const TimePartition& partition, int q) {
  const auto lay = detail::checked_layout(partition, q, problem.dim());
  const SlabBasis basis(q);
  const Mat mh = Mat(problem.triple.mass_h());
  BilinearMatrix b{Mat::Zero(lay.size(), lay.size()), q, lay.m, lay.slabs};
  const Mat right_right = basis.at_right() * basis.at_right().transpose();
  const Mat coupling = -basis.at_left() * basis.at_right().transpose();
  for (std::size_t n = 0; n < lay.slabs; ++n) {
    const Eigen::Index o = lay.offset(n);
    detail::kron_add_dense(b.matrix, Mat(-basis.advection().transpose()), mh, o, o);
    // (w^{n+1}, v^{n+1}) for n+1 = 1..N
    detail::kron_add_dense(b.matrix, right_right, mh, o, o);
    b.matrix.block(o, o, lay.block(), lay.block()) +=
        detail::slab_operator_block(problem, basis, partition.node(n), partition.width(n));
    if (n > 0) detail::kron_add_dense(b.matrix, coupling, mh, o, lay.offset(n - 1));
  }
  return b;
}

/// Load vector int <F, phi_i> dt + (u_0, phi_i^{0,+}) on the same basis.
inline Vec assemble_load(const ParabolicProblem& problem, const TimePartition& partition, int q) {
  const auto lay = detail::checked_layout(partition, q, problem.dim());
  const SlabBasis basis(q);
  const auto rule = gauss_rule(problem.quadrature_points(q));
  Vec load = Vec::Zero(lay.size());
  for (std::size_t n = 0; n < lay.slabs; ++n) {
    const double t0 = partition.node(n), tau = partition.width(n);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Vec f = problem.source_at(t0 + tau * rule.points[g]);
      const Vec l = basis.values(rule.points[g]);
      for (int i = 0; i < lay.nb; ++i) load.segment(lay.offset(n) + i * lay.m, lay.m) += tau * rule.weights[g] * l(i) * f;
    }
  }
  const Vec mu = problem.triple.mass_h() * problem.u0;
  for (int i = 0; i < lay.nb; ++i) load.segment(i * lay.m, lay.m) += basis.at_left()(i) * mu;
  return load;
}

/// Gram matrix G with v^T G v = dg_norm(v)^2 for the flattened coefficients of v.
inline Mat gram_matrix(const HilbertTriple& triple, const TimePartition& partition, int q, NormKind kind) {
  const auto lay = detail::checked_layout(partition, q, triple.dim());
  const SlabBasis basis(q);
  const auto ns = norm_spec(kind);
  const Mat mh = Mat(triple.mass_h());
  const Mat kv = Mat(triple.gram_v());
  // (w', v')_{V'} for H-valued w, v: M_H K_V^{-1} M_H
  Mat dual_metric = mh * triple.gram_solver().solve(mh);
  dual_metric = 0.5 * (dual_metric + dual_metric.transpose()).eval();
  const Vec& l0 = basis.at_left();
  const Vec& l1 = basis.at_right();
  Mat g = Mat::Zero(lay.size(), lay.size());
  for (std::size_t n = 0; n < lay.slabs; ++n) {
    const Eigen::Index o = lay.offset(n);
    const double tau = partition.width(n);
    detail::kron_add_dense(g, tau * basis.mass(), kv, o, o);
    if (has_derivative_term(ns.functional)) detail::kron_add_dense(g, basis.stiffness() / tau, dual_metric, o, o);
  }
  if (has_initial_trace(ns.functional)) {
    detail::kron_add_dense(g, l0 * l0.transpose(), mh, 0, 0);
  } else {
    const Eigen::Index o = lay.offset(lay.slabs - 1);
    detail::kron_add_dense(g, l1 * l1.transpose(), mh, o, o);
  }
  for (std::size_t n = 1; n < lay.slabs; ++n) {
    const double k = node_weight(ns.weights, partition.width(n));
    const Eigen::Index cur = lay.offset(n), prev = lay.offset(n - 1);
    if (has_jump_term(ns.functional) || has_initial_trace(ns.functional)) {
      detail::kron_add_dense(g, k * l0 * l0.transpose(), mh, cur, cur);
    }
    if (has_jump_term(ns.functional) || !has_initial_trace(ns.functional)) {
      detail::kron_add_dense(g, k * l1 * l1.transpose(), mh, prev, prev);
    }
    if (has_jump_term(ns.functional)) {
      detail::kron_add_dense(g, -k * l0 * l1.transpose(), mh, cur, prev);
      detail::kron_add_dense(g, -k * l1 * l0.transpose(), mh, prev, cur);
    }
  }
  return g;
}

struct PencilExtremes {
  double min = 0.0;  ///< sqrt of smallest eigenvalue
  double max = 0.0;  ///< sqrt of largest eigenvalue
};

/// Extreme square-rooted eigenvalues of the pencil (B^T G_test^{-1} B, G_trial).
inline PencilExtremes pencil_extremes(const Mat& b, const Mat& g_trial, const Mat& g_test) {
  if (b.rows() != g_test.rows() || b.cols() != g_trial.rows()) {
    throw std::invalid_argument("infsup: non-conformable B and Gram matrices");
  }
  Eigen::LLT<Mat> test_llt(g_test);
  if (test_llt.info() != Eigen::Success) throw std::invalid_argument("infsup: test Gram matrix not SPD");
  Mat lhs = b.transpose() * test_llt.solve(b);
  lhs = 0.5 * (lhs + lhs.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(lhs, g_trial, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (eig.info() != Eigen::Success) throw std::runtime_error("infsup: generalized eigensolver did not converge");
  const auto& ev = eig.eigenvalues();
  return {std::sqrt(std::max(0.0, ev.minCoeff())), std::sqrt(std::max(0.0, ev.maxCoeff()))};
}

/// inf_w sup_v B(w, v) / (||w||_trial ||v||_test)
inline double infsup_constant(const Mat& b, const Mat& g_trial, const Mat& g_test) {
  return pencil_extremes(b, g_trial, g_test).min;
}

/// sup_w sup_v B(w, v) / (||w||_trial ||v||_test)
inline double boundedness_constant(const Mat& b, const Mat& g_trial, const Mat& g_test) {
  return pencil_extremes(b, g_trial, g_test).max;
}

/// The same constant from the adjoint pencil (B G_trial^{-1} B^T, G_test).
inline double infsup_constant_adjoint(const Mat& b, const Mat& g_trial, const Mat& g_test) {
  return pencil_extremes(Mat(b.transpose()), g_test, g_trial).min;
}

struct StabilityConstants {
  double c1 = 0.0;  ///< (X,tau) trial, (Y,tau,#) test
  double c2 = 0.0;  ///< (Y*,tau,#) trial, (X*,tau) test
  double m0 = 0.0;  ///< (X,tau) / (Y,tau)
  double m1 = 0.0;  ///< (X,tau,sharp) / (Y,tau,#)
  double m2 = 0.0;  ///< (Y*,tau) / (X*,tau)
  Eigen::Index dim = 0;
};

inline StabilityConstants stability_constants(const ParabolicProblem& problem, const TimePartition& partition, int q) {
  const Mat b = assemble_btau(problem, partition, q).matrix;
  auto gram = [&](NormKind k) { return gram_matrix(problem.triple, partition, q, k); };
  StabilityConstants sc;
  sc.dim = b.rows();
  sc.c1 = infsup_constant(b, gram(NormKind::X), gram(NormKind::Y_hash));
  sc.c2 = infsup_constant(b, gram(NormKind::Ystar_hash), gram(NormKind::Xstar));
  sc.m0 = boundedness_constant(b, gram(NormKind::X), gram(NormKind::Y));
  sc.m1 = boundedness_constant(b, gram(NormKind::X_sharp), gram(NormKind::Y_hash));
  sc.m2 = boundedness_constant(b, gram(NormKind::Ystar), gram(NormKind::Xstar));
  return sc;
}

enum class SweepKind { refine_tau, grow_T, vary_q };

struct SweepConfig {
  SweepKind kind = SweepKind::refine_tau;
  std::vector<double> values;  ///< N for refine_tau, T for grow_T, q for vary_q
  int q = 0;                   ///< used by refine_tau and grow_T
  int slabs = 4;               ///< used by vary_q
  double final_time = 1.0;     ///< used by refine_tau and vary_q
  double tau = 0.5;            ///< fixed width for grow_T
};

struct SweepRow {
  double param = 0.0;
  int q = 0;
  int slabs = 0;
  double final_time = 0.0;
  StabilityConstants constants;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// min c1 below half its median over the sweep
  bool c1_decay_flag = false;
};

inline SweepTable sweep(const SweepConfig& cfg, const ParabolicProblem& base) {
  SweepTable table;
  table.rows = parallel_map<SweepRow>(cfg.values.size(), [&](std::size_t i) {
    SweepRow row;
    row.param = cfg.values[i];
    switch (cfg.kind) {
      case SweepKind::refine_tau:
        row.q = cfg.q;
        row.slabs = static_cast<int>(cfg.values[i]);
        row.final_time = cfg.final_time;
        break;
      case SweepKind::grow_T:
        row.q = cfg.q;
        row.final_time = cfg.values[i];
        row.slabs = static_cast<int>(std::lround(cfg.values[i] / cfg.tau));
        break;
      case SweepKind::vary_q:
        row.q = static_cast<int>(cfg.values[i]);
        row.slabs = cfg.slabs;
        row.final_time = cfg.final_time;
        break;
    }
    if (row.slabs < 1 || row.q < 0) throw std::invalid_argument("sweep: invalid study point");
    const auto part = make_partition(row.final_time, row.slabs, 1.0, false);
    row.constants = stability_constants(base, part, row.q);
    return row;
  });
  std::vector<double> c1;
  for (const auto& r : table.rows) c1.push_back(r.constants.c1);
  if (!c1.empty()) {
    std::vector<double> sorted = c1;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    const double median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    table.c1_decay_flag = sorted.front() < 0.5 * median;
  }
  return table;
}

}  // namespace dgtime
