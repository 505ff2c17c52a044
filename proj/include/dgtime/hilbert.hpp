#pragma once

// Discrete Hilbert triple V c H c V' realized by SPD matrices, operator families
// A(t) and the abstract parabolic problem u' + A(t)u = F(t).
//
// Functionals in V' are plain coefficient vectors g with <g, v> = g^T v; all
// metric structure lives in the two Gram matrices.

#include "dgtime/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace detail {

inline void require_symmetric(const SpMat& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  const SpMat at = a.transpose();
  if ((a - at).norm() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace detail

/// Sparse SPD factorization shared between copies of a triple.
class SpdSolver {
 public:
  SpdSolver() = default;
  SpdSolver(const SpMat& a, const char* what) : llt_(std::make_shared<Eigen::SimplicialLLT<SpMat>>(a)) {
    if (llt_->info() != Eigen::Success) {
      throw std::invalid_argument(std::string(what) + ": Cholesky failed (matrix not SPD)");
    }
  }
  [[nodiscard]] Vec solve(const Vec& b) const { return llt_->solve(b); }
  [[nodiscard]] Mat solve(const Mat& b) const { return llt_->solve(b); }

 private:
  std::shared_ptr<const Eigen::SimplicialLLT<SpMat>> llt_;
};

class HilbertTriple {
 public:
  HilbertTriple() = default;

  HilbertTriple(SpMat mass_h, SpMat gram_v)
      : mass_h_(std::move(mass_h)), gram_v_(std::move(gram_v)) {
    mass_h_.makeCompressed();
    gram_v_.makeCompressed();
    detail::require_symmetric(mass_h_, "HilbertTriple M_H");
    detail::require_symmetric(gram_v_, "HilbertTriple K_V");
    if (mass_h_.rows() != gram_v_.rows()) throw std::invalid_argument("HilbertTriple: dimension mismatch");
    mass_solver_ = SpdSolver(mass_h_, "HilbertTriple M_H");
    gram_solver_ = SpdSolver(gram_v_, "HilbertTriple K_V");
  }

  HilbertTriple(const Mat& mass_h, const Mat& gram_v)
      : HilbertTriple(SpMat(mass_h.sparseView()), SpMat(gram_v.sparseView())) {}

  [[nodiscard]] int dim() const { return static_cast<int>(mass_h_.rows()); }
  [[nodiscard]] const SpMat& mass_h() const { return mass_h_; }
  [[nodiscard]] const SpMat& gram_v() const { return gram_v_; }
  [[nodiscard]] const SpdSolver& mass_solver() const { return mass_solver_; }
  [[nodiscard]] const SpdSolver& gram_solver() const { return gram_solver_; }

  [[nodiscard]] double h_norm2(const Vec& v) const { return v.dot(mass_h_ * v); }
  [[nodiscard]] double v_norm2(const Vec& v) const { return v.dot(gram_v_ * v); }
  [[nodiscard]] double h_norm(const Vec& v) const { return std::sqrt(std::max(0.0, h_norm2(v))); }
  [[nodiscard]] double v_norm(const Vec& v) const { return std::sqrt(std::max(0.0, v_norm2(v))); }
  /// ||g||_{V'}^2 = g^T K_V^{-1} g
  [[nodiscard]] double vdual_norm2(const Vec& g) const { return g.dot(gram_solver_.solve(g)); }
  /// V' norm of an element w of H, acting as the functional (w, .)_H.
  [[nodiscard]] double embedded_vdual_norm2(const Vec& w) const { return vdual_norm2(mass_h_ * w); }

 private:
  SpMat mass_h_, gram_v_;
  SpdSolver mass_solver_, gram_solver_;
};

/// sqrt(g^T K_V^{-1} g) = sup_v g^T v / ||v||_V
inline double vdual_norm(const HilbertTriple& triple, const Vec& g) {
  if (g.size() != triple.dim()) throw std::invalid_argument("vdual_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, triple.vdual_norm2(g)));
}

/// Matrix-valued map t -> A(t) with its declared constants. degree < 0 means
/// "smooth" (not polynomial in t).
struct OperatorFamily {
  std::function<SpMat(double)> at;
  int degree = 0;
  double alpha = 1.0;    ///< coercivity: v^T A(t) v >= alpha ||v||_V^2
  double m_bound = 1.0;  ///< boundedness: |v^T A(t) w| <= M ||w||_V ||v||_V

  [[nodiscard]] bool is_constant() const { return degree == 0; }

  static OperatorFamily constant(SpMat a, double alpha, double m_bound) {
    a.makeCompressed();
    return {[a = std::move(a)](double) { return a; }, 0, alpha, m_bound};
  }
};

/// Quadrature points per slab for dG(q) integrals: exact for degree 2q + d_A
/// (and q + d_F for the source); q+3 points when either is smooth.
inline int slab_quadrature_points(int q, int op_degree, int source_degree) {
  if (op_degree < 0 || source_degree < 0) return q + 3;
  return gauss_points_for_degree(std::max(2 * q + op_degree, q + source_degree));
}

struct ParabolicProblem {
  HilbertTriple triple;
  OperatorFamily op;
  std::function<Vec(double)> source;  ///< F(t) as a functional vector
  Vec u0;
  int source_degree = -1;  ///< polynomial degree of F in t, < 0 for smooth

  void validate() const {
    const int m = triple.dim();
    if (u0.size() != m) throw std::invalid_argument("ParabolicProblem: u0 dimension mismatch");
    const SpMat a = op.at(0.0);
    if (a.rows() != m || a.cols() != m) throw std::invalid_argument("ParabolicProblem: A(t) dimension mismatch");
    if (source && source(0.0).size() != m) throw std::invalid_argument("ParabolicProblem: F dimension mismatch");
  }
  [[nodiscard]] int dim() const { return triple.dim(); }
  [[nodiscard]] int quadrature_points(int q) const {
    return slab_quadrature_points(q, op.degree, source ? source_degree : 0);
  }
  [[nodiscard]] Vec source_at(double t) const { return source ? source(t) : Vec::Zero(dim()); }
};

namespace detail {

/// Lower Cholesky factor of a dense SPD matrix.
inline Mat dense_cholesky_factor(const Mat& a, const char* what) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + ": not SPD");
  return llt.matrixL();
}

}  // namespace detail

struct ConstantEstimates {
  double alpha = 0.0;
  double m_bound = 0.0;
  bool alpha_consistent = true;  ///< alpha_est >= declared alpha - 1e-8
  bool bound_consistent = true;  ///< M_est <= declared M + 1e-8
};

/// alpha_est = min_t lambda_min(sym A(t), K_V); M_est = max_t ||L^{-1} A(t) L^{-T}||_2 with K_V = L L^T.
inline ConstantEstimates estimate_constants(const OperatorFamily& op, const HilbertTriple& triple,
                                            const std::vector<double>& t_samples) {
  if (t_samples.empty()) throw std::invalid_argument("estimate_constants: empty sample set");
  const Mat kv = Mat(triple.gram_v());
  const Mat l = detail::dense_cholesky_factor(kv, "estimate_constants K_V");
  const auto ltri = l.triangularView<Eigen::Lower>();
  ConstantEstimates est{std::numeric_limits<double>::infinity(), 0.0, true, true};
  for (double t : t_samples) {
    const Mat a = Mat(op.at(t));
    // C = L^{-1} A L^{-T}
    Mat c = ltri.solve(a);
    c = ltri.solve(c.transpose()).transpose();
    const Mat sym = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
    est.alpha = std::min(est.alpha, eig.eigenvalues().minCoeff());
    Eigen::JacobiSVD<Mat> svd(c);
    est.m_bound = std::max(est.m_bound, svd.singularValues()(0));
  }
  est.alpha_consistent = est.alpha >= op.alpha - 1e-8;
  est.bound_consistent = est.m_bound <= op.m_bound + 1e-8;
  return est;
}

inline Vec apply_inverse_A(const OperatorFamily& op, double t, const Vec& g) {
  const SpMat a = op.at(t);
  if (a.rows() != g.size()) throw std::invalid_argument("apply_inverse_A: dimension mismatch");
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("apply_inverse_A: A(t) numerically singular at t = " + std::to_string(t) +
                             " (coercivity declaration violated)");
  }
  return lu.solve(g);
}

/// Observed ratios behind the bounds on A(t)^{-1}, over random functionals g.
struct InverseBoundsReport {
  double min_pairing_over_dual2 = std::numeric_limits<double>::infinity();  ///< <g,A^{-1}g> / ||g||_{V'}^2
  double min_pairing_over_dual = std::numeric_limits<double>::infinity();   ///< <g,A^{-1}g> / ||g||_{V'}
  double max_inverse_ratio = 0.0;  ///< ||A^{-1}g||_V / ||g||_{V'}
  double lower_constant = 0.0;     ///< alpha / M^2
  double upper_constant = 0.0;     ///< 1 / alpha
  bool squared_form_holds = true;    ///< <g,A^{-1}g> >= (alpha/M^2) ||g||_{V'}^2
  bool unsquared_form_holds = true;  ///< <g,A^{-1}g> >= (alpha/M^2) ||g||_{V'}
  bool inverse_bound_holds = true;   ///< ||A^{-1}g||_V <= ||g||_{V'} / alpha
};

inline InverseBoundsReport check_inverse_bounds(const OperatorFamily& op, const HilbertTriple& triple,
                                                const std::vector<double>& t_samples, int draws = 100,
                                                unsigned seed = 7) {
  InverseBoundsReport rep;
  rep.lower_constant = op.alpha / (op.m_bound * op.m_bound);
  rep.upper_constant = 1.0 / op.alpha;
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  const int m = triple.dim();
  constexpr double slack = 1e-12;
  for (double t : t_samples) {
    for (int k = 0; k < draws; ++k) {
      Vec g(m);
      for (int i = 0; i < m; ++i) g(i) = normal(rng);
      const Vec x = apply_inverse_A(op, t, g);
      const double pairing = g.dot(x);
      const double dual = vdual_norm(triple, g);
      const double ratio2 = pairing / (dual * dual);
      const double ratio1 = pairing / dual;
      const double inv = triple.v_norm(x) / dual;
      rep.min_pairing_over_dual2 = std::min(rep.min_pairing_over_dual2, ratio2);
      rep.min_pairing_over_dual = std::min(rep.min_pairing_over_dual, ratio1);
      rep.max_inverse_ratio = std::max(rep.max_inverse_ratio, inv);
      rep.squared_form_holds &= ratio2 >= rep.lower_constant * (1.0 - slack);
      rep.unsquared_form_holds &= ratio1 >= rep.lower_constant * (1.0 - slack);
      rep.inverse_bound_holds &= inv <= rep.upper_constant * (1.0 + slack);
    }
  }
  return rep;
}

}  // namespace dgtime
