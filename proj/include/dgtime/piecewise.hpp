#pragma once

// Per-slab nodal Lagrange bases and vector-valued piecewise polynomials in time.

#include "dgtime/partition.hpp"
#include "dgtime/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

/// Lagrange basis of degree q on reference nodes in [0,1] (default: right Radau points).
class SlabBasis {
 public:
  SlabBasis() : SlabBasis(0) {}

  explicit SlabBasis(int degree) : SlabBasis(degree, radau_right_rule(degree + 1).points) {}

  SlabBasis(int degree, std::vector<double> nodes) : degree_(degree), nodes_(std::move(nodes)) {
    if (degree_ < 0) throw std::invalid_argument("SlabBasis: degree must be >= 0");
    if (static_cast<int>(nodes_.size()) != degree_ + 1) {
      throw std::invalid_argument("SlabBasis: need degree+1 nodes");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (std::size_t j = i + 1; j < nodes_.size(); ++j)
        if (nodes_[i] == nodes_[j]) throw std::invalid_argument("SlabBasis: nodes must be distinct");

    const int nb = size();
    const auto g = gauss_rule(degree_ + 1);  // exact to 2q+1
    mass_ = Eigen::MatrixXd::Zero(nb, nb);
    advection_ = Eigen::MatrixXd::Zero(nb, nb);
    stiffness_ = Eigen::MatrixXd::Zero(nb, nb);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Eigen::VectorXd l = values(g.points[k]);
      const Eigen::VectorXd dl = derivatives(g.points[k]);
      mass_ += g.weights[k] * l * l.transpose();
      advection_ += g.weights[k] * l * dl.transpose();
      stiffness_ += g.weights[k] * dl * dl.transpose();
    }
    at_left_ = values(0.0);
    at_right_ = values(1.0);
    differentiation_.resize(nb, nb);
    for (int i = 0; i < nb; ++i) differentiation_.row(i) = derivatives(nodes_[i]).transpose();
  }

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return degree_ + 1; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

  /// L_i(s) for all i.
  [[nodiscard]] Eigen::VectorXd values(double s) const {
    const int nb = size();
    Eigen::VectorXd out(nb);
    for (int i = 0; i < nb; ++i) {
      double v = 1.0;
      for (int k = 0; k < nb; ++k)
        if (k != i) v *= (s - nodes_[k]) / (nodes_[i] - nodes_[k]);
      out(i) = v;
    }
    return out;
  }

  /// L_i'(s) for all i (derivative in the reference variable).
  [[nodiscard]] Eigen::VectorXd derivatives(double s) const {
    const int nb = size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nb);
    for (int i = 0; i < nb; ++i) {
      for (int k = 0; k < nb; ++k) {
        if (k == i) continue;
        double term = 1.0 / (nodes_[i] - nodes_[k]);
        for (int l = 0; l < nb; ++l)
          if (l != i && l != k) term *= (s - nodes_[l]) / (nodes_[i] - nodes_[l]);
        out(i) += term;
      }
    }
    return out;
  }

  /// int_0^1 L_i L_j ds
  [[nodiscard]] const Eigen::MatrixXd& mass() const { return mass_; }
  /// (i, j) -> int_0^1 L_j'(s) L_i(s) ds   (row = test, column = trial)
  [[nodiscard]] const Eigen::MatrixXd& advection() const { return advection_; }
  /// int_0^1 L_i' L_j' ds
  [[nodiscard]] const Eigen::MatrixXd& stiffness() const { return stiffness_; }
  /// (i, j) -> L_j'(node_i)
  [[nodiscard]] const Eigen::MatrixXd& differentiation() const { return differentiation_; }
  [[nodiscard]] const Eigen::VectorXd& at_left() const { return at_left_; }
  [[nodiscard]] const Eigen::VectorXd& at_right() const { return at_right_; }

 private:
  int degree_;
  std::vector<double> nodes_;
  Eigen::MatrixXd mass_, advection_, stiffness_, differentiation_;
  Eigen::VectorXd at_left_, at_right_;
};

/// One vector-valued polynomial on the slab (t0, t0 + tau]; columns of `coeffs`
/// are the nodal values at the basis nodes.
struct SlabPoly {
  double t0 = 0.0;
  double tau = 1.0;
  SlabBasis basis;
  Eigen::MatrixXd coeffs;  // m x (q+1)

  [[nodiscard]] Eigen::VectorXd operator()(double t) const {
    return coeffs * basis.values((t - t0) / tau);
  }
  [[nodiscard]] Eigen::VectorXd derivative(double t) const {
    return coeffs * basis.derivatives((t - t0) / tau) / tau;
  }
  [[nodiscard]] Eigen::VectorXd left() const { return coeffs * basis.at_left(); }
  [[nodiscard]] Eigen::VectorXd right() const { return coeffs * basis.at_right(); }

  /// Nodal representation of a callable on this slab's basis nodes.
  static SlabPoly interpolate(double t0, double tau, const SlabBasis& basis,
                              const std::function<Eigen::VectorXd(double)>& f) {
    SlabPoly p{t0, tau, basis, {}};
    const auto& nodes = basis.nodes();
    for (int j = 0; j < basis.size(); ++j) {
      Eigen::VectorXd v = f(t0 + tau * nodes[j]);
      if (j == 0) p.coeffs.resize(v.size(), basis.size());
      p.coeffs.col(j) = v;
    }
    return p;
  }
};

enum class Side { left_limit, right_limit };

/// Element of S_tau: degree-q polynomial per slab, discontinuous across nodes.
class PiecewisePoly {
 public:
  PiecewisePoly() = default;

  PiecewisePoly(TimePartition partition, int degree, int dim)
      : partition_(std::move(partition)), basis_(degree), dim_(dim),
        coeffs_(partition_.num_slabs(), Eigen::MatrixXd::Zero(dim, degree + 1)) {}

  [[nodiscard]] const TimePartition& partition() const { return partition_; }
  [[nodiscard]] const SlabBasis& basis() const { return basis_; }
  [[nodiscard]] int degree() const { return basis_.degree(); }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t num_slabs() const { return coeffs_.size(); }

  [[nodiscard]] Eigen::MatrixXd& slab_coeffs(std::size_t n) { return coeffs_.at(n); }
  [[nodiscard]] const Eigen::MatrixXd& slab_coeffs(std::size_t n) const { return coeffs_.at(n); }

  [[nodiscard]] SlabPoly slab(std::size_t n) const {
    return SlabPoly{partition_.node(n), partition_.width(n), basis_, coeffs_.at(n)};
  }

  /// Evaluates v(t); at an interior node the side picks v^n (left) or v^{n,+} (right).
  [[nodiscard]] Eigen::VectorXd eval(double t, Side side) const {
    const auto& nodes = partition_.nodes();
    if (t < nodes.front() || t > nodes.back()) {
      throw std::out_of_range("PiecewisePoly::eval: t outside [t_0, t_N]");
    }
    if (t == nodes.front() && side == Side::left_limit) {
      throw std::invalid_argument("PiecewisePoly::eval: left limit undefined at t_0");
    }
    if (t == nodes.back() && side == Side::right_limit) {
      throw std::invalid_argument("PiecewisePoly::eval: right limit undefined at t_N");
    }
    std::size_t n = partition_.slab_of(t);
    if (side == Side::right_limit && t == nodes[n + 1]) ++n;
    return slab(n)(t);
  }

  /// Evaluation inside the slabs; interior nodes resolved with the left limit.
  [[nodiscard]] Eigen::VectorXd operator()(double t) const {
    return eval(t, t == partition_.node(0) ? Side::right_limit : Side::left_limit);
  }

  /// v^{n,+}, n = 0..N-1
  [[nodiscard]] Eigen::VectorXd trace_plus(std::size_t n) const {
    return coeffs_.at(n) * basis_.at_left();
  }
  /// v^n = v(t_n), n = 1..N
  [[nodiscard]] Eigen::VectorXd trace_minus(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("PiecewisePoly::trace_minus: v^0 is not defined");
    return coeffs_.at(n - 1) * basis_.at_right();
  }

  /// Flat coefficient vector, ordered slab-major, then basis node, then component.
  [[nodiscard]] Eigen::VectorXd flatten() const {
    const int block = dim_ * basis_.size();
    Eigen::VectorXd out(static_cast<Eigen::Index>(coeffs_.size()) * block);
    for (std::size_t n = 0; n < coeffs_.size(); ++n) {
      out.segment(static_cast<Eigen::Index>(n) * block, block) =
          Eigen::Map<const Eigen::VectorXd>(coeffs_[n].data(), block);
    }
    return out;
  }

  static PiecewisePoly unflatten(const TimePartition& partition, int degree, int dim,
                                 const Eigen::VectorXd& flat) {
    PiecewisePoly v(partition, degree, dim);
    const int block = dim * (degree + 1);
    if (flat.size() != static_cast<Eigen::Index>(v.num_slabs()) * block) {
      throw std::invalid_argument("PiecewisePoly::unflatten: size mismatch");
    }
    for (std::size_t n = 0; n < v.num_slabs(); ++n) {
      v.coeffs_[n] = Eigen::Map<const Eigen::MatrixXd>(
          flat.data() + static_cast<Eigen::Index>(n) * block, dim, degree + 1);
    }
    return v;
  }

  /// Slab-wise nodal interpolation of a callable (exact for callables in S_tau).
  static PiecewisePoly interpolate(const TimePartition& partition, int degree,
                                   const std::function<Eigen::VectorXd(double)>& f) {
    const SlabBasis basis(degree);
    const Eigen::VectorXd probe = f(partition.node(0) + 0.5 * partition.width(0));
    PiecewisePoly v(partition, degree, static_cast<int>(probe.size()));
    for (std::size_t n = 0; n < v.num_slabs(); ++n) {
      v.coeffs_[n] = SlabPoly::interpolate(partition.node(n), partition.width(n), basis, f).coeffs;
    }
    return v;
  }

 private:
  TimePartition partition_;
  SlabBasis basis_;
  int dim_ = 0;
  std::vector<Eigen::MatrixXd> coeffs_;
};

}  // namespace dgtime
