#pragma once

// Conforming P1/P2 (1D) and P1 (2D) Lagrange spaces with homogeneous Dirichlet
// conditions imposed by dropping boundary degrees of freedom.

#include "dgtime/fem/mesh.hpp"
#include "dgtime/hilbert.hpp"
#include "dgtime/parallel.hpp"
#include "dgtime/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime::fem {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Quadrature point on a physical cell with basis data; weight includes |det J|.
struct CellPoint {
  Point x;
  double weight;
  Eigen::VectorXd phi;   ///< local basis values
  Eigen::MatrixXd grad;  ///< local basis gradients, one row per basis function
};

class FeSpace {
 public:
  FeSpace(Mesh mesh, int degree) : mesh_(std::make_shared<const Mesh>(std::move(mesh))), degree_(degree) {
    validate(*mesh_);
    if (degree_ < 1 || degree_ > 2 || (mesh_->dim == 2 && degree_ != 1)) {
      throw std::invalid_argument("FeSpace: supported degrees are k = 1, 2 in 1D and k = 1 in 2D");
    }
    coords_ = mesh_->vertices;
    boundary_.assign(mesh_->on_boundary.begin(), mesh_->on_boundary.end());
    cell_dofs_.resize(mesh_->num_cells());
    for (std::size_t c = 0; c < mesh_->num_cells(); ++c) {
      auto& d = cell_dofs_[c];
      d.assign(mesh_->cells[c].begin(), mesh_->cells[c].begin() + mesh_->vertices_per_cell());
      if (degree_ == 2) {
        d.push_back(static_cast<int>(coords_.size()));
        coords_.push_back(0.5 * (mesh_->vertices[d[0]] + mesh_->vertices[d[1]]));
        boundary_.push_back(0);
      }
    }
    interior_.assign(coords_.size(), -1);
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (!boundary_[i]) {
        interior_[i] = static_cast<int>(interior_dofs_.size());
        interior_dofs_.push_back(static_cast<int>(i));
      }
    if (interior_dofs_.empty()) throw std::invalid_argument("FeSpace: no interior degrees of freedom");
    locator_ = std::make_shared<const PointLocator>(*mesh_);
  }

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  /// Number of interior (unknown) degrees of freedom.
  [[nodiscard]] int dim() const { return static_cast<int>(interior_dofs_.size()); }
  [[nodiscard]] int local_size() const { return degree_ == 2 ? 3 : mesh_->vertices_per_cell(); }
  [[nodiscard]] const std::vector<int>& cell_dofs(std::size_t c) const { return cell_dofs_[c]; }
  /// Interior index of a global dof, -1 on the boundary.
  [[nodiscard]] int interior_index(int global) const { return interior_[global]; }
  [[nodiscard]] const Point& dof_point(int global) const { return coords_[global]; }
  [[nodiscard]] const Point& interior_point(int i) const { return coords_[interior_dofs_[i]]; }
  [[nodiscard]] const PointLocator& locator() const { return *locator_; }

  /// Reference basis values at r.
  [[nodiscard]] Eigen::VectorXd reference_values(const Point& r) const {
    const double s = r.x();
    if (mesh_->dim == 2) return Eigen::Vector3d(1.0 - r.x() - r.y(), r.x(), r.y());
    if (degree_ == 1) return Eigen::Vector2d(1.0 - s, s);
    return Eigen::Vector3d((1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s));
  }

  /// Reference gradients, one row per basis function.
  [[nodiscard]] Eigen::MatrixXd reference_gradients(const Point& r) const {
    if (mesh_->dim == 2) {
      Eigen::MatrixXd g(3, 2);
      g << -1, -1, 1, 0, 0, 1;
      return g;
    }
    const double s = r.x();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(local_size(), 2);
    if (degree_ == 1) {
      g(0, 0) = -1.0;
      g(1, 0) = 1.0;
    } else {
      g(0, 0) = 4.0 * s - 3.0;
      g(1, 0) = 4.0 * s - 1.0;
      g(2, 0) = 4.0 - 8.0 * s;
    }
    return g;
  }

  /// Physical point and basis data at reference point r of cell c.
  [[nodiscard]] CellPoint map_point(std::size_t c, const Point& r, double ref_weight) const {
    const auto& v = mesh_->cells[c];
    const Point& a = mesh_->vertices[v[0]];
    if (mesh_->dim == 1) {
      const double len = mesh_->vertices[v[1]].x() - a.x();
      Eigen::MatrixXd g = reference_gradients(r) / len;
      return {Point(a.x() + len * r.x(), 0.0), ref_weight * len, reference_values(r), g};
    }
    Eigen::Matrix2d jac;
    jac.col(0) = mesh_->vertices[v[1]] - a;
    jac.col(1) = mesh_->vertices[v[2]] - a;
    const double det = jac.determinant();
    Eigen::MatrixXd g = reference_gradients(r) * jac.inverse();
    return {a + jac * r, ref_weight * std::abs(det), reference_values(r), g};
  }

  /// Cell quadrature exact for polynomials of the given total degree.
  [[nodiscard]] std::vector<CellPoint> cell_quadrature(std::size_t c, int exact_degree) const {
    std::vector<CellPoint> out;
    if (mesh_->dim == 1) {
      const auto rule = gauss_rule(gauss_points_for_degree(exact_degree));
      for (std::size_t g = 0; g < rule.size(); ++g) out.push_back(map_point(c, Point(rule.points[g], 0.0), rule.weights[g]));
      return out;
    }
    // collapsed tensor Gauss: the Duffy factor (1 - u) adds one degree in u
    const auto rule = gauss_rule(gauss_points_for_degree(exact_degree + 1));
    for (std::size_t i = 0; i < rule.size(); ++i) {
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double u = rule.points[i], w = rule.points[j];
        out.push_back(map_point(c, Point(u, w * (1.0 - u)), rule.weights[i] * rule.weights[j] * (1.0 - u)));
      }
    }
    return out;
  }

  /// Local coefficient vector of cell c from interior coefficients (boundary dofs = 0).
  [[nodiscard]] Eigen::VectorXd local_coeffs(std::size_t c, const Vec& coeffs) const {
    const auto& d = cell_dofs_[c];
    Eigen::VectorXd out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out(i) = interior_[d[i]] >= 0 ? coeffs(interior_[d[i]]) : 0.0;
    return out;
  }

  /// Point evaluation of an X_h function; throws outside the mesh.
  [[nodiscard]] double evaluate(const Vec& coeffs, const Point& x) const {
    const auto [c, r] = locator_->locate(x);
    if (c < 0) throw std::out_of_range("FeSpace::evaluate: point outside the mesh");
    return reference_values(r).dot(local_coeffs(c, coeffs));
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::vector<Point> coords_;
  std::vector<char> boundary_;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<int> interior_;
  std::vector<int> interior_dofs_;
  std::shared_ptr<const PointLocator> locator_;
};

/// Mass and stiffness on interior dofs with their Cholesky factorizations.
struct AssembledOps {
  SpMat mass;
  SpMat stiffness;
  SpdSolver mass_solver;
  SpdSolver stiffness_solver;

  [[nodiscard]] HilbertTriple triple() const { return HilbertTriple(mass, stiffness); }
};

namespace detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Runs fn(c, triplets) over cell chunks in parallel and concatenates in chunk order.
template <class Fn>
Triplets assemble_chunks(const FeSpace& space, Fn&& fn) {
  const std::size_t nc = space.mesh().num_cells();
  const std::size_t chunk = 256;
  const std::size_t chunks = (nc + chunk - 1) / chunk;
  auto parts = parallel_map<Triplets>(chunks, [&](std::size_t k) {
    Triplets t;
    for (std::size_t c = k * chunk; c < std::min(nc, (k + 1) * chunk); ++c) fn(c, t);
    return t;
  });
  Triplets all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

inline void scatter(const FeSpace& space, std::size_t c, const Eigen::MatrixXd& local, Triplets& out) {
  const auto& d = space.cell_dofs(c);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int gi = space.interior_index(d[i]);
    if (gi < 0) continue;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const int gj = space.interior_index(d[j]);
      if (gj >= 0 && local(i, j) != 0.0) out.emplace_back(gi, gj, local(i, j));
    }
  }
}

}  // namespace detail

inline AssembledOps assemble(const FeSpace& space) {
  const int k = space.degree();
  const int n = space.dim();
  auto build = [&](bool stiffness) {
    auto trip = detail::assemble_chunks(space, [&](std::size_t c, detail::Triplets& out) {
      if (!(space.mesh().measure(c) > 0.0)) throw std::invalid_argument("assemble: degenerate cell " + std::to_string(c));
      const int ls = space.local_size();
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(ls, ls);
      for (const auto& p : space.cell_quadrature(c, stiffness ? 2 * k - 2 : 2 * k)) {
        local += p.weight * (stiffness ? Eigen::MatrixXd(p.grad * p.grad.transpose())
                                       : Eigen::MatrixXd(p.phi * p.phi.transpose()));
      }
      detail::scatter(space, c, local, out);
    });
    SpMat a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    // exact symmetry regardless of summation order
    SpMat at = a.transpose();
    a = 0.5 * (a + at);
    a.makeCompressed();
    return a;
  };
  AssembledOps ops;
  ops.mass = build(false);
  ops.stiffness = build(true);
  ops.mass_solver = SpdSolver(ops.mass, "assemble: mass");
  ops.stiffness_solver = SpdSolver(ops.stiffness, "assemble: stiffness");
  return ops;
}

/// (f, phi_i) for every interior basis function; quadrature exact to degree 2k + 2 by default.
inline Vec load_vector(const FeSpace& space, const ScalarField& f, int exact_degree = -1) {
  if (exact_degree < 0) exact_degree = 2 * space.degree() + 2;
  const std::size_t nc = space.mesh().num_cells();
  const std::size_t chunk = 512;
  const auto parts = parallel_map<Vec>((nc + chunk - 1) / chunk, [&](std::size_t k) {
    Vec b = Vec::Zero(space.dim());
    for (std::size_t c = k * chunk; c < std::min(nc, (k + 1) * chunk); ++c) {
      const auto& d = space.cell_dofs(c);
      for (const auto& p : space.cell_quadrature(c, exact_degree)) {
        const double fx = f(p.x);
        for (std::size_t i = 0; i < d.size(); ++i)
          if (const int gi = space.interior_index(d[i]); gi >= 0) b(gi) += p.weight * fx * p.phi(i);
      }
    }
    return b;
  });
  Vec b = Vec::Zero(space.dim());
  for (const auto& p : parts) b += p;
  return b;
}

/// P_h f: M c = (f, phi_i).
inline Vec l2_project(const FeSpace& space, const AssembledOps& ops, const ScalarField& f, int exact_degree = -1) {
  return ops.mass_solver.solve(load_vector(space, f, exact_degree));
}

/// Nodal interpolant on interior dofs.
inline Vec interpolate(const FeSpace& space, const ScalarField& f) {
  Vec out(space.dim());
  for (int i = 0; i < space.dim(); ++i) out(i) = f(space.interior_point(i));
  return out;
}

/// ||v||_{X_h'} = sup_phi (v, phi) / ||grad phi|| = sqrt((Mv)^T K^{-1} (Mv)).
inline double xh_dual_norm(const AssembledOps& ops, const Vec& v) {
  if (v.size() != ops.mass.rows()) throw std::invalid_argument("xh_dual_norm: dimension mismatch");
  const Vec mv = ops.mass * v;
  return std::sqrt(std::max(0.0, mv.dot(ops.stiffness_solver.solve(mv))));
}

/// Same norm for a functional given by its load vector b_i = <g, phi_i>.
inline double xh_dual_norm_of_load(const AssembledOps& ops, const Vec& b) {
  return std::sqrt(std::max(0.0, b.dot(ops.stiffness_solver.solve(b))));
}

/// A_h^{-1} g = K^{-1} M g for g in X_h.
inline Vec inverse_discrete_laplacian(const AssembledOps& ops, const Vec& g) {
  return ops.stiffness_solver.solve(Vec(ops.mass * g));
}

inline double h1_norm(const AssembledOps& ops, const Vec& v) { return std::sqrt(std::max(0.0, v.dot(ops.stiffness * v))); }
inline double l2_norm(const AssembledOps& ops, const Vec& v) { return std::sqrt(std::max(0.0, v.dot(ops.mass * v))); }

/// ||v_h - f||_{L^2}
inline double l2_error(const FeSpace& space, const Vec& coeffs, const ScalarField& f, int exact_degree = -1) {
  if (exact_degree < 0) exact_degree = 2 * space.degree() + 4;
  double sum = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const Eigen::VectorXd lc = space.local_coeffs(c, coeffs);
    for (const auto& p : space.cell_quadrature(c, exact_degree)) {
      const double e = p.phi.dot(lc) - f(p.x);
      sum += p.weight * e * e;
    }
  }
  return std::sqrt(sum);
}

/// ||grad(v_h - f)||_{L^2}
inline double h1_error(const FeSpace& space, const Vec& coeffs, const VectorField& grad_f, int exact_degree = -1) {
  if (exact_degree < 0) exact_degree = 2 * space.degree() + 4;
  const int dim = space.mesh().dim;
  double sum = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const Eigen::VectorXd lc = space.local_coeffs(c, coeffs);
    for (const auto& p : space.cell_quadrature(c, exact_degree)) {
      const Eigen::Vector2d g = p.grad.transpose() * lc;
      const Point gf = grad_f(p.x);
      const double e2 = dim == 1 ? std::pow(g(0) - gf.x(), 2) : (g - gf).squaredNorm();
      sum += p.weight * e2;
    }
  }
  return std::sqrt(sum);
}

/// b_i = (v, psi_i) for v in the source space and psi_i the target basis, with
/// quadrature on the finer of the two (nested) meshes so the integral is exact.
inline Vec transfer_load(const FeSpace& target, const FeSpace& source, const Vec& coeffs) {
  Vec b = Vec::Zero(target.dim());
  const bool on_source = source.mesh().num_cells() >= target.mesh().num_cells();
  const FeSpace& quad_space = on_source ? source : target;
  const FeSpace& other = on_source ? target : source;
  const int degree = target.degree() + source.degree();
  for (std::size_t c = 0; c < quad_space.mesh().num_cells(); ++c) {
    const Eigen::VectorXd lc = on_source ? source.local_coeffs(c, coeffs) : Eigen::VectorXd();
    const auto& qd = quad_space.cell_dofs(c);
    for (const auto& p : quad_space.cell_quadrature(c, degree)) {
      const auto [oc, r] = other.locator().locate(p.x, 1e-10);
      if (oc < 0) throw std::logic_error("transfer_load: meshes do not cover the same domain");
      const Eigen::VectorXd other_phi = other.reference_values(r);
      const auto& od = other.cell_dofs(oc);
      if (on_source) {
        const double val = p.phi.dot(lc);
        for (std::size_t i = 0; i < od.size(); ++i)
          if (const int gi = target.interior_index(od[i]); gi >= 0) b(gi) += p.weight * val * other_phi(i);
      } else {
        const double val = other_phi.dot(source.local_coeffs(oc, coeffs));
        for (std::size_t i = 0; i < qd.size(); ++i)
          if (const int gi = target.interior_index(qd[i]); gi >= 0) b(gi) += p.weight * val * p.phi(i);
      }
    }
  }
  return b;
}

/// max over samples of ||P_h v||_{H^1_0} / ||v||_{H^1_0}, samples from a finer nested space.
inline double ph_h1_stability(const FeSpace& coarse, const AssembledOps& coarse_ops, const FeSpace& fine,
                              const AssembledOps& fine_ops, const std::vector<Vec>& samples) {
  double worst = 0.0;
  for (const auto& v : samples) {
    const double den = h1_norm(fine_ops, v);
    if (den == 0.0) continue;
    const Vec pv = coarse_ops.mass_solver.solve(transfer_load(coarse, fine, v));
    worst = std::max(worst, h1_norm(coarse_ops, pv) / den);
  }
  return worst;
}

/// The supremum over the whole fine space: sqrt of the top eigenvalue of
/// (T^T M_c^{-1} K_c M_c^{-1} T, K_f) with T the transfer load matrix. Dense.
inline double ph_h1_stability_sup(const FeSpace& coarse, const AssembledOps& coarse_ops, const FeSpace& fine,
                                  const AssembledOps& fine_ops) {
  Mat transfer(coarse.dim(), fine.dim());
  for (int j = 0; j < fine.dim(); ++j) transfer.col(j) = transfer_load(coarse, fine, Vec::Unit(fine.dim(), j));
  const Mat proj = coarse_ops.mass_solver.solve(transfer);
  const Mat num = proj.transpose() * Mat(coarse_ops.stiffness) * proj;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (num + num.transpose()), Mat(fine_ops.stiffness),
                                                   Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("ph_h1_stability_sup: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Observed c* against the uniformly refined space, taken over all of it.
inline double ph_h1_stability(const FeSpace& coarse, const AssembledOps& coarse_ops) {
  const FeSpace fine(refine_uniform(coarse.mesh()), coarse.degree());
  return ph_h1_stability_sup(coarse, coarse_ops, fine, assemble(fine));
}

/// Estimate of ||v_h||_{H^{-1}} as the X_h' norm on a twice-refined mesh.
inline double hminus1_estimate(const FeSpace& space, const Vec& coeffs) {
  const FeSpace fine(refine_uniform(refine_uniform(space.mesh())), space.degree());
  const AssembledOps fine_ops = assemble(fine);
  return xh_dual_norm_of_load(fine_ops, transfer_load(fine, space, coeffs));
}

}  // namespace dgtime::fem
