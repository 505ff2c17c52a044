#pragma once

// Convergence studies on the manufactured problems.

#include "dgtime/fem/heat.hpp"
#include "dgtime/harness/rates.hpp"
#include "dgtime/harness/registry.hpp"
#include "dgtime/parallel.hpp"
#include "dgtime/partition.hpp"
#include "dgtime/quadrature.hpp"
#include "dgtime/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime::harness {

enum class FemMode { space, time };
enum class FemReference { exact, semidiscrete };

struct StudyConfig {
  std::string problem = "scalar";
  int q = 1;
  int k = 1;
  std::vector<int> ladder{8, 16, 32, 64};  ///< N (time studies, FEM time mode) or n (FEM space mode)
  double grading = 1.0;
  double final_time = 1.0;
  FemMode fem_mode = FemMode::space;
  FemReference reference = FemReference::exact;
  int fixed_slabs = 32;  ///< N in FEM space mode
  int fixed_mesh = 256;  ///< n in FEM time mode
  std::vector<std::string> norms;  ///< columns to gate on; empty means all
  double margin = 0.2;
  unsigned seed = 1;
  std::string csv_path;
  std::string json_path;
  std::string plot_path;

  void validate() const {
    if (ladder.size() < 3) throw std::invalid_argument("ladder needs at least 3 levels");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (ladder[i] < 1) throw std::invalid_argument("ladder entries must be >= 1");
      if (i > 0 && ladder[i] <= ladder[i - 1]) throw std::invalid_argument("ladder must be strictly increasing");
    }
    if (q < 0) throw std::invalid_argument("q must be >= 0");
    if (!(final_time > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(grading > 0.0)) throw std::invalid_argument("grading must be positive");
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  }
};

struct ErrorRow {
  int level = 0;
  int param = 0;     ///< N or n
  double tau = 0.0;  ///< max slab width
  double h = 0.0;    ///< mesh size, 0 for abstract problems
  std::vector<double> errors;
};

struct ErrorTable {
  std::vector<std::string> columns;
  std::vector<ErrorRow> rows;

  [[nodiscard]] std::vector<double> column(std::size_t c) const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.errors[c]);
    return out;
  }
  [[nodiscard]] std::size_t index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no error column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
};

struct StudyResult {
  std::string study;  ///< "time" or "fem-space" / "fem-time"
  StudyConfig config;
  ErrorTable table;
  std::vector<RateEstimate> rates;  ///< per column
  std::vector<RateCheck> checks;    ///< per column
  std::vector<double> steps;        ///< the step sizes regressed against

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const RateCheck& c) { return c.ok(); });
  }
  [[nodiscard]] const RateCheck& check(const std::string& column) const { return checks.at(table.index(column)); }
};

namespace detail {

inline bool gated(const StudyConfig& cfg, const std::string& column) {
  return cfg.norms.empty() || std::find(cfg.norms.begin(), cfg.norms.end(), column) != cfg.norms.end();
}

inline void finish(StudyResult& res, const std::vector<std::optional<double>>& expected) {
  for (const auto& r : res.table.rows) res.steps.push_back(res.study == "fem-space" ? r.h : r.tau);
  for (std::size_t c = 0; c < res.table.columns.size(); ++c) {
    res.rates.push_back(estimate_rates(res.table.column(c), res.steps));
    const auto& name = res.table.columns[c];
    res.checks.push_back(check_rate(name, res.rates.back(), gated(res.config, name) ? expected[c] : std::nullopt,
                                    res.config.margin));
  }
}

/// Error columns of one dG trajectory against the closed form.
inline std::vector<double> abstract_errors(const AbstractCase& ac, const DGSolution& sol) {
  const auto& part = sol.partition();
  const auto& triple = ac.problem.triple;
  const int q = sol.degree();
  const auto rule = gauss_rule(q + 4);
  const SlabBasis& basis = sol.u.basis();
  const PiecewisePoly recon = reconstruct_derivative(sol, ac.problem.u0);
  Eigen::LLT<Mat> local_mass(basis.mass());
  const std::size_t N = part.num_slabs();

  double nodal = 0.0, l2v = 0.0, dual = 0.0, jump = 0.0, recon2 = 0.0, linf = 0.0;
  for (std::size_t n = 1; n <= N; ++n)
    nodal = std::max(nodal, triple.h_norm(ac.exact(part.node(n)) - sol.trace_minus[n]));
  for (std::size_t n = 0; n < N; ++n) {
    const SlabPoly p = sol.u.slab(n);
    const SlabPoly d = recon.slab(n);
    const double t0 = part.node(n), tau = part.width(n);
    Mat b = Mat::Zero(triple.dim(), basis.size());  // b(:, i) = int (u' - D u, L_i)_H
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = t0 + tau * rule.points[g];
      const double w = tau * rule.weights[g];
      l2v += w * triple.v_norm2(ac.exact(t) - p(t));
      dual += w * triple.embedded_vdual_norm2(ac.exact_dt(t) - p.derivative(t));
      const Vec mw = triple.mass_h() * (ac.exact_dt(t) - d(t));
      b += w * mw * basis.values(rule.points[g]).transpose();
    }
    // sup over v in S_tau|J_n of the linear functional, L^2(J_n; V) normalized
    const Mat kinv_b = triple.gram_solver().solve(b);
    const Mat mass_inv = local_mass.solve(Mat::Identity(basis.size(), basis.size())) / tau;
    recon2 += (b.transpose() * kinv_b).cwiseProduct(mass_inv).sum();
    for (int j = 0; j <= 32; ++j) {
      const double t = t0 + tau * (j == 0 ? 1e-12 : double(j) / 32);
      linf = std::max(linf, triple.h_norm(ac.exact(t) - p(t)));
    }
    if (n >= 1) jump += tau * triple.h_norm2(sol.trace_plus[n] - sol.trace_minus[n]);
  }
  const double final_err = triple.h_norm(ac.exact(part.final_time()) - sol.trace_minus[N]);
  return {nodal, std::sqrt(l2v), std::sqrt(std::max(0.0, dual)), std::sqrt(jump), std::sqrt(std::max(0.0, recon2)),
          final_err, linf};
}

}  // namespace detail

inline const std::vector<std::string>& time_study_columns() {
  static const std::vector<std::string> cols{"nodal", "L2V", "dtVdual", "jump", "recon", "final", "Linf"};
  return cols;
}

/// dG(q) on uniform (or graded) partitions with N from the ladder. Expected
/// orders: q+1 for nodal, L2V, jump and recon; q for dtVdual (q >= 1). The
/// end-point and sup-in-time columns are reported without a gate.
inline StudyResult run_time_study(const StudyConfig& cfg) {
  cfg.validate();
  const ManufacturedProblem mp = find_problem(cfg.problem);
  if (!mp.abstract_case) throw std::invalid_argument("time-study needs an abstract problem, got '" + cfg.problem + "'");
  const AbstractCase& ac = *mp.abstract_case;
  StudyResult res{"time", cfg, {time_study_columns(), {}}, {}, {}, {}};
  res.table.rows = parallel_map<ErrorRow>(cfg.ladder.size(), [&](std::size_t i) {
    const TimePartition part = make_partition(cfg.final_time, cfg.ladder[i], cfg.grading, false);
    const DGSolution sol = solve_trajectory(ac.problem, part, cfg.q);
    return ErrorRow{static_cast<int>(i), cfg.ladder[i], part.max_width(), 0.0, detail::abstract_errors(ac, sol)};
  });
  const double q1 = cfg.q + 1.0;
  std::optional<double> dq;
  if (cfg.q >= 1) dq = double(cfg.q);
  detail::finish(res, {q1, q1, dq, q1, q1, std::nullopt, std::nullopt});
  return res;
}

inline const std::vector<std::string>& fem_study_columns() {
  static const std::vector<std::string> cols{"nodal", "L2V", "dtVdual", "jump"};
  return cols;
}

namespace detail {

inline fem::Mesh study_mesh(const HeatCase& hc, int n) {
  return fem::build_mesh(hc.space_dim == 1 ? fem::Domain::interval : fem::Domain::unit_square, n);
}

/// Errors against a discrete reference trajectory on the same space; its nodes
/// must contain those of sol.
inline std::vector<double> reference_errors(const fem::AssembledOps& ops, const DGSolution& sol, const DGSolution& ref) {
  const auto& part = sol.partition();
  const auto& rpart = ref.partition();
  const auto rule = gauss_rule(sol.degree() + 4);
  auto ref_at = [&](double t) { return ref.u.eval(t, Side::left_limit); };
  auto ref_dt_at = [&](double t) {
    const std::size_t n = rpart.slab_of(t);
    return ref.u.slab(n).derivative(t);
  };
  double nodal = 0.0, h1 = 0.0, dual = 0.0, jump = 0.0;
  for (std::size_t n = 1; n <= part.num_slabs(); ++n) {
    const Vec d = ref_at(part.node(n)) - sol.trace_minus[n];
    nodal = std::max(nodal, fem::l2_norm(ops, d));
  }
  for (std::size_t n = 0; n < part.num_slabs(); ++n) {
    const SlabPoly p = sol.u.slab(n);
    const double t0 = part.node(n), tau = part.width(n);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = t0 + tau * rule.points[g];
      const double w = tau * rule.weights[g];
      const Vec e = ref_at(t) - p(t);
      h1 += w * e.dot(ops.stiffness * e);
      const Vec b = ops.mass * (ref_dt_at(t) - p.derivative(t));
      dual += w * b.dot(ops.stiffness_solver.solve(b));
    }
    if (n >= 1) {
      const Vec d = sol.trace_plus[n] - sol.trace_minus[n];
      jump += tau * d.dot(ops.mass * d);
    }
  }
  return {nodal, std::sqrt(h1), std::sqrt(std::max(0.0, dual)), std::sqrt(jump)};
}

}  // namespace detail

/// Heat studies. Space mode refines the mesh with dG(q) on fixed_slabs slabs
/// (expected k+1 nodal L^2, k in L^2(H^1_0)); time mode refines tau on a fixed
/// mesh of size 1/fixed_mesh (expected q+1 nodal and jump, q for the X_h' column).
inline StudyResult run_fem_study(const StudyConfig& cfg) {
  cfg.validate();
  const ManufacturedProblem mp = find_problem(cfg.problem);
  if (!mp.heat_case) throw std::invalid_argument("fem-study needs a heat problem, got '" + cfg.problem + "'");
  const HeatCase& hc = *mp.heat_case;
  if (cfg.k < 1 || cfg.k > 2 || (hc.space_dim == 2 && cfg.k != 1)) {
    throw std::invalid_argument("fem-study: k must be 1 or 2 in 1D and 1 in 2D");
  }
  const bool space_mode = cfg.fem_mode == FemMode::space;
  StudyResult res{space_mode ? "fem-space" : "fem-time", cfg, {fem_study_columns(), {}}, {}, {}, {}};

  if (space_mode) {
    const TimePartition part = make_partition(cfg.final_time, cfg.fixed_slabs, cfg.grading, false);
    res.table.rows = parallel_map<ErrorRow>(cfg.ladder.size(), [&](std::size_t i) {
      const fem::FeSpace space(detail::study_mesh(hc, cfg.ladder[i]), cfg.k);
      const fem::AssembledOps ops = fem::assemble(space);
      const DGSolution sol = fem::run_dg_cg(hc.heat, part, cfg.q, space, ops);
      const fem::FemErrors e = fem::fem_errors(space, ops, sol, hc.exact);
      return ErrorRow{static_cast<int>(i), cfg.ladder[i], part.max_width(), space.mesh().h(),
                      {e.nodal_l2, e.l2_h1, e.dt_xhdual, e.jump}};
    });
    detail::finish(res, {cfg.k + 1.0, double(cfg.k), std::nullopt, std::nullopt});
    return res;
  }

  const fem::FeSpace space(detail::study_mesh(hc, cfg.fixed_mesh), cfg.k);
  const fem::AssembledOps ops = fem::assemble(space);
  res.table.rows = parallel_map<ErrorRow>(cfg.ladder.size(), [&](std::size_t i) {
    const TimePartition part = make_partition(cfg.final_time, cfg.ladder[i], cfg.grading, false);
    const DGSolution sol = fem::run_dg_cg(hc.heat, part, cfg.q, space, ops);
    std::vector<double> errs;
    if (cfg.reference == FemReference::semidiscrete) {
      errs = detail::reference_errors(ops, sol, fem::semidiscrete_reference(hc.heat, part, cfg.q, space, ops));
    } else {
      const fem::FemErrors e = fem::fem_errors(space, ops, sol, hc.exact);
      errs = {e.nodal_l2, e.l2_h1, e.dt_xhdual, e.jump};
    }
    return ErrorRow{static_cast<int>(i), cfg.ladder[i], part.max_width(), space.mesh().h(), errs};
  });
  std::optional<double> dq;
  if (cfg.q >= 1) dq = double(cfg.q);
  detail::finish(res, {cfg.q + 1.0, std::nullopt, dq, cfg.q + 1.0});
  return res;
}

}  // namespace dgtime::harness
