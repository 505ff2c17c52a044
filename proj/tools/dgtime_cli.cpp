// dgtime command-line driver.
//
// Exit codes: 0 success, 1 a study or check did not meet its criteria (or a
// runtime failure), 2 configuration / usage errors.

#include "dgtime/fem/heat.hpp"
#include "dgtime/harness/config.hpp"
#include "dgtime/harness/output.hpp"
#include "dgtime/harness/registry.hpp"
#include "dgtime/harness/study.hpp"
#include "dgtime/infsup.hpp"
#include "dgtime/norms.hpp"
#include "dgtime/pade.hpp"
#include "dgtime/stepper.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace dgtime;
namespace hs = dgtime::harness;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct StudyFlags {
  std::string config;
  std::optional<std::string> problem;
  std::optional<int> q, k, fixed_slabs, fixed_mesh;
  std::vector<int> ladder;
  std::optional<double> final_time, grading, margin;
  std::optional<std::string> mode, reference, csv, json, plot;
  std::optional<unsigned> seed;
};

void add_study_flags(CLI::App* cmd, StudyFlags& f, bool fem) {
  cmd->add_option("-c,--config", f.config, "study config file");
  cmd->add_option("--problem", f.problem, "registry problem id");
  cmd->add_option("--q", f.q, "time degree");
  cmd->add_option("--ladder", f.ladder, "refinement ladder")->delimiter(',');
  cmd->add_option("--T", f.final_time, "final time");
  cmd->add_option("--grading", f.grading, "geometric grading ratio");
  cmd->add_option("--margin", f.margin, "allowed deviation of observed orders");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--csv", f.csv, "CSV error table path");
  cmd->add_option("--json", f.json, "JSON summary path");
  cmd->add_option("--plot", f.plot, "gnuplot script path");
  if (fem) {
    cmd->add_option("--k", f.k, "finite element degree");
    cmd->add_option("--mode", f.mode, "space | time")->check(CLI::IsMember({"space", "time"}));
    cmd->add_option("--reference", f.reference, "exact | semidiscrete")->check(CLI::IsMember({"exact", "semidiscrete"}));
    cmd->add_option("--fixed-slabs", f.fixed_slabs, "slabs in space mode");
    cmd->add_option("--fixed-mesh", f.fixed_mesh, "mesh subdivisions in time mode");
  }
}

hs::StudyConfig resolve(const StudyFlags& f, hs::StudyConfig cfg) {
  if (!f.config.empty()) cfg = hs::load_config(f.config);
  if (f.problem) cfg.problem = *f.problem;
  if (f.q) cfg.q = *f.q;
  if (f.k) cfg.k = *f.k;
  if (!f.ladder.empty()) cfg.ladder = f.ladder;
  if (f.final_time) cfg.final_time = *f.final_time;
  if (f.grading) cfg.grading = *f.grading;
  if (f.margin) cfg.margin = *f.margin;
  if (f.seed) cfg.seed = *f.seed;
  if (f.mode) cfg.fem_mode = *f.mode == "space" ? hs::FemMode::space : hs::FemMode::time;
  if (f.reference) cfg.reference = *f.reference == "exact" ? hs::FemReference::exact : hs::FemReference::semidiscrete;
  if (f.fixed_slabs) cfg.fixed_slabs = *f.fixed_slabs;
  if (f.fixed_mesh) cfg.fixed_mesh = *f.fixed_mesh;
  if (f.csv) cfg.csv_path = *f.csv;
  if (f.json) cfg.json_path = *f.json;
  if (f.plot) cfg.plot_path = *f.plot;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw hs::ConfigError(e.what(), 0);
  }
  return cfg;
}

void print_study(const hs::StudyResult& res) {
  std::printf("%s study, problem %s, q = %d", res.study.c_str(), res.config.problem.c_str(), res.config.q);
  if (res.study != "time") std::printf(", k = %d", res.config.k);
  std::printf("\n%5s %12s %12s", "level", "tau", "h");
  for (const auto& c : res.table.columns) std::printf(" %12s", c.c_str());
  std::printf("\n");
  for (const auto& row : res.table.rows) {
    std::printf("%5d %12.4e %12.4e", row.param, row.tau, row.h);
    for (double e : row.errors) std::printf(" %12.4e", e);
    std::printf("\n");
  }
  std::printf("%-10s %10s %10s  %s\n", "column", "observed", "expected", "status");
  for (const auto& c : res.checks) {
    const std::string obs = c.observed ? std::to_string(*c.observed).substr(0, 7) : "-";
    const std::string exp = c.expected ? std::to_string(*c.expected).substr(0, 4) : "-";
    std::printf("%-10s %10s %10s  %s\n", c.column.c_str(), obs.c_str(), exp.c_str(), hs::to_string(c.status).c_str());
  }
  std::printf("%s\n", res.passed() ? "PASS" : "FAIL");
}

int run_study(const hs::StudyResult& res) {
  print_study(res);
  hs::write_outputs(res);
  return res.passed() ? kOk : kFailed;
}

const hs::AbstractCase& abstract_case(const hs::ManufacturedProblem& mp) {
  if (!mp.abstract_case) throw std::invalid_argument("problem '" + mp.id + "' is not an abstract (matrix) problem");
  return *mp.abstract_case;
}

int cmd_solve(const std::string& problem, int q, int slabs, double final_time, double grading, int k, int n,
              const std::string& mesh_path, const std::string& csv) {
  const auto mp = hs::find_problem(problem);
  const TimePartition part = make_partition(final_time, slabs, grading);
  std::ofstream out;
  if (!csv.empty()) {
    out.open(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + csv + "'");
  }
  if (mp.abstract_case) {
    const auto& ac = *mp.abstract_case;
    const DGSolution sol = solve_trajectory(ac.problem, part, q);
    if (out) {
      out << "n,t";
      for (int i = 0; i < ac.problem.dim(); ++i) out << ",u" << i;
      out << ",err_H\r\n";
    }
    std::printf("%5s %12s %14s\n", "n", "t_n", "|u(t_n)-u^n|_H");
    for (std::size_t i = 0; i <= part.num_slabs(); ++i) {
      const double t = part.node(i);
      const double err = ac.problem.triple.h_norm(ac.exact(t) - sol.trace_minus[i]);
      std::printf("%5zu %12.6f %14.6e\n", i, t, err);
      if (out) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.10e", i, t);
        out << buf;
        for (double v : sol.trace_minus[i]) {
          std::snprintf(buf, sizeof buf, ",%.10e", v);
          out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.10e\r\n", err);
        out << buf;
      }
    }
    return kOk;
  }
  const auto& hc = *mp.heat_case;
  fem::Mesh mesh = mesh_path.empty()
                       ? fem::build_mesh(hc.space_dim == 1 ? fem::Domain::interval : fem::Domain::unit_square, n)
                       : fem::read_mesh_file(mesh_path);
  if (mesh.dim != hc.space_dim) throw std::invalid_argument("mesh dimension does not match problem '" + mp.id + "'");
  const fem::FeSpace space(std::move(mesh), k);
  const fem::AssembledOps ops = fem::assemble(space);
  const DGSolution sol = fem::run_dg_cg(hc.heat, part, q, space, ops);
  if (out) out << "n,t,norm_L2,err_L2\r\n";
  std::printf("%5s %12s %14s %14s\n", "n", "t_n", "|u^n|", "|u(t_n)-u^n|");
  for (std::size_t i = 0; i <= part.num_slabs(); ++i) {
    const double t = part.node(i);
    const double nrm = fem::l2_norm(ops, sol.trace_minus[i]);
    const double err = fem::l2_error(space, sol.trace_minus[i], [&](const fem::Point& x) { return hc.exact.value(x, t); });
    std::printf("%5zu %12.6f %14.6e %14.6e\n", i, t, nrm, err);
    if (out) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%zu,%.10e,%.10e,%.10e\r\n", i, t, nrm, err);
      out << buf;
    }
  }
  return kOk;
}

int cmd_infsup(const std::string& problem, int q, int slabs, double final_time, const std::string& sweep_kind,
               std::vector<double> values, double tau) {
  const auto mp = hs::find_problem(problem);
  const auto& ac = abstract_case(mp);
  if (sweep_kind.empty()) {
    const auto part = make_partition(final_time, slabs, 1.0, false);
    const auto sc = stability_constants(ac.problem, part, q);
    std::printf("problem %s, q = %d, N = %d, T = %g, dim = %ld\n", problem.c_str(), q, slabs, final_time,
                static_cast<long>(sc.dim));
    std::printf("c₁ = %.6f\nc₂ = %.6f\nM₀ = %.6f\nM₁ = %.6f\nM₂ = %.6f\n", sc.c1, sc.c2, sc.m0, sc.m1, sc.m2);
    return kOk;
  }
  SweepConfig cfg;
  cfg.kind = sweep_kind == "refine_tau" ? SweepKind::refine_tau
             : sweep_kind == "grow_T"   ? SweepKind::grow_T
                                        : SweepKind::vary_q;
  if (values.empty()) {
    values = cfg.kind == SweepKind::refine_tau ? std::vector<double>{1, 2, 4, 8, 16}
             : cfg.kind == SweepKind::grow_T   ? std::vector<double>{1, 2, 4}
                                               : std::vector<double>{0, 1, 2};
  }
  cfg.values = values;
  cfg.q = q;
  cfg.slabs = slabs;
  cfg.final_time = final_time;
  cfg.tau = tau;
  const auto table = sweep(cfg, ac.problem);
  std::printf("%8s %3s %5s %8s %10s %10s %10s %10s %10s\n", "param", "q", "N", "T", "c1", "c2", "M0", "M1", "M2");
  for (const auto& r : table.rows) {
    std::printf("%8g %3d %5d %8g %10.6f %10.6f %10.6f %10.6f %10.6f\n", r.param, r.q, r.slabs, r.final_time,
                r.constants.c1, r.constants.c2, r.constants.m0, r.constants.m1, r.constants.m2);
  }
  if (table.c1_decay_flag) {
    std::printf("warning: c1 dropped below half its median over the sweep\n");
    return kFailed;
  }
  return kOk;
}

int cmd_pade(int qmax, int points, double zmax, double tol) {
  double worst = 0.0;
  for (int q = 0; q <= qmax; ++q) {
    const auto pade = pade_subdiagonal(q);
    double err = 0.0;
    for (int i = 0; i < points; ++i) {
      const double z = points == 1 ? 0.0 : zmax * i / (points - 1);
      err = std::max(err, std::abs(amplification(q, z) - pade(z)));
    }
    // A-stability on the imaginary axis
    double imag_max = 0.0;
    for (int i = 0; i < points; ++i) {
      const std::complex<double> z(0.0, zmax * i / std::max(1, points - 1));
      imag_max = std::max(imag_max, std::abs(amplification(q, z)));
    }
    std::printf("q = %d  max |R - Pade| = %.3e  max |R(iy)| = %.6f\n", q, err, imag_max);
    worst = std::max(worst, err);
  }
  std::printf("max deviation %.3e (tolerance %.1e): %s\n", worst, tol, worst <= tol ? "PASS" : "FAIL");
  return worst <= tol ? kOk : kFailed;
}

int cmd_norms(const std::string& problem, int q, int slabs, double final_time, unsigned seed) {
  const auto mp = hs::find_problem(problem);
  const auto& ac = abstract_case(mp);
  const auto part = make_partition(final_time, slabs, 1.0, false);
  const DGSolution sol = solve_trajectory(ac.problem, part, q);
  const Vec diff = PiecewisePoly::interpolate(part, q, ac.exact).flatten() - sol.u.flatten();
  const PiecewisePoly err = PiecewisePoly::unflatten(part, q, ac.problem.dim(), diff);
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Vec flat(static_cast<Eigen::Index>(part.num_slabs()) * (q + 1) * ac.problem.dim());
  for (auto& x : flat) x = gauss(rng);
  const PiecewisePoly random = PiecewisePoly::unflatten(part, q, ac.problem.dim(), flat);
  std::printf("%-14s %14s %14s %14s\n", "norm", "u_tau", "I u - u_tau", "random");
  for (NormKind kind : kAllNormKinds) {
    std::printf("%-14s %14.6e %14.6e %14.6e\n", std::string(norm_name(kind)).c_str(),
                dg_norm(sol.u, ac.problem.triple, kind, part), dg_norm(err, ac.problem.triple, kind, part),
                dg_norm(random, ac.problem.triple, kind, part));
  }
  return kOk;
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double value) {
    std::printf("[%s] %-34s %.3e\n", ok ? "PASS" : "FAIL", name, value);
    failures += ok ? 0 : 1;
  };
  {
    double err = 0.0;
    for (int q = 0; q <= 3; ++q)
      for (int i = 0; i < 50; ++i) err = std::max(err, std::abs(amplification(q, 2.0 * i) - pade_subdiagonal(q)(2.0 * i)));
    report("amplification matches Pade", err <= 1e-10, err);
  }
  const auto scalar_problem = hs::find_problem("scalar");
  const auto& scalar = *scalar_problem.abstract_case;
  {
    const auto part = make_partition(1.0, 100);
    const auto sol = solve_trajectory(scalar.problem, part, 0);
    const auto be = backward_euler_averaged(scalar.problem, part);
    double err = 0.0;
    for (std::size_t n = 0; n < be.size(); ++n) err = std::max(err, (be[n] - sol.trace_minus[n + 1]).norm());
    report("dG(0) equals backward Euler", err <= 1e-12, err);
  }
  {
    const auto sc = stability_constants(scalar.problem, make_partition(1.0, 1), 0);
    report("1x1 inf-sup constant", std::abs(sc.c1 - 1.0) <= 1e-10, std::abs(sc.c1 - 1.0));
  }
  {
    const fem::FeSpace space(fem::build_mesh(fem::Domain::interval, 8), 1);
    const auto ops = fem::assemble(space);
    Vec g = Vec::LinSpaced(space.dim(), 1.0, 2.0);
    const Vec ag = fem::inverse_discrete_laplacian(ops, g);
    const double gap = std::abs(fem::h1_norm(ops, ag) - fem::xh_dual_norm(ops, g));
    report("discrete dual norm identity", gap <= 1e-10, gap);
  }
  std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
  return failures == 0 ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dG(q) time stepping: solver, convergence studies and stability diagnostics"};
  app.require_subcommand(1);

  std::string problem = "scalar";
  int q = 0, slabs = 1, k = 1, n = 16, qmax = 3, points = 50;
  double final_time = 1.0, grading = 1.0, zmax = 100.0, tol = 1e-12, tau = 0.5;
  unsigned seed = 1;
  std::string csv, sweep_kind, mesh_path;
  std::vector<double> values;

  auto* solve = app.add_subcommand("solve", "solve a registry problem and print node errors");
  solve->add_option("--problem", problem, "registry problem id")->capture_default_str();
  solve->add_option("--q", q, "time degree")->capture_default_str();
  solve->add_option("--N", slabs, "number of slabs")->capture_default_str();
  solve->add_option("--T", final_time, "final time")->capture_default_str();
  solve->add_option("--grading", grading, "geometric grading ratio")->capture_default_str();
  solve->add_option("--k", k, "finite element degree (heat problems)")->capture_default_str();
  solve->add_option("--n", n, "mesh subdivisions (heat problems)")->capture_default_str();
  solve->add_option("--mesh", mesh_path, "mesh file (heat problems), overrides --n");
  solve->add_option("--csv", csv, "write node values to CSV");

  StudyFlags time_flags, fem_flags;
  auto* time_study = app.add_subcommand("time-study", "convergence in tau on an abstract problem");
  add_study_flags(time_study, time_flags, false);
  auto* fem_study = app.add_subcommand("fem-study", "convergence in h or tau on a heat problem");
  add_study_flags(fem_study, fem_flags, true);

  auto* infsup = app.add_subcommand("infsup", "discrete inf-sup and boundedness constants");
  infsup->add_option("--problem", problem, "scalar | system2")->capture_default_str();
  infsup->add_option("--q", q, "time degree")->capture_default_str();
  infsup->add_option("--N", slabs, "number of slabs")->capture_default_str();
  infsup->add_option("--T", final_time, "final time")->capture_default_str();
  infsup->add_option("--sweep", sweep_kind, "refine_tau | grow_T | vary_q")
      ->check(CLI::IsMember({"refine_tau", "grow_T", "vary_q"}));
  infsup->add_option("--values", values, "sweep values")->delimiter(',');
  infsup->add_option("--tau", tau, "fixed width for grow_T")->capture_default_str();

  auto* pade = app.add_subcommand("pade-check", "compare the dG(q) amplification factor with Pade");
  pade->add_option("--qmax", qmax, "largest q")->capture_default_str();
  pade->add_option("--points", points, "points on [0, zmax]")->capture_default_str();
  pade->add_option("--zmax", zmax, "right end of the z grid")->capture_default_str();
  pade->add_option("--tol", tol, "pass tolerance")->capture_default_str();

  auto* norms = app.add_subcommand("norms", "evaluate the DG norm family");
  norms->add_option("--problem", problem, "scalar | system2")->capture_default_str();
  norms->add_option("--q", q, "time degree")->capture_default_str();
  norms->add_option("--N", slabs, "number of slabs")->capture_default_str();
  norms->add_option("--T", final_time, "final time")->capture_default_str();
  norms->add_option("--seed", seed, "seed for the random S_tau function")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(problem, q, slabs, final_time, grading, k, n, mesh_path, csv);
    if (*time_study) {
      hs::StudyConfig defaults;
      return run_study(hs::run_time_study(resolve(time_flags, defaults)));
    }
    if (*fem_study) {
      hs::StudyConfig defaults;
      defaults.problem = "heat1d";
      return run_study(hs::run_fem_study(resolve(fem_flags, defaults)));
    }
    if (*infsup) return cmd_infsup(problem, q, slabs, final_time, sweep_kind, values, tau);
    if (*pade) return cmd_pade(qmax, points, zmax, tol);
    if (*norms) return cmd_norms(problem, q, slabs, final_time, seed);
    if (*selftest) return cmd_selftest();
  } catch (const hs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
