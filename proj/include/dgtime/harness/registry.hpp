#pragma once

// Manufactured problems with closed-form solutions.
//   scalar   u(t) = exp(-t), A = 1, F = 0
//   system2  2x2 with M_H = [1 .25; .25 1], A(t) = K + sin(t) S, S skew
//   heat1d   u = sin(pi x) exp(-t) on (0,1)
//   heat2d   u = sin(pi x) sin(pi y) exp(-2 pi^2 t) on (0,1)^2, f = 0

#include "dgtime/fem/heat.hpp"
#include "dgtime/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime::harness {

enum class ProblemKind { abstract, heat };

struct AbstractCase {
  ParabolicProblem problem;
  std::function<Vec(double)> exact;
  std::function<Vec(double)> exact_dt;
};

struct HeatCase {
  int space_dim = 1;
  fem::HeatProblem heat;
  fem::ExactHeat exact;
};

struct ManufacturedProblem {
  std::string id;
  std::string label;  ///< short letter used in tables
  std::string description;
  ProblemKind kind = ProblemKind::abstract;
  std::optional<AbstractCase> abstract_case;
  std::optional<HeatCase> heat_case;
};

namespace detail {

inline SpMat sparse(const Mat& m) { return m.sparseView(); }

inline ManufacturedProblem scalar_decay() {
  ManufacturedProblem p{"scalar", "a", "u' + u = 0, u(0) = 1", ProblemKind::abstract, {}, {}};
  const Mat one = Mat::Ones(1, 1);
  AbstractCase c;
  c.problem.triple = HilbertTriple(one, one);
  c.problem.op = OperatorFamily::constant(sparse(one), 1.0, 1.0);
  c.problem.u0 = Vec::Ones(1);
  c.exact = [](double t) { return Vec::Constant(1, std::exp(-t)); };
  c.exact_dt = [](double t) { return Vec::Constant(1, -std::exp(-t)); };
  p.abstract_case = std::move(c);
  return p;
}

inline ManufacturedProblem rotating_system() {
  ManufacturedProblem p{"system2", "b", "2x2 system with A(t) = K + sin(t) S", ProblemKind::abstract, {}, {}};
  Mat mh(2, 2), k(2, 2), s(2, 2);
  mh << 1.0, 0.25, 0.25, 1.0;
  k << 2.0, -1.0, -1.0, 2.0;
  s << 0.0, 1.0, -1.0, 0.0;
  AbstractCase c;
  c.problem.triple = HilbertTriple(mh, k);
  // v^T A v = v^T K v, and |v^T K^{-1/2} S K^{-1/2} w| <= |v||w| / sqrt(det K)
  c.problem.op = OperatorFamily{[k, s](double t) { return sparse(k + std::sin(t) * s); }, -1, 1.0,
                                std::sqrt(1.0 + 1.0 / 3.0)};
  auto u = [](double t) {
    Vec v(2);
    v << std::exp(-t) * std::cos(t), 1.0 + std::exp(-0.5 * t) * std::sin(2.0 * t);
    return v;
  };
  auto du = [](double t) {
    Vec v(2);
    v << -std::exp(-t) * (std::cos(t) + std::sin(t)),
        std::exp(-0.5 * t) * (2.0 * std::cos(2.0 * t) - 0.5 * std::sin(2.0 * t));
    return v;
  };
  c.problem.source = [mh, k, s, u, du](double t) -> Vec { return mh * du(t) + (k + std::sin(t) * s) * u(t); };
  c.problem.source_degree = -1;
  c.problem.u0 = u(0.0);
  c.exact = u;
  c.exact_dt = du;
  p.abstract_case = std::move(c);
  return p;
}

inline ManufacturedProblem heat_1d() {
  using std::numbers::pi;
  ManufacturedProblem p{"heat1d", "c", "u = sin(pi x) exp(-t) on (0,1)", ProblemKind::heat, {}, {}};
  HeatCase c;
  c.space_dim = 1;
  c.heat.u0 = [](const fem::Point& x) { return std::sin(pi * x.x()); };
  c.heat.source = [](const fem::Point& x, double t) { return (pi * pi - 1.0) * std::sin(pi * x.x()) * std::exp(-t); };
  c.exact.value = [](const fem::Point& x, double t) { return std::sin(pi * x.x()) * std::exp(-t); };
  c.exact.grad = [](const fem::Point& x, double t) {
    return fem::Point(pi * std::cos(pi * x.x()) * std::exp(-t), 0.0);
  };
  c.exact.dt = [](const fem::Point& x, double t) { return -std::sin(pi * x.x()) * std::exp(-t); };
  p.heat_case = std::move(c);
  return p;
}

inline ManufacturedProblem heat_2d() {
  using std::numbers::pi;
  ManufacturedProblem p{"heat2d", "d", "u = sin(pi x) sin(pi y) exp(-2 pi^2 t) on (0,1)^2", ProblemKind::heat, {}, {}};
  HeatCase c;
  c.space_dim = 2;
  const double lambda = 2.0 * pi * pi;
  c.heat.u0 = [](const fem::Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
  c.exact.value = [lambda](const fem::Point& x, double t) {
    return std::sin(pi * x.x()) * std::sin(pi * x.y()) * std::exp(-lambda * t);
  };
  c.exact.grad = [lambda](const fem::Point& x, double t) {
    const double e = std::exp(-lambda * t);
    return fem::Point(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()) * e,
                      pi * std::sin(pi * x.x()) * std::cos(pi * x.y()) * e);
  };
  c.exact.dt = [lambda](const fem::Point& x, double t) {
    return -lambda * std::sin(pi * x.x()) * std::sin(pi * x.y()) * std::exp(-lambda * t);
  };
  p.heat_case = std::move(c);
  return p;
}

}  // namespace detail

inline std::vector<ManufacturedProblem> registry() {
  return {detail::scalar_decay(), detail::rotating_system(), detail::heat_1d(), detail::heat_2d()};
}

/// Lookup by id ("scalar") or table label ("a").
inline ManufacturedProblem find_problem(const std::string& key) {
  for (auto& p : registry())
    if (p.id == key || p.label == key) return p;
  throw std::invalid_argument("unknown problem '" + key + "'");
}

inline std::vector<std::string> problem_ids() {
  std::vector<std::string> out;
  for (const auto& p : registry()) out.push_back(p.id);
  return out;
}

}  // namespace dgtime::harness
