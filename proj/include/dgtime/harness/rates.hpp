#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime::harness {

/// Errors at or below this are treated as exact reproduction.
inline constexpr double kExactFloor = 1e-13;

struct RateEstimate {
  std::vector<std::optional<double>> pairwise;  ///< empty where either error is at the floor
  std::optional<double> slope;                  ///< least squares over the last three levels
  bool exact = false;                           ///< every error in the window at the floor
};

/// Observed orders for errors e_i at step sizes s_i: pairwise log(e_i/e_{i+1}) / log(s_i/s_{i+1})
/// and the least-squares slope of log e against log s over the last three levels.
inline RateEstimate estimate_rates(const std::vector<double>& errors, const std::vector<double>& steps) {
  if (errors.size() != steps.size()) throw std::invalid_argument("estimate_rates: size mismatch");
  if (errors.size() < 2) throw std::invalid_argument("estimate_rates: need at least two levels");
  for (double e : errors)
    if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("estimate_rates: errors must be finite and >= 0");
  for (double s : steps)
    if (!(s > 0.0)) throw std::invalid_argument("estimate_rates: steps must be positive");
  RateEstimate out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] <= kExactFloor || errors[i + 1] <= kExactFloor) {
      out.pairwise.emplace_back();
    } else {
      out.pairwise.emplace_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]));
    }
  }
  const std::size_t first = errors.size() >= 3 ? errors.size() - 3 : 0;
  bool all_floor = true, any_floor = false;
  for (std::size_t i = first; i < errors.size(); ++i) {
    all_floor = all_floor && errors[i] <= kExactFloor;
    any_floor = any_floor || errors[i] <= kExactFloor;
  }
  out.exact = all_floor;
  if (!any_floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(errors.size() - first);
    for (std::size_t i = first; i < errors.size(); ++i) {
      const double x = std::log(steps[i]), y = std::log(errors[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (den > 0.0) out.slope = (n * sxy - sx * sy) / den;
  }
  return out;
}

enum class RateStatus { pass, fail, exact, skipped };

inline std::string to_string(RateStatus s) {
  switch (s) {
    case RateStatus::pass: return "pass";
    case RateStatus::fail: return "fail";
    case RateStatus::exact: return "exact";
    case RateStatus::skipped: return "skipped";
  }
  return "?";
}

struct RateCheck {
  std::string column;
  std::optional<double> expected;  ///< empty: reported only
  std::optional<double> observed;
  double margin = 0.2;
  RateStatus status = RateStatus::skipped;

  [[nodiscard]] bool ok() const { return status != RateStatus::fail; }
};

/// pass iff |slope - expected| <= margin; "exact" when the errors sit at the floor.
inline RateCheck check_rate(std::string column, const RateEstimate& est, std::optional<double> expected,
                            double margin = 0.2) {
  RateCheck c{std::move(column), expected, est.slope, margin, RateStatus::skipped};
  if (!expected) return c;
  if (est.exact) {
    c.status = RateStatus::exact;
  } else if (!est.slope) {
    c.status = RateStatus::fail;
  } else {
    c.status = std::abs(*est.slope - *expected) <= margin ? RateStatus::pass : RateStatus::fail;
  }
  return c;
}

}  // namespace dgtime::harness
