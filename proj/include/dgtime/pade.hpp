#pragma once

// One-step view of dG(q): the amplification factor for y' = -lambda y and the
// sub-diagonal Pade approximant of exp(-z) it reproduces.

#include "dgtime/piecewise.hpp"

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

/// Pade approximant num(z)/den(z) of exp(-z); den has constant term 1.
struct RationalFunction {
  std::vector<double> num;  ///< ascending powers, degree q
  std::vector<double> den;  ///< ascending powers, degree q+1

  template <class Scalar>
  [[nodiscard]] Scalar operator()(Scalar z) const {
    auto horner = [&z](const std::vector<double>& c) {
      Scalar acc(0);
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + Scalar(*it);
      return acc;
    };
    return horner(num) / horner(den);
  }
};

/// (q+1, q) Pade approximant of exp(-z): numerator degree q, denominator degree q+1.
/// Coefficients from the closed form, built by term ratios to avoid factorial overflow.
inline RationalFunction pade_subdiagonal(int q) {
  if (q < 0) throw std::invalid_argument("pade_subdiagonal: q must be >= 0");
  const int j = q, k = q + 1;  // numerator / denominator degrees
  RationalFunction r;
  r.num.assign(j + 1, 0.0);
  r.den.assign(k + 1, 0.0);
  r.num[0] = r.den[0] = 1.0;
  // n_i = (j+k-i)! j! / ((j+k)! i! (j-i)!) (-1)^i
  for (int i = 1; i <= j; ++i) r.num[i] = -r.num[i - 1] * double(j - i + 1) / (double(i) * (j + k - i + 1));
  // d_i = (j+k-i)! k! / ((j+k)! i! (k-i)!)
  for (int i = 1; i <= k; ++i) r.den[i] = r.den[i - 1] * double(k - i + 1) / (double(i) * (j + k - i + 1));
  return r;
}

/// End-of-slab value of dG(q) for y' = -z y on the unit slab with y(0) = 1,
/// integrals evaluated exactly.
template <class Scalar>
Scalar amplification(int q, Scalar z) {
  if (q < 0) throw std::invalid_argument("amplification: q must be >= 0");
  const SlabBasis basis(q);
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VecS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::MatrixXd real_part = basis.advection() + basis.at_left() * basis.at_left().transpose();
  MatS sys = real_part.cast<Scalar>() + z * basis.mass().cast<Scalar>();
  const VecS rhs = basis.at_left().cast<Scalar>();
  Eigen::FullPivLU<MatS> lu(sys);
  if (!lu.isInvertible()) {
    throw std::runtime_error("amplification: singular slab system (pole of the rational function)");
  }
  const VecS y = lu.solve(rhs);
  return basis.at_right().cast<Scalar>().dot(y);
}

}  // namespace dgtime
