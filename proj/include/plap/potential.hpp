#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace plap {

enum class PotentialKind { piecewise_constant, trig_poly, samples };

/// A potential q in L^1(0,1), optionally extended with period one.
///
/// Three representations:
///   - piecewise_constant: values[i] on [breaks[i], breaks[i+1]), right-continuous,
///   - trig_poly: a0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), k >= 1,
///   - samples: linear interpolation through (x_i, q_i) with x_0 = 0, x_last = 1.
/// Integrals are closed form for all three (trapezoid-exact for samples).
class Potential {
 public:
  static Potential piecewise(std::vector<double> breaks, std::vector<double> values, bool periodic = true);
  static Potential trig(double a0, std::vector<double> a, std::vector<double> b);
  static Potential samples(std::vector<double> x, std::vector<double> q, bool periodic = true);
  static Potential constant(double c);
  static Potential zero() { return constant(0.0); }

  PotentialKind kind() const { return kind_; }
  bool periodic() const { return periodic_; }

  /// q + c, same representation.
  Potential shifted(double c) const;

  double eval(double x) const;
  double integral(double a, double b) const;
  double mean() const { return integral(0.0, 1.0); }
  double l1_norm() const { return abs_deviation(0.0, 1.0, 0.0); }
  /// int_a^b |q(x) - c| dx, exact up to root location for trig polynomials.
  double abs_deviation(double a, double b, double c) const;

  /// Upper bound of |q| and lower bound of q (both tight except for trig).
  double sup_abs() const;
  double lower_bound() const;

  /// Points in [0,1] where q or a derivative may jump, sorted, including 0 and 1.
  std::vector<double> breakpoints() const;
  /// Breakpoints of the extension that fall strictly inside (a, b).
  std::vector<double> breakpoints_in(double a, double b) const;

  nlohmann::json to_json() const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double a0() const { return a0_; }
  const std::vector<double>& cos_coef() const { return a_; }
  const std::vector<double>& sin_coef() const { return b_; }

 private:
  Potential() = default;
  double reduce(double x) const;  // map into [0,1] according to the extension rule
  double antiderivative(double x) const;  // int_0^x q
  double local_antiderivative(double t) const;  // only t in [0,1]
  double abs_deviation_reduced(double a, double b, double c) const;  // 0 <= a <= b <= 1

  PotentialKind kind_ = PotentialKind::piecewise_constant;
  bool periodic_ = true;
  std::vector<double> knots_;   // breaks or sample abscissae
  std::vector<double> values_;  // piece values or sample ordinates
  std::vector<double> prefix_;  // int_0^{knots_[i]} q
  double a0_ = 0.0;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Parse {"kind":"piecewise"|"trig"|"samples", ...}.
Potential potential_from_json(const nlohmann::json& doc);
Potential parse_potential(std::string_view text);
/// Samples potential from a two-column "x,q" CSV. A header line and '#'
/// comments are allowed.
Potential read_samples_csv(std::istream& in, bool periodic = true);

}  // namespace plap
