#pragma once

#include <span>
#include <utility>
#include <vector>

namespace plap {

/// Exponent of the p-Laplacian. Always strictly greater than one.
class PParam {
 public:
  explicit PParam(double p);
  double value() const { return p_; }

 private:
  double p_;
};

/// |x|^s sgn(x). Requires s > 0.
double signed_pow(double x, double s);

/// Half period 2*pi / (p sin(pi/p)); consecutive zeros of S_p are this far apart.
double half_period(PParam p);

/// Real number or a signed infinity. Used for the p-tangent at its pole so
/// that Neumann-type boundary data stay exact instead of overflowing.
struct ExtendedReal {
  double value = 0.0;
  int inf_sign = 0;  // +1 or -1 when infinite

  static ExtendedReal finite(double v) { return {v, 0}; }
  static ExtendedReal infinity(int sign = 1) { return {0.0, sign >= 0 ? 1 : -1}; }
  bool is_infinite() const { return inf_sign != 0; }
  /// Multiply by a finite scalar; infinities keep their flag and flip sign with it.
  ExtendedReal scaled(double k) const;
};

/// S_p(x), S_p'(x) and their p-th absolute powers, which the phase
/// integrators consume directly.
struct SpValues {
  double s = 0.0;
  double c = 1.0;
  double s_abs_pow = 0.0;  // |S_p|^p
  double c_abs_pow = 1.0;  // |S_p'|^p, equal to 1 - s_abs_pow
};

/// Generalized trigonometric functions for a fixed exponent p.
///
/// On the quarter period [0, pi_hat/2], S_p is the inverse of
/// y -> int_0^y (1 - t^p)^(-1/p) dt. That integral is evaluated by two
/// convergent binomial series: one in u = y^p for y^p <= 1/2, and one in
/// w = S_p'^p, which is the local expansion about the maximum at pi_hat/2,
/// for the remaining part. Both are inverted by Newton iteration seeded from a
/// monotone table. The rest of the real line follows from oddness and the
/// reflection S_p(pi_hat - x) = S_p(x).
///
/// Immutable after construction; safe to share between threads.
class PTrigContext {
 public:
  explicit PTrigContext(PParam p, double eps = 1e-10);

  double p() const { return p_; }
  double pi_hat() const { return pi_hat_; }
  double eps() const { return eps_; }

  /// (S_p(x), S_p'(x)) for any real x.
  std::pair<double, double> sp_pair(double x) const;
  SpValues eval(double x) const;

  /// p-tangent S_p/S_p' on [0, pi_hat). Zero at 0, +infinity at pi_hat/2.
  ExtendedReal wct(double gamma) const;
  /// Principal inverse of wct with values in [0, pi_hat).
  double wct_inv(ExtendedReal v) const;

  /// p-cotangent S_p'/S_p on (0, pi_hat), with the boundary convention that
  /// gamma = 0 maps to 0 (the Dirichlet end carries no correction term).
  double cot_hat(double gamma) const;
  /// Inverse of the p-cotangent taken about the maximum: the unique
  /// gamma in (0, pi_hat) with S_p'(gamma)/S_p(gamma) = v. Equals pi_hat/2 at
  /// v = 0, where gamma = pi_hat/2 - v^(p-1)/(p-1) + O(v^(2p-1)).
  double cot_inv_about_max(double v) const;

  /// Generalized atan2: the angle a in [0, 2 pi_hat) with
  /// (S_p(a), S_p'(a)) proportional (positively) to (y, w).
  /// (y, w) must not both vanish.
  double angle_of(double y, double w) const;

  /// Quarter-period samples (x_i, S_p(x_i)) on [0, pi_hat/2].
  std::span<const double> table_x() const { return table_x_; }
  std::span<const double> table_s() const { return table_s_; }

 private:
  // Quarter period values. x0 in [0, pi_hat/2], r = pi_hat/2 - x0 passed
  // separately so the branch near the maximum keeps its relative accuracy.
  SpValues quarter(double x0, double r) const;
  double series_low(double u) const;   // sum g_k u^k
  double series_high(double w) const;  // sum h_k w^k
  double solve_low(double x) const;    // y with G(y) = x
  double solve_high(double r) const;   // z = S_p'^(p-1) with H = r
  double angle_from_ratio(double a_pow, double b_pow, double a, double b) const;

  double p_;
  double pi_hat_;
  double eps_;
  double x_mid_;  // G(2^(-1/p)), branch switch
  std::vector<double> low_coef_;
  std::vector<double> high_coef_;
  // Newton seeds: y at uniform x on [0, x_mid], z at uniform r on [0, pi_hat/2 - x_mid].
  std::vector<double> seed_low_;
  std::vector<double> seed_high_;
  std::vector<double> table_x_;
  std::vector<double> table_s_;
};

}  // namespace plap
