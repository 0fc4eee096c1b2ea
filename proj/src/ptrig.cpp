#include "plap/ptrig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace plap {

namespace {

constexpr int kSeriesTerms = 64;
constexpr int kSeedPoints = 512;
constexpr int kTablePoints = 257;
constexpr int kMaxNewton = 30;

double horner(const std::vector<double>& coef, double t) {
  double acc = 0.0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double interp_seed(const std::vector<double>& seed, double step, double t) {
  const double pos = t / step;
  const auto last = static_cast<double>(seed.size() - 1);
  if (pos >= last) return seed.back();
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return seed[i] + f * (seed[i + 1] - seed[i]);
}

}  // namespace

PParam::PParam(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("exponent p must be finite and > 1, got " + std::to_string(p));
}

double signed_pow(double x, double s) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), s), x);
}

double half_period(PParam p) {
  const double pv = p.value();
  return 2.0 * std::numbers::pi / (pv * std::sin(std::numbers::pi / pv));
}

ExtendedReal ExtendedReal::scaled(double k) const {
  if (!is_infinite()) return finite(value * k);
  if (k == 0.0) throw std::domain_error("0 * infinity in ExtendedReal::scaled");
  return infinity(k > 0 ? inf_sign : -inf_sign);
}

PTrigContext::PTrigContext(PParam p, double eps)
    : p_(p.value()), pi_hat_(half_period(p)), eps_(eps) {
  if (!(eps > 0.0 && eps < 1e-2))
    throw std::invalid_argument("S_p accuracy eps must lie in (0, 1e-2)");

  // (1 - u)^(-1/p) = sum c_k u^k,  (1 - w)^(1/p - 1) = sum d_k w^k.
  low_coef_.resize(kSeriesTerms);
  high_coef_.resize(kSeriesTerms);
  double c = 1.0;
  double d = 1.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    low_coef_[k] = c / (p_ * k + 1.0);
    high_coef_[k] = d / (p_ * k + p_ - 1.0);
    c *= (1.0 / p_ + k) / (k + 1.0);
    d *= (1.0 - 1.0 / p_ + k) / (k + 1.0);
  }

  const double y_mid = std::pow(0.5, 1.0 / p_);
  x_mid_ = y_mid * series_low(0.5);
  const double r_max = 0.5 * pi_hat_ - x_mid_;

  // Seeds by continuation; solve_* falls back to these so fill them
  // with a dedicated Newton loop first.
  seed_low_.assign(kSeedPoints + 1, 0.0);
  seed_high_.assign(kSeedPoints + 1, 0.0);
  const double dx = x_mid_ / kSeedPoints;
  const double dr = r_max / kSeedPoints;
  double y = 0.0;
  double z = 0.0;
  for (int i = 1; i <= kSeedPoints; ++i) {
    const double x = dx * i;
    for (int it = 0; it < 100; ++it) {
      const double u = std::pow(y, p_);
      const double step = (y * series_low(u) - x) * std::pow(1.0 - u, 1.0 / p_);
      y = std::clamp(y - step, 0.0, y_mid * 1.01);
      if (std::abs(step) < 1e-16) break;
    }
    seed_low_[i] = y;

    const double r = dr * i;
    if (z == 0.0) z = r * (p_ - 1.0);
    for (int it = 0; it < 100; ++it) {
      const double w = std::pow(z, p_ / (p_ - 1.0));
      const double step = (z * series_high(w) - r) * (p_ - 1.0) * std::pow(1.0 - w, 1.0 - 1.0 / p_);
      z = std::max(z - step, 0.0);
      if (std::abs(step) < 1e-16) break;
    }
    seed_high_[i] = z;
  }

  table_x_.resize(kTablePoints);
  table_s_.resize(kTablePoints);
  for (int i = 0; i < kTablePoints; ++i) {
    const double x = 0.5 * pi_hat_ * i / (kTablePoints - 1);
    table_x_[i] = x;
    table_s_[i] = quarter(x, 0.5 * pi_hat_ - x).s;
  }
}

double PTrigContext::series_low(double u) const { return horner(low_coef_, u); }
double PTrigContext::series_high(double w) const { return horner(high_coef_, w); }

double PTrigContext::solve_low(double x) const {
  double y = interp_seed(seed_low_, x_mid_ / kSeedPoints, x);
  const double tol = std::min(1e-3 * eps_, 1e-14);
  for (int it = 0; it < kMaxNewton; ++it) {
    const double u = std::pow(y, p_);
    const double step = (y * series_low(u) - x) * std::pow(1.0 - u, 1.0 / p_);
    y -= step;
    if (std::abs(step) <= tol * std::max(y, 1e-300) || std::abs(step) < 1e-300) break;
  }
  return std::max(y, 0.0);
}

double PTrigContext::solve_high(double r) const {
  const double r_max = 0.5 * pi_hat_ - x_mid_;
  double z = interp_seed(seed_high_, r_max / kSeedPoints, r);
  const double tol = std::min(1e-3 * eps_, 1e-14);
  const double q = p_ / (p_ - 1.0);
  for (int it = 0; it < kMaxNewton; ++it) {
    const double w = std::pow(z, q);
    const double step = (z * series_high(w) - r) * (p_ - 1.0) * std::pow(1.0 - w, 1.0 - 1.0 / p_);
    z -= step;
    if (z < 0.0) z = 0.0;
    if (std::abs(step) <= tol * std::max(z, 1e-300) || std::abs(step) < 1e-300) break;
  }
  return z;
}

SpValues PTrigContext::quarter(double x0, double r) const {
  SpValues v;
  if (x0 <= x_mid_) {
    const double y = solve_low(x0);
    const double u = std::pow(y, p_);
    v.s = y;
    v.s_abs_pow = u;
    v.c_abs_pow = 1.0 - u;
    v.c = std::pow(1.0 - u, 1.0 / p_);
  } else {
    const double z = solve_high(std::max(r, 0.0));
    const double w = std::pow(z, p_ / (p_ - 1.0));
    v.c = std::pow(z, 1.0 / (p_ - 1.0));
    v.c_abs_pow = w;
    v.s_abs_pow = 1.0 - w;
    v.s = std::pow(1.0 - w, 1.0 / p_);
  }
  return v;
}

SpValues PTrigContext::eval(double x) const {
  const bool negative = x < 0.0;
  if (negative) x = -x;
  const double period = 2.0 * pi_hat_;
  const double half = 0.5 * pi_hat_;
  double t = x - std::floor(x / period) * period;
  if (t >= period || t < 0.0) t = 0.0;
  const int k = std::min(3, static_cast<int>(t / half));

  SpValues v;
  switch (k) {
    case 0:
      v = quarter(t, half - t);
      break;
    case 1:
      v = quarter(pi_hat_ - t, t - half);
      v.c = -v.c;
      break;
    case 2:
      v = quarter(t - pi_hat_, 3.0 * half - t);
      v.s = -v.s;
      v.c = -v.c;
      break;
    default:
      v = quarter(period - t, t - 3.0 * half);
      v.s = -v.s;
      break;
  }
  if (negative) v.s = -v.s;
  return v;
}

std::pair<double, double> PTrigContext::sp_pair(double x) const {
  const SpValues v = eval(x);
  return {v.s, v.c};
}

ExtendedReal PTrigContext::wct(double gamma) const {
  if (!(gamma >= 0.0 && gamma < pi_hat_))
    throw std::domain_error("wct argument must lie in [0, pi_hat)");
  if (gamma == 0.0) return ExtendedReal::finite(0.0);
  const SpValues v = eval(gamma);
  if (v.c == 0.0) return ExtendedReal::infinity(+1);
  return ExtendedReal::finite(v.s / v.c);
}

double PTrigContext::wct_inv(ExtendedReal v) const {
  if (v.is_infinite()) return 0.5 * pi_hat_;
  if (v.value >= 0.0) return angle_of(v.value, 1.0);
  return angle_of(-v.value, -1.0);
}

double PTrigContext::cot_hat(double gamma) const {
  if (!(gamma >= 0.0 && gamma < pi_hat_))
    throw std::domain_error("cot_hat argument must lie in [0, pi_hat)");
  if (gamma == 0.0) return 0.0;
  const SpValues v = eval(gamma);
  return v.c / v.s;
}

double PTrigContext::cot_inv_about_max(double v) const { return angle_of(1.0, v); }

double PTrigContext::angle_from_ratio(double a_pow, double b_pow, double a, double b) const {
  // a = |S|, b = |S'| on the quarter period, a^p + b^p = 1.
  if (a_pow <= 0.5) return a * series_low(a_pow);
  return 0.5 * pi_hat_ - std::pow(b, p_ - 1.0) * series_high(b_pow);
}

double PTrigContext::angle_of(double y, double w) const {
  const double m = std::max(std::abs(y), std::abs(w));
  if (m == 0.0 || !std::isfinite(m)) throw std::domain_error("angle_of needs a nonzero finite vector");
  const double ay = std::pow(std::abs(y) / m, p_);
  const double aw = std::pow(std::abs(w) / m, p_);
  const double tot = ay + aw;
  const double a_pow = ay / tot;
  const double b_pow = aw / tot;
  const double x0 = angle_from_ratio(a_pow, b_pow, std::pow(a_pow, 1.0 / p_), std::pow(b_pow, 1.0 / p_));
  const bool y_neg = std::signbit(y) && y != 0.0;
  const bool w_neg = std::signbit(w) && w != 0.0;
  if (!y_neg && !w_neg) return x0;
  if (!y_neg && w_neg) return pi_hat_ - x0;
  if (y_neg && w_neg) return pi_hat_ + x0;
  return 2.0 * pi_hat_ - x0;
}

}  // namespace plap
