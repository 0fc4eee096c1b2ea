#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "plap/error.hpp"
#include "plap/pruefer.hpp"

namespace plap {

namespace odeint = boost::numeric::odeint;

double shoot_amplitude(double p, double lambda, double y, double v) {
  // |y'|^p = |v|^(p/(p-1))
  const double yp_abs_pow = std::pow(std::abs(v), p / (p - 1.0));
  return std::pow(std::pow(std::abs(y), p) + yp_abs_pow / lambda, 1.0 / p);
}

ShootResult direct_shoot(const PTrigContext& ctx, const Potential& q, double lambda, double y0, double v0,
                         double tol) {
  if (y0 == 0.0 && v0 == 0.0) throw InputError("direct_shoot needs a nonzero initial state");
  const double p = ctx.p();
  using State = std::array<double, 2>;

  std::vector<double> cuts{0.0};
  for (double b : q.breakpoints_in(0.0, 1.0)) cuts.push_back(b);
  cuts.push_back(1.0);

  State s{y0, v0};
  int sign = (y0 > 0) - (y0 < 0);
  int changes = 0;
  double last_change_x = -1.0;

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double q_probe = 0.5 * (a + b);
    const bool constant_piece = q.kind() == PotentialKind::piecewise_constant;
    const double q_const = q.eval(q_probe);
    auto system = [&](const State& st, State& ds, double x) {
      const double qx = constant_piece ? q_const : q.eval(std::min(std::max(x, a), std::nextafter(b, a)));
      ds[0] = signed_pow(st[1], 1.0 / (p - 1.0));
      ds[1] = -(p - 1.0) * (lambda - qx) * signed_pow(st[0], p - 1.0);
    };
    auto observer = [&](const State& st, double x) {
      const int sg = (st[0] > 0) - (st[0] < 0);
      if (sg != 0 && sign != 0 && sg != sign) {
        ++changes;
        last_change_x = x;
      }
      if (sg != 0) sign = sg;
    };
    try {
      auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
      odeint::integrate_adaptive(stepper, system, s, a, b, (b - a) / 64.0, observer);
    } catch (const std::exception& e) {
      throw SolverError(std::string("direct shooting failed: ") + e.what());
    }
  }

  // A sign change detected only at x = 1 with y(1) at round-off level is the
  // endpoint zero, not an interior one.
  const double yp1 = signed_pow(s[1], 1.0 / (p - 1.0));
  if (changes > 0 && last_change_x >= 1.0 && std::abs(s[0]) <= 1e-7 * std::max(std::abs(yp1), 1e-300)) --changes;

  return {s[0], s[1], changes};
}

}  // namespace plap
