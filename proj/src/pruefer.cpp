#include "plap/pruefer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

namespace {

using State = std::array<double, 3>;  // psi, log r, weighted integral

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Dense output (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct PhaseRhs {
  const PTrigContext& ctx;
  const Potential& q;
  const Potential* weight;
  double lambda;
  double scale;
  double inv_scale_pm1;  // scale^(1-p)
  double seg_end;        // potential is sampled from the left at the segment end
  double seg_begin;
  mutable std::size_t evals = 0;

  State operator()(double x, const State& y) const {
    ++evals;
    const double xe = (x >= seg_end) ? std::nextafter(seg_end, seg_begin) : x;
    const double qx = q.eval(xe);
    const SpValues v = ctx.eval(y[0]);
    const double lam_eff = (lambda - qx) * inv_scale_pm1;
    State d;
    d[0] = scale * v.c_abs_pow + lam_eff * v.s_abs_pow;
    // S^(p-1) S' = |S|^p / S * S'
    const double sp_pm1 = (v.s == 0.0) ? 0.0 : v.s_abs_pow / v.s;
    d[1] = (scale - lam_eff) * v.c * sp_pm1;
    d[2] = weight ? weight->eval(xe) * (v.s_abs_pow - 1.0 / ctx.p()) : 0.0;
    return d;
  }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (auto [a, k] : terms)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * a * (*k)[i];
  return out;
}

struct Dense {
  State r1, r2, r3, r4, r5;
  double at(std::size_t i, double s) const {
    const double s1 = 1.0 - s;
    return r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
  }
};

std::vector<double> segment_cuts(const Potential& q, const Potential* w) {
  std::vector<double> cuts{0.0, 1.0};
  for (double b : q.breakpoints_in(0.0, 1.0)) cuts.push_back(b);
  if (w)
    for (double b : w->breakpoints_in(0.0, 1.0)) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

PhasePath integrate_angle(const PTrigContext& ctx, const Potential& q, double lambda, double scale, double angle0,
                          const PhaseOptions& opts) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("phase scale must be positive");
  if (!std::isfinite(lambda) || !std::isfinite(angle0)) throw InputError("lambda and initial angle must be finite");
  if (!(opts.tol > 1e-14 && opts.tol < 1e-3)) throw InputError("phase tolerance out of range");

  const double p = ctx.p();
  const double ph = ctx.pi_hat();
  PhaseRhs rhs{ctx, q, opts.weight, lambda, scale, std::pow(scale, 1.0 - p), 1.0, 0.0};

  PhasePath path;
  path.lambda = lambda;
  path.scale = scale;
  path.pi_hat = ph;
  path.angle0 = angle0;

  const double tol = opts.tol;
  const double x_tol = 2e-16;  // crossings are located to round-off on the dense output
  const auto cuts = segment_cuts(q, opts.weight);

  State y{angle0, 0.0, 0.0};
  // Initial step: a fraction of the time to sweep one half period.
  const double speed = std::max({scale, std::abs(lambda - q.lower_bound()) * rhs.inv_scale_pm1, std::abs(lambda) * rhs.inv_scale_pm1, 1.0});
  double h_try = std::min(0.05, 0.1 * ph / speed);

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    rhs.seg_begin = a;
    rhs.seg_end = b;
    double x = a;
    State k1 = rhs(x, y);
    while (x < b) {
      bool last = false;
      double h = h_try;
      if (x + h >= b || b - (x + h) < 1e-3 * h) {
        h = b - x;
        last = true;
      }
      if (path.steps.accepted + path.steps.rejected >= opts.max_steps) {
        std::ostringstream msg;
        msg << "phase integration exceeded " << opts.max_steps << " steps at x=" << x;
        throw SolverError(msg.str());
      }
      const State k2 = rhs(x + c2 * h, axpy(y, h, {{a21, &k1}}));
      const State k3 = rhs(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const State k4 = rhs(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = rhs(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State k6 = rhs(x + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State yn = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      const State k7 = rhs(x + h, yn);

      double err = 0.0;
      const std::size_t n_ctrl = opts.weight ? 3 : 2;
      for (std::size_t i = 0; i < n_ctrl; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(yn[i])));
        err = std::max(err, std::abs(e) / sc);
      }

      if (err <= 1.0) {
        ++path.steps.accepted;
        if (opts.record_crossings) {
          double next = std::floor(y[0] / ph) + 1.0;
          if (next * ph <= yn[0]) {
            Dense dense;
            dense.r1 = y;
            for (std::size_t i = 0; i < 3; ++i) {
              const double ydiff = yn[i] - y[i];
              const double bspl = h * k1[i] - ydiff;
              dense.r2[i] = ydiff;
              dense.r3[i] = bspl;
              dense.r4[i] = ydiff - h * k7[i] - bspl;
              dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            for (; next * ph <= yn[0]; next += 1.0) {
              const double target = next * ph;
              double lo = 0.0, hi = 1.0;
              for (int it = 0; it < 64 && (hi - lo) * h > x_tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dense.at(0, mid) < target)
                  lo = mid;
                else
                  hi = mid;
              }
              path.crossings.push_back(x + 0.5 * (lo + hi) * h);
            }
          }
        }
        x = last ? b : x + h;
        y = yn;
        k1 = k7;
      } else {
        ++path.steps.rejected;
      }
      const double fac = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err > 1.0) {
        h_try = h * std::min(fac, 0.9);
        if (h_try < 1e-14 * std::max(1.0, std::abs(x))) {
          std::ostringstream msg;
          msg << "step-size underflow at x=" << x << " (lambda=" << lambda << ")";
          throw SolverError(msg.str());
        }
      } else if (!last || h * fac < h_try) {
        h_try = h * fac;
      }
    }
  }
  std::sort(path.crossings.begin(), path.crossings.end());
  if (opts.record_crossings) {
    // angle reaching a multiple of pi_hat at x = 1 only up to the tolerance
    const double k = std::round(y[0] / ph);
    const double gap = k * ph - y[0];
    const bool have = !path.crossings.empty() && path.crossings.back() >= 1.0 - 1e-9;
    if (k >= 1.0 && gap > 0.0 && gap <= 64.0 * tol * std::max(1.0, std::abs(y[0])) && !have)
      path.crossings.push_back(1.0);
  }

  path.angle1 = y[0];
  path.logr_delta = y[1];
  path.weighted = y[2];
  path.steps.rhs_evals = rhs.evals;
  const double mu_std = lambda > 0.0 ? std::pow(lambda, 1.0 / p) : 0.0;
  if (lambda > 0.0 && std::abs(scale - mu_std) <= 1e-14 * mu_std) {
    path.theta0 = angle0 / scale;
    path.theta1 = y[0] / scale;
  } else {
    path.theta0 = path.theta1 = std::numeric_limits<double>::quiet_NaN();
  }
  return path;
}

PhasePath integrate_phase(const PTrigContext& ctx, const Potential& q, double lambda, double theta0, double tol) {
  if (!(lambda > 0.0)) throw InputError("integrate_phase needs lambda > 0");
  if (!(tol > 1e-13 && tol < 1e-4)) throw InputError("integrate_phase tolerance must lie in (1e-13, 1e-4)");
  const double mu = std::pow(lambda, 1.0 / ctx.p());
  PhaseOptions opts;
  opts.tol = tol;
  return integrate_angle(ctx, q, lambda, mu, mu * theta0, opts);
}

std::size_t NodalSet::index_of(double x) const {
  if (zeros.empty()) return 0;
  auto it = std::upper_bound(zeros.begin(), zeros.end(), x);
  if (it == zeros.begin()) return closure == Closure::wrap_around ? zeros.size() - 1 : 0;
  return static_cast<std::size_t>(it - zeros.begin()) - 1;
}

double NodalSet::length_for(std::size_t j) const {
  if (j < lengths.size()) return lengths[j];
  if (closure != Closure::none) return closing_length;
  if (lengths.empty()) return std::numeric_limits<double>::quiet_NaN();
  return lengths.back();
}

bool NodalSet::in_wrap(double x) const {
  if (closure != Closure::wrap_around || zeros.empty()) return false;
  return x < zeros.front() || x >= zeros.back();
}

NodalSet nodal_set(const PhasePath& path, Closure closure) {
  NodalSet out;
  out.lambda = path.lambda;
  const double ph = path.pi_hat;
  constexpr double edge = 1e-9;

  const double rem = std::remainder(path.angle0, ph);
  out.zero_at_left = std::abs(rem) <= 1e-12 * std::max(1.0, std::abs(path.angle0));
  if (out.zero_at_left) out.zeros.push_back(0.0);

  bool zero_at_right = false;
  for (double x : path.crossings) {
    if (x <= edge && out.zero_at_left) continue;
    if (x >= 1.0 - edge) {
      zero_at_right = true;
      continue;
    }
    out.zeros.push_back(x);
  }
  if (closure == Closure::automatic) closure = zero_at_right ? Closure::right_endpoint : Closure::none;
  const bool zero_near_left = !out.zeros.empty() && out.zeros.front() <= edge;
  if (closure == Closure::wrap_around && zero_at_right && !zero_near_left) {
    // a zero at 1 is the zero at 0 of the next period
    out.zeros.insert(out.zeros.begin(), 0.0);
    out.zero_at_left = true;
  }

  out.closure = closure;
  out.n = static_cast<int>(out.zeros.size());
  for (std::size_t k = 0; k + 1 < out.zeros.size(); ++k) out.lengths.push_back(out.zeros[k + 1] - out.zeros[k]);
  if (out.zeros.empty()) {
    out.diagnostic = "no zeros in [0,1): lambda lies below the first oscillation";
    out.closure = Closure::none;
    return out;
  }
  if (closure == Closure::right_endpoint) out.closing_length = 1.0 - out.zeros.back();
  if (closure == Closure::wrap_around) out.closing_length = 1.0 + out.zeros.front() - out.zeros.back();
  return out;
}

NodalSet nodal_set_from_zeros(std::vector<double> zeros, Closure closure, double lambda) {
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    if (!(zeros[k] >= 0.0 && zeros[k] < 1.0)) throw InputError("nodal points must lie in [0, 1)");
    if (k > 0 && !(zeros[k] > zeros[k - 1])) throw InputError("nodal points must be strictly increasing");
  }
  NodalSet out;
  out.lambda = lambda;
  out.zeros = std::move(zeros);
  out.n = static_cast<int>(out.zeros.size());
  out.zero_at_left = !out.zeros.empty() && out.zeros.front() == 0.0;
  if (closure == Closure::automatic) closure = Closure::none;
  for (std::size_t k = 0; k + 1 < out.zeros.size(); ++k) out.lengths.push_back(out.zeros[k + 1] - out.zeros[k]);
  if (out.zeros.empty()) {
    out.diagnostic = "no nodal points given";
    return out;
  }
  out.closure = closure;
  if (closure == Closure::right_endpoint) out.closing_length = 1.0 - out.zeros.back();
  if (closure == Closure::wrap_around) out.closing_length = 1.0 + out.zeros.front() - out.zeros.back();
  return out;
}

}  // namespace plap
