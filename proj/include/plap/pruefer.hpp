#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "plap/potential.hpp"
#include "plap/ptrig.hpp"

namespace plap {

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Result of integrating the phase equation across [0, 1].
///
/// The angle psi and the phase theta are tied by psi = scale * theta. For the
/// standard normalization scale = lambda^(1/p) and
///   theta' = 1 - (q/lambda) |S_p(lambda^(1/p) theta)|^p.
/// Crossings are the x where psi passes a multiple of pi_hat, i.e. the zeros of y.
struct PhasePath {
  double lambda = 0.0;
  double scale = 0.0;
  double pi_hat = 0.0;
  double angle0 = 0.0;
  double angle1 = 0.0;
  double theta0 = 0.0;  // angle / lambda^(1/p); NaN unless scale == lambda^(1/p)
  double theta1 = 0.0;
  double logr_delta = 0.0;  // log r(1) - log r(0)
  double weighted = 0.0;    // int_0^1 g (|S_p(psi)|^p - 1/p), when a weight was supplied
  std::vector<double> crossings;
  StepStats steps;
};

struct PhaseOptions {
  double tol = 1e-10;
  bool record_crossings = true;
  /// Optional g for the oscillatory integral int g(x) (|S_p(psi(x))|^p - 1/p) dx.
  const Potential* weight = nullptr;
  std::size_t max_steps = 5'000'000;
};

/// Phase equation in the standard normalization. Requires lambda > 0 and
/// tol in (1e-13, 1e-4).
PhasePath integrate_phase(const PTrigContext& ctx, const Potential& q, double lambda, double theta0,
                          double tol = 1e-10);

/// Scaled form with an arbitrary scale mu > 0 and any real lambda:
///   y = r S_p(psi), y' = mu r S_p'(psi),
///   psi'     = mu |S_p'|^p + (lambda - q) mu^(1-p) |S_p|^p,
///   (log r)' = (mu - (lambda - q) mu^(1-p)) S_p' S_p^(p-1).
/// A fixed mu makes psi(1) strictly increasing in lambda, which the
/// eigenvalue searches rely on.
PhasePath integrate_angle(const PTrigContext& ctx, const Potential& q, double lambda, double scale, double angle0,
                          const PhaseOptions& opts = {});

enum class Closure {
  automatic,       // right endpoint if a crossing sits at x = 1, otherwise none
  none,            // last interval is open
  right_endpoint,  // x = 1 is a zero (Dirichlet at the right end)
  wrap_around,     // periodic: last length is 1 + x_0 - x_last
};

/// Zeros x_0 < ... < x_{n-1} of an eigenfunction in [0, 1) and their gaps.
struct NodalSet {
  int n = 0;
  double lambda = 0.0;
  std::vector<double> zeros;
  std::vector<double> lengths;  // x_{k+1} - x_k for consecutive zeros in [0, 1)
  Closure closure = Closure::none;
  double closing_length = 0.0;  // 1 - x_last or 1 + x_0 - x_last, per closure
  bool zero_at_left = false;
  std::string diagnostic;  // set when there are no zeros

  /// j_n(x) = max{k : x_k <= x}. Points left of x_0 get 0, or the wrap
  /// interval (index n-1) under periodic closure.
  std::size_t index_of(double x) const;
  /// Nodal length attached to interval j; the last interval uses the closing
  /// length when there is one, otherwise the last interior gap.
  double length_for(std::size_t j) const;
  /// True when x lies in the wrap-around interval of a periodic nodal set.
  bool in_wrap(double x) const;
};

NodalSet nodal_set(const PhasePath& path, Closure closure = Closure::automatic);
/// Nodal set from zeros read back from a file. Zeros must be increasing in
/// [0, 1); automatic closure is treated as none.
NodalSet nodal_set_from_zeros(std::vector<double> zeros, Closure closure, double lambda = 0.0);

struct ShootResult {
  double y1 = 0.0;
  double v1 = 0.0;  // y'^(p-1) at x = 1
  int zero_count = 0;
};

/// Independent integration of -(y'^(p-1))' = (p-1)(lambda - q) y^(p-1) as the system
///   y' = v^(1/(p-1)),  v' = -(p-1)(lambda - q) y^(p-1),   v = y'^(p-1),
/// using a library Runge-Kutta stepper. zero_count is the number of sign
/// changes of y in (0, 1).
ShootResult direct_shoot(const PTrigContext& ctx, const Potential& q, double lambda, double y0, double v0,
                         double tol = 1e-11);

/// (|y|^p + |y'|^p / lambda)^(1/p) for a state (y, v = y'^(p-1)).
double shoot_amplitude(double p, double lambda, double y, double v);

}  // namespace plap
