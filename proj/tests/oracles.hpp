// Test-only reference computations. None of these share code with the
// library's phase integrator or eigenvalue searches.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "plap/potential.hpp"

namespace oracle {

/// Independent route to pi_hat: 2 * int_0^1 (1 - t^p)^(-1/p) dt.
inline double pi_hat_by_quadrature(double p) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [p](double t, double tc) {
    // tc = 1 - t near the right end, avoids cancellation in 1 - t^p
    const double one_minus = (t > 0.5) ? -std::expm1(p * std::log1p(-tc)) : 1.0 - std::pow(t, p);
    return std::pow(one_minus, -1.0 / p);
  };
  return 2.0 * integrator.integrate(f, 0.0, 1.0);
}

/// Classical Pruefer angle for -y'' + q y = lambda y with y = r sin(phi),
/// y' = sqrt(lambda) r cos(phi): phi' = sqrt(lambda) - q sin^2(phi) / sqrt(lambda).
inline double classical_pruefer_angle(const plap::Potential& q, double lambda, double phi0) {
  namespace odeint = boost::numeric::odeint;
  const double k = std::sqrt(lambda);
  std::vector<double> cuts{0.0};
  for (double b : q.breakpoints_in(0.0, 1.0)) cuts.push_back(b);
  cuts.push_back(1.0);
  double phi = phi0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    auto rhs = [&](const double& f, double& df, double x) {
      const double s = std::sin(f);
      df = k - q.eval(std::clamp(x, a, std::nextafter(b, a))) * s * s / k;
    };
    odeint::integrate_adaptive(odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<double>()), rhs,
                               phi, a, b, 1e-3);
  }
  return phi;
}

/// Transfer matrix for -y'' + c y = lambda y across an interval of length L
/// acting on (y, y').
inline std::array<double, 4> transfer_constant(double lambda_minus_c, double L) {
  const double m = lambda_minus_c;
  if (m > 0) {
    const double k = std::sqrt(m);
    return {std::cos(k * L), std::sin(k * L) / k, -k * std::sin(k * L), std::cos(k * L)};
  }
  if (m < 0) {
    const double k = std::sqrt(-m);
    return {std::cosh(k * L), std::sinh(k * L) / k, k * std::sinh(k * L), std::cosh(k * L)};
  }
  return {1.0, L, 0.0, 1.0};
}

/// Propagate (y, y') through a piecewise-constant potential at p = 2.
inline std::array<double, 2> propagate_piecewise(const plap::Potential& q, double lambda, double y0, double yp0) {
  const auto& br = q.knots();
  const auto& v = q.values();
  double y = y0, yp = yp0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const auto t = transfer_constant(lambda - v[i], br[i + 1] - br[i]);
    const double ny = t[0] * y + t[1] * yp;
    const double nyp = t[2] * y + t[3] * yp;
    y = ny;
    yp = nyp;
  }
  return {y, yp};
}

/// Number of eigenvalues below x of a symmetric tridiagonal matrix (Sturm count).
inline int sturm_count(const std::vector<double>& diag, double off, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    d = diag[i] - x - (i ? off * off / d : 0.0);
    if (d == 0.0) d = 1e-300;
    if (d < 0) ++count;
  }
  return count;
}

/// k-th (1-based) Dirichlet eigenvalue of -y'' + q y on (0,1), second-order
/// finite differences with m interior points, found by Sturm bisection.
inline double fd_dirichlet_eigenvalue(const plap::Potential& q, int m, int k) {
  const double h = 1.0 / (m + 1);
  std::vector<double> diag(m);
  for (int i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) + q.eval((i + 1) * h);
  const double off = -1.0 / (h * h);
  double lo = q.lower_bound() - 1.0;
  double hi = 4.0 / (h * h) + q.sup_abs() + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) >= k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Richardson-extrapolated finite-difference eigenvalue: error O(h^2) removed
/// using meshes h and h/2 (h = 1/(m+1)).
inline double fd_dirichlet_richardson(const plap::Potential& q, int m, int k) {
  const double coarse = fd_dirichlet_eigenvalue(q, m, k);
  const double fine = fd_dirichlet_eigenvalue(q, 2 * m + 1, k);
  return (4.0 * fine - coarse) / 3.0;
}

/// Periodic (anti_periodic = false) or anti-periodic eigenvalues of
/// -y'' + (a0 + sum a_k cos(2 pi k x) + b_k sin(2 pi k x)) y = lambda y from the
/// truncated Hill matrix in the exponential basis, sorted ascending.
inline std::vector<double> hill_eigenvalues(const plap::Potential& q, bool anti_periodic, int K = 40) {
  const int N = 2 * K + 1 - (anti_periodic ? 1 : 0);
  using C = std::complex<double>;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
  auto freq = [&](int i) {
    const double m = anti_periodic ? (i - K) + 0.5 : (i - K);
    return 2.0 * std::numbers::pi * m;
  };
  // Fourier coefficient of q at frequency 2 pi d.
  auto coef = [&](int d) -> C {
    if (d == 0) return q.a0();
    const int k = std::abs(d);
    const double a = k <= (int)q.cos_coef().size() ? q.cos_coef()[k - 1] : 0.0;
    const double b = k <= (int)q.sin_coef().size() ? q.sin_coef()[k - 1] : 0.0;
    return d > 0 ? C(0.5 * a, -0.5 * b) : C(0.5 * a, 0.5 * b);
  };
  for (int i = 0; i < N; ++i) {
    H(i, i) = freq(i) * freq(i);
    for (int j = 0; j < N; ++j) H(i, j) += coef(i - j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
