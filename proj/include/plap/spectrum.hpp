#pragma once

#include <string>
#include <vector>

#include "plap/potential.hpp"
#include "plap/pruefer.hpp"
#include "plap/ptrig.hpp"

namespace plap {

enum class BoundaryKind { dirichlet, neumann, separated, periodic, anti_periodic };

/// Boundary conditions for the p-Laplacian on [0, 1].
///
/// Separated form: y(0) S_p'(alpha) + y'(0) S_p(alpha) = 0 and
/// y(1) S_p'(beta) + y'(1) S_p(beta) = 0, alpha, beta in [0, pi_hat).
/// Dirichlet is (0, 0); Neumann is (pi_hat/2, pi_hat/2).
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::dirichlet;
  double alpha = 0.0;  // only read for kind == separated
  double beta = 0.0;

  static BoundarySpec dirichlet() { return {BoundaryKind::dirichlet, 0.0, 0.0}; }
  static BoundarySpec neumann() { return {BoundaryKind::neumann, 0.0, 0.0}; }
  static BoundarySpec separated(double alpha, double beta) { return {BoundaryKind::separated, alpha, beta}; }
  static BoundarySpec periodic() { return {BoundaryKind::periodic, 0.0, 0.0}; }
  static BoundarySpec anti_periodic() { return {BoundaryKind::anti_periodic, 0.0, 0.0}; }

  bool is_separated() const {
    return kind == BoundaryKind::dirichlet || kind == BoundaryKind::neumann || kind == BoundaryKind::separated;
  }
  /// (alpha, beta) resolved for this p; throws InputError for periodic kinds
  /// or angles outside [0, pi_hat).
  std::pair<double, double> angles(const PTrigContext& ctx) const;
  std::string name() const;
};

/// Parse "dirichlet", "neumann", "periodic", "antiperiodic" or "separated:ALPHA,BETA".
BoundarySpec parse_boundary(const std::string& text);

enum class EigenTag { unique, rotational_min, rotational_max };
const char* to_string(EigenTag tag);

/// An eigenvalue with the data needed to regenerate its eigenfunction.
///
/// The eigenfunction is y = r S_p(psi) with psi(0) = angle0 integrated at the
/// fixed scale `scale` (see integrate_angle). theta0 is the same initial state
/// in the standard normalization, angle / lambda^(1/p); NaN when lambda <= 0.
struct Eigenpair {
  int n = 0;
  double lambda = 0.0;
  double theta0 = 0.0;
  double angle0 = 0.0;
  double scale = 1.0;
  EigenTag tag = EigenTag::unique;
};

/// Phase path of an eigenfunction across [0, 1].
PhasePath eigen_path(const PTrigContext& ctx, const Potential& q, const Eigenpair& e, const PhaseOptions& opts = {});

/// Nodal set of an eigenfunction, closed according to the boundary condition:
/// wrap-around for periodic kinds, right endpoint when beta = 0, open otherwise.
NodalSet eigen_nodal_set(const PTrigContext& ctx, const Potential& q, const Eigenpair& e, const BoundarySpec& bc,
                         double tol = 1e-12);

enum class PhaseConvention {
  direct,   // from the ratio y(0) : y'(0) imposed by the boundary condition
  literal,  // -(1/mu) wct_inv(-wct(alpha)/mu) and (n pi_hat - wct_inv(-wct(beta)/mu))/mu
};

struct BoundaryPhases {
  double theta_init = 0.0;
  double theta_target = 0.0;
};

/// Initial phase and the value theta(1) must attain for the n-th eigenvalue
/// (n - 1 interior zeros), standard normalization at this lambda.
BoundaryPhases boundary_phases(const PTrigContext& ctx, const BoundarySpec& bc, double lambda, int n = 1,
                               PhaseConvention convention = PhaseConvention::direct);

struct SpectrumOptions {
  double tol = 1e-10;       // relative tolerance on lambda
  int theta0_grid = 64;     // periodic search grid over one half period of the angle
  std::size_t max_expansions = 80;
};

/// Eigenvalues n_first..n_last (1-based, n - 1 interior zeros) for separated
/// boundary conditions.
std::vector<Eigenpair> separated_eigs(const PTrigContext& ctx, const Potential& q, const BoundarySpec& bc, int n_first,
                                      int n_last, const SpectrumOptions& opts = {});

struct BranchPoint {
  double angle0 = 0.0;  // initial angle at the search scale
  double lambda = 0.0;  // solution of the winding condition, NaN when not bracketed
  double rho = 0.0;     // log r(1) - log r(0) on the branch
  bool valid = false;
};

struct PeriodicResult {
  Eigenpair min;
  Eigenpair max;
  std::vector<Eigenpair> all;  // every detected zero of rho, ascending in lambda
  std::vector<BranchPoint> branch;
  double scale = 1.0;
  bool degenerate = false;  // rho vanished on the whole grid
};

/// Rotational eigenvalues with n zeros in [0, 1): n even for periodic, odd for
/// anti-periodic; n = 0 is allowed for periodic.
PeriodicResult periodic_eigs(const PTrigContext& ctx, const Potential& q, BoundaryKind kind, int n,
                             const SpectrumOptions& opts = {});

struct AsymptoticReport {
  std::vector<int> n;
  std::vector<double> n_eff;           // n, n - 1/2 or n - 1 by boundary type
  std::vector<double> residual;        // lambda^(1/p) minus the expansion through the mean term
  std::vector<double> scaled_residual; // residual * n^(p-1)
  std::vector<double> mean_terms;      // per-n estimate of int q
  double mean_estimate = 0.0;          // least-squares intercept of mean_terms ~ a + c n_eff^(-p)
  double mean_error = 0.0;             // standard error of the intercept
  double mean_used = 0.0;              // int q used in the residuals
  double boundary_coefficient = 0.0;   // (cot(beta)^(p-1) - cot(alpha)^(p-1)) / (p-1)
};

/// Effective index and boundary coefficient of the expansion
///   lambda^(1/p) = N pi_hat + K / (N pi_hat)^(p-1) + int q / (p (N pi_hat)^(p-1)) + o(n^(1-p)).
double effective_index(const PTrigContext& ctx, const BoundarySpec& bc, int n);
double boundary_coefficient(const PTrigContext& ctx, const BoundarySpec& bc);

/// Residuals of the expansion and a fit of int q. Needs at least four
/// eigenvalues with positive lambda.
AsymptoticReport asymptotic_residuals(const std::vector<Eigenpair>& eigs, const PTrigContext& ctx, const Potential& q,
                                      const BoundarySpec& bc);

}  // namespace plap
