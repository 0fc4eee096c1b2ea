#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plap/potential.hpp"
#include "plap/pruefer.hpp"
#include "plap/ptrig.hpp"
#include "plap/spectrum.hpp"

namespace plap {

enum class ReconstructionVariant { exact_limit, periodic_F2n, antiperiodic_F2n1, dirichlet_Fn, separated_Fn };
const char* to_string(ReconstructionVariant v);
ReconstructionVariant parse_variant(const std::string& text);

/// Potential estimate from one nodal set. Values are constant on each nodal
/// interval; `piece_breaks` / `piece_values` hold that step function on [0, 1].
struct ReconstructionCurve {
  int n = 0;
  ReconstructionVariant variant = ReconstructionVariant::exact_limit;
  double mean_used = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::size_t> interval;  // j_n(x) per grid point
  std::vector<bool> wrapped;          // grid point in the periodic wrap-around interval
  std::vector<double> piece_breaks;   // 0 = b_0 < ... < b_m = 1
  std::vector<double> piece_values;   // value on [b_i, b_{i+1})
};

/// Midpoints of m equal cells of (0, 1).
std::vector<double> uniform_grid(std::size_t m);

/// p lambda (lambda^(1/p) l_j / pi_hat - 1) with the true eigenvalue.
ReconstructionCurve reconstruct_exact(const PTrigContext& ctx, double lambda, const NodalSet& nodes,
                                      const std::vector<double>& grid);

struct FnOptions {
  /// Boundary condition for separated_Fn (ignored otherwise).
  BoundarySpec bc = BoundarySpec::dirichlet();
  /// separated_Fn only: use the boundary term K / (N pi_hat)^(p-1) without the
  /// 1/pi_hat that the limit p lambda (lambda^(1/p) l / pi_hat - 1) produces.
  bool uncorrected_boundary_term = false;
};

/// Nodal formulas that need only n, the nodal lengths and int q:
///   periodic_F2n / antiperiodic_F2n1 / dirichlet_Fn:  p (n pi_hat)^p (n l_j - 1) + mean_q
///   separated_Fn: p (N pi_hat)^p ((N + K / (pi_hat (N pi_hat)^(p-1))) l_j - 1) + mean_q
/// with N the effective index and K the boundary coefficient. n counts zeros
/// in [0, 1) for the periodic kinds and is the eigenvalue index otherwise.
ReconstructionCurve reconstruct_Fn(const PTrigContext& ctx, ReconstructionVariant variant, int n,
                                   const NodalSet& nodes, double mean_q, const std::vector<double>& grid,
                                   const FnOptions& opts = {});

struct ConvergenceReport {
  std::vector<int> n;
  std::vector<double> probes;
  std::vector<std::vector<double>> pointwise;  // [curve][probe]
  std::vector<double> l1;
  bool l1_decreasing = false;
  bool pointwise_decreasing = false;  // every probe error decreases along the curves
};

/// Errors against q_true. Probes default to the grid points that keep a
/// distance of at least 1e-6 from the breakpoints of q_true.
ConvergenceReport convergence_report(const Potential& q_true, const std::vector<ReconstructionCurve>& curves,
                                     std::optional<std::vector<double>> probes = std::nullopt);

/// I_n = int_0^1 (|S_p(lambda_n^(1/p) theta_n)|^p - 1/p) g dx along the phase of
/// the n-th eigenfunction of the separated problem with potential q.
std::vector<double> riemann_lebesgue_check(const PTrigContext& ctx, const Potential& q, const Potential& g,
                                           const BoundarySpec& bc, const std::vector<int>& n_list,
                                           double tol = 1e-10);

enum class AmbarzumyanConclusion { consistent_with_zero, violates_hypotheses, inconclusive };
const char* to_string(AmbarzumyanConclusion c);

struct AmbarzumyanVerdict {
  BoundaryKind kind = BoundaryKind::periodic;
  bool spectrum_match = false;
  double spectrum_deviation = 0.0;  // max |lambda^(1/p) - n pi_hat|, |lambda| for n = 0
  bool ground_state_match = false;
  double ground_state_deviation = 0.0;  // |lambda_min - (lowest free eigenvalue)|
  std::optional<double> extra_integral;  // anti-periodic: int q(t) pi_hat (1 - p |S_p(pi_hat t)|^p) dt
  AmbarzumyanConclusion conclusion = AmbarzumyanConclusion::inconclusive;
  std::string detail;
};

/// Compare measured rotational eigenvalues with the free spectrum. Needs the
/// lowest index (0 periodic, 1 anti-periodic) and at least three more.
AmbarzumyanVerdict ambarzumyan_check(BoundaryKind kind, const std::vector<Eigenpair>& measured,
                                     const PTrigContext& ctx, const std::optional<Potential>& q_candidate,
                                     double tol = 1e-6);

}  // namespace plap
