#include "plap/inverse.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

namespace {

// Step function on [0, 1] taking value(length of interval j) on each nodal
// interval, sampled on the grid.
template <class F>
ReconstructionCurve build_curve(const NodalSet& nodes, const std::vector<double>& grid, F&& value) {
  if (nodes.zeros.empty()) throw InputError("nodal set is empty: " + nodes.diagnostic);
  ReconstructionCurve c;
  c.n = nodes.n;

  auto value_at_index = [&](std::size_t j) {
    const double len = nodes.length_for(j);
    if (!std::isfinite(len)) throw InputError("nodal set has too few zeros to define its nodal lengths");
    return value(len);
  };

  c.piece_breaks.push_back(0.0);
  for (double z : nodes.zeros)
    if (z > 0.0 && z < 1.0) c.piece_breaks.push_back(z);
  c.piece_breaks.push_back(1.0);
  for (std::size_t i = 0; i + 1 < c.piece_breaks.size(); ++i) {
    const double mid = 0.5 * (c.piece_breaks[i] + c.piece_breaks[i + 1]);
    c.piece_values.push_back(value_at_index(nodes.index_of(mid)));
  }

  c.grid = grid;
  for (double x : grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("reconstruction grid points must lie in [0, 1]");
    const std::size_t j = nodes.index_of(x);
    c.interval.push_back(j);
    c.wrapped.push_back(nodes.in_wrap(x));
    const auto it = std::upper_bound(c.piece_breaks.begin(), c.piece_breaks.end(), x);
    std::size_t piece = static_cast<std::size_t>(it - c.piece_breaks.begin());
    piece = std::clamp<std::size_t>(piece, 1, c.piece_values.size()) - 1;
    c.values.push_back(c.piece_values[piece]);
  }
  return c;
}

double curve_at(const ReconstructionCurve& c, double x) {
  const auto it = std::upper_bound(c.piece_breaks.begin(), c.piece_breaks.end(), x);
  std::size_t piece = static_cast<std::size_t>(it - c.piece_breaks.begin());
  piece = std::clamp<std::size_t>(piece, 1, c.piece_values.size()) - 1;
  return c.piece_values[piece];
}

}  // namespace

const char* to_string(ReconstructionVariant v) {
  switch (v) {
    case ReconstructionVariant::exact_limit:
      return "exact_limit";
    case ReconstructionVariant::periodic_F2n:
      return "periodic_F2n";
    case ReconstructionVariant::antiperiodic_F2n1:
      return "antiperiodic_F2n1";
    case ReconstructionVariant::dirichlet_Fn:
      return "dirichlet_Fn";
    case ReconstructionVariant::separated_Fn:
      return "separated_Fn";
  }
  return "exact_limit";
}

ReconstructionVariant parse_variant(const std::string& text) {
  for (auto v : {ReconstructionVariant::exact_limit, ReconstructionVariant::periodic_F2n,
                 ReconstructionVariant::antiperiodic_F2n1, ReconstructionVariant::dirichlet_Fn,
                 ReconstructionVariant::separated_Fn})
    if (text == to_string(v)) return v;
  throw InputError("unknown reconstruction variant '" + text + "'");
}

std::vector<double> uniform_grid(std::size_t m) {
  if (m == 0) throw InputError("grid needs at least one point");
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = (i + 0.5) / double(m);
  return g;
}

ReconstructionCurve reconstruct_exact(const PTrigContext& ctx, double lambda, const NodalSet& nodes,
                                      const std::vector<double>& grid) {
  if (!(lambda > 0.0)) throw InputError("exact reconstruction needs lambda > 0");
  const double p = ctx.p();
  const double mu = std::pow(lambda, 1.0 / p);
  const double ph = ctx.pi_hat();
  auto c = build_curve(nodes, grid, [&](double len) { return p * lambda * (mu * len / ph - 1.0); });
  c.variant = ReconstructionVariant::exact_limit;
  return c;
}

ReconstructionCurve reconstruct_Fn(const PTrigContext& ctx, ReconstructionVariant variant, int n,
                                   const NodalSet& nodes, double mean_q, const std::vector<double>& grid,
                                   const FnOptions& opts) {
  const double p = ctx.p();
  const double ph = ctx.pi_hat();
  if (n < 1) throw InputError("reconstruction index must be positive");
  auto mismatch = [&](const std::string& what) {
    std::ostringstream msg;
    msg << to_string(variant) << ": " << what << " (n=" << n << ", nodal set has " << nodes.n << " zeros)";
    throw InputError(msg.str());
  };

  double big_n = n;
  double coef = n;  // multiplies l_j
  switch (variant) {
    case ReconstructionVariant::periodic_F2n:
      if (n % 2 != 0) mismatch("periodic data needs an even zero count");
      if (nodes.n != n) mismatch("zero count differs from n");
      break;
    case ReconstructionVariant::antiperiodic_F2n1:
      if (n % 2 == 0) mismatch("anti-periodic data needs an odd zero count");
      if (nodes.n != n) mismatch("zero count differs from n");
      break;
    case ReconstructionVariant::dirichlet_Fn:
      if (nodes.n != n) mismatch("Dirichlet data for index n has n zeros in [0, 1)");
      break;
    case ReconstructionVariant::separated_Fn: {
      if (!opts.bc.is_separated()) mismatch("separated variant needs a separated boundary condition");
      big_n = effective_index(ctx, opts.bc, n);
      if (!(big_n > 0.0)) mismatch("effective index must be positive");
      const double K = boundary_coefficient(ctx, opts.bc);
      const double w = std::pow(big_n * ph, p - 1.0);
      coef = big_n + (opts.uncorrected_boundary_term ? K / w : K / (ph * w));
      break;
    }
    case ReconstructionVariant::exact_limit:
      throw InputError("exact_limit needs the eigenvalue; use reconstruct_exact");
  }
  const double scale = p * std::pow(big_n * ph, p);
  auto c = build_curve(nodes, grid, [&](double len) { return scale * (coef * len - 1.0) + mean_q; });
  c.n = n;
  c.variant = variant;
  c.mean_used = mean_q;
  return c;
}

ConvergenceReport convergence_report(const Potential& q_true, const std::vector<ReconstructionCurve>& curves,
                                     std::optional<std::vector<double>> probes) {
  ConvergenceReport rep;
  if (curves.empty()) return rep;
  const auto jumps = q_true.breakpoints();
  if (probes) {
    rep.probes = *probes;
  } else {
    for (double x : curves.front().grid) {
      bool near = false;
      for (double b : jumps) near = near || std::abs(x - b) < 1e-6;
      if (!near || q_true.kind() == PotentialKind::trig_poly) rep.probes.push_back(x);
    }
  }
  for (const auto& c : curves) {
    rep.n.push_back(c.n);
    std::vector<double> pw;
    for (double x : rep.probes) pw.push_back(std::abs(curve_at(c, x) - q_true.eval(x)));
    rep.pointwise.push_back(std::move(pw));
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < c.piece_breaks.size(); ++i)
      l1 += q_true.abs_deviation(c.piece_breaks[i], c.piece_breaks[i + 1], c.piece_values[i]);
    rep.l1.push_back(l1);
  }
  rep.l1_decreasing = true;
  rep.pointwise_decreasing = true;
  for (std::size_t k = 1; k < curves.size(); ++k) {
    rep.l1_decreasing = rep.l1_decreasing && rep.l1[k] < rep.l1[k - 1];
    for (std::size_t i = 0; i < rep.probes.size(); ++i)
      rep.pointwise_decreasing = rep.pointwise_decreasing && rep.pointwise[k][i] < rep.pointwise[k - 1][i];
  }
  return rep;
}

std::vector<double> riemann_lebesgue_check(const PTrigContext& ctx, const Potential& q, const Potential& g,
                                           const BoundarySpec& bc, const std::vector<int>& n_list, double tol) {
  if (!bc.is_separated()) throw InputError("the oscillatory integral check needs a separated boundary condition");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw InputError("index list must be increasing");
  SpectrumOptions so;
  so.tol = tol;
  PhaseOptions po;
  po.tol = std::clamp(0.1 * tol, 5e-13, 1e-6);
  po.record_crossings = false;
  po.weight = &g;
  std::vector<double> out;
  for (int n : n_list) {
    const Eigenpair e = separated_eigs(ctx, q, bc, n, n, so).front();
    if (!(e.lambda > 0.0)) throw SolverError("oscillatory integral needs a positive eigenvalue");
    const double mu = std::pow(e.lambda, 1.0 / ctx.p());
    out.push_back(integrate_angle(ctx, q, e.lambda, mu, e.theta0 * mu, po).weighted);
  }
  return out;
}

const char* to_string(AmbarzumyanConclusion c) {
  switch (c) {
    case AmbarzumyanConclusion::consistent_with_zero:
      return "consistent_with_zero";
    case AmbarzumyanConclusion::violates_hypotheses:
      return "violates_hypotheses";
    case AmbarzumyanConclusion::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

AmbarzumyanVerdict ambarzumyan_check(BoundaryKind kind, const std::vector<Eigenpair>& measured,
                                     const PTrigContext& ctx, const std::optional<Potential>& q_candidate,
                                     double tol) {
  if (kind != BoundaryKind::periodic && kind != BoundaryKind::anti_periodic)
    throw InputError("the free-spectrum check needs periodic or anti-periodic eigenvalues");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  const double p = ctx.p();
  const double ph = ctx.pi_hat();
  const int lowest = kind == BoundaryKind::periodic ? 0 : 1;

  std::vector<int> indices;
  for (const auto& e : measured) {
    if ((e.n % 2 == 0) != (kind == BoundaryKind::periodic))
      throw InputError("eigenvalue with the wrong parity for this boundary condition");
    if (std::find(indices.begin(), indices.end(), e.n) == indices.end()) indices.push_back(e.n);
  }
  const bool has_lowest = std::find(indices.begin(), indices.end(), lowest) != indices.end();
  if (!has_lowest || indices.size() < 4) {
    std::ostringstream msg;
    msg << "insufficient spectrum coverage: need n=" << lowest << " and at least three higher indices, got "
        << indices.size() << " distinct indices";
    throw InputError(msg.str());
  }

  AmbarzumyanVerdict v;
  v.kind = kind;
  double lambda_min = measured.front().lambda;
  for (const auto& e : measured) {
    // the free value for n = 0 is lambda = 0, where the 1/p root is not Lipschitz
    const double dev = e.n == 0 ? std::abs(e.lambda) : std::abs(signed_pow(e.lambda, 1.0 / p) - e.n * ph);
    v.spectrum_deviation = std::max(v.spectrum_deviation, dev);
    lambda_min = std::min(lambda_min, e.lambda);
  }
  v.spectrum_match = v.spectrum_deviation <= tol;
  const double ground = std::pow(lowest * ph, p);
  v.ground_state_deviation = std::abs(lambda_min - ground);
  v.ground_state_match = v.ground_state_deviation <= tol * std::max(1.0, ground);

  std::ostringstream detail;
  detail << "max |lambda^(1/p) - n pi_hat| = " << v.spectrum_deviation << ", lambda_min = " << lambda_min
         << " (free value " << ground << ")";

  if (kind == BoundaryKind::anti_periodic && q_candidate) {
    const Potential& q = *q_candidate;
    auto f = [&](double t) { return q.eval(t) * ph * (1.0 - p * ctx.eval(ph * t).s_abs_pow); };
    std::vector<double> cuts{0.0};
    for (double b : q.breakpoints_in(0.0, 1.0)) cuts.push_back(b);
    cuts.push_back(1.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
    v.extra_integral = total;
    detail << ", side integral = " << total;
  }

  const bool spectral_ok = v.spectrum_match && v.ground_state_match;
  if (!spectral_ok) {
    v.conclusion = AmbarzumyanConclusion::violates_hypotheses;
  } else if (kind == BoundaryKind::periodic) {
    v.conclusion = AmbarzumyanConclusion::consistent_with_zero;
  } else if (!v.extra_integral) {
    v.conclusion = AmbarzumyanConclusion::inconclusive;
    detail << "; no candidate potential for the side integral";
  } else {
    v.conclusion = std::abs(*v.extra_integral) <= tol ? AmbarzumyanConclusion::consistent_with_zero
                                                      : AmbarzumyanConclusion::violates_hypotheses;
  }
  v.detail = detail.str();
  return v;
}

}  // namespace plap
