#include "plap/spectrum.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double integration_tol(double tol) { return std::clamp(0.1 * tol, 5e-13, 1e-6); }

// Angle in [0, pi_hat) of the state (y, y') proportional to (S_p(g), -S_p'(g)),
// i.e. the state allowed by y S_p'(g) + y' S_p(g) = 0, at scale mu.
double boundary_angle(const PTrigContext& ctx, double g, double mu) {
  const auto [s, c] = ctx.sp_pair(g);
  double a = std::fmod(ctx.angle_of(s, -c / mu), ctx.pi_hat());
  if (a >= ctx.pi_hat() * (1.0 - 1e-15)) a = 0.0;
  return a;
}

// Same boundary angle taken in (0, pi_hat], the value at the right end.
double end_angle(const PTrigContext& ctx, double g, double mu) {
  const double a = boundary_angle(ctx, g, mu);
  return a <= ctx.pi_hat() * 1e-15 ? ctx.pi_hat() : a;
}

// State at (angle, scale), angle in [0, pi_hat), in the standard normalization.
double standard_theta0(const PTrigContext& ctx, double lambda, double angle, double scale) {
  if (!(lambda > 0.0)) return kNaN;
  const double mu = std::pow(lambda, 1.0 / ctx.p());
  const auto [s, c] = ctx.sp_pair(angle);
  return ctx.angle_of(s, scale * c / mu) / mu;
}

struct Bracket {
  double lo, hi, flo, fhi;
};

// Expand around guess until f changes sign; f is increasing. Returns nullopt
// when no sign change is found above `floor`.
template <class F>
std::optional<Bracket> bracket_increasing(F&& f, double guess, double step, double floor, std::size_t max_exp) {
  double x0 = std::max(guess, floor);
  double f0 = f(x0);
  if (f0 == 0.0) return Bracket{x0, x0, 0.0, 0.0};
  double d = step;
  if (f0 < 0.0) {
    double lo = x0, flo = f0;
    for (std::size_t i = 0; i < max_exp; ++i) {
      const double hi = x0 + d;
      const double fhi = f(hi);
      if (fhi >= 0.0) return Bracket{lo, hi, flo, fhi};
      lo = hi;
      flo = fhi;
      d *= 2.0;
    }
    return std::nullopt;
  }
  double hi = x0, fhi = f0;
  for (std::size_t i = 0; i < max_exp; ++i) {
    double lo = x0 - d;
    bool at_floor = false;
    if (lo <= floor) {
      lo = floor;
      at_floor = true;
    }
    const double flo = f(lo);
    if (flo < 0.0) return Bracket{lo, hi, flo, fhi};
    if (at_floor) return std::nullopt;
    hi = lo;
    fhi = flo;
    d *= 2.0;
  }
  return std::nullopt;
}

template <class F>
double solve_increasing(F&& f, const Bracket& b, double rel_tol) {
  if (b.lo == b.hi) return b.lo;
  if (b.fhi == 0.0) return b.hi;
  auto stop = [rel_tol](double a, double c) { return std::abs(c - a) <= rel_tol * std::max(1.0, std::abs(a)); };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, b.lo, b.hi, b.flo, b.fhi, stop, iters);
  return 0.5 * (r.first + r.second);
}

double lambda_floor(const Potential& q) {
  const double lb = q.lower_bound();
  return lb - 1.0 - 1e-3 * std::abs(lb);
}

double search_step(const PTrigContext& ctx, double big_n) {
  // about half the gap between consecutive eigenvalues near this index
  const double p = ctx.p();
  return std::max(1.0, 0.5 * p * std::pow(std::max(big_n, 1.0) * ctx.pi_hat(), p - 1.0) * ctx.pi_hat());
}

}  // namespace

std::pair<double, double> BoundarySpec::angles(const PTrigContext& ctx) const {
  switch (kind) {
    case BoundaryKind::dirichlet:
      return {0.0, 0.0};
    case BoundaryKind::neumann:
      return {0.5 * ctx.pi_hat(), 0.5 * ctx.pi_hat()};
    case BoundaryKind::separated: {
      auto ok = [&](double g) { return g >= 0.0 && g < ctx.pi_hat(); };
      if (!ok(alpha) || !ok(beta)) {
        std::ostringstream msg;
        msg << "separated boundary angles must lie in [0, pi_hat=" << ctx.pi_hat() << "), got alpha=" << alpha
            << " beta=" << beta;
        throw InputError(msg.str());
      }
      return {alpha, beta};
    }
    default:
      throw InputError("boundary angles are only defined for separated conditions");
  }
}

std::string BoundarySpec::name() const {
  switch (kind) {
    case BoundaryKind::dirichlet:
      return "dirichlet";
    case BoundaryKind::neumann:
      return "neumann";
    case BoundaryKind::periodic:
      return "periodic";
    case BoundaryKind::anti_periodic:
      return "antiperiodic";
    case BoundaryKind::separated: {
      std::ostringstream s;
      s.precision(17);
      s << "separated:" << alpha << "," << beta;
      return s.str();
    }
  }
  return "unknown";
}

BoundarySpec parse_boundary(const std::string& text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (t == "dirichlet") return BoundarySpec::dirichlet();
  if (t == "neumann") return BoundarySpec::neumann();
  if (t == "periodic") return BoundarySpec::periodic();
  if (t == "antiperiodic" || t == "anti-periodic" || t == "anti_periodic") return BoundarySpec::anti_periodic();
  const std::string prefix = "separated:";
  if (t.rfind(prefix, 0) == 0) {
    const std::string rest = t.substr(prefix.size());
    const auto comma = rest.find(',');
    if (comma != std::string::npos) {
      try {
        std::size_t u = 0, v = 0;
        const std::string as = rest.substr(0, comma), bs = rest.substr(comma + 1);
        const double a = std::stod(as, &u);
        const double b = std::stod(bs, &v);
        if (u == as.size() && v == bs.size()) return BoundarySpec::separated(a, b);
      } catch (const std::exception&) {
      }
    }
  }
  throw InputError("unknown boundary condition '" + text +
                   "' (expected dirichlet, neumann, periodic, antiperiodic or separated:ALPHA,BETA)");
}

const char* to_string(EigenTag tag) {
  switch (tag) {
    case EigenTag::unique:
      return "unique";
    case EigenTag::rotational_min:
      return "rotational_min";
    case EigenTag::rotational_max:
      return "rotational_max";
  }
  return "unique";
}

PhasePath eigen_path(const PTrigContext& ctx, const Potential& q, const Eigenpair& e, const PhaseOptions& opts) {
  return integrate_angle(ctx, q, e.lambda, e.scale, e.angle0, opts);
}

NodalSet eigen_nodal_set(const PTrigContext& ctx, const Potential& q, const Eigenpair& e, const BoundarySpec& bc,
                         double tol) {
  PhaseOptions po;
  po.tol = std::clamp(tol, 2e-13, 1e-5);
  Closure closure = Closure::none;
  if (!bc.is_separated())
    closure = Closure::wrap_around;
  else if (bc.angles(ctx).second == 0.0)
    closure = Closure::right_endpoint;
  NodalSet ns = nodal_set(eigen_path(ctx, q, e, po), closure);
  ns.lambda = e.lambda;
  return ns;
}

BoundaryPhases boundary_phases(const PTrigContext& ctx, const BoundarySpec& bc, double lambda, int n,
                               PhaseConvention convention) {
  if (!(lambda > 0.0)) throw InputError("boundary_phases needs lambda > 0");
  if (n < 1) throw InputError("boundary_phases needs n >= 1");
  const auto [al, be] = bc.angles(ctx);
  const double mu = std::pow(lambda, 1.0 / ctx.p());
  const double ph = ctx.pi_hat();
  if (convention == PhaseConvention::literal) {
    auto inv = [&](double g) { return ctx.wct_inv(ctx.wct(g).scaled(-1.0 / mu)); };
    return {-inv(al) / mu, (n * ph - inv(be)) / mu};
  }
  return {boundary_angle(ctx, al, mu) / mu, ((n - 1) * ph + end_angle(ctx, be, mu)) / mu};
}

double effective_index(const PTrigContext& ctx, const BoundarySpec& bc, int n) {
  if (!bc.is_separated()) return n;
  const auto [al, be] = bc.angles(ctx);
  const int positive = (al > 0.0) + (be > 0.0);
  return n - 0.5 * positive;
}

double boundary_coefficient(const PTrigContext& ctx, const BoundarySpec& bc) {
  if (!bc.is_separated()) return 0.0;
  const auto [al, be] = bc.angles(ctx);
  const double p = ctx.p();
  return (signed_pow(ctx.cot_hat(be), p - 1.0) - signed_pow(ctx.cot_hat(al), p - 1.0)) / (p - 1.0);
}

std::vector<Eigenpair> separated_eigs(const PTrigContext& ctx, const Potential& q, const BoundarySpec& bc, int n_first,
                                      int n_last, const SpectrumOptions& opts) {
  if (!bc.is_separated()) throw InputError("separated_eigs needs a separated boundary condition");
  if (n_first < 1 || n_last < n_first) throw InputError("eigenvalue index range must satisfy 1 <= first <= last");
  if (!(opts.tol >= 1e-12 && opts.tol < 1e-2)) throw InputError("eigenvalue tolerance must lie in [1e-12, 1e-2)");
  const auto [al, be] = bc.angles(ctx);
  const double ph = ctx.pi_hat();
  const double p = ctx.p();
  PhaseOptions po;
  po.tol = integration_tol(opts.tol);
  po.record_crossings = false;

  std::vector<Eigenpair> out;
  for (int n = n_first; n <= n_last; ++n) {
    const double big_n = effective_index(ctx, bc, n);
    const double mu = std::max(big_n, 0.5) * ph;
    const double psi0 = boundary_angle(ctx, al, mu);
    const double target = (n - 1) * ph + end_angle(ctx, be, mu);
    auto f = [&](double lam) { return integrate_angle(ctx, q, lam, mu, psi0, po).angle1 - target; };

    const double guess = std::pow(big_n * ph, p) + q.mean();
    // Robin-type ends can push eigenvalues below min q, by about |cot|^p
    const double ends = 1.0 + std::abs(ctx.cot_hat(al)) + std::abs(ctx.cot_hat(be));
    const double floor = lambda_floor(q) - 4.0 * std::pow(ends, p);
    const auto br = bracket_increasing(f, guess, search_step(ctx, big_n), floor, opts.max_expansions);
    if (!br) {
      std::ostringstream msg;
      msg << "could not bracket eigenvalue n=" << n << " for " << bc.name() << " starting at lambda=" << guess
          << " (floor " << floor << ")";
      throw SolverError(msg.str());
    }
    Eigenpair e;
    e.n = n;
    e.lambda = solve_increasing(f, *br, opts.tol);
    e.angle0 = psi0;
    e.scale = mu;
    e.theta0 = e.lambda > 0.0 ? boundary_angle(ctx, al, std::pow(e.lambda, 1.0 / p)) / std::pow(e.lambda, 1.0 / p)
                              : kNaN;
    e.tag = EigenTag::unique;
    out.push_back(e);
  }
  return out;
}

PeriodicResult periodic_eigs(const PTrigContext& ctx, const Potential& q, BoundaryKind kind, int n,
                             const SpectrumOptions& opts) {
  if (kind != BoundaryKind::periodic && kind != BoundaryKind::anti_periodic)
    throw InputError("periodic_eigs needs a periodic or anti-periodic boundary condition");
  if (n < 0) throw InputError("zero count must be non-negative");
  if (kind == BoundaryKind::periodic && n % 2 != 0) throw InputError("periodic eigenfunctions have an even zero count");
  if (kind == BoundaryKind::anti_periodic && n % 2 == 0)
    throw InputError("anti-periodic eigenfunctions have an odd zero count");
  if (opts.theta0_grid < 4) throw InputError("theta0 grid needs at least 4 points");
  if (!(opts.tol >= 1e-12 && opts.tol < 1e-2)) throw InputError("eigenvalue tolerance must lie in [1e-12, 1e-2)");

  const double ph = ctx.pi_hat();
  const double p = ctx.p();
  const double mu = std::max(double(n), 0.5) * ph;
  PhaseOptions po;
  po.tol = integration_tol(opts.tol);
  po.record_crossings = false;
  const double guess = std::pow(n * ph, p) + q.mean();
  const double step = search_step(ctx, n);
  const double floor = lambda_floor(q);

  // lambda on the winding branch through psi0, with its amplitude residual
  auto branch_at = [&](double psi0, const BranchPoint* near) {
    BranchPoint bp;
    bp.angle0 = psi0;
    bp.lambda = kNaN;
    auto f = [&](double lam) { return integrate_angle(ctx, q, lam, mu, psi0, po).angle1 - psi0 - n * ph; };
    const bool warm = near && near->valid;
    const auto br = bracket_increasing(f, warm ? near->lambda : guess, warm ? 1e-2 * step : step, floor,
                                       opts.max_expansions);
    if (!br) return bp;
    bp.lambda = solve_increasing(f, *br, opts.tol);
    bp.rho = integrate_angle(ctx, q, bp.lambda, mu, psi0, po).logr_delta;
    bp.valid = true;
    return bp;
  };

  PeriodicResult res;
  res.scale = mu;
  const int G = opts.theta0_grid;
  for (int i = 0; i < G; ++i) res.branch.push_back(branch_at(i * ph / G, i ? &res.branch.back() : nullptr));

  double max_rho = 0.0;
  int valid = 0;
  for (const auto& b : res.branch)
    if (b.valid) {
      ++valid;
      max_rho = std::max(max_rho, std::abs(b.rho));
    }
  if (valid == 0) {
    std::ostringstream msg;
    msg << "winding condition with " << n << " zeros had no bracketed root on the theta0 grid";
    throw SolverError(msg.str());
  }

  auto make_pair = [&](const BranchPoint& b, EigenTag tag) {
    Eigenpair e;
    e.n = n;
    e.lambda = b.lambda;
    e.angle0 = b.angle0;
    e.scale = mu;
    e.theta0 = standard_theta0(ctx, b.lambda, b.angle0, mu);
    e.tag = tag;
    return e;
  };

  const double flat = 10.0 * opts.tol * (1.0 + mu);
  if (max_rho < flat) {
    res.degenerate = true;
    std::vector<const BranchPoint*> v;
    for (const auto& b : res.branch)
      if (b.valid) v.push_back(&b);
    std::sort(v.begin(), v.end(), [](auto a, auto b) { return a->lambda < b->lambda; });
    const BranchPoint& mid = *v[v.size() / 2];
    res.min = make_pair(mid, EigenTag::rotational_min);
    res.max = make_pair(mid, EigenTag::rotational_max);
    res.all = {res.min};
    return res;
  }

  // refine each sign change of rho between neighbouring valid grid points
  const double accept = std::max(1e-6, 1e3 * opts.tol * (1.0 + mu));
  std::vector<BranchPoint> zeros;
  for (int i = 0; i < G; ++i) {
    const BranchPoint& a = res.branch[i];
    const BranchPoint& b = res.branch[(i + 1) % G];
    if (!a.valid || !b.valid) continue;
    if (a.rho == 0.0) {
      zeros.push_back(a);
      continue;
    }
    if ((a.rho < 0.0) == (b.rho < 0.0) || b.rho == 0.0) continue;
    const double lo0 = a.angle0;
    const double hi0 = (i + 1 == G) ? b.angle0 + ph : b.angle0;
    struct Abort {};
    BranchPoint last = a, best = a;
    bool failed = false;
    auto g = [&](double psi) {
      const BranchPoint m = branch_at(psi, &last);
      if (!m.valid) throw Abort{};
      last = m;
      if (std::abs(m.rho) < std::abs(best.rho)) best = m;
      return m.rho;
    };
    try {
      std::uintmax_t iters = 100;
      auto stop = [ph](double u, double v) { return std::abs(v - u) <= 1e-12 * ph; };
      boost::math::tools::toms748_solve(g, lo0, hi0, a.rho, b.rho, stop, iters);
    } catch (const Abort&) {
      failed = true;
    }
    last = best;
    if (failed || std::abs(last.rho) > accept) continue;  // pole of rho, not a zero
    last.angle0 = std::fmod(last.angle0, ph);
    zeros.push_back(last);
  }
  if (zeros.empty()) {
    std::ostringstream msg;
    msg << "no zeros of the amplitude residual on the branch with " << n << " zeros; rho ranged over [";
    double rmin = 1e300, rmax = -1e300;
    for (const auto& b : res.branch)
      if (b.valid) {
        rmin = std::min(rmin, b.rho);
        rmax = std::max(rmax, b.rho);
      }
    msg << rmin << ", " << rmax << "]";
    throw SolverError(msg.str());
  }
  std::sort(zeros.begin(), zeros.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  for (const auto& z : zeros) res.all.push_back(make_pair(z, EigenTag::unique));
  res.min = make_pair(zeros.front(), EigenTag::rotational_min);
  res.max = make_pair(zeros.back(), EigenTag::rotational_max);
  return res;
}

AsymptoticReport asymptotic_residuals(const std::vector<Eigenpair>& eigs, const PTrigContext& ctx, const Potential& q,
                                      const BoundarySpec& bc) {
  const double p = ctx.p();
  const double ph = ctx.pi_hat();
  AsymptoticReport rep;
  rep.mean_used = q.mean();
  rep.boundary_coefficient = boundary_coefficient(ctx, bc);
  const double K = rep.boundary_coefficient;
  for (const auto& e : eigs) {
    const double big_n = effective_index(ctx, bc, e.n);
    if (!(e.lambda > 0.0) || !(big_n > 0.0)) continue;
    const double base = big_n * ph;
    const double w = std::pow(base, p - 1.0);
    const double mu = std::pow(e.lambda, 1.0 / p);
    const double r0 = mu - base - K / w;
    rep.n.push_back(e.n);
    rep.n_eff.push_back(big_n);
    rep.residual.push_back(r0 - rep.mean_used / (p * w));
    rep.scaled_residual.push_back(rep.residual.back() * std::pow(double(e.n), p - 1.0));
    rep.mean_terms.push_back(r0 * p * w);
  }
  const std::size_t m = rep.n.size();
  if (m < 4) throw InputError("asymptotic fit needs at least four eigenvalues with positive lambda");

  // mean_terms ~ a + c N^(-p), ordinary least squares
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::pow(rep.n_eff[i], -p);
    sx += x;
    sy += rep.mean_terms[i];
    sxx += x * x;
    sxy += x * rep.mean_terms[i];
  }
  const double det = m * sxx - sx * sx;
  double a = sy / m, c = 0.0;
  if (std::abs(det) > 1e-300) {
    a = (sxx * sy - sx * sxy) / det;
    c = (m * sxy - sx * sy) / det;
  }
  double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = rep.mean_terms[i] - a - c * std::pow(rep.n_eff[i], -p);
    ss += r * r;
  }
  const double sigma2 = ss / double(m - 2);
  rep.mean_estimate = a;
  rep.mean_error = std::abs(det) > 1e-300 ? std::sqrt(sigma2 * sxx / det) : std::sqrt(sigma2 / m);
  return rep;
}

}  // namespace plap
