#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plap/error.hpp"
#include "plap/inverse.hpp"
#include "plap/io.hpp"
#include "plap/potential.hpp"
#include "plap/pruefer.hpp"
#include "plap/ptrig.hpp"
#include "plap/spectrum.hpp"

namespace plap::cli {

namespace {

using nlohmann::json;

constexpr double kDefaultTol = 1e-10;
constexpr double kMinTol = 1e-12;
constexpr double kMaxTol = 1e-4;

struct Options {
  double p = 2.0;
  double tol = kDefaultTol;
  std::string output = "-";
  std::string format = "csv";
  std::string bc = "dirichlet";
  std::string q_path;
  std::string g_path;
  std::string n_text;
  int samples = 100;
  std::string spectrum_path;
  std::string nodal_path;
  std::string variant = "dirichlet";
  double mean = 0.0;
  int grid = 256;
  bool uncorrected = false;
  std::string truth_path;
  std::string branch = "min";
  std::string candidate_path;
  double match_tol = 1e-6;
};

// A table plus summary values. csv_body, when set, writes the CSV data
// section instead of the generic column/row dump.
struct Output {
  json summary = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::function<void(std::ostream&)> csv_body;
};

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct LoadedPotential {
  Potential q;
  json info;
};

// An empty path means q = 0.
LoadedPotential load_potential(const std::string& path) {
  if (path.empty()) return {Potential::zero(), "zero"};
  const std::string text = read_file(path);
  json info = {{"path", path}, {"fnv1a64", hex64(fnv1a64(text))}};
  if (ends_with(path, ".csv")) {
    std::istringstream in(text);
    return {read_samples_csv(in), info};
  }
  try {
    return {parse_potential(text), info};
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

json file_info(const std::string& path, const std::string& text) {
  return {{"path", path}, {"fnv1a64", hex64(fnv1a64(text))}};
}

// "3", "1..10" or "2,4,8".
std::vector<int> parse_indices(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw InputError("invalid index list '" + text + "'");
    return v;
  };
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int a = to_int(text.substr(0, dots));
    const int b = to_int(text.substr(dots + 2));
    if (b < a) throw InputError("index range '" + text + "' is empty");
    if (b - a > 100000) throw InputError("index range '" + text + "' is too long");
    for (int n = a; n <= b; ++n) out.push_back(n);
  } else {
    for (const auto& field : split_csv_line(text)) out.push_back(to_int(field));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw InputError("empty index list");
  return out;
}

BoundarySpec rotational_bc(const std::string& text) {
  const auto bc = parse_boundary(text);
  if (bc.is_separated()) throw InputError("this command needs --bc periodic or --bc antiperiodic");
  return bc;
}

BoundarySpec separated_bc(const std::string& text, const char* hint) {
  const auto bc = parse_boundary(text);
  if (!bc.is_separated()) throw InputError(std::string("this command needs a separated boundary condition") + hint);
  return bc;
}

std::vector<int> default_rotational_indices(BoundaryKind kind) {
  return kind == BoundaryKind::periodic ? std::vector<int>{0, 2, 4, 6} : std::vector<int>{1, 3, 5, 7};
}

SpectrumOptions spectrum_options(const Options& o) {
  SpectrumOptions s;
  s.tol = o.tol;
  return s;
}

std::vector<Eigenpair> separated_subset(const PTrigContext& ctx, const Potential& q, const BoundarySpec& bc,
                                        const std::vector<int>& ns, const Options& o) {
  if (ns.front() < 1) throw InputError("separated eigenvalue indices start at 1");
  const auto all = separated_eigs(ctx, q, bc, ns.front(), ns.back(), spectrum_options(o));
  std::vector<Eigenpair> out;
  for (const auto& e : all)
    if (std::binary_search(ns.begin(), ns.end(), e.n)) out.push_back(e);
  return out;
}

std::vector<Eigenpair> rotational_pairs(const PTrigContext& ctx, const Potential& q, BoundaryKind kind,
                                        const std::vector<int>& ns, const Options& o) {
  for (int n : ns)
    if (n < 0 || (n % 2 == 0) != (kind == BoundaryKind::periodic))
      throw InputError("index " + std::to_string(n) + " has the wrong parity for " +
                       (kind == BoundaryKind::periodic ? "periodic" : "anti-periodic") + " conditions");
  std::vector<Eigenpair> out;
  for (int n : ns) {
    const auto r = periodic_eigs(ctx, q, kind, n, spectrum_options(o));
    out.push_back(r.min);
    out.push_back(r.max);
  }
  return out;
}

EigenTag parse_tag(const std::string& s) {
  for (auto t : {EigenTag::unique, EigenTag::rotational_min, EigenTag::rotational_max})
    if (s == to_string(t)) return t;
  throw InputError("unknown eigenvalue tag '" + s + "'");
}

// Eigenpairs from a file written by eigs or periodic-eigs.
std::vector<Eigenpair> read_spectrum(const std::string& text, bool need_state) {
  std::istringstream in(text);
  const auto t = read_csv_table(in);
  std::vector<Eigenpair> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    Eigenpair e;
    e.n = t.integer(i, "n");
    e.lambda = t.number(i, "lambda");
    if (need_state) {
      e.angle0 = t.number(i, "angle0");
      e.scale = t.number(i, "scale");
      if (!(e.scale > 0.0)) throw InputError("spectrum file: scale must be positive");
    }
    if (t.has_column("tag")) e.tag = parse_tag(t.rows[i][t.column("tag")]);
    out.push_back(e);
  }
  if (out.empty()) throw InputError("spectrum file has no rows");
  return out;
}

Closure closure_for(const PTrigContext& ctx, const BoundarySpec& bc) {
  if (!bc.is_separated()) return Closure::wrap_around;
  return bc.angles(ctx).second == 0.0 ? Closure::right_endpoint : Closure::none;
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "nan";
  return v.dump();
}

void emit(const std::string& command, const json& config, const Output& res, const Options& o, std::ostream& out) {
  const std::string hash = "fnv1a64:" + hex64(fnv1a64(config.dump()));
  std::ofstream file;
  std::ostream* sink = &out;
  if (o.output != "-") {
    file.open(o.output, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot write '" + o.output + "'");
    sink = &file;
  }
  std::ostream& os = *sink;
  if (o.format == "json") {
    json doc = {{"command", command}, {"config", config},   {"config_hash", hash},
                {"summary", res.summary}, {"columns", res.columns}, {"rows", res.rows}};
    os << doc.dump(2) << '\n';
  } else {
    os << "# plap " << command << '\n';
    os << "# config: " << config.dump() << '\n';
    os << "# config_hash: " << hash << '\n';
    for (const auto& [key, value] : res.summary.items()) os << "# " << key << ": " << csv_cell(value) << '\n';
    if (res.csv_body) {
      res.csv_body(os);
    } else {
      for (std::size_t i = 0; i < res.columns.size(); ++i) os << (i ? "," : "") << res.columns[i];
      os << '\n';
      for (const auto& row : res.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
      }
    }
  }
  os.flush();
  if (!os) throw InputError("failed writing '" + o.output + "'");
}

json base_config(const std::string& command, const Options& o) {
  return {{"command", command}, {"p", o.p}, {"tol", o.tol}, {"output_format", o.format}};
}

// ---- subcommands ----

Output cmd_ptrig(const Options& o, json& cfg) {
  if (o.samples < 2 || o.samples > 10'000'000) throw InputError("--samples must lie in [2, 1e7]");
  cfg["samples"] = o.samples;
  const PTrigContext ctx{PParam(o.p)};
  const double ph = ctx.pi_hat();
  Output res;
  res.columns = {"x", "S_p", "S_p_prime", "residual"};
  double worst = 0.0;
  for (int i = 0; i < o.samples; ++i) {
    const double x = 2.0 * ph * i / (o.samples - 1);
    const auto v = ctx.eval(x);
    const double r = std::pow(std::abs(v.s), o.p) + std::pow(std::abs(v.c), o.p) - 1.0;
    worst = std::max(worst, std::abs(r));
    res.rows.push_back({x, v.s, v.c, r});
  }
  res.summary["pi_hat"] = ph;
  res.summary["max_abs_residual"] = worst;
  return res;
}

Output cmd_eigs(const Options& o, json& cfg) {
  const auto bc = separated_bc(o.bc, "; use periodic-eigs for periodic kinds");
  const auto ns = parse_indices(o.n_text.empty() ? "1..10" : o.n_text);
  const PTrigContext ctx{PParam(o.p)};
  bc.angles(ctx);
  const auto q = load_potential(o.q_path);
  cfg["bc"] = bc.name();
  cfg["n"] = ns;
  cfg["q"] = q.info;

  Output res;
  res.columns = {"n", "lambda", "theta0", "angle0", "scale"};
  for (const auto& e : separated_subset(ctx, q.q, bc, ns, o))
    res.rows.push_back({e.n, e.lambda, e.theta0, e.angle0, e.scale});
  res.summary["pi_hat"] = ctx.pi_hat();
  return res;
}

Output cmd_periodic_eigs(const Options& o, json& cfg) {
  const auto bc = rotational_bc(o.bc);
  const auto ns = o.n_text.empty() ? default_rotational_indices(bc.kind) : parse_indices(o.n_text);
  const PTrigContext ctx{PParam(o.p)};
  const auto q = load_potential(o.q_path);
  cfg["bc"] = bc.name();
  cfg["n"] = ns;
  cfg["q"] = q.info;

  Output res;
  res.columns = {"n", "tag", "lambda", "theta0", "angle0", "scale", "degenerate"};
  for (int n : ns) {
    if (n < 0 || (n % 2 == 0) != (bc.kind == BoundaryKind::periodic))
      throw InputError("index " + std::to_string(n) + " has the wrong parity for " + bc.name());
  }
  for (int n : ns) {
    const auto r = periodic_eigs(ctx, q.q, bc.kind, n, spectrum_options(o));
    for (const auto* e : {&r.min, &r.max})
      res.rows.push_back({e->n, to_string(e->tag), e->lambda, e->theta0, e->angle0, e->scale, r.degenerate});
  }
  res.summary["pi_hat"] = ctx.pi_hat();
  return res;
}

Output cmd_nodes(const Options& o, json& cfg) {
  const auto bc = parse_boundary(o.bc);
  if (o.branch != "min" && o.branch != "max") throw InputError("--branch must be min or max");
  const PTrigContext ctx{PParam(o.p)};
  if (bc.is_separated()) bc.angles(ctx);
  const auto q = load_potential(o.q_path);
  std::optional<std::vector<int>> ns;
  if (!o.n_text.empty()) ns = parse_indices(o.n_text);
  cfg["bc"] = bc.name();
  cfg["q"] = q.info;
  if (!bc.is_separated()) cfg["branch"] = o.branch;

  std::vector<Eigenpair> eigs;
  if (!o.spectrum_path.empty()) {
    const std::string text = read_file(o.spectrum_path);
    cfg["spectrum"] = file_info(o.spectrum_path, text);
    for (const auto& e : read_spectrum(text, true)) {
      if (ns && !std::binary_search(ns->begin(), ns->end(), e.n)) continue;
      if (!bc.is_separated()) {
        const auto want = o.branch == "min" ? EigenTag::rotational_min : EigenTag::rotational_max;
        if (e.tag != want) continue;
      }
      eigs.push_back(e);
    }
    if (eigs.empty()) throw InputError("no eigenvalues in '" + o.spectrum_path + "' match the selection");
  } else if (bc.is_separated()) {
    eigs = separated_subset(ctx, q.q, bc, ns ? *ns : parse_indices("1..10"), o);
  } else {
    for (const auto& e : rotational_pairs(ctx, q.q, bc.kind, ns ? *ns : default_rotational_indices(bc.kind), o)) {
      const auto want = o.branch == "min" ? EigenTag::rotational_min : EigenTag::rotational_max;
      if (e.tag == want) eigs.push_back(e);
    }
  }
  if (ns) cfg["n"] = *ns;

  std::set<int> seen;
  std::vector<NodalRecord> records;
  for (const auto& e : eigs) {
    if (!seen.insert(e.n).second) throw InputError("duplicate eigenvalue index " + std::to_string(e.n));
    const auto nodes = eigen_nodal_set(ctx, q.q, e, bc, std::min(o.tol, 1e-10));
    if (nodes.zeros.empty()) throw SolverError("n=" + std::to_string(e.n) + ": " + nodes.diagnostic);
    auto rec = to_record(e.n, nodes);
    rec.lambda = e.lambda;
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.n < b.n; });

  Output res;
  res.columns = {"n", "k", "x_k", "lambda"};
  for (const auto& r : records)
    for (std::size_t k = 0; k < r.zeros.size(); ++k) res.rows.push_back({r.n, k, r.zeros[k], r.lambda});
  res.csv_body = [records](std::ostream& os) { write_nodal_csv(os, records); };
  return res;
}

ReconstructionVariant variant_from(const std::string& text) {
  static const std::map<std::string, ReconstructionVariant> short_names = {
      {"exact", ReconstructionVariant::exact_limit},
      {"periodic", ReconstructionVariant::periodic_F2n},
      {"antiperiodic", ReconstructionVariant::antiperiodic_F2n1},
      {"dirichlet", ReconstructionVariant::dirichlet_Fn},
      {"separated", ReconstructionVariant::separated_Fn},
  };
  const auto it = short_names.find(text);
  return it != short_names.end() ? it->second : parse_variant(text);
}

Output cmd_reconstruct(const Options& o, json& cfg) {
  const auto variant = variant_from(o.variant);
  if (o.nodal_path.empty()) throw InputError("--nodal is required");
  if (o.grid < 1 || o.grid > 10'000'000) throw InputError("--grid must lie in [1, 1e7]");
  if (!std::isfinite(o.mean)) throw InputError("--mean must be finite");
  BoundarySpec bc = BoundarySpec::dirichlet();
  switch (variant) {
    case ReconstructionVariant::periodic_F2n:
      bc = BoundarySpec::periodic();
      break;
    case ReconstructionVariant::antiperiodic_F2n1:
      bc = BoundarySpec::anti_periodic();
      break;
    case ReconstructionVariant::dirichlet_Fn:
      break;
    case ReconstructionVariant::separated_Fn:
      bc = separated_bc(o.bc, " for the separated variant");
      break;
    case ReconstructionVariant::exact_limit:
      bc = parse_boundary(o.bc);
      break;
  }
  const PTrigContext ctx{PParam(o.p)};
  const Closure closure = closure_for(ctx, bc);
  std::optional<std::vector<int>> ns;
  if (!o.n_text.empty()) ns = parse_indices(o.n_text);
  const std::string text = read_file(o.nodal_path);
  std::optional<LoadedPotential> truth;
  if (!o.truth_path.empty()) truth = load_potential(o.truth_path);

  cfg["variant"] = to_string(variant);
  cfg["bc"] = bc.name();
  cfg["nodal"] = file_info(o.nodal_path, text);
  cfg["grid"] = o.grid;
  if (variant != ReconstructionVariant::exact_limit) cfg["mean"] = o.mean;
  if (variant == ReconstructionVariant::separated_Fn) cfg["uncorrected_boundary_term"] = o.uncorrected;
  if (ns) cfg["n"] = *ns;
  if (truth) cfg["truth"] = truth->info;

  std::istringstream in(text);
  const auto records = read_nodal_csv(in);
  const auto grid = uniform_grid(static_cast<std::size_t>(o.grid));
  FnOptions fo;
  fo.bc = bc;
  fo.uncorrected_boundary_term = o.uncorrected;

  std::vector<ReconstructionCurve> curves;
  for (const auto& rec : records) {
    if (ns && !std::binary_search(ns->begin(), ns->end(), rec.n)) continue;
    const auto nodes = nodal_set_from_zeros(rec.zeros, closure, rec.lambda);
    if (variant == ReconstructionVariant::exact_limit) {
      if (!rec.has_lambda) throw InputError("the exact variant needs a lambda column in the nodal data");
      curves.push_back(reconstruct_exact(ctx, rec.lambda, nodes, grid));
      curves.back().n = rec.n;
    } else {
      curves.push_back(reconstruct_Fn(ctx, variant, rec.n, nodes, o.mean, grid, fo));
    }
  }
  if (curves.empty()) throw InputError("no nodal records match the selection");

  Output res;
  res.columns = {"x", "F_n", "variant", "n", "wrap"};
  std::size_t wrapped = 0;
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      res.rows.push_back({c.grid[i], c.values[i], to_string(c.variant), c.n, c.wrapped[i] ? 1 : 0});
      wrapped += c.wrapped[i];
    }
  res.summary["mean_used"] = variant == ReconstructionVariant::exact_limit ? json(nullptr) : json(o.mean);
  res.summary["wrap_points"] = wrapped;
  if (truth) {
    const auto rep = convergence_report(truth->q, curves);
    res.summary["l1_error"] = rep.l1;
    res.summary["l1_decreasing"] = rep.l1_decreasing;
  }
  res.csv_body = [curves](std::ostream& os) { write_reconstruction_csv(os, curves); };
  return res;
}

Output cmd_asymptotics(const Options& o, json& cfg) {
  const auto bc = parse_boundary(o.bc);
  const PTrigContext ctx{PParam(o.p)};
  if (bc.is_separated()) bc.angles(ctx);
  std::vector<int> ns;
  if (!o.n_text.empty()) {
    ns = parse_indices(o.n_text);
  } else {
    for (int n = 4; n <= 32; ++n)
      if (bc.is_separated() || (n % 2 == 0) == (bc.kind == BoundaryKind::periodic)) ns.push_back(n);
  }
  const auto q = load_potential(o.q_path);
  cfg["bc"] = bc.name();
  cfg["n"] = ns;
  cfg["q"] = q.info;

  const auto eigs = bc.is_separated() ? separated_subset(ctx, q.q, bc, ns, o) : rotational_pairs(ctx, q.q, bc.kind, ns, o);
  const auto rep = asymptotic_residuals(eigs, ctx, q.q, bc);
  Output res;
  res.columns = {"n", "n_eff", "residual", "scaled_residual", "mean_term"};
  for (std::size_t i = 0; i < rep.n.size(); ++i)
    res.rows.push_back({rep.n[i], rep.n_eff[i], rep.residual[i], rep.scaled_residual[i], rep.mean_terms[i]});
  res.summary["mean_estimate"] = rep.mean_estimate;
  res.summary["mean_error"] = rep.mean_error;
  res.summary["mean_used"] = rep.mean_used;
  res.summary["boundary_coefficient"] = rep.boundary_coefficient;
  return res;
}

Output cmd_rlcheck(const Options& o, json& cfg) {
  const auto bc = separated_bc(o.bc, "");
  if (o.g_path.empty()) throw InputError("--g is required");
  const auto ns = parse_indices(o.n_text.empty() ? "5,10,20,50" : o.n_text);
  if (ns.front() < 1) throw InputError("indices start at 1");
  const PTrigContext ctx{PParam(o.p)};
  bc.angles(ctx);
  const auto q = load_potential(o.q_path);
  const auto g = load_potential(o.g_path);
  cfg["bc"] = bc.name();
  cfg["n"] = ns;
  cfg["q"] = q.info;
  cfg["g"] = g.info;

  const auto values = riemann_lebesgue_check(ctx, q.q, g.q, bc, ns, o.tol);
  Output res;
  res.columns = {"n", "I_n", "abs_I_n"};
  for (std::size_t i = 0; i < ns.size(); ++i) res.rows.push_back({ns[i], values[i], std::abs(values[i])});
  res.summary["g_l1"] = g.q.l1_norm();
  return res;
}

Output cmd_ambarzumyan(const Options& o, json& cfg) {
  const auto bc = rotational_bc(o.bc.empty() ? "periodic" : o.bc);
  if (!(o.match_tol > 0.0) || !std::isfinite(o.match_tol)) throw InputError("--match-tol must be positive");
  const PTrigContext ctx{PParam(o.p)};
  std::optional<std::vector<int>> ns;
  if (!o.n_text.empty()) ns = parse_indices(o.n_text);
  cfg["bc"] = bc.name();
  cfg["match_tol"] = o.match_tol;

  std::optional<Potential> candidate;
  if (!o.candidate_path.empty()) {
    auto c = load_potential(o.candidate_path);
    cfg["candidate"] = c.info;
    candidate = c.q;
  }
  std::vector<Eigenpair> measured;
  if (!o.spectrum_path.empty()) {
    const std::string text = read_file(o.spectrum_path);
    cfg["spectrum"] = file_info(o.spectrum_path, text);
    for (const auto& e : read_spectrum(text, false))
      if (!ns || std::binary_search(ns->begin(), ns->end(), e.n)) measured.push_back(e);
  } else {
    const auto q = load_potential(o.q_path);
    cfg["q"] = q.info;
    measured = rotational_pairs(ctx, q.q, bc.kind, ns ? *ns : default_rotational_indices(bc.kind), o);
    if (!candidate) candidate = q.q;
  }
  if (ns) cfg["n"] = *ns;

  const auto v = ambarzumyan_check(bc.kind, measured, ctx, candidate, o.match_tol);
  Output res;
  res.columns = {"n", "tag", "lambda", "free_lambda"};
  for (const auto& e : measured)
    res.rows.push_back({e.n, to_string(e.tag), e.lambda, std::pow(e.n * ctx.pi_hat(), o.p)});
  res.summary["conclusion"] = to_string(v.conclusion);
  res.summary["spectrum_match"] = v.spectrum_match;
  res.summary["spectrum_deviation"] = v.spectrum_deviation;
  res.summary["ground_state_match"] = v.ground_state_match;
  res.summary["ground_state_deviation"] = v.ground_state_deviation;
  res.summary["extra_integral"] = v.extra_integral ? json(*v.extra_integral) : json(nullptr);
  res.summary["detail"] = v.detail;
  return res;
}

double default_tolerance() {
  const char* env = std::getenv("PLAP_TOL");
  if (!env || !*env) return kDefaultTol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !std::isfinite(v)) throw InputError(std::string("PLAP_TOL='") + env + "' is not a number");
  return v;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o.tol = default_tolerance();
  } catch (const InputError& e) {
    err << "plap: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"p-Laplacian eigenvalues, nodal reconstruction and free-spectrum checks", "plap"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "exponent p > 1")->capture_default_str();
    sub->add_option("--tol", o.tol, "relative eigenvalue tolerance (default: PLAP_TOL or 1e-10)");
    sub->add_option("-o,--output", o.output, "output file, '-' for standard output")->capture_default_str();
    sub->add_option("--output-format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };
  auto with_q = [&](CLI::App* sub) { sub->add_option("--q", o.q_path, "potential file (.json or x,q .csv); default q = 0"); };

  std::vector<std::pair<CLI::App*, std::function<Output(const Options&, json&)>>> commands;

  auto* ptrig = app.add_subcommand("ptrig", "tabulate S_p and S_p' over one period");
  common(ptrig);
  ptrig->add_option("--samples", o.samples, "number of points on [0, 2 pi_hat]")->capture_default_str();
  commands.emplace_back(ptrig, cmd_ptrig);

  auto* eigs = app.add_subcommand("eigs", "eigenvalues for separated boundary conditions");
  common(eigs);
  with_q(eigs);
  eigs->add_option("--bc", o.bc, "dirichlet, neumann or separated:ALPHA,BETA")->capture_default_str();
  eigs->add_option("--n", o.n_text, "indices, e.g. 1..10 or 1,4,9 (default 1..10)");
  commands.emplace_back(eigs, cmd_eigs);

  auto* peigs = app.add_subcommand("periodic-eigs", "rotational eigenvalue pairs, periodic or anti-periodic");
  common(peigs);
  with_q(peigs);
  peigs->add_option("--bc", o.bc, "periodic or antiperiodic");
  peigs->add_option("--n", o.n_text, "zero counts (even for periodic, odd for anti-periodic)");
  commands.emplace_back(peigs, cmd_periodic_eigs);

  auto* nodes = app.add_subcommand("nodes", "zeros of eigenfunctions in [0, 1)");
  common(nodes);
  with_q(nodes);
  nodes->add_option("--bc", o.bc, "boundary condition")->capture_default_str();
  nodes->add_option("--n", o.n_text, "indices");
  nodes->add_option("--spectrum", o.spectrum_path, "eigenvalues from eigs or periodic-eigs instead of solving");
  nodes->add_option("--branch", o.branch, "min or max eigenvalue of a rotational pair")->capture_default_str();
  commands.emplace_back(nodes, cmd_nodes);

  auto* rec = app.add_subcommand("reconstruct", "potential estimates from nodal data");
  common(rec);
  rec->add_option("--variant", o.variant, "dirichlet, periodic, antiperiodic, separated or exact")
      ->capture_default_str();
  rec->add_option("--nodal", o.nodal_path, "nodal data CSV (n,k,x_k[,lambda])");
  rec->add_option("--mean", o.mean, "int_0^1 q added to the nodal formulas")->capture_default_str();
  rec->add_option("--grid", o.grid, "number of output cells on (0, 1)")->capture_default_str();
  rec->add_option("--bc", o.bc, "boundary condition for the separated and exact variants")->capture_default_str();
  rec->add_option("--n", o.n_text, "restrict to these indices");
  rec->add_flag("--uncorrected-boundary-term", o.uncorrected, "separated variant: drop the 1/pi_hat factor");
  rec->add_option("--truth", o.truth_path, "true potential, adds L1 errors to the summary");
  commands.emplace_back(rec, cmd_reconstruct);

  auto* asym = app.add_subcommand("asymptotics", "eigenvalue expansion residuals and an estimate of int q");
  common(asym);
  with_q(asym);
  asym->add_option("--bc", o.bc, "boundary condition")->capture_default_str();
  asym->add_option("--n", o.n_text, "indices (default 4..32)");
  commands.emplace_back(asym, cmd_asymptotics);

  auto* rl = app.add_subcommand("rlcheck", "oscillatory integrals of |S_p|^p - 1/p against g");
  common(rl);
  with_q(rl);
  rl->add_option("--g", o.g_path, "weight g as a potential file");
  rl->add_option("--bc", o.bc, "separated boundary condition")->capture_default_str();
  rl->add_option("--n", o.n_text, "indices (default 5,10,20,50)");
  commands.emplace_back(rl, cmd_rlcheck);

  auto* amb = app.add_subcommand("ambarzumyan", "compare a rotational spectrum with the free one");
  common(amb);
  with_q(amb);
  amb->add_option("--bc", o.bc, "periodic or antiperiodic");
  amb->add_option("--spectrum", o.spectrum_path, "measured eigenvalues (columns n,lambda)");
  amb->add_option("--candidate", o.candidate_path, "potential for the anti-periodic side integral");
  amb->add_option("--n", o.n_text, "indices");
  amb->add_option("--match-tol", o.match_tol, "tolerance on lambda^(1/p)")->capture_default_str();
  commands.emplace_back(amb, cmd_ambarzumyan);

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    const auto known = std::any_of(commands.begin(), commands.end(),
                                   [&](const auto& c) { return c.first->get_name() == first; });
    if (!known) {
      err << "plap: unknown subcommand '" << first << "'\n";
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "plap: " << one_line(e.what()) << '\n';
    return 2;
  }

  for (auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    // rotational commands default to the periodic condition
    if ((sub == peigs || sub == amb) && sub->count("--bc") == 0) o.bc = "periodic";
    try {
      if (!std::isfinite(o.p) || !(o.p > 1.0)) throw InputError("--p must be finite and > 1");
      if (!(o.tol >= kMinTol && o.tol <= kMaxTol))
        throw InputError("tolerance must lie in [1e-12, 1e-4], got " + format_double(o.tol));
      json cfg = base_config(name, o);
      const Output res = fn(o, cfg);
      emit(name, cfg, res, o, out);
      return 0;
    } catch (const SolverError& e) {
      err << "plap " << name << ": solver failure: " << one_line(e.what()) << '\n';
      return 1;
    } catch (const std::invalid_argument& e) {
      err << "plap " << name << ": " << one_line(e.what()) << '\n';
      return 2;
    } catch (const json::exception& e) {
      err << "plap " << name << ": " << one_line(e.what()) << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "plap " << name << ": " << one_line(e.what()) << '\n';
      return 1;
    }
  }
  err << "plap: no subcommand given\n";
  return 2;
}

}  // namespace plap::cli
