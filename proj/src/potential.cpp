#include "plap/potential.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include "plap/error.hpp"

namespace plap {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

void check_knots(const std::vector<double>& k, const char* name) {
  require(k.size() >= 2, std::string(name) + " needs at least two entries");
  require(k.front() == 0.0 && k.back() == 1.0, std::string(name) + " must start at 0 and end at 1");
  for (std::size_t i = 1; i < k.size(); ++i)
    require(k[i] > k[i - 1], std::string(name) + " must be strictly increasing");
}

void check_finite(const std::vector<double>& v, const char* name) {
  for (double x : v) require(std::isfinite(x), std::string(name) + " must be finite");
}

// Segment index i with knots[i] <= t < knots[i+1], clamped.
std::size_t segment(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t i = (it == knots.begin()) ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(i, knots.size() - 2);
}

// int over an interval of length len of |f| where f is linear from f0 to f1.
double abs_linear(double f0, double f1, double len) {
  if ((f0 >= 0) == (f1 >= 0) || f0 == 0 || f1 == 0) return 0.5 * len * (std::abs(f0) + std::abs(f1));
  return 0.5 * len * (f0 * f0 + f1 * f1) / (std::abs(f0) + std::abs(f1));
}

}  // namespace

Potential Potential::piecewise(std::vector<double> breaks, std::vector<double> values, bool periodic) {
  check_knots(breaks, "breaks");
  require(values.size() + 1 == breaks.size(), "piecewise potential needs one value per break interval");
  check_finite(values, "values");
  Potential q;
  q.kind_ = PotentialKind::piecewise_constant;
  q.periodic_ = periodic;
  q.knots_ = std::move(breaks);
  q.values_ = std::move(values);
  q.prefix_.assign(q.knots_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < q.knots_.size(); ++i)
    q.prefix_[i + 1] = q.prefix_[i] + q.values_[i] * (q.knots_[i + 1] - q.knots_[i]);
  return q;
}

Potential Potential::trig(double a0, std::vector<double> a, std::vector<double> b) {
  require(std::isfinite(a0), "a0 must be finite");
  check_finite(a, "a");
  check_finite(b, "b");
  Potential q;
  q.kind_ = PotentialKind::trig_poly;
  q.periodic_ = true;
  q.a0_ = a0;
  q.a_ = std::move(a);
  q.b_ = std::move(b);
  return q;
}

Potential Potential::samples(std::vector<double> x, std::vector<double> v, bool periodic) {
  check_knots(x, "sample abscissae");
  require(x.size() == v.size(), "sample arrays must have equal length");
  check_finite(v, "sample values");
  Potential q;
  q.kind_ = PotentialKind::samples;
  q.periodic_ = periodic;
  q.knots_ = std::move(x);
  q.values_ = std::move(v);
  q.prefix_.assign(q.knots_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < q.knots_.size(); ++i)
    q.prefix_[i + 1] = q.prefix_[i] + 0.5 * (q.values_[i] + q.values_[i + 1]) * (q.knots_[i + 1] - q.knots_[i]);
  return q;
}

Potential Potential::constant(double c) { return piecewise({0.0, 1.0}, {c}); }

Potential Potential::shifted(double c) const {
  switch (kind_) {
    case PotentialKind::trig_poly:
      return trig(a0_ + c, a_, b_);
    case PotentialKind::piecewise_constant: {
      auto v = values_;
      for (double& x : v) x += c;
      return piecewise(knots_, v, periodic_);
    }
    case PotentialKind::samples: {
      auto v = values_;
      for (double& x : v) x += c;
      return samples(knots_, v, periodic_);
    }
  }
  return *this;
}

double Potential::reduce(double x) const {
  if (periodic_) return x - std::floor(x);
  return std::clamp(x, 0.0, 1.0);
}

double Potential::eval(double x) const {
  if (kind_ == PotentialKind::trig_poly) {
    double s = a0_;
    const double w = 2.0 * std::numbers::pi * x;
    for (std::size_t k = 0; k < a_.size(); ++k) s += a_[k] * std::cos((k + 1.0) * w);
    for (std::size_t k = 0; k < b_.size(); ++k) s += b_[k] * std::sin((k + 1.0) * w);
    return s;
  }
  const double t = reduce(x);
  const std::size_t i = segment(knots_, t);
  if (kind_ == PotentialKind::piecewise_constant) return values_[i];
  const double f = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + f * (values_[i + 1] - values_[i]);
}

double Potential::local_antiderivative(double t) const {
  if (kind_ == PotentialKind::trig_poly) {
    double s = a0_ * t;
    const double w = 2.0 * std::numbers::pi * t;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double m = 2.0 * std::numbers::pi * (k + 1.0);
      s += a_[k] * std::sin((k + 1.0) * w) / m;
    }
    for (std::size_t k = 0; k < b_.size(); ++k) {
      const double m = 2.0 * std::numbers::pi * (k + 1.0);
      s += b_[k] * (1.0 - std::cos((k + 1.0) * w)) / m;
    }
    return s;
  }
  const std::size_t i = segment(knots_, t);
  const double dt = t - knots_[i];
  if (kind_ == PotentialKind::piecewise_constant) return prefix_[i] + values_[i] * dt;
  return prefix_[i] + 0.5 * dt * (values_[i] + eval(t));
}

double Potential::antiderivative(double x) const {
  if (kind_ == PotentialKind::trig_poly) return local_antiderivative(x);
  if (periodic_) {
    const double m = std::floor(x);
    return m * prefix_.back() + local_antiderivative(x - m);
  }
  if (x < 0.0) return values_.front() * x;
  if (x > 1.0) return prefix_.back() + values_.back() * (x - 1.0);
  return local_antiderivative(x);
}

double Potential::integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

double Potential::abs_deviation_reduced(double a, double b, double c) const {
  if (b <= a) return 0.0;
  if (kind_ == PotentialKind::piecewise_constant) {
    double s = 0.0;
    for (std::size_t i = segment(knots_, a); i + 1 < knots_.size() && knots_[i] < b; ++i) {
      const double lo = std::max(a, knots_[i]);
      const double hi = std::min(b, knots_[i + 1]);
      if (hi > lo) s += std::abs(values_[i] - c) * (hi - lo);
    }
    return s;
  }
  if (kind_ == PotentialKind::samples) {
    double s = 0.0;
    for (std::size_t i = segment(knots_, a); i + 1 < knots_.size() && knots_[i] < b; ++i) {
      const double lo = std::max(a, knots_[i]);
      const double hi = std::min(b, knots_[i + 1]);
      if (hi <= lo) continue;
      auto lin = [&](double t) {
        const double f = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
        return values_[i] + f * (values_[i + 1] - values_[i]) - c;
      };
      s += abs_linear(lin(lo), lin(hi), hi - lo);
    }
    return s;
  }
  // Trig polynomial: split at sign changes of q - c, integrate each piece in closed form.
  const std::size_t degree = std::max(a_.size(), b_.size());
  const int cells = std::max(8, static_cast<int>(std::ceil((b - a) * 32.0 * (degree + 1))));
  auto f = [&](double t) { return eval(t) - c; };
  auto prim = [&](double t) { return local_antiderivative(t) - c * t; };
  double s = 0.0;
  double left = a;
  double x0 = a;
  double f0 = f(a);
  for (int i = 1; i <= cells; ++i) {
    const double x1 = (i == cells) ? b : a + (b - a) * i / cells;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      s += std::abs(prim(x1) - prim(left));
      left = x1;
    } else if (f0 != 0.0 && (f0 < 0) != (f1 < 0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      s += std::abs(prim(root) - prim(left));
      left = root;
    }
    x0 = x1;
    f0 = f1;
  }
  s += std::abs(prim(b) - prim(left));
  return s;
}

double Potential::abs_deviation(double a, double b, double c) const {
  if (b <= a) return 0.0;
  double s = 0.0;
  if (!periodic_) {
    if (a < 0.0) {
      const double hi = std::min(b, 0.0);
      s += std::abs(eval(0.0) - c) * (hi - a);
      a = hi;
    }
    if (b > 1.0) {
      const double lo = std::max(a, 1.0);
      s += std::abs(eval(1.0) - c) * (b - lo);
      b = lo;
    }
    return s + abs_deviation_reduced(std::clamp(a, 0.0, 1.0), std::clamp(b, 0.0, 1.0), c);
  }
  double m = std::floor(a);
  while (m < b) {
    const double lo = std::max(a, m) - m;
    const double hi = std::min(b, m + 1.0) - m;
    s += abs_deviation_reduced(lo, hi, c);
    m += 1.0;
  }
  return s;
}

double Potential::sup_abs() const {
  if (kind_ == PotentialKind::trig_poly) {
    double s = std::abs(a0_);
    for (double v : a_) s += std::abs(v);
    for (double v : b_) s += std::abs(v);
    return s;
  }
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double Potential::lower_bound() const {
  if (kind_ == PotentialKind::trig_poly) {
    double s = a0_;
    for (double v : a_) s -= std::abs(v);
    for (double v : b_) s -= std::abs(v);
    return s;
  }
  return *std::min_element(values_.begin(), values_.end());
}

std::vector<double> Potential::breakpoints() const {
  if (kind_ == PotentialKind::trig_poly) return {0.0, 1.0};
  return knots_;
}

std::vector<double> Potential::breakpoints_in(double a, double b) const {
  std::vector<double> out;
  if (kind_ == PotentialKind::trig_poly || b <= a) return out;
  if (!periodic_) {
    for (double k : knots_)
      if (k > a && k < b) out.push_back(k);
    return out;
  }
  for (double m = std::floor(a); m < b; m += 1.0) {
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      const double k = m + knots_[i];
      if (k > a && k < b) out.push_back(k);
    }
  }
  return out;
}

nlohmann::json Potential::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case PotentialKind::piecewise_constant:
      j["kind"] = "piecewise";
      j["breaks"] = knots_;
      j["values"] = values_;
      break;
    case PotentialKind::trig_poly:
      j["kind"] = "trig";
      j["a0"] = a0_;
      j["a"] = a_;
      j["b"] = b_;
      break;
    case PotentialKind::samples:
      j["kind"] = "samples";
      j["x"] = knots_;
      j["q"] = values_;
      break;
  }
  if (!periodic_) j["periodic"] = false;
  return j;
}

Potential potential_from_json(const nlohmann::json& doc) {
  try {
    require(doc.is_object(), "potential document must be a JSON object");
    const std::string kind = doc.at("kind").get<std::string>();
    const bool periodic = doc.value("periodic", true);
    if (kind == "piecewise")
      return Potential::piecewise(doc.at("breaks").get<std::vector<double>>(),
                                  doc.at("values").get<std::vector<double>>(), periodic);
    if (kind == "trig") {
      require(periodic, "trig potentials are always periodic");
      return Potential::trig(doc.value("a0", 0.0), doc.value("a", std::vector<double>{}),
                             doc.value("b", std::vector<double>{}));
    }
    if (kind == "samples")
      return Potential::samples(doc.at("x").get<std::vector<double>>(), doc.at("q").get<std::vector<double>>(),
                                periodic);
    throw InputError("unknown potential kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed potential document: ") + e.what());
  }
}

Potential parse_potential(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("potential is not valid JSON: ") + e.what());
  }
  return potential_from_json(doc);
}

Potential read_samples_csv(std::istream& in, bool periodic) {
  std::vector<double> xs;
  std::vector<double> qs;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x = 0.0;
    double q = 0.0;
    if (!(fields >> x >> q)) {
      if (xs.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw InputError("samples CSV: cannot parse line " + std::to_string(lineno));
    }
    xs.push_back(x);
    qs.push_back(q);
  }
  return Potential::samples(std::move(xs), std::move(qs), periodic);
}

}  // namespace plap
