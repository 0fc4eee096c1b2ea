#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plap/ptrig.hpp"

using plap::PParam;
using plap::PTrigContext;

namespace {

// S_p on the quarter period through the regularized incomplete beta function:
// int_0^y (1-t^p)^(-1/p) dt = (pi_hat/2) I_{y^p}(1/p, 1 - 1/p).
double sp_by_ibeta(double p, double x) {
  const double ph = plap::half_period(PParam(p));
  const double u = boost::math::ibeta_inv(1.0 / p, 1.0 - 1.0 / p, 2.0 * x / ph);
  return std::pow(u, 1.0 / p);
}

}  // namespace

TEST_CASE("signed_pow") {
  CHECK(plap::signed_pow(-2.0, 1.0) == -2.0);
  CHECK(plap::signed_pow(-3.0, 2.0) == doctest::Approx(-9.0).epsilon(1e-15));
  CHECK(plap::signed_pow(0.5, 3.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(plap::signed_pow(0.0, 0.3) == 0.0);
  for (double x : {-2.5, -0.1, 0.7, 3.0})
    CHECK(plap::signed_pow(-x, 1.7) == -plap::signed_pow(x, 1.7));
}

TEST_CASE("PParam rejects p <= 1") {
  CHECK_THROWS_AS(PParam(1.0), std::invalid_argument);
  CHECK_THROWS_AS(PParam(0.5), std::invalid_argument);
  CHECK_THROWS_AS(PParam(std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(PParam(1.0001));
}

TEST_CASE("half period") {
  CHECK(plap::half_period(PParam(2.0)) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(plap::half_period(PParam(4.0)) == doctest::Approx(2.2214415).epsilon(1e-7));
  CHECK(plap::half_period(PParam(1.5)) == doctest::Approx(4.8367983).epsilon(1e-7));
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0, 4.7, 8.0}) {
    const double closed = plap::half_period(PParam(p));
    CHECK(std::abs(closed - oracle::pi_hat_by_quadrature(p)) < 1e-10);
    CHECK(PTrigContext(PParam(p)).pi_hat() == closed);
  }
}

TEST_CASE("sp_pair examples") {
  const PTrigContext two{PParam(2.0)};
  auto [s, c] = two.sp_pair(std::numbers::pi / 4);
  CHECK(s == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(c == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  for (double p : {1.3, 2.0, 3.0, 4.7}) {
    const PTrigContext ctx{PParam(p)};
    auto [s0, c0] = ctx.sp_pair(ctx.pi_hat());
    CHECK(std::abs(s0) < 1e-14);
    CHECK(c0 == doctest::Approx(-1.0).epsilon(1e-14));
    auto [s1, c1] = ctx.sp_pair(0.5 * ctx.pi_hat());
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(c1) < 1e-14);
  }
}

TEST_CASE("S_p matches the incomplete-beta inversion") {
  for (double p : {1.5, 2.0, 3.0, 4.7}) {
    const PTrigContext ctx{PParam(p)};
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.5 * ctx.pi_hat() * i / 200.0;
      CHECK(std::abs(ctx.sp_pair(x).first - sp_by_ibeta(p, x)) < 1e-11);
    }
  }
}

TEST_CASE("p = 2 reduces to sine and cosine") {
  const PTrigContext ctx{PParam(2.0)};
  for (int i = 0; i <= 4000; ++i) {
    const double x = -10.0 + 20.0 * i / 4000.0;
    auto [s, c] = ctx.sp_pair(x);
    REQUIRE(std::abs(s - std::sin(x)) < 1e-10);
    REQUIRE(std::abs(c - std::cos(x)) < 1e-10);
  }
}

TEST_CASE("Pythagorean identity, oddness and periodicity") {
  std::mt19937_64 rng(7);
  for (double p : {1.5, 2.0, 3.0, 4.7}) {
    const PTrigContext ctx{PParam(p)};
    std::uniform_real_distribution<double> dist(-2.0 * ctx.pi_hat(), 2.0 * ctx.pi_hat());
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double x = dist(rng);
      auto [s, c] = ctx.sp_pair(x);
      worst = std::max(worst, std::abs(std::pow(std::abs(s), p) + std::pow(std::abs(c), p) - 1.0));
      auto [sn, cn] = ctx.sp_pair(-x);
      REQUIRE(sn == -s);
      REQUIRE(cn == c);
      auto [sp, cp] = ctx.sp_pair(x + 2.0 * ctx.pi_hat());
      REQUIRE(std::abs(sp - s) < 10 * ctx.eps());
      REQUIRE(std::abs(cp - c) < 1e-6);  // S_p' is only Holder near its zeros
    }
    CHECK(worst < 10 * ctx.eps());
  }
}

TEST_CASE("derivative identity (S_p S_p'^(p-1))' = 1 - p|S_p|^p") {
  for (double p : {1.5, 2.0, 3.0, 4.7}) {
    const PTrigContext ctx{PParam(p)};
    auto bracket = [&](double x) {
      auto [s, c] = ctx.sp_pair(x);
      return s * plap::signed_pow(c, p - 1.0);
    };
    const double h = 1e-4;
    for (int i = 0; i < 400; ++i) {
      const double x = -2.0 * ctx.pi_hat() + 4.0 * ctx.pi_hat() * (i + 0.5) / 400.0;
      const double lattice = std::remainder(x - 0.5 * ctx.pi_hat(), ctx.pi_hat());
      if (std::abs(lattice) < 0.05) continue;
      const double fd = (bracket(x + h) - bracket(x - h)) / (2 * h);
      const double s = ctx.sp_pair(x).first;
      REQUIRE(std::abs(fd - (1.0 - p * std::pow(std::abs(s), p))) < 1e-6);
    }
  }
}

TEST_CASE("S_p solves the unperturbed equation") {
  // (S'^(p-1))' = -(p-1) S^(p-1); checked by central differences.
  for (double p : {1.5, 3.0}) {
    const PTrigContext ctx{PParam(p)};
    const double h = 1e-4;
    for (double x : {0.3, 0.9, 2.0, -1.1}) {
      auto flux = [&](double t) { return plap::signed_pow(ctx.sp_pair(t).second, p - 1.0); };
      const double lhs = (flux(x + h) - flux(x - h)) / (2 * h);
      const double rhs = -(p - 1.0) * plap::signed_pow(ctx.sp_pair(x).first, p - 1.0);
      CHECK(std::abs(lhs - rhs) < 1e-6);
    }
  }
}

TEST_CASE("inversion table is strictly monotone") {
  for (double p : {1.5, 2.0, 3.0, 4.7, 10.0}) {
    const PTrigContext ctx{PParam(p)};
    auto xs = ctx.table_x();
    auto ss = ctx.table_s();
    REQUIRE(xs.size() == ss.size());
    CHECK(xs.front() == 0.0);
    CHECK(xs.back() == doctest::Approx(0.5 * ctx.pi_hat()));
    for (std::size_t i = 1; i < ss.size(); ++i) REQUIRE(ss[i] > ss[i - 1]);
  }
}

TEST_CASE("wct and its inverse") {
  const PTrigContext two{PParam(2.0)};
  CHECK(two.wct(0.0).value == 0.0);
  CHECK(!two.wct(0.0).is_infinite());
  CHECK(two.wct(std::numbers::pi / 4).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.wct(std::numbers::pi / 2).is_infinite());
  CHECK(two.wct(std::numbers::pi / 2).inf_sign == 1);
  CHECK_THROWS_AS(two.wct(-0.1), std::domain_error);
  CHECK_THROWS_AS(two.wct(std::numbers::pi), std::domain_error);

  CHECK(two.wct_inv(plap::ExtendedReal::finite(0.0)) == 0.0);
  CHECK(two.wct_inv(plap::ExtendedReal::finite(1.0)) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-13));
  CHECK(two.wct_inv(plap::ExtendedReal::infinity()) == doctest::Approx(std::numbers::pi / 2));
  CHECK(two.wct_inv(plap::ExtendedReal::finite(-1.0)) == doctest::Approx(3 * std::numbers::pi / 4).epsilon(1e-13));

  for (double p : {1.5, 2.0, 3.0, 4.7}) {
    const PTrigContext ctx{PParam(p)};
    for (int i = 0; i < 500; ++i) {
      const double g = ctx.pi_hat() * i / 500.0;
      if (std::abs(g - 0.5 * ctx.pi_hat()) < 1e-3) continue;
      REQUIRE(std::abs(ctx.wct_inv(ctx.wct(g)) - g) < 1e-9);
    }
  }
}

TEST_CASE("inverse cotangent about the maximum") {
  const PTrigContext three{PParam(3.0)};
  const double half = 0.5 * three.pi_hat();
  const double v = 0.01;
  const double g = three.cot_inv_about_max(v);
  // Expansion pi_hat/2 - v^(p-1)/(p-1); the next term is v^(2p-1)/(2p-1) = 2e-11.
  CHECK(std::abs(g - (half - v * v / 2.0)) < 1e-9);
  // and it really is a root of S'/S = v
  CHECK(three.cot_hat(g) == doctest::Approx(v).epsilon(1e-10));
  CHECK(three.cot_inv_about_max(0.0) == doctest::Approx(half).epsilon(1e-15));
  // negative argument lands past the maximum
  CHECK(three.cot_inv_about_max(-v) == doctest::Approx(half + v * v / 2.0).epsilon(1e-9));

  const PTrigContext two{PParam(2.0)};
  for (double t : {-3.0, -0.2, 0.5, 4.0})
    CHECK(two.cot_inv_about_max(t) == doctest::Approx(std::atan2(1.0, t)).epsilon(1e-13));
}

TEST_CASE("angle_of is a generalized atan2") {
  const PTrigContext two{PParam(2.0)};
  for (double a : {0.1, 1.0, 2.0, 3.0, 4.0, 5.5}) {
    const double got = two.angle_of(std::sin(a), std::cos(a));
    CHECK(got == doctest::Approx(a).epsilon(1e-13));
  }
  const PTrigContext ctx{PParam(3.3)};
  for (int i = 0; i < 100; ++i) {
    const double a = 2.0 * ctx.pi_hat() * (i + 0.25) / 100.0;
    auto [s, c] = ctx.sp_pair(a);
    REQUIRE(ctx.angle_of(2.5 * s, 2.5 * c) == doctest::Approx(a).epsilon(1e-10));
  }
  CHECK_THROWS_AS(ctx.angle_of(0.0, 0.0), std::domain_error);
}
