#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "glsop/tail.hpp"

using namespace glsop;

namespace {
quad::Config cfg_default() {
  quad::Config cfg;
  cfg.rel_tol = 1e-10;
  return cfg;
}
} // namespace

TEST_CASE("conjugate of the power family against the closed form") {
  // psi(p) = sqrt(p): stationary point p* = e^{2v-1}, h*(v) = e^{2v-1}/2
  const auto psi = gls::power_psi(2.0);
  for (double v : {0.6, 1.0, 2.0, 3.0}) {
    const auto c = tail::young_fenchel(psi, v);
    REQUIRE_FALSE(c.capped);
    const double oracle = 0.5 * std::exp(2.0 * v - 1.0);
    CHECK(c.value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(c.arg_p == doctest::Approx(std::exp(2.0 * v - 1.0)).epsilon(1e-4));
  }
  // p* beyond the scan cap: flagged, not extrapolated
  const auto far = tail::young_fenchel(psi, 5.0);
  CHECK(far.capped);
  CHECK(far.value == opt::kInf);
}

TEST_CASE("extremal psi gives the linear conjugate") {
  const auto psi = gls::extremal_psi(3.0);
  for (double v : {-1.0, 0.0, 0.7, 2.5})
    CHECK(tail::young_fenchel(psi, v).value == doctest::Approx(3.0 * v));
}

TEST_CASE("constant psi: linear objective endpoint analysis") {
  const auto psi = gls::custom_psi([](double) { return 1.0; }, 1.0, gls::kInf);
  const auto up = tail::young_fenchel(psi, 0.5);
  CHECK((up.capped || up.value == opt::kInf));
  for (double v : {-2.0, -0.5}) {
    const auto c = tail::young_fenchel(psi, v);
    CHECK(c.value == doctest::Approx(v).epsilon(1e-6));
  }
}

TEST_CASE("Fenchel-Young dominance and discrete convexity") {
  const auto psi = gls::two_sided_psi(1.0, 4.0, 0.5, 0.5);
  std::vector<double> vs, hs;
  for (int i = 0; i <= 40; ++i) {
    const double v = -1.0 + 3.0 * i / 40.0;
    const auto c = tail::young_fenchel(psi, v);
    vs.push_back(v);
    hs.push_back(c.value);
  }
  // p v <= h*(v) + p ln psi(p) at probe points
  for (double p : {1.5, 2.0, 3.0, 3.5}) {
    const double lp = std::log(psi(p));
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (std::isfinite(hs[i]))
        CHECK(p * vs[i] <= hs[i] + p * lp + 1e-8);
  }
  // second differences of h* on the uniform v grid
  for (std::size_t i = 1; i + 1 < hs.size(); ++i)
    if (std::isfinite(hs[i - 1]) && std::isfinite(hs[i]) && std::isfinite(hs[i + 1]))
      CHECK(hs[i + 1] - 2.0 * hs[i] + hs[i - 1] >= -1e-8);
}

TEST_CASE("extremal tail bound recovers the Markov power law") {
  const auto cfg = cfg_default();
  auto f = gls::indicator_unit(); // ||f||_p = 1 for all p
  const auto psi = gls::extremal_psi(2.0);
  for (double t : {3.0, 10.0, 100.0}) {
    const auto tb = tail::tail_bound(f, psi, t, cfg);
    CHECK(tb.bound == doctest::Approx(std::pow(t, -2.0)).epsilon(1e-10));
    CHECK(tb.gls_norm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("power-psi tail bound matches exp(-t^2/(2e))") {
  const auto cfg = cfg_default();
  auto f = gls::indicator_unit();
  const auto psi = gls::power_psi(2.0);
  for (double t : {3.0, 10.0, 40.0}) {
    const auto tb = tail::tail_bound(f, psi, t, cfg);
    const double oracle = std::exp(-t * t / (2.0 * tail::kE));
    CHECK(tb.bound == doctest::Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("bound is monotone nonincreasing in t") {
  const auto cfg = cfg_default();
  auto f = gls::indicator_unit();
  const auto psi = gls::two_sided_psi(1.0, 4.0, 0.5, 0.5);
  double prev = gls::kInf;
  for (double t = tail::kE; t <= 1000.0; t *= 1.7) {
    const auto tb = tail::tail_bound(f, psi, t, cfg);
    CHECK(tb.bound <= prev * (1.0 + 1e-12));
    prev = tb.bound;
  }
}

TEST_CASE("inputs below e are refused") {
  const auto cfg = cfg_default();
  auto f = gls::indicator_unit();
  const auto psi = gls::extremal_psi(2.0);
  CHECK_THROWS_AS((void)tail::tail_bound(f, psi, 2.0, cfg),
                  std::invalid_argument);
  CHECK_NOTHROW((void)tail::tail_bound(f, psi, tail::kE, cfg));
}

TEST_CASE("measured tails stay below the bound") {
  const auto cfg = cfg_default();
  const std::vector<double> ts = {1.0, 3.0, 10.0, 100.0, 1000.0};

  // bounded f: tail vanishes beyond its sup
  {
    auto f = gls::indicator_unit();
    const auto rep = tail::tail_check(f, gls::extremal_psi(2.0), ts, cfg);
    CHECK(rep.pass);
    CHECK(rep.points.size() == 4); // t = 1 < e skipped
  }
  // near-extremal power: T_f(t) = t^{-2.5} vs the r = 2 Markov decay
  {
    auto f = gls::unit_power(0.4);
    const auto rep = tail::tail_check(f, gls::extremal_psi(2.0), ts, cfg);
    CHECK(rep.pass);
    CHECK(rep.norm == doctest::Approx(std::sqrt(5.0)).epsilon(1e-8));
    for (const auto& pt : rep.points) {
      CHECK(pt.bound == doctest::Approx(std::pow(pt.t, -2.0)).epsilon(1e-8));
      CHECK(pt.measured <= pt.bound);
    }
  }
  // no computable tail measure
  {
    auto f = gls::tail_power(0.8);
    CHECK_THROWS_AS((void)tail::tail_check(f, gls::extremal_psi(2.0), ts, cfg),
                    std::invalid_argument);
  }
}
