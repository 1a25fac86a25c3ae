#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "glsop/beta.hpp"

using namespace glsop;

namespace {
quad::Config cfg_default() {
  quad::Config cfg;
  cfg.rel_tol = 1e-8;
  return cfg;
}
constexpr double kPi = 3.141592653589793;

std::vector<gls::GeneratingFunction> linear_psis() {
  // psi(p) = p on (1, inf): feasible reciprocal box is the full (0,1)
  auto mk = [] {
    return gls::custom_psi([](double p) { return p; }, 1.0, gls::kInf);
  };
  return {mk(), mk()};
}
} // namespace

TEST_CASE("extremal psi pair: the single feasible point") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::GeneratingFunction> psis = {gls::extremal_psi(2.0),
                                                     gls::extremal_psi(2.0)};
  const std::vector<double> norms = {1.0, 1.0};
  const auto pt = beta::beta_at(k, psis, norms, 1.0, cfg);
  REQUIRE(pt.finite());
  CHECK(pt.value == doctest::Approx(kPi).epsilon(1e-7));
  REQUIRE(pt.argmin_p.size() == 2);
  CHECK(pt.argmin_p[0] == doctest::Approx(2.0));
  CHECK(pt.argmin_p[1] == doctest::Approx(2.0));

  const auto off = beta::beta_at(k, psis, norms, 2.0, cfg);
  CHECK(off.status == beta::PointStatus::infeasible);
}

TEST_CASE("m=2 optimizer against a dense closed-form grid oracle") {
  // hilbert, psi_j(p) = p, norms 1, p = 1: objective in u is
  // Gamma(u) Gamma(1-u) / (u (1-u)), minimized near u = 1/2 (value 4 pi)
  quad::Config cfg;
  cfg.rel_tol = 1e-7;
  auto k = kernel::builtin_kernel("hilbert", 2);
  const auto psis = linear_psis();
  const std::vector<double> norms = {1.0, 1.0};
  const auto pt = beta::beta_at(k, psis, norms, 1.0, cfg);
  REQUIRE(pt.finite());

  double oracle = beta::kInf;
  for (int i = 1; i < 10000; ++i) {
    const double u = static_cast<double>(i) / 10000.0;
    const double v =
        std::tgamma(u) * std::tgamma(1.0 - u) / (u * (1.0 - u));
    oracle = std::min(oracle, v);
  }
  CHECK(pt.value == doctest::Approx(oracle).epsilon(1e-4));
  CHECK(pt.value == doctest::Approx(4.0 * kPi).epsilon(1e-4));
  // constraint satisfied at the reported argmin
  CHECK(1.0 / pt.argmin_p[0] + 1.0 / pt.argmin_p[1] ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("optimizer result is a lower envelope of feasible samples") {
  quad::Config cfg;
  cfg.rel_tol = 1e-7;
  auto k = kernel::builtin_kernel("hilbert", 2);
  const auto psis = linear_psis();
  const std::vector<double> norms = {1.0, 1.0};
  const auto pt = beta::beta_at(k, psis, norms, 1.0, cfg);
  REQUIRE(pt.finite());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  for (int i = 0; i < 1000; ++i) {
    const double u = uni(rng);
    const double obj = std::tgamma(u) * std::tgamma(1.0 - u) / (u * (1.0 - u));
    CHECK(pt.value <= obj * (1.0 + 1e-6));
  }
}

TEST_CASE("normalization factorization") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hardy", 2);
  const std::vector<gls::GeneratingFunction> psis = {gls::extremal_psi(2.0),
                                                     gls::extremal_psi(4.0)};
  const std::vector<double> unit = {1.0, 1.0};
  const std::vector<double> scaled = {2.0, 3.0};
  const double p = 1.0 / (0.5 + 0.25);
  const auto a = beta::beta_at(k, psis, unit, p, cfg);
  const auto b = beta::beta_at(k, psis, scaled, p, cfg);
  REQUIRE(a.finite());
  CHECK(b.value == doctest::Approx(6.0 * a.value).epsilon(1e-10));
}

TEST_CASE("rescaled psi multiplies beta with norms held fixed") {
  quad::Config cfg;
  cfg.rel_tol = 1e-7;
  auto k = kernel::builtin_kernel("hilbert", 2);
  const auto base = linear_psis();
  std::vector<gls::GeneratingFunction> doubled = {
      gls::custom_psi([](double p) { return 2.0 * p; }, 1.0, gls::kInf),
      gls::custom_psi([](double p) { return 2.0 * p; }, 1.0, gls::kInf)};
  const std::vector<double> norms = {1.0, 1.0};
  const auto a = beta::beta_at(k, base, norms, 1.0, cfg);
  const auto b = beta::beta_at(k, doubled, norms, 1.0, cfg);
  REQUIRE(a.finite());
  CHECK(b.value == doctest::Approx(4.0 * a.value).epsilon(1e-8));
}

TEST_CASE("zero norm collapses beta to zero") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hardy", 2);
  const std::vector<gls::GeneratingFunction> psis = {gls::extremal_psi(2.0),
                                                     gls::extremal_psi(2.0)};
  const std::vector<double> norms = {0.0, 1.0};
  const auto pt = beta::beta_at(k, psis, norms, 1.0, cfg);
  REQUIRE(pt.finite());
  CHECK(pt.value == 0.0);
}

TEST_CASE("infeasible slices and divergent theta are reported as such") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::GeneratingFunction> psis = {
      gls::two_sided_psi(2.0, 4.0, 0.5, 0.5),
      gls::two_sided_psi(2.0, 4.0, 0.5, 0.5)};
  const std::vector<double> norms = {1.0, 1.0};
  // 1/p = 1.2 exceeds the maximal reciprocal sum 2 * 1/2
  const auto inf_pt = beta::beta_at(k, psis, norms, 1.0 / 1.2, cfg);
  CHECK(inf_pt.status == beta::PointStatus::infeasible);

  // extremal psi at p_j = 1: theta diverges at the only feasible point
  const std::vector<gls::GeneratingFunction> bad = {gls::extremal_psi(1.0),
                                                    gls::extremal_psi(2.0)};
  const auto div_pt = beta::beta_at(k, bad, norms, 1.0 / 1.5, cfg);
  CHECK(div_pt.status == beta::PointStatus::theta_infinite);
}

TEST_CASE("curve plumbing: grid echo, finiteness interval, contiguity") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::GeneratingFunction> psis = {gls::extremal_psi(2.0),
                                                     gls::extremal_psi(2.0)};
  const std::vector<double> norms = {1.0, 1.0};
  const std::vector<double> grid = {0.5, 0.75, 1.0, 1.5, 2.0};
  const auto curve = beta::beta_curve(k, psis, norms, grid, cfg);
  REQUIRE(curve.samples.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(curve.samples[i].p == grid[i]);
  int finite_count = 0;
  for (const auto& s : curve.samples)
    if (s.finite()) ++finite_count;
  CHECK(finite_count == 1);
  CHECK(curve.interval_lo == doctest::Approx(1.0));
  CHECK(curve.interval_hi == doctest::Approx(1.0));
  CHECK(curve.contiguous);

  const std::vector<double> bad_grid = {1.0, 1.0};
  CHECK_THROWS_AS(
      (void)beta::beta_curve(k, psis, norms, bad_grid, cfg),
      std::invalid_argument);
}

TEST_CASE("certification on the extremal spot case") {
  const auto cfg = cfg_default();
  auto k = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::TestFunction> fs = {gls::indicator_unit(),
                                             gls::indicator_unit()};
  const std::vector<gls::GeneratingFunction> psis = {gls::extremal_psi(2.0),
                                                     gls::extremal_psi(2.0)};
  const std::vector<double> grid = {1.0, 2.0};
  const auto rep = beta::certify_theorem(k, fs, psis, grid, cfg);
  CHECK(rep.pass);
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.points[0].status == beta::CertifyPointStatus::pass);
  CHECK(rep.points[0].beta_value == doctest::Approx(kPi).epsilon(1e-7));
  CHECK(rep.points[0].operator_norm ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-5));
  CHECK(rep.points[1].status == beta::CertifyPointStatus::unconstrained);
}
