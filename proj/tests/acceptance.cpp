// Acceptance gate: one line of output per criterion, nonzero exit if any
// criterion fails.  Each block is oracle- or property-based and
// self-contained; tolerances are stated inline next to the checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "glsop/beta.hpp"
#include "glsop/gls.hpp"
#include "glsop/kernel.hpp"
#include "glsop/tail.hpp"
#include "glsop/theta.hpp"
#include "glsop/verify.hpp"

using namespace glsop;

namespace {

constexpr double kPi = 3.141592653589793;
std::string g_cli; // optional path to the CLI binary (criterion 9)

struct Criterion {
  int id;
  const char* name;
  std::function<void(std::string&)> body; // throws or appends detail on failure
};

bool run_criterion(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  try {
    c.body(detail);
    ok = detail.empty();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("criterion %d [%s]: %s (%.1f s)%s%s\n", c.id, c.name,
              ok ? "PASS" : "FAIL", secs, detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  return ok;
}

void expect(bool cond, const std::string& msg, std::string& detail) {
  if (!cond && detail.empty()) detail = msg;
}

quad::Config cfg_at(double rel) {
  quad::Config cfg;
  cfg.rel_tol = rel;
  return cfg;
}

// 1. theta against the Gamma-product and product-formula oracles
void criterion_theta_oracle(std::string& detail) {
  const auto cfg = cfg_at(1e-9);
  auto hil = kernel::builtin_kernel("hilbert", 2);
  const double hp[][2] = {{2, 2}, {4, 4}, {3, 6}};
  for (const auto& pq : hp) {
    const std::vector<double> p = {pq[0], pq[1]};
    const auto est = theta::theta(hil, theta::ExponentVector(p), cfg);
    const double oracle = std::tgamma(1.0 - 1.0 / p[0]) *
                          std::tgamma(1.0 - 1.0 / p[1]) *
                          std::tgamma(1.0 / p[0] + 1.0 / p[1]);
    expect(est.finite() &&
               std::abs(est.theta - oracle) <= 1e-6 * oracle,
           "hilbert mismatch at (" + std::to_string(p[0]) + "," +
               std::to_string(p[1]) + ")",
           detail);
  }
  const std::vector<std::vector<double>> hardy_cases = {
      {2, 2}, {4, 4}, {3, 6}, {2, 3, 4}};
  for (const auto& p : hardy_cases) {
    auto har = kernel::builtin_kernel("hardy", static_cast<int>(p.size()));
    const auto est = theta::theta(har, theta::ExponentVector(p), cfg);
    double oracle = 1.0;
    for (double pj : p) oracle *= pj / (pj - 1.0);
    expect(est.finite() && std::abs(est.theta - oracle) <= 1e-8 * oracle,
           "hardy mismatch at m=" + std::to_string(p.size()), detail);
  }
}

// 2. homogeneity suite and rejection of an inhomogeneous parsed kernel
void criterion_homogeneity(std::string& detail) {
  const std::vector<double> deltas = {0.5, 2.0, 10.0};
  for (const char* name : {"hilbert", "hardy", "max"}) {
    for (int m : {2, 3}) {
      auto k = kernel::builtin_kernel(name, m);
      const auto rep = kernel::check_homogeneity(k, 1000, deltas, 1e-12);
      expect(rep.pass, std::string(name) + " m=" + std::to_string(m) +
                           " defect " + std::to_string(rep.max_violation),
             detail);
    }
  }
  auto bad = kernel::kernel_from_expression("1/(x0+x1+x2)^3", 2);
  const auto rep = kernel::check_homogeneity(bad, 200, deltas, 1e-6);
  expect(!rep.pass, "inhomogeneous kernel slipped the gate", detail);
  bool refused = false;
  try {
    (void)theta::theta(bad, theta::ExponentVector({2, 2}), cfg_at(1e-6));
  } catch (const std::invalid_argument&) {
    refused = true;
  }
  expect(refused, "theta accepted an uncertified kernel", detail);
}

// 3. sharp-constant inequality matrix with the 2 ln 2 spot check
void criterion_inequality_matrix(std::string& detail) {
  // margins across the matrix are >= 0.1, so a loose quadrature tolerance
  // keeps every verdict decisive while staying inside the runtime budget
  const auto cfg = cfg_at(1e-5);
  const std::vector<std::vector<double>> exps = {
      {2, 2}, {4, 4}, {3, 6}, {2, 2, 2}};
  for (const char* fam : {"hilbert", "hardy"}) {
    for (const char* ftag : {"indicator", "truncated_power"}) {
      for (const auto& p : exps) {
        const int m = static_cast<int>(p.size());
        auto k = kernel::builtin_kernel(fam, m);
        std::vector<gls::TestFunction> fs;
        for (int j = 0; j < m; ++j)
          fs.push_back(std::string(ftag) == "indicator"
                           ? gls::indicator_unit()
                           : gls::truncated_power(0.125));
        const auto rep =
            verify::check_inequality(k, fs, theta::ExponentVector(p), cfg);
        expect(rep.status == verify::CheckStatus::pass,
               std::string(fam) + "/" + ftag + " m=" + std::to_string(m) +
                   " status not pass",
               detail);
        expect(!(rep.margin < 0.0), "negative margin in the matrix", detail);
      }
    }
  }
  auto hil = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::TestFunction> ind = {gls::indicator_unit(),
                                              gls::indicator_unit()};
  const auto spot = verify::check_inequality(hil, ind,
                                             theta::ExponentVector({2, 2}),
                                             cfg_at(1e-7));
  expect(std::abs(spot.lhs - 2.0 * std::log(2.0)) <= 1e-5,
         "spot lhs is not 2 ln 2", detail);
  expect(std::abs(spot.rhs - kPi) <= 1e-6 * kPi, "spot rhs is not pi", detail);
}

// 4. non-improvability probes extrapolate to the sharp constant
void criterion_sharpness(std::string& detail) {
  const auto cfg = cfg_at(1e-7);
  const std::vector<double> eps = {0.1, 0.05, 0.025};
  auto hil = kernel::builtin_kernel("hilbert", 2);
  const auto ph =
      verify::sharpness_probe(hil, theta::ExponentVector({2, 2}), eps, cfg);
  expect(std::abs(ph.extrapolated_limit - kPi) <= 0.02 * kPi,
         "hilbert extrapolation off by more than 2%", detail);
  for (double r : ph.ratios)
    expect(r <= kPi * (1.0 + 1e-4), "hilbert ratio above the target", detail);

  auto har = kernel::builtin_kernel("hardy", 2);
  const auto pr =
      verify::sharpness_probe(har, theta::ExponentVector({2, 2}), eps, cfg);
  expect(std::abs(pr.extrapolated_limit - 4.0) <= 0.02 * 4.0,
         "hardy extrapolation off by more than 2%", detail);
  for (double r : pr.ratios)
    expect(r <= 4.0 * (1.0 + 1e-4), "hardy ratio above the target", detail);
}

// 5. beta optimizer: dense-grid oracle, extremal reduction, factorization
void criterion_beta_soundness(std::string& detail) {
  const auto cfg = cfg_at(1e-7);
  auto hil = kernel::builtin_kernel("hilbert", 2);
  auto linear = [] {
    return gls::custom_psi([](double p) { return p; }, 1.0, gls::kInf);
  };
  const std::vector<gls::GeneratingFunction> psis = {linear(), linear()};
  const std::vector<double> unit = {1.0, 1.0};
  const auto pt = beta::beta_at(hil, psis, unit, 1.0, cfg);
  double oracle = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 10000; ++i) {
    const double u = static_cast<double>(i) / 10000.0;
    oracle = std::min(oracle,
                      std::tgamma(u) * std::tgamma(1.0 - u) / (u * (1.0 - u)));
  }
  expect(pt.finite() && std::abs(pt.value - oracle) <= 1e-4 * oracle,
         "dense-grid oracle mismatch", detail);

  const std::vector<gls::GeneratingFunction> ext = {gls::extremal_psi(2.0),
                                                    gls::extremal_psi(4.0)};
  const std::vector<double> norms = {1.5, 2.0};
  const double p_star = 1.0 / (0.5 + 0.25);
  const auto ep = beta::beta_at(hil, ext, norms, p_star, cfg);
  const auto th = theta::theta(hil, theta::ExponentVector({2, 4}), cfg);
  expect(ep.finite() &&
             std::abs(ep.value - th.theta * 3.0) <= 1e-8 * ep.value,
         "extremal reduction mismatch", detail);

  const auto eu = beta::beta_at(hil, ext, unit, p_star, cfg);
  expect(std::abs(ep.value - 3.0 * eu.value) <= 1e-10 * ep.value,
         "normalization factorization violated", detail);
}

// 6. theorem certification across a grid of finite-beta points
void criterion_certification(std::string& detail) {
  const auto cfg = cfg_at(1e-5);
  auto hil = kernel::builtin_kernel("hilbert", 2);
  const std::vector<gls::TestFunction> fs = {gls::truncated_power(0.125),
                                             gls::truncated_power(0.125)};
  const std::vector<gls::GeneratingFunction> psis = {
      gls::two_sided_psi(1.0, 4.0, 0.5, 1.0),
      gls::two_sided_psi(1.0, 4.0, 0.5, 1.0)};
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.60 + 0.10 * i);
  const auto rep = beta::certify_theorem(hil, fs, psis, grid, cfg);
  int finite_pts = 0, passed = 0;
  for (const auto& pt : rep.points) {
    if (pt.status == beta::CertifyPointStatus::pass ||
        pt.status == beta::CertifyPointStatus::fail)
      ++finite_pts;
    if (pt.status == beta::CertifyPointStatus::pass) ++passed;
    expect(pt.status != beta::CertifyPointStatus::fail,
           "operator norm exceeded beta at p=" + std::to_string(pt.p), detail);
  }
  expect(finite_pts >= 10, "fewer than 10 finite-beta grid points (" +
                               std::to_string(finite_pts) + ")",
         detail);
  expect(rep.pass && passed == finite_pts, "certification did not pass", detail);
}

// 7. Young-Fenchel closed forms, Markov recovery, tail checks
void criterion_young_fenchel(std::string& detail) {
  const auto cfg = cfg_at(1e-9);
  const auto power = gls::power_psi(2.0);
  for (double v : {0.6, 1.0, 2.0, 3.0}) {
    const auto c = tail::young_fenchel(power, v);
    const double oracle = 0.5 * std::exp(2.0 * v - 1.0);
    expect(std::abs(c.value - oracle) <= 1e-6 * oracle,
           "power-psi conjugate mismatch at v=" + std::to_string(v), detail);
  }
  const auto ext = gls::extremal_psi(2.5);
  for (double v : {-1.0, 0.5, 2.0}) {
    const auto c = tail::young_fenchel(ext, v);
    expect(std::abs(c.value - 2.5 * v) <= 1e-12 + 1e-10 * std::abs(v),
           "extremal conjugate is not r*v", detail);
  }
  auto ind = gls::indicator_unit();
  for (double t : {3.0, 10.0, 100.0}) {
    const auto tb = tail::tail_bound(ind, ext, t, cfg);
    expect(std::abs(tb.bound - std::pow(t, -2.5)) <= 1e-6 * tb.bound,
           "Markov power law not recovered", detail);
  }
  const std::vector<double> ts = {3.0, 10.0, 100.0, 1000.0};
  const auto rep1 = tail::tail_check(gls::unit_power(0.4), gls::extremal_psi(2.0),
                                     ts, cfg);
  expect(rep1.pass, "tail check failed for the truncated power", detail);
  const auto rep2 = tail::tail_check(ind, power, ts, cfg);
  expect(rep2.pass, "tail check failed for the indicator", detail);
}

// 8. Grand Lebesgue norm: extremal reduction and the defining inequality
void criterion_gls_norm(std::string& detail) {
  const auto cfg = cfg_at(1e-9);
  auto f = gls::unit_power(0.25);
  const auto ext = gls::gls_norm(f, gls::extremal_psi(2.0), cfg);
  const auto plain = gls::lp_norm(f, 2.0, cfg);
  expect(ext.value == plain.value, "extremal psi is not the plain norm", detail);

  const std::pair<gls::TestFunction, gls::GeneratingFunction> cases[] = {
      {gls::indicator_unit(), gls::power_psi(2.0)},
      {gls::unit_power(0.25), gls::two_sided_psi(1.0, 4.0, 0.5, 1.0)},
      {gls::unit_power(0.25), gls::extremal_psi(3.0)}};
  for (const auto& [fn, psi] : cases) {
    const auto g = gls::gls_norm(fn, psi, cfg);
    expect(g.finite(), "finite Grand Lebesgue norm expected", detail);
    const double hi = std::min(psi.b, 8.0);
    for (int i = 0; i < 64; ++i) {
      const double p = psi.a + (i + 0.5) * std::max(hi - psi.a, 1e-9) / 64.0;
      const double ps = psi(p);
      if (!std::isfinite(ps)) continue;
      const auto nr = gls::lp_norm(fn, p, cfg);
      if (!std::isfinite(nr.value)) continue;
      expect(nr.value <= g.value * ps * (1.0 + 1e-8) + 1e-12,
             "norm-definition inequality violated", detail);
    }
  }
}

// 9. bit-identical CSV for identical config and seed (through the CLI)
void criterion_reproducibility(std::string& detail) {
  if (g_cli.empty()) {
    detail = "CLI binary path not supplied";
    return;
  }
  auto slurp = [](const char* path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string cmd = g_cli +
      " theta --kernel '{\"family\":\"hilbert\",\"m\":4}' --p 3,3,3,3"
      " --rel-tol 1e-3 --seed 31 -o ";
  const int ra = std::system((cmd + "acc_rep_a.csv").c_str());
  const int rb = std::system((cmd + "acc_rep_b.csv").c_str());
  expect(WIFEXITED(ra) && WEXITSTATUS(ra) == 0 && WIFEXITED(rb) &&
             WEXITSTATUS(rb) == 0,
         "CLI run failed", detail);
  const std::string a = slurp("acc_rep_a.csv"), b = slurp("acc_rep_b.csv");
  expect(!a.empty() && a == b, "outputs differ between identical runs", detail);
  std::remove("acc_rep_a.csv");
  std::remove("acc_rep_b.csv");
}

} // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  const std::vector<Criterion> criteria = {
      {1, "theta oracle agreement", criterion_theta_oracle},
      {2, "homogeneity suite", criterion_homogeneity},
      {3, "inequality matrix", criterion_inequality_matrix},
      {4, "sharpness probes", criterion_sharpness},
      {5, "beta optimizer soundness", criterion_beta_soundness},
      {6, "theorem certification", criterion_certification},
      {7, "Young-Fenchel transform", criterion_young_fenchel},
      {8, "Grand Lebesgue norm", criterion_gls_norm},
      {9, "reproducibility", criterion_reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria)
    if (!run_criterion(c)) ++failures;
  if (failures > 0)
    std::printf("%d of %zu acceptance criteria FAILED\n", failures,
                criteria.size());
  else
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
