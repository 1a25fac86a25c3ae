#ifndef GLSOP_BETA_HPP
#define GLSOP_BETA_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glsop/gls.hpp"
#include "glsop/kernel.hpp"
#include "glsop/optimize.hpp"
#include "glsop/theta.hpp"
#include "glsop/verify.hpp"

// The composite generating function
//   beta_m[Q, psi](p) = inf { Theta_m(p_1..p_m) prod_j n_j psi_j(p_j) :
//                             sum 1/p_j = 1/p, p_j in (a_j, b_j) }
// minimized in reciprocal coordinates u_j = 1/p_j over the affine slice
// sum u_j = 1/p intersected with the box (1/b_j, 1/a_j), and the resulting
// certification of ||M[Q](f)||_{G beta} <= 1.

namespace glsop::beta {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PointStatus { finite, infeasible, theta_infinite, nonfinite };

struct BetaPoint {
  double p = std::numeric_limits<double>::quiet_NaN();
  double value = kInf;
  std::vector<double> argmin_p; // optimal exponents, empty unless finite
  PointStatus status = PointStatus::nonfinite;
  bool finite() const { return status == PointStatus::finite; }
};

// Theta is expensive and the optimizer probes clustered points, so values
// are cached on a 1e-8 quantization of u.  Insert-or-read under a mutex;
// recomputation on a race would return the same value.
class ThetaCache {
 public:
  double get_or_compute(const kernel::HomogeneousKernel& k,
                        std::span<const double> u, const quad::Config& cfg) {
    std::vector<std::int64_t> key(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
      key[j] = static_cast<std::int64_t>(std::llround(u[j] * 1e8));
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    std::vector<double> p(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) p[j] = 1.0 / u[j];
    double val;
    try {
      const theta::ThetaEstimate te = theta::theta(k, theta::ExponentVector(p), cfg);
      val = te.finite() ? te.theta : kInf;
    } catch (const std::invalid_argument&) {
      val = kInf;
    }
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(std::move(key), val);
    return val;
  }

 private:
  std::mutex mu_;
  std::map<std::vector<std::int64_t>, double> cache_;
};

namespace detail {

struct Slice {
  // reciprocal box (lo_j, hi_j) = (1/b_j, 1/a_j), clamped 1e-6 inward
  std::vector<double> lo, hi;
  std::vector<int> fixed;        // index of extremal components, u frozen
  std::vector<double> fixed_u;
  std::vector<int> free_idx;
  double target = 0.0;           // sum of free u
};

inline constexpr double kEdge = 1e-6;

inline bool build_slice(std::span<const gls::GeneratingFunction> psis, double p,
                        Slice& s) {
  const std::size_t m = psis.size();
  s.lo.assign(m, 0.0);
  s.hi.assign(m, 0.0);
  s.fixed.clear();
  s.fixed_u.clear();
  s.free_idx.clear();
  double fixed_sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& psi = psis[j];
    if (psi.is_extremal()) {
      s.fixed.push_back(static_cast<int>(j));
      s.fixed_u.push_back(1.0 / psi.r);
      fixed_sum += 1.0 / psi.r;
      continue;
    }
    s.free_idx.push_back(static_cast<int>(j));
    const double lo = std::isinf(psi.b) ? 0.0 : 1.0 / psi.b;
    const double hi = 1.0 / psi.a;
    s.lo[j] = lo + kEdge;
    s.hi[j] = hi - kEdge;
    if (!(s.hi[j] > s.lo[j])) return false;
  }
  s.target = 1.0 / p - fixed_sum;
  if (s.free_idx.empty()) return std::abs(s.target) <= 1e-10;
  // feasibility of the affine slice against the box
  double min_sum = 0.0, max_sum = 0.0;
  for (int j : s.free_idx) {
    min_sum += s.lo[static_cast<std::size_t>(j)];
    max_sum += s.hi[static_cast<std::size_t>(j)];
  }
  return s.target > min_sum && s.target < max_sum;
}

} // namespace detail

// One evaluation of beta at p.  norms_j are the Grand Lebesgue norms of
// the functions the curve is built for (all 1 for the normalized curve);
// they are constants under the infimum, so the unit-norm infimum is
// computed and scaled.
inline BetaPoint beta_at(const kernel::HomogeneousKernel& k,
                         std::span<const gls::GeneratingFunction> psis,
                         std::span<const double> norms, double p,
                         const quad::Config& cfg, ThetaCache* cache = nullptr) {
  const int m = k.arity();
  if (static_cast<int>(psis.size()) != m || norms.size() != psis.size())
    throw std::invalid_argument("beta_at: need m generating functions and norms");
  if (!(p > 0.0)) throw std::invalid_argument("beta_at: p > 0 required");

  BetaPoint out;
  out.p = p;
  double norm_prod = 1.0;
  for (double n : norms) {
    if (!(n >= 0.0)) throw std::invalid_argument("beta_at: norms must be >= 0");
    norm_prod *= n;
  }

  detail::Slice s;
  if (!detail::build_slice(psis, p, s)) {
    out.status = PointStatus::infeasible;
    return out;
  }

  ThetaCache local_cache;
  ThetaCache& tc = cache ? *cache : local_cache;

  // unit-norm objective over the full u vector
  auto objective_u = [&](std::span<const double> u) -> double {
    double psi_prod = 1.0;
    for (int j = 0; j < m; ++j) {
      const double pj = 1.0 / u[static_cast<std::size_t>(j)];
      const double v = psis[static_cast<std::size_t>(j)].is_extremal()
                           ? 1.0
                           : psis[static_cast<std::size_t>(j)](pj);
      if (!std::isfinite(v)) return kInf;
      psi_prod *= v;
    }
    const double th = tc.get_or_compute(k, u, cfg);
    if (!std::isfinite(th)) return kInf;
    return th * psi_prod;
  };

  std::vector<double> u(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < s.fixed.size(); ++i)
    u[static_cast<std::size_t>(s.fixed[i])] = s.fixed_u[i];

  const std::size_t n_free = s.free_idx.size();
  if (n_free == 0) {
    const double v = objective_u(u);
    if (!std::isfinite(v)) {
      out.status = PointStatus::theta_infinite;
      return out;
    }
    out.value = v * norm_prod;
    out.status = PointStatus::finite;
    out.argmin_p.assign(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j)
      out.argmin_p[static_cast<std::size_t>(j)] = 1.0 / u[static_cast<std::size_t>(j)];
    return out;
  }

  // free parameters: the first n_free - 1 of the free u's; the last one is
  // determined by the slice constraint
  auto fill_u = [&](std::span<const double> v) -> bool {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n_free; ++i) {
      const int j = s.free_idx[i];
      double uj = std::clamp(v[i], s.lo[static_cast<std::size_t>(j)],
                             s.hi[static_cast<std::size_t>(j)]);
      if (v[i] < s.lo[static_cast<std::size_t>(j)] - detail::kEdge ||
          v[i] > s.hi[static_cast<std::size_t>(j)] + detail::kEdge)
        return false;
      u[static_cast<std::size_t>(j)] = uj;
      sum += uj;
    }
    const int jl = s.free_idx[n_free - 1];
    const double ul = s.target - sum;
    if (ul < s.lo[static_cast<std::size_t>(jl)] || ul > s.hi[static_cast<std::size_t>(jl)])
      return false;
    u[static_cast<std::size_t>(jl)] = ul;
    return true;
  };
  auto objective_v = [&](std::span<const double> v) -> double {
    if (!fill_u(v)) return kInf;
    return objective_u(u);
  };

  // coarse grid: 17 points per free direction across the slice
  constexpr int kGrid = 17;
  const std::size_t dims = n_free - 1;
  std::vector<double> v(dims), best_v(dims);
  double best = kInf;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dims; ++i) total *= kGrid;
  if (dims == 0) total = 1;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t i = 0; i < dims; ++i) {
      const int j = s.free_idx[i];
      const double t = (static_cast<double>(rem % kGrid) + 0.5) / kGrid;
      rem /= kGrid;
      v[i] = s.lo[static_cast<std::size_t>(j)] +
             t * (s.hi[static_cast<std::size_t>(j)] - s.lo[static_cast<std::size_t>(j)]);
    }
    const double val = objective_v(v);
    if (val < best) { best = val; best_v = v; }
  }
  if (!std::isfinite(best)) {
    out.status = PointStatus::theta_infinite;
    return out;
  }

  if (dims > 0) {
    double step = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      const int j = s.free_idx[i];
      step = std::max(step, (s.hi[static_cast<std::size_t>(j)] -
                             s.lo[static_cast<std::size_t>(j)]) / kGrid);
    }
    const opt::MinResult mr = opt::nelder_mead(
        [&](std::span<const double> vv) { return objective_v(vv); }, best_v,
        step);
    if (std::isfinite(mr.value) && mr.value < best) {
      best = mr.value;
      best_v.assign(mr.x.begin(), mr.x.end());
    }
  }
  (void)objective_v(best_v); // leave u at the winning point
  fill_u(best_v);

  out.value = best * norm_prod;
  out.status = PointStatus::finite;
  out.argmin_p.assign(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j)
    out.argmin_p[static_cast<std::size_t>(j)] = 1.0 / u[static_cast<std::size_t>(j)];
  return out;
}

struct BetaCurve {
  std::vector<BetaPoint> samples;
  std::vector<double> norm_factors;
  double interval_lo = std::numeric_limits<double>::quiet_NaN();
  double interval_hi = std::numeric_limits<double>::quiet_NaN();
  bool contiguous = true; // finite samples form one consecutive run
};

inline BetaCurve beta_curve(const kernel::HomogeneousKernel& k,
                            std::span<const gls::GeneratingFunction> psis,
                            std::span<const double> norms,
                            std::span<const double> p_grid,
                            const quad::Config& cfg) {
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (!(p_grid[i] > p_grid[i - 1]))
      throw std::invalid_argument("beta_curve: p grid must increase");
  BetaCurve curve;
  curve.norm_factors.assign(norms.begin(), norms.end());
  ThetaCache cache;
  for (double p : p_grid)
    curve.samples.push_back(beta_at(k, psis, norms, p, cfg, &cache));

  int first = -1, last = -1;
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    if (!curve.samples[i].finite()) continue;
    if (first < 0) first = static_cast<int>(i);
    last = static_cast<int>(i);
  }
  if (first >= 0) {
    curve.interval_lo = curve.samples[static_cast<std::size_t>(first)].p;
    curve.interval_hi = curve.samples[static_cast<std::size_t>(last)].p;
    for (int i = first; i <= last; ++i)
      if (!curve.samples[static_cast<std::size_t>(i)].finite())
        curve.contiguous = false;
  }
  return curve;
}

enum class CertifyPointStatus { pass, fail, unknown, unconstrained };

struct CertifyPoint {
  double p;
  double beta_value;
  double operator_norm;
  CertifyPointStatus status;
};

struct CertifyReport {
  std::vector<double> norms;    // ||f_j||_{G psi_j}
  BetaCurve curve;
  std::vector<CertifyPoint> points;
  bool pass = true;             // all constrained points pass
};

// The operational content of ||M[Q](f)||_{G beta} <= 1: at every p with
// finite beta, ||M(f)||_p <= beta(p) within the stated margin.  Points
// with non-finite beta are unconstrained by definition; inconclusive
// operator quadrature reports unknown, never fail.
inline CertifyReport certify_theorem(const kernel::HomogeneousKernel& k,
                                     std::span<const gls::TestFunction> fs,
                                     std::span<const gls::GeneratingFunction> psis,
                                     std::span<const double> p_grid,
                                     const quad::Config& cfg,
                                     double margin = 1e-6) {
  if (fs.size() != psis.size())
    throw std::invalid_argument("certify_theorem: need one psi per function");
  CertifyReport rep;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const gls::GlsNorm n = gls::gls_norm(fs[j], psis[j], cfg);
    if (!n.finite())
      throw std::invalid_argument(
          "certify_theorem: f_" + std::to_string(j + 1) +
          " has non-finite Grand Lebesgue norm under its psi");
    rep.norms.push_back(n.value);
  }
  rep.curve = beta_curve(k, psis, rep.norms, p_grid, cfg);
  for (const BetaPoint& bp : rep.curve.samples) {
    CertifyPoint cp{bp.p, bp.value, std::numeric_limits<double>::quiet_NaN(),
                    CertifyPointStatus::unconstrained};
    if (bp.finite()) {
      const verify::OperatorNorm on = verify::operator_lp_norm(k, fs, bp.p, cfg);
      if (!on.finite() || on.verdict == quad::Verdict::inconclusive) {
        cp.status = CertifyPointStatus::unknown;
      } else {
        cp.operator_norm = on.value;
        const double tol = margin + on.abs_error / std::max(bp.value, 1e-300);
        cp.status = on.value <= bp.value * (1.0 + tol) ? CertifyPointStatus::pass
                                                       : CertifyPointStatus::fail;
        if (cp.status == CertifyPointStatus::fail) rep.pass = false;
      }
    }
    rep.points.push_back(cp);
  }
  return rep;
}

} // namespace glsop::beta

#endif // GLSOP_BETA_HPP
