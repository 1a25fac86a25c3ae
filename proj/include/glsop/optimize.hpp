#ifndef GLSOP_OPTIMIZE_HPP
#define GLSOP_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

// Scan-and-refine 1-D maximization over log-spaced grids (shared by the
// Grand Lebesgue norm and the Young-Fenchel transform) and a small
// derivative-free polytope minimizer for the beta optimizer.

namespace glsop::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SupResult {
  double value = -kInf;
  double arg = std::numeric_limits<double>::quiet_NaN();
  bool unbounded = false; // objective hit +inf at a probe
  bool capped = false;    // still rising at the scan cap (b = inf only)
  bool empty = true;      // no finite probe at all
};

// sup of obj over [a, b), b possibly infinite.  256 log-spaced probes up to
// min(b, cap), then golden-section refinement to relative width 1e-6.
// obj may return -inf/NaN (skipped) or +inf (reported unbounded).
template <class F>
SupResult sup_scan(F&& obj, double a, double b, double cap = 1e3,
                   int grid_n = 256) {
  SupResult res;
  const bool capped_domain = std::isinf(b) || b > cap;
  double hi = capped_domain ? cap : b;
  if (!(hi > a)) {
    // degenerate [a, a]: single probe
    const double v = obj(a);
    if (std::isfinite(v)) { res.value = v; res.arg = a; res.empty = false; }
    else if (v == kInf) res.unbounded = true;
    return res;
  }

  // grid over [a, hi) with an interior margin at the open end, wide enough
  // that objectives built on quadrature stay clear of boundary blowups
  const double margin = std::isinf(b) ? 0.0 : 1e-6 * (hi - a);
  const double la = std::log(std::max(a, 1e-12));
  const double lb = std::log(hi - margin);
  std::vector<double> ps(static_cast<std::size_t>(grid_n));
  std::vector<double> vs(static_cast<std::size_t>(grid_n), -kInf);
  int best = -1;
  for (int i = 0; i < grid_n; ++i) {
    const double t = static_cast<double>(i) / (grid_n - 1);
    double p = std::exp(la + t * (lb - la));
    p = std::clamp(p, a, hi - margin);
    ps[static_cast<std::size_t>(i)] = p;
    const double v = obj(p);
    if (v == kInf) { res.unbounded = true; return res; }
    if (!std::isfinite(v)) continue;
    vs[static_cast<std::size_t>(i)] = v;
    res.empty = false;
    if (best < 0 || v > vs[static_cast<std::size_t>(best)]) best = i;
  }
  if (best < 0) return res;

  // golden-section refinement inside the bracketing cell
  double lo = ps[static_cast<std::size_t>(std::max(best - 1, 0))];
  double up = ps[static_cast<std::size_t>(std::min(best + 1, grid_n - 1))];
  const double gr = 0.6180339887498949;
  double x1 = up - gr * (up - lo);
  double x2 = lo + gr * (up - lo);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 200 && (up - lo) > 1e-6 * std::abs(up); ++it) {
    if (f1 == kInf || f2 == kInf) { res.unbounded = true; return res; }
    if (!(f1 < f2)) { // keep left
      up = x2; x2 = x1; f2 = f1;
      x1 = up - gr * (up - lo);
      f1 = obj(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (up - lo);
      f2 = obj(x2);
    }
  }
  res.value = vs[static_cast<std::size_t>(best)];
  res.arg = ps[static_cast<std::size_t>(best)];
  const double xm = 0.5 * (lo + up);
  const double fm = obj(xm);
  if (std::isfinite(fm) && fm > res.value) { res.value = fm; res.arg = xm; }

  // slope test on the last decade of an infinite domain: a sup that is
  // still rising at the cap cannot be certified
  if (capped_domain) {
    const double tail_lo = obj(hi / 10.0);
    const double tail_hi = obj(hi - margin);
    if (std::isfinite(tail_hi) && std::isfinite(tail_lo) && tail_hi > tail_lo &&
        tail_hi >= res.value * (1.0 - 1e-12))
      res.capped = true;
  }
  return res;
}

struct MinResult {
  std::vector<double> x;
  double value = kInf;
  int n_evals = 0;
};

// Nelder-Mead reflection/expansion/contraction polytope, objective may
// return +inf outside the feasible region.
inline MinResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, double step,
                             int max_iter = 400, double ftol = 1e-12) {
  const std::size_t n = x0.size();
  MinResult res;
  if (n == 0) {
    res.x.clear();
    res.value = f({});
    res.n_evals = 1;
    return res;
  }
  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> fv(n + 1);
  for (std::size_t i = 1; i <= n; ++i) simplex[i][i - 1] += step;
  for (std::size_t i = 0; i <= n; ++i) { fv[i] = f(simplex[i]); ++res.n_evals; }

  auto order = [&] {
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j)
        if (fv[j] < fv[i]) { std::swap(fv[i], fv[j]); std::swap(simplex[i], simplex[j]); }
  };
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::isfinite(fv[0]) && std::isfinite(fv[n]) &&
        std::abs(fv[n] - fv[0]) <= ftol * (std::abs(fv[0]) + 1e-30))
      break;
    for (std::size_t j = 0; j < n; ++j) {
      centroid[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) centroid[j] += simplex[i][j];
      centroid[j] /= static_cast<double>(n);
    }
    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[n][j]);
    double fr = f(xr); ++res.n_evals;
    if (fr < fv[0]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[n][j]);
      double fe = f(xe); ++res.n_evals;
      if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
      else { simplex[n] = xr; fv[n] = fr; }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr; fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      for (std::size_t j = 0; j < n; ++j)
        xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                        : centroid[j] - 0.5 * (centroid[j] - simplex[n][j]);
      double fc = f(xc); ++res.n_evals;
      if (fc < std::min(fr, fv[n])) {
        simplex[n] = xc; fv[n] = fc;
      } else { // shrink toward the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = f(simplex[i]); ++res.n_evals;
        }
      }
    }
  }
  order();
  res.x = simplex[0];
  res.value = fv[0];
  return res;
}

} // namespace glsop::opt

#endif // GLSOP_OPTIMIZE_HPP
