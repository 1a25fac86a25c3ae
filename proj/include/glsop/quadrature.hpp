#ifndef GLSOP_QUADRATURE_HPP
#define GLSOP_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Improper integrals over products of intervals in R_+ with algebraic
// endpoint weights x^{-u}, u in [0,1).  One-dimensional double-exponential
// rules, tensorized up to three axes; randomized low-discrepancy sampling
// with per-axis importance transforms beyond that.

namespace glsop::quad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kPi = 3.141592653589793;

struct Config {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::int64_t max_evals = 100'000'000;
  int level_cap = 12;            // tanh-sinh refinement levels
  std::uint64_t seed = 20240817; // randomized low-discrepancy shifts
  bool divergence_scan = true;   // escalating-cutoff pre-check
};

enum class Verdict { converged, diverging, inconclusive };

struct Estimate {
  double value = 0.0;
  double abs_error = kInf;
  std::int64_t n_evals = 0;
  std::int64_t n_nonfinite = 0; // integrand singularities hit and skipped
  Verdict verdict = Verdict::inconclusive;

  bool converged() const { return verdict == Verdict::converged; }
};

// One axis of integration; hi may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = kInf;
};

namespace detail {

struct Node {
  double x;
  double w; // quadrature weight, power factor x^{-u} already folded in
};

// |2z| cap keeps exp(2z) and the folded power weight inside double range.
inline constexpr double kZCap = 345.0;

// Nodes for one axis at refinement level `level` (step h = 2^-level).
//
//   (0, inf):  x = exp(2z), z = (pi/2) sinh(kh) -- the composition of the
//              map x = t/(1-t) with the tanh-sinh rule on (0,1).
//   [a, inf):  x = a + exp(2z).
//   [a, b]:    x = a + (b-a) t, t = sigma(2z) tanh-sinh on (0,1).
//
// The factor x^{-u} is multiplied into the weight here so endpoint
// singularities are absorbed by the double-exponential decay.
inline void axis_nodes(int level, const Interval& iv, double u,
                       std::vector<Node>& out) {
  out.clear();
  const double h = std::ldexp(1.0, -level);
  const double s_max = std::asinh(2.0 * kZCap / kPi);
  const int k_max = static_cast<int>(s_max / h) + 1;
  const double half_pi = 0.5 * kPi;

  if (iv.lo == 0.0 && std::isinf(iv.hi)) {
    for (int k = -k_max; k <= k_max; ++k) {
      const double s = k * h;
      const double z = half_pi * std::sinh(s);
      if (std::abs(z) > kZCap) continue;
      const double x = std::exp(2.0 * z);
      // pi h cosh(s) exp(2z) * x^{-u} = pi h cosh(s) exp(2z(1-u))
      const double w = kPi * h * std::cosh(s) * std::exp(2.0 * z * (1.0 - u));
      if (std::isfinite(x) && std::isfinite(w) && x > 0.0) out.push_back({x, w});
    }
    return;
  }

  if (std::isinf(iv.hi)) {
    for (int k = -k_max; k <= k_max; ++k) {
      const double s = k * h;
      const double z = half_pi * std::sinh(s);
      if (std::abs(z) > kZCap) continue;
      const double e2z = std::exp(2.0 * z);
      const double x = iv.lo + e2z;
      double w = kPi * h * std::cosh(s) * e2z;
      if (u != 0.0) w *= std::pow(x, -u);
      if (std::isfinite(x) && std::isfinite(w) && x > iv.lo) out.push_back({x, w});
    }
    return;
  }

  const double len = iv.hi - iv.lo;
  if (!(len > 0.0)) return;
  for (int k = -k_max; k <= k_max; ++k) {
    const double s = k * h;
    const double z = half_pi * std::sinh(s);
    if (std::abs(z) > kZCap) continue;
    const double t = 1.0 / (1.0 + std::exp(-2.0 * z));
    // t(1-t) computed without cancellation at either end
    const double t1mt = 1.0 / (2.0 + 2.0 * std::cosh(2.0 * z));
    const double x = iv.lo + len * t;
    if (!(x > iv.lo) || !(x < iv.hi)) continue;
    double w = len * kPi * h * std::cosh(s) * t1mt;
    if (u != 0.0) w *= std::pow(x, -u);
    if (std::isfinite(w)) out.push_back({x, w});
  }
}

struct TensorSum {
  double sum = 0.0;
  std::int64_t evals = 0;
  std::int64_t nonfinite = 0;
};

inline constexpr int kMaxTensorDim = 3;

// Product-rule sum, fixed iteration order for reproducibility.
template <class F>
TensorSum tensor_sum(F&& f, std::span<const std::vector<Node>> axes) {
  const int m = static_cast<int>(axes.size());
  TensorSum ts;
  std::array<double, kMaxTensorDim> x{};
  if (m == 1) {
    for (const Node& n0 : axes[0]) {
      x[0] = n0.x;
      const double v = f(x.data());
      ++ts.evals;
      if (!std::isfinite(v)) { ++ts.nonfinite; continue; }
      ts.sum += n0.w * v;
    }
  } else if (m == 2) {
    for (const Node& n0 : axes[0]) {
      x[0] = n0.x;
      double inner = 0.0;
      for (const Node& n1 : axes[1]) {
        x[1] = n1.x;
        const double v = f(x.data());
        ++ts.evals;
        if (!std::isfinite(v)) { ++ts.nonfinite; continue; }
        inner += n1.w * v;
      }
      ts.sum += n0.w * inner;
    }
  } else {
    for (const Node& n0 : axes[0]) {
      x[0] = n0.x;
      double mid = 0.0;
      for (const Node& n1 : axes[1]) {
        x[1] = n1.x;
        double inner = 0.0;
        for (const Node& n2 : axes[2]) {
          x[2] = n2.x;
          const double v = f(x.data());
          ++ts.evals;
          if (!std::isfinite(v)) { ++ts.nonfinite; continue; }
          inner += n2.w * v;
        }
        mid += n1.w * inner;
      }
      ts.sum += n0.w * mid;
    }
  }
  return ts;
}

// 32-point Gauss-Legendre on [-1,1] (positive half; rule is symmetric).
inline const std::array<double, 16>& gl32_abscissae() {
  static const std::array<double, 16> a = {
      0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745,
      0.3318686022821276497, 0.4213512761306353454, 0.5068999089322293900,
      0.5877157572407623290, 0.6630442669302152009, 0.7321821187402896804,
      0.7944837959679424070, 0.8493676137325699701, 0.8963211557660521240,
      0.9349060759377396891, 0.9647622555875064308, 0.9856115115452683354,
      0.9972638618494815635};
  return a;
}
inline const std::array<double, 16>& gl32_weights() {
  static const std::array<double, 16> w = {
      0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654,
      0.0911738786957638847, 0.0876520930044038111, 0.0833119242269467552,
      0.0781938957870703065, 0.0723457941088485062, 0.0658222227763618468,
      0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
      0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706,
      0.0069379012712686861};
  return w;
}

// Integral of f(x) prod x_j^{-u_j} over a log-coordinate box, fixed
// 32-point tensor rule.  Heuristic accuracy only; used to watch partial
// integrals grow across nested cutoffs.
template <class F>
double log_box_value(F&& f, std::span<const double> u,
                     std::span<const double> slo, std::span<const double> shi) {
  const int m = static_cast<int>(u.size());
  const auto& ga = gl32_abscissae();
  const auto& gw = gl32_weights();
  std::array<std::array<double, 32>, kMaxTensorDim> xs{}, ws{};
  for (int j = 0; j < m; ++j) {
    const double c = 0.5 * (shi[j] + slo[j]);
    const double r = 0.5 * (shi[j] - slo[j]);
    for (int i = 0; i < 16; ++i) {
      const double sm = c - r * ga[15 - i];
      const double sp = c + r * ga[i];
      xs[j][i] = std::exp(sm);
      xs[j][16 + i] = std::exp(sp);
      // jacobian x ds and the power weight x^{-u}
      ws[j][i] = r * gw[15 - i] * std::exp(sm * (1.0 - u[j]));
      ws[j][16 + i] = r * gw[i] * std::exp(sp * (1.0 - u[j]));
    }
  }
  std::array<double, kMaxTensorDim> x{};
  double total = 0.0;
  auto rec = [&](auto&& self, int j, double wacc) -> void {
    if (j == m) {
      const double v = f(x.data());
      if (std::isfinite(v)) total += wacc * v;
      return;
    }
    for (int i = 0; i < 32; ++i) {
      x[j] = xs[j][i];
      self(self, j + 1, wacc * ws[j][i]);
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

// Nested boxes [10^-k, 10^k]^m clipped to the domain, k = 1..6.  Flags
// divergence when the partial values grow monotonically by more than 5%
// at the last two escalations.
template <class F>
bool cutoff_scan_diverging(F&& f, std::span<const double> u,
                           std::span<const Interval> domain) {
  const int m = static_cast<int>(u.size());
  std::array<double, 7> vals{};
  for (int k = 1; k <= 6; ++k) {
    std::array<double, kMaxTensorDim> slo{}, shi{};
    for (int j = 0; j < m; ++j) {
      const double lo = std::max(domain[j].lo, std::pow(10.0, -k));
      const double hi = std::min(domain[j].hi, std::pow(10.0, k));
      if (!(hi > lo)) return false;
      slo[j] = std::log(lo);
      shi[j] = std::log(hi);
    }
    vals[static_cast<std::size_t>(k)] =
        log_box_value(f, u, std::span<const double>(slo.data(), u.size()),
                      std::span<const double>(shi.data(), u.size()));
    if (!std::isfinite(vals[static_cast<std::size_t>(k)])) return true;
  }
  const double v3 = std::abs(vals[3]), v4 = std::abs(vals[4]),
               v5 = std::abs(vals[5]), v6 = std::abs(vals[6]);
  if (v4 == 0.0 || v5 == 0.0) return false;
  if (!((v6 > v5 && v5 > v4) && (v6 / v5 > 1.05) && (v5 / v4 > 1.05)))
    return false;
  // Distinguish genuine divergence from slow saturation: x^{-1+delta}
  // integrands also grow across cutoffs, but their increments decay
  // exactly geometrically (factor 10^{-delta} per decade, constant ratio),
  // while log/power divergence has increment ratios at or rising toward 1.
  const double d4 = v4 - v3, d5 = v5 - v4, d6 = v6 - v5;
  if (!(d4 > 0.0 && d5 > 0.0 && d6 > 0.0)) return d6 >= d5;
  const double r5 = d5 / d4, r6 = d6 / d5;
  return r6 >= 1.0 - 1e-6 || r6 > r5 + 1e-3;
}

// --- randomized low-discrepancy path (m >= 4) ---

inline double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

inline int nth_prime(int n) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n >= 12) throw std::invalid_argument("dimension too large for halton bases");
  return primes[n];
}

// Per-axis importance transform: sampling density proportional to x^{-u}
// on (0,1], Pareto tail x^{-3/2} beyond 1.  Returns the sample and the
// ratio x^{-u} / pdf(x) so the weighted-integral estimator is unbiased.
struct ImportanceSample {
  double x;
  double ratio;
};

inline ImportanceSample importance_axis(double v, double u) {
  const double mass0 = 1.0 / (1.0 - u); // integral of x^{-u} on (0,1]
  const double mass1 = 2.0;             // integral of x^{-3/2} on [1,inf)
  const double c = 1.0 / (mass0 + mass1);
  const double f1 = c * mass0;
  if (v < f1) {
    const double x = std::pow(std::max(v / f1, 1e-300), 1.0 / (1.0 - u));
    return {x, 1.0 / c};
  }
  const double q = std::min((v - f1) / (c * mass1), 1.0 - 1e-16);
  const double x = std::pow(1.0 - q, -2.0);
  return {x, std::pow(x, 1.5 - u) / c};
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97f4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <class F>
Estimate qmc_halfline(F&& f, std::span<const double> u, const Config& cfg) {
  const int m = static_cast<int>(u.size());
  constexpr int kShifts = 8;
  std::uint64_t st = cfg.seed;
  std::vector<double> shift(static_cast<std::size_t>(kShifts * m));
  for (double& s : shift)
    s = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;

  Estimate est;
  std::int64_t n_per_shift = 4096;
  std::vector<double> x(static_cast<std::size_t>(m));
  while (true) {
    std::array<double, kShifts> means{};
    for (int sh = 0; sh < kShifts; ++sh) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < n_per_shift; ++i) {
        double ratio = 1.0;
        for (int j = 0; j < m; ++j) {
          double v = halton(static_cast<std::uint64_t>(i) + 1, nth_prime(j)) +
                     shift[static_cast<std::size_t>(sh * m + j)];
          if (v >= 1.0) v -= 1.0;
          const ImportanceSample s = importance_axis(v, u[static_cast<std::size_t>(j)]);
          x[static_cast<std::size_t>(j)] = s.x;
          ratio *= s.ratio;
        }
        const double fv = f(x.data());
        ++est.n_evals;
        if (!std::isfinite(fv)) { ++est.n_nonfinite; continue; }
        acc += fv * ratio;
      }
      means[static_cast<std::size_t>(sh)] = acc / static_cast<double>(n_per_shift);
    }
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= kShifts;
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (kShifts * (kShifts - 1.0)));
    est.value = mean;
    est.abs_error = se;
    if (se <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(mean))) {
      est.verdict = Verdict::converged;
      return est;
    }
    if (est.n_evals * 2 > cfg.max_evals) {
      est.verdict = Verdict::inconclusive;
      return est;
    }
    n_per_shift *= 2;
  }
}

} // namespace detail

// Integral of f(x) * prod_j x_j^{-u_j} over a product of intervals in R_+.
// f receives a pointer to m coordinates.  u_j in [0, 1).
template <class F>
Estimate integrate_weighted(F&& f, std::span<const double> weights_u,
                            std::span<const Interval> domain, const Config& cfg) {
  const int m = static_cast<int>(weights_u.size());
  if (m < 1 || domain.size() != weights_u.size())
    throw std::invalid_argument("integrate_weighted: bad dimension");
  for (double u : weights_u)
    if (!(u < 1.0) || u < 0.0)
      throw std::invalid_argument(
          "integrate_weighted: weight exponent -u must lie in (-1, 0]");
  for (const Interval& iv : domain)
    if (!(iv.hi > iv.lo)) {
      Estimate est;
      est.abs_error = 0.0;
      est.n_evals = 1;
      est.verdict = Verdict::converged;
      return est;
    }

  if (cfg.divergence_scan && m <= detail::kMaxTensorDim) {
    if (detail::cutoff_scan_diverging(f, weights_u, domain)) {
      Estimate est;
      est.value = kInf;
      est.n_evals = 1;
      est.verdict = Verdict::diverging;
      return est;
    }
  }

  if (m > detail::kMaxTensorDim) {
    for (const Interval& iv : domain)
      if (iv.lo != 0.0 || !std::isinf(iv.hi))
        throw std::invalid_argument(
            "integrate_weighted: m > 3 supports only full half-line domains");
    return detail::qmc_halfline(f, weights_u, cfg);
  }

  Estimate est;
  std::vector<std::vector<detail::Node>> axes(static_cast<std::size_t>(m));
  double prev = kNaN;
  const int level_cap = std::min(cfg.level_cap, m == 1 ? 12 : (m == 2 ? 9 : 7));
  for (int level = 2; level <= level_cap; ++level) {
    for (int j = 0; j < m; ++j)
      detail::axis_nodes(level, domain[static_cast<std::size_t>(j)],
                         weights_u[static_cast<std::size_t>(j)],
                         axes[static_cast<std::size_t>(j)]);
    std::int64_t count = 1;
    for (const auto& a : axes) count *= static_cast<std::int64_t>(a.size());
    if (count == 0) break;
    if (est.n_evals + count > cfg.max_evals) {
      est.verdict = Verdict::inconclusive;
      return est;
    }
    const detail::TensorSum ts = detail::tensor_sum(f, axes);
    est.n_evals += ts.evals;
    est.n_nonfinite += ts.nonfinite;
    est.value = ts.sum;
    if (!std::isnan(prev)) {
      est.abs_error = std::abs(ts.sum - prev);
      if (est.abs_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(ts.sum))) {
        est.verdict = Verdict::converged;
        return est;
      }
    }
    prev = ts.sum;
  }
  est.verdict = Verdict::inconclusive;
  return est;
}

// Integral of f(x) * prod_j x_j^{-u_j} over R_+^m.
template <class F>
Estimate integrate_halfline_m(F&& f, std::span<const double> weights_u,
                              const Config& cfg) {
  std::vector<Interval> dom(weights_u.size());
  return integrate_weighted(f, weights_u, dom, cfg);
}

// Unweighted 1-D half-line integral.
template <class F>
Estimate integrate_halfline_1(F&& f, const Config& cfg) {
  const double u0 = 0.0;
  const Interval dom{};
  auto g = [&f](const double* x) { return f(x[0]); };
  return integrate_weighted(g, std::span<const double>(&u0, 1),
                            std::span<const Interval>(&dom, 1), cfg);
}

// Unweighted integral over a product of intervals.
template <class F>
Estimate integrate_box(F&& f, std::span<const Interval> domain, const Config& cfg) {
  std::vector<double> u(domain.size(), 0.0);
  return integrate_weighted(f, u, domain, cfg);
}

} // namespace glsop::quad

#endif // GLSOP_QUADRATURE_HPP
