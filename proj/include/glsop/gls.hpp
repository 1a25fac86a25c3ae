#ifndef GLSOP_GLS_HPP
#define GLSOP_GLS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glsop/optimize.hpp"
#include "glsop/quadrature.hpp"

// Generating functions psi on [a,b), Lebesgue-Riesz norms on the half-line
// and the unit interval, and the Grand Lebesgue norm
//     ||f||_{G psi} = sup_{p in [a,b)} ||f||_p / psi(p).

namespace glsop::gls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PsiFamily { power, two_sided, extremal, custom };

struct GeneratingFunction {
  double a = 1.0;
  double b = kInf; // open end, may be +inf
  PsiFamily family = PsiFamily::custom;
  double power_m = 1.0;    // power family: psi(p) = p^{1/m}
  double alpha = 0.0;      // two-sided: (p-a)^{-alpha} (b-p)^{-beta}
  double beta = 0.0;
  double r = 1.0;          // extremal: 1 at p = r, +inf elsewhere
  std::function<double(double)> custom; // may return +inf off its domain

  // psi(p); +inf outside the finiteness set.  C/inf := 0 applies at the
  // call sites through ordinary IEEE division.
  double operator()(double p) const {
    switch (family) {
      case PsiFamily::power:
        if (p < a || p >= b) return kInf;
        return std::pow(p, 1.0 / power_m);
      case PsiFamily::two_sided:
        if (p <= a || p >= b) return kInf;
        return std::pow(p - a, -alpha) * std::pow(b - p, -beta);
      case PsiFamily::extremal:
        return p == r ? 1.0 : kInf;
      case PsiFamily::custom:
        if (p < a || p >= b) return kInf;
        return custom(p);
    }
    return kInf;
  }

  bool is_extremal() const { return family == PsiFamily::extremal; }

  // Standing condition inf psi > 0, checked by grid minimization.
  bool positive_inf_check(int grid_n = 1024, double cap = 1e3) const {
    if (family == PsiFamily::extremal) return true;
    const double hi = std::min(b, cap);
    double mn = kInf;
    for (int i = 0; i < grid_n; ++i) {
      const double t = (i + 0.5) / grid_n;
      const double p = a + t * (hi - a);
      const double v = (*this)(p);
      if (std::isfinite(v)) mn = std::min(mn, v);
    }
    return mn > 0.0;
  }
};

inline GeneratingFunction power_psi(double m) {
  if (!(m > 0.0)) throw std::invalid_argument("power psi needs m > 0");
  GeneratingFunction g;
  g.family = PsiFamily::power;
  g.power_m = m;
  g.a = 1.0;
  g.b = kInf;
  return g;
}

inline GeneratingFunction two_sided_psi(double a, double b, double alpha,
                                        double beta) {
  if (!(1.0 <= a && a < b) || std::isinf(b))
    throw std::invalid_argument("two-sided psi needs 1 <= a < b < inf");
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("two-sided psi needs alpha, beta >= 0");
  GeneratingFunction g;
  g.family = PsiFamily::two_sided;
  g.a = a;
  g.b = b;
  g.alpha = alpha;
  g.beta = beta;
  return g;
}

inline GeneratingFunction extremal_psi(double r) {
  if (!(r >= 1.0) || std::isinf(r))
    throw std::invalid_argument("extremal psi needs r in [1, inf)");
  GeneratingFunction g;
  g.family = PsiFamily::extremal;
  g.r = r;
  g.a = r;
  g.b = r;
  return g;
}

inline GeneratingFunction custom_psi(std::function<double(double)> f, double a,
                                     double b) {
  GeneratingFunction g;
  g.family = PsiFamily::custom;
  g.custom = std::move(f);
  g.a = a;
  g.b = b;
  return g;
}

enum class Space { halfline, unit_interval };

// Closed-form evaluable test function on R_+ or (0,1).
struct TestFunction {
  Space space = Space::halfline;
  std::function<double(double)> eval;
  quad::Interval support{0.0, kInf}; // f vanishes outside
  std::string label;
  // p -> ||f||_p, when known in closed form (oracle use)
  std::function<double(double)> known_lp;
  // t -> mu{ |f| >= t }, when computable
  std::function<double(double)> tail_measure;
  std::optional<double> sup_bound; // declared pointwise bound, for p = inf
};

inline TestFunction indicator_unit() {
  TestFunction f;
  f.space = Space::halfline;
  f.eval = [](double x) { return (x > 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  f.support = {0.0, 1.0};
  f.label = "indicator";
  f.known_lp = [](double) { return 1.0; };
  f.tail_measure = [](double t) { return t <= 1.0 ? 1.0 : 0.0; };
  f.sup_bound = 1.0;
  return f;
}

// x^{-gamma} on (0,1]; ||f||_p = (1 - gamma p)^{-1/p} for gamma p < 1.
inline TestFunction truncated_power(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("truncated_power needs gamma in [0,1)");
  TestFunction f;
  f.space = Space::halfline;
  f.eval = [gamma](double x) {
    return (x > 0.0 && x <= 1.0) ? std::pow(x, -gamma) : 0.0;
  };
  f.support = {0.0, 1.0};
  f.label = "truncated_power(" + std::to_string(gamma) + ")";
  f.known_lp = [gamma](double p) {
    const double e = 1.0 - gamma * p;
    return e > 0.0 ? std::pow(1.0 / e, 1.0 / p) : kInf;
  };
  if (gamma > 0.0)
    f.tail_measure = [gamma](double t) {
      // |f| >= t on (0, t^{-1/gamma}] intersected with (0,1]
      return t <= 1.0 ? 1.0 : std::pow(t, -1.0 / gamma);
    };
  else
    f.tail_measure = [](double t) { return t <= 1.0 ? 1.0 : 0.0; };
  return f;
}

// x^{-gamma} on [1,inf); ||f||_p = (gamma p - 1)^{-1/p} for gamma p > 1.
inline TestFunction tail_power(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("tail_power needs gamma > 0");
  TestFunction f;
  f.space = Space::halfline;
  f.eval = [gamma](double x) { return x >= 1.0 ? std::pow(x, -gamma) : 0.0; };
  f.support = {1.0, kInf};
  f.label = "tail_power(" + std::to_string(gamma) + ")";
  f.known_lp = [gamma](double p) {
    const double e = gamma * p - 1.0;
    return e > 0.0 ? std::pow(1.0 / e, 1.0 / p) : kInf;
  };
  f.sup_bound = 1.0;
  return f;
}

inline TestFunction exp_decay() {
  TestFunction f;
  f.space = Space::halfline;
  f.eval = [](double x) { return std::exp(-x); };
  f.label = "exp";
  f.known_lp = [](double p) { return std::pow(1.0 / p, 1.0 / p); };
  f.tail_measure = [](double t) { return t >= 1.0 ? 0.0 : -std::log(t); };
  f.sup_bound = 1.0;
  return f;
}

inline TestFunction constant_unit(double c) {
  TestFunction f;
  f.space = Space::unit_interval;
  f.eval = [c](double) { return c; };
  f.support = {0.0, 1.0};
  f.label = "const(" + std::to_string(c) + ")";
  f.known_lp = [c](double) { return std::abs(c); };
  f.tail_measure = [c](double t) { return t <= std::abs(c) ? 1.0 : 0.0; };
  f.sup_bound = std::abs(c);
  return f;
}

// x^{-gamma} on the unit interval (mass-1 space).
inline TestFunction unit_power(double gamma) {
  TestFunction f = truncated_power(gamma);
  f.space = Space::unit_interval;
  return f;
}

struct NormResult {
  double value = kInf;
  quad::Estimate estimate;
  bool finite() const { return std::isfinite(value); }
};

// Lebesgue-Riesz norm (int |f|^p dmu)^{1/p} by quadrature over the
// function's support.
inline NormResult lp_norm(const TestFunction& f, double p,
                          const quad::Config& cfg) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p >= 1 required");
  NormResult out;
  quad::Interval dom = f.support;
  if (f.space == Space::unit_interval) {
    dom.lo = std::max(dom.lo, 0.0);
    dom.hi = std::min(dom.hi, 1.0);
  }
  auto integrand = [&f, p](const double* x) {
    const double v = f.eval(x[0]);
    return std::pow(std::abs(v), p);
  };
  const double u0 = 0.0;
  out.estimate = quad::integrate_weighted(
      integrand, std::span<const double>(&u0, 1),
      std::span<const quad::Interval>(&dom, 1), cfg);
  switch (out.estimate.verdict) {
    case quad::Verdict::converged:
      out.value = std::pow(out.estimate.value, 1.0 / p);
      break;
    case quad::Verdict::diverging:
      out.value = kInf;
      break;
    case quad::Verdict::inconclusive:
      out.value = std::numeric_limits<double>::quiet_NaN();
      break;
  }
  return out;
}

struct GlsNorm {
  double value = kInf;
  double arg_p = std::numeric_limits<double>::quiet_NaN();
  bool capped = false; // sup not attained below the scan cap
  bool finite() const { return std::isfinite(value); }
};

// sup_{p in [a,b)} ||f||_p / psi(p): coarse log-spaced grid, golden-section
// refinement; extremal psi short-circuits to the plain p-norm.
inline GlsNorm gls_norm(const TestFunction& f, const GeneratingFunction& psi,
                        const quad::Config& cfg, double p_cap = 1e3) {
  GlsNorm out;
  if (psi.is_extremal()) {
    const NormResult nr = lp_norm(f, psi.r, cfg);
    out.value = nr.value;
    out.arg_p = psi.r;
    return out;
  }
  bool hit_infinite_norm = false;
  auto objective = [&](double p) -> double {
    const double den = psi(p);
    if (!std::isfinite(den)) return -kInf; // psi = +inf: contributes 0
    const NormResult nr = lp_norm(f, p, cfg);
    if (!std::isfinite(nr.value)) {
      if (nr.value == kInf) {
        hit_infinite_norm = true;
        return kInf; // divergent norm against finite psi
      }
      // inconclusive quadrature at this probe: skipped, not trusted either way
      return std::numeric_limits<double>::quiet_NaN();
    }
    return nr.value / den;
  };
  const opt::SupResult sr = opt::sup_scan(objective, psi.a, psi.b, p_cap);
  if (sr.unbounded || hit_infinite_norm) {
    out.value = kInf;
    return out;
  }
  if (sr.empty) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  if (sr.capped) {
    out.value = kInf;
    out.capped = true;
    return out;
  }
  out.value = sr.value;
  out.arg_p = sr.arg;
  return out;
}

} // namespace glsop::gls

#endif // GLSOP_GLS_HPP
