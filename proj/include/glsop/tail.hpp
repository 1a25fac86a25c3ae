#ifndef GLSOP_TAIL_HPP
#define GLSOP_TAIL_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "glsop/gls.hpp"
#include "glsop/optimize.hpp"

// Young-Fenchel (Legendre) transform of h(p) = p ln psi(p) and the tail
// bound T(t) <= exp(-h*(ln t)) for unit Grand Lebesgue norm, t >= e.

namespace glsop::tail {

inline constexpr double kE = 2.718281828459045;

struct Conjugate {
  double value = opt::kInf;
  double arg_p = std::numeric_limits<double>::quiet_NaN();
  bool capped = false; // sup still rising at the scan cap
};

// h*(v) = sup_{p in Dom[psi]} p (v - ln psi(p)).  Shares the grid +
// golden-section engine (and the cap policy for b = inf) with gls_norm.
inline Conjugate young_fenchel(const gls::GeneratingFunction& psi, double v,
                               double p_cap = 1e3) {
  Conjugate out;
  if (psi.is_extremal()) {
    // singleton domain, ln psi(r) = 0
    out.value = psi.r * v;
    out.arg_p = psi.r;
    return out;
  }
  auto objective = [&](double p) -> double {
    const double ps = psi(p);
    if (!std::isfinite(ps)) return -opt::kInf; // outside Dom[psi]
    return p * (v - std::log(ps));
  };
  const opt::SupResult sr = opt::sup_scan(objective, psi.a, psi.b, p_cap);
  if (sr.capped || sr.unbounded) {
    out.value = opt::kInf;
    out.capped = true;
    return out;
  }
  if (sr.empty) return out;
  out.value = sr.value;
  out.arg_p = sr.arg;
  return out;
}

struct TailBound {
  double t;
  double bound;      // exp(-h*(ln t)) for the unit-norm rescaling
  double gls_norm;   // normalization used
  bool capped;
};

// Bound on T_upsilon(t) for upsilon = f / ||f||_{G psi}; refuses t < e
// (the bound is stated for t >= e only).
inline TailBound tail_bound(const gls::TestFunction& f,
                            const gls::GeneratingFunction& psi, double t,
                            const quad::Config& cfg, double p_cap = 1e3) {
  if (!(t >= kE))
    throw std::invalid_argument("tail_bound: t >= e required");
  const gls::GlsNorm n = gls::gls_norm(f, psi, cfg, p_cap);
  if (!n.finite() || !(n.value > 0.0))
    throw std::invalid_argument(
        "tail_bound: f needs finite positive Grand Lebesgue norm");
  const Conjugate c = young_fenchel(psi, std::log(t), p_cap);
  TailBound out{t, std::exp(-c.value), n.value, c.capped};
  return out;
}

struct TailCheckPoint {
  double t;
  double bound;
  double measured; // T_upsilon(t) = T_f(t * ||f||_{G psi})
  bool pass;
};

struct TailCheckReport {
  std::vector<TailCheckPoint> points;
  double norm;
  bool pass = true;
};

// Checks measured T_upsilon(t) <= exp(-h*(ln t)) + tol across the grid
// (points below e are skipped; the bound is not stated there).
inline TailCheckReport tail_check(const gls::TestFunction& f,
                                  const gls::GeneratingFunction& psi,
                                  std::span<const double> t_grid,
                                  const quad::Config& cfg, double tol = 1e-9,
                                  double p_cap = 1e3) {
  if (!f.tail_measure)
    throw std::invalid_argument(
        "tail_check: tail measure not computable for this function");
  const gls::GlsNorm n = gls::gls_norm(f, psi, cfg, p_cap);
  if (!n.finite() || !(n.value > 0.0))
    throw std::invalid_argument(
        "tail_check: f needs finite positive Grand Lebesgue norm");
  TailCheckReport rep;
  rep.norm = n.value;
  for (double t : t_grid) {
    if (t < kE) continue;
    const Conjugate c = young_fenchel(psi, std::log(t), p_cap);
    const double bound = std::exp(-c.value);
    const double measured = f.tail_measure(t * n.value);
    const bool ok = measured <= bound + tol;
    rep.points.push_back({t, bound, measured, ok});
    rep.pass = rep.pass && ok;
  }
  return rep;
}

} // namespace glsop::tail

#endif // GLSOP_TAIL_HPP
