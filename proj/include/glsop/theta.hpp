#ifndef GLSOP_THETA_HPP
#define GLSOP_THETA_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glsop/kernel.hpp"
#include "glsop/quadrature.hpp"

// The sharp constant Theta_m(p) = int |Q(1,x)| prod x_j^{-1/p_j} dx over
// R_+^m, and classification of the exponent vectors for which it is finite.

namespace glsop::theta {

struct ExponentVector {
  std::vector<double> p;

  explicit ExponentVector(std::vector<double> exps) : p(std::move(exps)) {
    if (p.size() < 2)
      throw std::invalid_argument("exponent vector needs m >= 2 entries");
    for (double pj : p)
      if (!(pj >= 1.0) || std::isinf(pj))
        throw std::invalid_argument("exponents must lie in [1, inf)");
  }

  int m() const { return static_cast<int>(p.size()); }

  // Harmonic resultant (sum 1/p_j)^{-1}; always recomputed.
  double resultant() const {
    double s = 0.0;
    for (double pj : p) s += 1.0 / pj;
    return 1.0 / s;
  }

  std::vector<double> reciprocal_weights() const {
    std::vector<double> u(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) u[j] = 1.0 / p[j];
    return u;
  }
};

inline double resultant_exponent(std::span<const double> p) {
  double s = 0.0;
  for (double pj : p) s += 1.0 / pj;
  return 1.0 / s;
}

enum class Membership { in_Dm, not_in_Dm, unknown };

struct ThetaEstimate {
  double theta = std::numeric_limits<double>::quiet_NaN();
  quad::Estimate estimate;
  Membership membership = Membership::unknown;

  bool finite() const { return std::isfinite(theta); }
};

// Membership precedence: an analytic domain predicate beats the numerics;
// quadrature alone can certify in_Dm (converged) but never not_in_Dm.
inline ThetaEstimate theta(const kernel::HomogeneousKernel& k,
                           const ExponentVector& pv, const quad::Config& cfg) {
  if (k.arity() != pv.m())
    throw std::invalid_argument("theta: kernel arity and exponent count differ");
  if (!k.homogeneity_certified())
    throw std::invalid_argument(
        "theta: kernel has not passed the homogeneity gate");

  ThetaEstimate out;
  const std::vector<double> u = pv.reciprocal_weights();

  bool analytic_finite = false, have_analytic = false;
  if (k.domain_predicate()) {
    have_analytic = true;
    analytic_finite = (*k.domain_predicate())(pv.p);
    if (!analytic_finite) {
      out.theta = quad::kInf;
      out.membership = Membership::not_in_Dm;
      out.estimate.verdict = quad::Verdict::diverging;
      return out;
    }
  }

  for (double uj : u)
    if (!(uj < 1.0)) {
      // p_j = 1 makes the axis weight x^{-1} non-integrable at the origin
      // for any kernel bounded away from zero there
      out.theta = quad::kInf;
      out.membership = have_analytic ? Membership::not_in_Dm : Membership::unknown;
      out.estimate.verdict = quad::Verdict::diverging;
      return out;
    }

  auto integrand = [&k](const double* x) { return std::abs(k.reduced_eval(x)); };
  quad::Config c = cfg;
  c.divergence_scan = !have_analytic; // analytic verdict already settled it
  out.estimate = quad::integrate_weighted(integrand, u, k.reduced_support(), c);

  switch (out.estimate.verdict) {
    case quad::Verdict::converged:
      out.theta = out.estimate.value;
      out.membership = Membership::in_Dm;
      break;
    case quad::Verdict::diverging:
      out.theta = quad::kInf;
      out.membership = have_analytic ? Membership::not_in_Dm : Membership::unknown;
      break;
    case quad::Verdict::inconclusive:
      // even with an analytic "finite" verdict the value itself is not
      // trusted, so the membership stays unknown (in_Dm implies converged)
      out.theta = std::numeric_limits<double>::quiet_NaN();
      out.membership = Membership::unknown;
      break;
  }
  return out;
}

// Closed forms used as independent oracles.
//
// hilbert:  int (1 + sum x)^{-m} prod x_j^{a_j - 1} dx with a_j = 1 - 1/p_j
//           is the Dirichlet integral  prod Gamma(a_j) * Gamma(m - sum a_j)
//           / Gamma(m); for m = 2 this is Gamma(1-1/p1) Gamma(1-1/p2)
//           Gamma(1/p1 + 1/p2).  Finite iff every a_j > 0 (sum a_j < m is
//           automatic for p_j < inf).
// hardy:    prod int_0^1 x^{-1/p_j} dx = prod p_j / (p_j - 1).
inline double theta_closed_form(const std::string& family,
                                std::span<const double> p) {
  const int m = static_cast<int>(p.size());
  if (m < 2) throw std::invalid_argument("theta_closed_form: m >= 2 required");
  if (family == "hilbert") {
    double sum_a = 0.0, log_prod = 0.0;
    for (double pj : p) {
      const double a = 1.0 - 1.0 / pj;
      if (!(a > 0.0)) return quad::kInf;
      sum_a += a;
      log_prod += std::lgamma(a);
    }
    if (!(sum_a < m)) return quad::kInf;
    return std::exp(log_prod + std::lgamma(m - sum_a) - std::lgamma(m));
  }
  if (family == "hardy") {
    double prod = 1.0;
    for (double pj : p) {
      if (!(pj > 1.0)) return quad::kInf;
      prod *= pj / (pj - 1.0);
    }
    return prod;
  }
  throw std::invalid_argument("theta_closed_form: unsupported family '" +
                              family + "'");
}

struct DmScanPoint {
  std::vector<double> p;
  Membership membership;
  double theta;
  double abs_error;
};

struct DmScanResult {
  std::vector<DmScanPoint> points; // row-major over the grid
  std::vector<std::size_t> shape;  // grid axis lengths
  // Discrete proxy for "D_m contains a non-empty open set": some in_Dm
  // point whose full 3^m grid neighborhood is in_Dm too.
  bool open_set_proxy = false;
};

inline DmScanResult dm_scan(const kernel::HomogeneousKernel& k,
                            std::span<const double> axis_values,
                            const quad::Config& cfg) {
  const int m = k.arity();
  const std::size_t n = axis_values.size();
  if (n == 0) throw std::invalid_argument("dm_scan: empty grid");

  DmScanResult res;
  res.shape.assign(static_cast<std::size_t>(m), n);
  std::size_t total = 1;
  for (std::size_t s : res.shape) total *= s;
  res.points.resize(total);

  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> p(static_cast<std::size_t>(m));
    std::size_t rem = flat;
    for (int j = m - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = rem % n;
      rem /= n;
      p[static_cast<std::size_t>(j)] = axis_values[idx[static_cast<std::size_t>(j)]];
    }
    const ThetaEstimate te = theta(k, ExponentVector(p), cfg);
    res.points[flat] = {std::move(p), te.membership, te.theta,
                       te.estimate.abs_error};
  }

  // neighborhood check in flat index space
  auto member_at = [&](const std::vector<std::size_t>& iv) {
    std::size_t flat = 0;
    for (int j = 0; j < m; ++j) flat = flat * n + iv[static_cast<std::size_t>(j)];
    return res.points[flat].membership;
  };
  for (std::size_t flat = 0; flat < total && !res.open_set_proxy; ++flat) {
    std::size_t rem = flat;
    bool interior = true;
    for (int j = m - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = rem % n;
      rem /= n;
      if (idx[static_cast<std::size_t>(j)] == 0 ||
          idx[static_cast<std::size_t>(j)] == n - 1)
        interior = false;
    }
    if (!interior || member_at(idx) != Membership::in_Dm) continue;
    bool all_in = true;
    std::size_t n_offsets = 1;
    for (int j = 0; j < m; ++j) n_offsets *= 3;
    std::vector<std::size_t> nb(idx);
    for (std::size_t code = 0; code < n_offsets && all_in; ++code) {
      std::size_t c = code;
      for (int j = 0; j < m; ++j) {
        nb[static_cast<std::size_t>(j)] =
            idx[static_cast<std::size_t>(j)] + (c % 3) - 1;
        c /= 3;
      }
      if (member_at(nb) != Membership::in_Dm) all_in = false;
    }
    res.open_set_proxy = all_in;
  }
  return res;
}

} // namespace glsop::theta

#endif // GLSOP_THETA_HPP
