#ifndef GLSOP_KERNEL_HPP
#define GLSOP_KERNEL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glsop/expr.hpp"
#include "glsop/quadrature.hpp"

// Degree-(-m) homogeneous kernels Q(x; x_1..x_m) on R_+^{m+1}, stored in
// reduced form Q(1, .).  Builtin families carry closed-form convergence
// predicates; parsed kernels must pass the homogeneity gate before use.

namespace glsop::kernel {

enum class Family { hilbert, hardy, max_kernel, expression };

class HomogeneousKernel {
 public:
  using ReducedEval = std::function<double(const double*)>;
  // Decides whether Theta_m(p) is finite, when known analytically.
  using DomainPredicate = std::function<bool(std::span<const double>)>;

  HomogeneousKernel(int m, ReducedEval reduced, Family family, std::string label)
      : m_(m), reduced_(std::move(reduced)), family_(family), label_(std::move(label)) {
    if (m < 2) throw std::invalid_argument("kernel arity m >= 2 required");
    support_.assign(static_cast<std::size_t>(m), quad::Interval{});
  }

  int arity() const { return m_; }
  Family family() const { return family_; }
  const std::string& label() const { return label_; }

  // Q(1, x) for x in R_+^m.
  double reduced_eval(const double* x) const { return reduced_(x); }
  double reduced_eval(std::span<const double> x) const { return reduced_(x.data()); }

  // Full evaluation.  Builtins reconstruct Q(x; y) = x^{-m} Q(1, y/x)
  // through the homogeneity law; expression kernels evaluate their own
  // full form directly, which is what check_homogeneity exercises.
  double full_eval(double x, std::span<const double> xs) const {
    if (full_) return full_(x, xs.data());
    std::vector<double> scaled(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) scaled[j] = xs[j] / x;
    return std::pow(x, -m_) * reduced_(scaled.data());
  }

  using FullEval = std::function<double(double, const double*)>;
  void set_full_eval(FullEval f) { full_ = std::move(f); }

  // Box outside which Q(1, .) vanishes identically; the full half-line
  // quadrant for kernels without compact reduced support.
  std::span<const quad::Interval> reduced_support() const { return support_; }
  void set_reduced_support(std::vector<quad::Interval> s) { support_ = std::move(s); }

  const std::optional<DomainPredicate>& domain_predicate() const { return predicate_; }
  void set_domain_predicate(DomainPredicate p) { predicate_ = std::move(p); }

  bool homogeneity_certified() const { return certified_; }
  void set_homogeneity_certified(bool v) { certified_ = v; }

 private:
  int m_;
  ReducedEval reduced_;
  FullEval full_; // expression kernels only; empty means use the law
  Family family_;
  std::string label_;
  std::vector<quad::Interval> support_;
  std::optional<DomainPredicate> predicate_;
  bool certified_ = false; // builtins are homogeneous by construction
};

// hilbert:  Q = (x + sum x_j)^{-m}
// hardy:    Q = x^{-m} 1{max x_j <= x}
// max:      Q = max(x, x_1..x_m)^{-m}
inline HomogeneousKernel builtin_kernel(const std::string& name, int m,
                                        std::span<const double> params = {}) {
  if (m < 2) throw std::invalid_argument("builtin_kernel: m >= 2 required");
  if (!params.empty())
    throw std::invalid_argument("builtin_kernel: family '" + name +
                                "' takes no parameters");
  // All three builtin families converge exactly when every p_j > 1: the
  // origin-side factor x_j^{-1/p_j} needs 1/p_j < 1, and the far-side decay
  // exponent m + sum_j 1/p_j - (m-1) > 1 holds automatically for p_j >= 1.
  auto all_pj_gt_1 = [](std::span<const double> p) {
    for (double pj : p)
      if (!(pj > 1.0)) return false;
    return true;
  };
  if (name == "hilbert") {
    HomogeneousKernel k(
        m,
        [m](const double* x) {
          double s = 1.0;
          for (int j = 0; j < m; ++j) s += x[j];
          return std::pow(s, -m);
        },
        Family::hilbert, "hilbert");
    k.set_domain_predicate(all_pj_gt_1);
    k.set_homogeneity_certified(true);
    return k;
  }
  if (name == "hardy") {
    HomogeneousKernel k(
        m,
        [m](const double* x) {
          for (int j = 0; j < m; ++j)
            if (x[j] > 1.0) return 0.0;
          return 1.0;
        },
        Family::hardy, "hardy");
    k.set_reduced_support(std::vector<quad::Interval>(
        static_cast<std::size_t>(m), quad::Interval{0.0, 1.0}));
    k.set_domain_predicate(all_pj_gt_1);
    k.set_homogeneity_certified(true);
    return k;
  }
  if (name == "max") {
    HomogeneousKernel k(
        m,
        [m](const double* x) {
          double v = 1.0;
          for (int j = 0; j < m; ++j) v = std::max(v, x[j]);
          return std::pow(v, -m);
        },
        Family::max_kernel, "max");
    k.set_domain_predicate(all_pj_gt_1);
    k.set_homogeneity_certified(true);
    return k;
  }
  throw std::invalid_argument("builtin_kernel: unknown family '" + name + "'");
}

// Parsed kernels may use x0 for the outer variable; reduced evaluation
// binds x0 = 1.  They are NOT assumed homogeneous -- check_homogeneity on
// the expression's own full form is the gate before theta/verify accept
// them.  An expression without x0 is constant in the outer variable and
// fails the gate unless it is identically degree-(-m) homogeneous in x..
inline HomogeneousKernel kernel_from_expression(const std::string& text, int m) {
  if (m < 2) throw std::invalid_argument("kernel arity m >= 2 required");
  auto e = std::make_shared<expr::Expression>(expr::parse(text, m, /*min_var=*/0));
  HomogeneousKernel k(
      m,
      [e, m](const double* x) {
        std::vector<double> buf(static_cast<std::size_t>(m) + 1);
        buf[0] = 1.0;
        for (int j = 0; j < m; ++j) buf[static_cast<std::size_t>(j) + 1] = x[j];
        return e->eval(buf);
      },
      Family::expression, text);
  k.set_full_eval([e, m](double x, const double* xs) {
    std::vector<double> buf(static_cast<std::size_t>(m) + 1);
    buf[0] = x;
    for (int j = 0; j < m; ++j) buf[static_cast<std::size_t>(j) + 1] = xs[j];
    return e->eval(buf);
  });
  return k;
}

struct HomogeneityReport {
  double max_violation = 0.0;
  bool pass = false;
  std::int64_t n_checked = 0;
  std::int64_t n_nonfinite = 0; // samples skipped on non-finite evaluation
};

// Samples (x, x1..xm) log-uniformly from [1e-3, 1e3]^{m+1} and compares
// Q(dx; dx.) against d^{-m} Q(x; x.) for every delta.
inline HomogeneityReport check_homogeneity(const HomogeneousKernel& k,
                                           std::int64_t n_samples,
                                           std::span<const double> deltas,
                                           double tol,
                                           std::uint64_t seed = 9001) {
  if (n_samples < 1) throw std::invalid_argument("check_homogeneity: n_samples >= 1");
  for (double d : deltas)
    if (!(d > 0.0)) throw std::invalid_argument("check_homogeneity: delta > 0 required");
  const int m = k.arity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  constexpr double eps_floor = 1e-300;

  HomogeneityReport rep;
  std::vector<double> xs(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double x = std::pow(10.0, uni(rng));
    for (double& v : xs) v = std::pow(10.0, uni(rng));
    const double base = k.full_eval(x, xs);
    if (!std::isfinite(base)) { ++rep.n_nonfinite; continue; }
    for (double d : deltas) {
      std::vector<double> sxs(xs);
      for (double& v : sxs) v *= d;
      const double lhs = k.full_eval(d * x, sxs);
      const double rhs = std::pow(d, -m) * base;
      if (!std::isfinite(lhs) || !std::isfinite(rhs)) { ++rep.n_nonfinite; continue; }
      const double viol = std::abs(lhs - rhs) / (std::abs(rhs) + eps_floor);
      rep.max_violation = std::max(rep.max_violation, viol);
      ++rep.n_checked;
    }
  }
  if (rep.n_checked == 0)
    throw std::runtime_error("check_homogeneity: all samples evaluated non-finite");
  rep.pass = rep.max_violation <= tol;
  return rep;
}

} // namespace glsop::kernel

#endif // GLSOP_KERNEL_HPP
