// Command-line front end: theta, dm-scan, gls-norm, beta, certify, tail,
// verify, sharpness.  JSON specs in, CSV (default) or JSON rows out.
// Exit codes: 0 all checks pass, 1 a mathematical check failed,
// 2 usage/config error, 3 numerical verdict inconclusive.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glsop/beta.hpp"
#include "glsop/expr.hpp"
#include "glsop/gls.hpp"
#include "glsop/kernel.hpp"
#include "glsop/tail.hpp"
#include "glsop/theta.hpp"
#include "glsop/verify.hpp"

using nlohmann::json;
using namespace glsop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail_config(const std::string& msg) {
  throw ConfigError(msg);
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail_config(what + ": invalid JSON '" + text + "'");
  if (!j.is_object()) fail_config(what + ": expected a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) { ok = true; break; }
    if (!ok) fail_config(what + ": unknown key '" + key + "'");
  }
}

double require_number(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) fail_config(what + ": missing key '" + std::string(key) + "'");
  if (!j[key].is_number()) fail_config(what + ": key '" + std::string(key) + "' must be a number");
  return j[key].get<double>();
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      fail_config(what + ": cannot parse number '" + item + "'");
    }
    if (pos != item.size()) fail_config(what + ": trailing junk in '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail_config(what + ": empty list");
  return out;
}

// "start:stop:step" or a comma-separated list
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  if (text.find(':') == std::string::npos) return parse_double_list(text, what);
  double start = 0, stop = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
      !(step > 0.0) || !(stop >= start))
    fail_config(what + ": expected start:stop:step with step > 0");
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-12 * step; v += step) out.push_back(v);
  return out;
}

// --- spec construction ---

kernel::HomogeneousKernel make_kernel(const std::string& spec, bool unchecked) {
  const json j = parse_json(spec, "kernel spec");
  if (j.contains("family")) {
    reject_unknown_keys(j, {"family", "m", "params"}, "kernel spec");
    if (!j["family"].is_string()) fail_config("kernel spec: 'family' must be a string");
    const int m = static_cast<int>(require_number(j, "m", "kernel spec"));
    std::vector<double> params;
    if (j.contains("params")) params = j["params"].get<std::vector<double>>();
    return kernel::builtin_kernel(j["family"].get<std::string>(), m, params);
  }
  if (j.contains("expr")) {
    reject_unknown_keys(j, {"expr", "m"}, "kernel spec");
    if (!j["expr"].is_string()) fail_config("kernel spec: 'expr' must be a string");
    const int m = static_cast<int>(require_number(j, "m", "kernel spec"));
    auto k = kernel::kernel_from_expression(j["expr"].get<std::string>(), m);
    if (unchecked) {
      k.set_homogeneity_certified(true);
      return k;
    }
    const std::vector<double> deltas = {0.5, 2.0, 10.0};
    const auto rep = kernel::check_homogeneity(k, 500, deltas, 1e-8);
    if (!rep.pass)
      fail_config("kernel spec: expression failed the homogeneity gate "
                  "(max relative defect " + std::to_string(rep.max_violation) +
                  "); pass --unchecked to override");
    k.set_homogeneity_certified(true);
    return k;
  }
  fail_config("kernel spec: need either 'family' or 'expr'");
}

gls::GeneratingFunction make_psi(const std::string& spec) {
  const json j = parse_json(spec, "psi spec");
  if (j.contains("expr")) {
    reject_unknown_keys(j, {"expr", "a", "b"}, "psi spec");
    if (!j["expr"].is_string()) fail_config("psi spec: 'expr' must be a string");
    const double a = require_number(j, "a", "psi spec");
    const double b = j.contains("b") ? require_number(j, "b", "psi spec") : gls::kInf;
    auto e = std::make_shared<expr::Expression>(
        expr::parse(j["expr"].get<std::string>(), 1));
    auto g = gls::custom_psi(
        [e](double p) {
          const double buf[1] = {p};
          return e->eval(std::span<const double>(buf, 1));
        },
        a, b);
    if (!g.positive_inf_check())
      fail_config("psi spec: expression violates inf psi > 0");
    return g;
  }
  if (!j.contains("family")) fail_config("psi spec: need 'family' or 'expr'");
  if (!j["family"].is_string()) fail_config("psi spec: 'family' must be a string");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "power") {
    reject_unknown_keys(j, {"family", "m"}, "psi spec");
    return gls::power_psi(require_number(j, "m", "psi spec"));
  }
  if (fam == "two_sided") {
    reject_unknown_keys(j, {"family", "a", "b", "alpha", "beta"}, "psi spec");
    return gls::two_sided_psi(require_number(j, "a", "psi spec"),
                              require_number(j, "b", "psi spec"),
                              require_number(j, "alpha", "psi spec"),
                              require_number(j, "beta", "psi spec"));
  }
  if (fam == "extremal") {
    reject_unknown_keys(j, {"family", "r"}, "psi spec");
    return gls::extremal_psi(require_number(j, "r", "psi spec"));
  }
  fail_config("psi spec: unknown family '" + fam + "'");
}

gls::TestFunction make_test_function(const std::string& spec) {
  const json j = parse_json(spec, "function spec");
  if (!j.contains("family")) fail_config("function spec: need 'family'");
  if (!j["family"].is_string()) fail_config("function spec: 'family' must be a string");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "indicator") {
    reject_unknown_keys(j, {"family"}, "function spec");
    return gls::indicator_unit();
  }
  if (fam == "truncated_power") {
    reject_unknown_keys(j, {"family", "gamma"}, "function spec");
    return gls::truncated_power(require_number(j, "gamma", "function spec"));
  }
  if (fam == "unit_power") {
    reject_unknown_keys(j, {"family", "gamma"}, "function spec");
    return gls::unit_power(require_number(j, "gamma", "function spec"));
  }
  if (fam == "tail_power") {
    reject_unknown_keys(j, {"family", "gamma"}, "function spec");
    return gls::tail_power(require_number(j, "gamma", "function spec"));
  }
  if (fam == "exp") {
    reject_unknown_keys(j, {"family"}, "function spec");
    return gls::exp_decay();
  }
  if (fam == "constant") {
    reject_unknown_keys(j, {"family", "c"}, "function spec");
    return gls::constant_unit(require_number(j, "c", "function spec"));
  }
  fail_config("function spec: unknown family '" + fam + "'");
}

// --- output plumbing ---

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* membership_str(theta::Membership m) {
  switch (m) {
    case theta::Membership::in_Dm: return "in_Dm";
    case theta::Membership::not_in_Dm: return "not_in_Dm";
    case theta::Membership::unknown: return "unknown";
  }
  return "unknown";
}

// Rows of (header -> string value), rendered as CSV or a JSON array.
struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary; // leading comments

  void write_csv(std::ostream& os) const {
    for (const auto& [k, v] : summary) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < headers.size(); ++i)
      os << headers[i] << (i + 1 < headers.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? "," : "");
      os << "\n";
    }
  }

  void write_json(std::ostream& os) const {
    json out;
    for (const auto& [k, v] : summary) out["summary"][k] = v;
    out["rows"] = json::array();
    for (const auto& row : rows) {
      json r;
      for (std::size_t i = 0; i < headers.size(); ++i) r[headers[i]] = row[i];
      out["rows"].push_back(std::move(r));
    }
    os << out.dump(2) << "\n";
  }
};

struct CommonOpts {
  quad::Config cfg;
  std::string out_path;
  std::string format = "csv";
  bool unchecked = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--rel-tol", c.cfg.rel_tol, "relative tolerance");
  sub->add_option("--abs-tol", c.cfg.abs_tol, "absolute tolerance");
  sub->add_option("--max-evals", c.cfg.max_evals, "integrand evaluation budget");
  sub->add_option("--seed", c.cfg.seed, "seed for randomized shifts");
  sub->add_option("-o,--out", c.out_path, "output file (default stdout)");
  sub->add_option("--format", c.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--unchecked", c.unchecked,
                "skip the homogeneity gate for expression kernels");
}

void emit(const Table& t, const CommonOpts& c) {
  if (c.out_path.empty()) {
    if (c.format == "json") t.write_json(std::cout);
    else t.write_csv(std::cout);
    return;
  }
  std::ofstream os(c.out_path, std::ios::binary);
  if (!os) fail_config("cannot open output file '" + c.out_path + "'");
  if (c.format == "json") t.write_json(os);
  else t.write_csv(os);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp constants, Grand Lebesgue norms, and tail bounds for "
               "multilinear operators with homogeneous kernels"};
  app.require_subcommand(1);

  if (const char* th = std::getenv("GLSOP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(th, &end, 10);
    if (end == th || *end != '\0' || n < 1) {
      std::cerr << json{{"error", "GLSOP_THREADS must be a positive integer"}}
                       .dump()
                << "\n";
      return kExitConfig;
    }
    // evaluation is single-threaded; the variable caps, never raises, parallelism
  }

  struct {
    CommonOpts common;
    std::string kernel, p;
  } theta_o;
  auto* theta_cmd = app.add_subcommand("theta", "sharp constant at one exponent vector");
  theta_cmd->add_option("--kernel", theta_o.kernel, "kernel spec JSON")->required();
  theta_cmd->add_option("--p", theta_o.p, "comma-separated exponents")->required();
  add_common(theta_cmd, theta_o.common);

  struct {
    CommonOpts common;
    std::string kernel, grid;
  } dm_o;
  auto* dm_cmd = app.add_subcommand("dm-scan", "membership raster over an exponent grid");
  dm_cmd->add_option("--kernel", dm_o.kernel, "kernel spec JSON")->required();
  dm_cmd->add_option("--grid", dm_o.grid, "axis values (list or start:stop:step)")->required();
  add_common(dm_cmd, dm_o.common);

  struct {
    CommonOpts common;
    std::string f, psi;
  } gls_o;
  auto* gls_cmd = app.add_subcommand("gls-norm", "Grand Lebesgue norm of a test function");
  gls_cmd->add_option("--f", gls_o.f, "function spec JSON")->required();
  gls_cmd->add_option("--psi", gls_o.psi, "generating function spec JSON")->required();
  add_common(gls_cmd, gls_o.common);

  struct {
    CommonOpts common;
    std::string kernel, norms, p_grid;
    std::vector<std::string> psis;
  } beta_o;
  auto* beta_cmd = app.add_subcommand("beta", "composite generating function curve");
  beta_cmd->add_option("--kernel", beta_o.kernel, "kernel spec JSON")->required();
  beta_cmd->add_option("--psi", beta_o.psis, "psi spec JSON, one per slot")->required();
  beta_cmd->add_option("--norms", beta_o.norms, "norm factors (default all 1)");
  beta_cmd->add_option("--p-grid", beta_o.p_grid, "grid (list or start:stop:step)")->required();
  add_common(beta_cmd, beta_o.common);

  struct {
    CommonOpts common;
    std::string kernel, p_grid;
    std::vector<std::string> fs, psis;
  } cert_o;
  auto* cert_cmd = app.add_subcommand("certify", "certify the Grand Lebesgue operator bound");
  cert_cmd->add_option("--kernel", cert_o.kernel, "kernel spec JSON")->required();
  cert_cmd->add_option("--f", cert_o.fs, "function spec JSON, one per slot")->required();
  cert_cmd->add_option("--psi", cert_o.psis, "psi spec JSON, one per slot")->required();
  cert_cmd->add_option("--p-grid", cert_o.p_grid, "grid (list or start:stop:step)")->required();
  add_common(cert_cmd, cert_o.common);

  struct {
    CommonOpts common;
    std::string psi, f, t;
  } tail_o;
  auto* tail_cmd = app.add_subcommand("tail", "Young-Fenchel tail bounds");
  tail_cmd->add_option("--psi", tail_o.psi, "psi spec JSON")->required();
  tail_cmd->add_option("--f", tail_o.f, "function spec JSON (optional, enables measured tails)");
  tail_cmd->add_option("--t", tail_o.t, "comma-separated thresholds, each >= e")->required();
  add_common(tail_cmd, tail_o.common);

  struct {
    CommonOpts common;
    std::string kernel, p;
    std::vector<std::string> fs;
  } verify_o;
  auto* verify_cmd = app.add_subcommand("verify", "sharp-constant inequality check");
  verify_cmd->add_option("--kernel", verify_o.kernel, "kernel spec JSON")->required();
  verify_cmd->add_option("--f", verify_o.fs, "function spec JSON, one per slot")->required();
  verify_cmd->add_option("--p", verify_o.p, "comma-separated exponents")->required();
  add_common(verify_cmd, verify_o.common);

  struct {
    CommonOpts common;
    std::string kernel, p, eps;
  } sharp_o;
  auto* sharp_cmd = app.add_subcommand("sharpness", "near-extremal lower-bound probe");
  sharp_cmd->add_option("--kernel", sharp_o.kernel, "kernel spec JSON")->required();
  sharp_cmd->add_option("--p", sharp_o.p, "comma-separated exponents")->required();
  sharp_cmd->add_option("--eps", sharp_o.eps, "decreasing epsilon schedule")->required();
  add_common(sharp_cmd, sharp_o.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitConfig;
  }

  try {
    if (theta_cmd->parsed()) {
      const auto& o = theta_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      const auto p = parse_double_list(o.p, "--p");
      if (p.size() < 2) fail_config("m >= 2 required");
      theta::ThetaEstimate est;
      try {
        est = theta::theta(k, theta::ExponentVector(p), o.common.cfg);
      } catch (const std::invalid_argument& e) {
        fail_config(e.what());
      }
      Table t;
      for (std::size_t j = 0; j < p.size(); ++j)
        t.headers.push_back("p" + std::to_string(j + 1));
      t.headers.insert(t.headers.end(), {"theta", "abs_err", "membership"});
      std::vector<std::string> row;
      for (double pj : p) row.push_back(fmt(pj));
      row.push_back(fmt(est.theta));
      row.push_back(fmt(est.estimate.abs_error));
      row.push_back(membership_str(est.membership));
      t.rows.push_back(std::move(row));
      emit(t, o.common);
      return est.membership == theta::Membership::unknown ? kExitInconclusive
                                                          : kExitOk;
    }

    if (dm_cmd->parsed()) {
      const auto& o = dm_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      const auto axis = parse_grid(o.grid, "--grid");
      const auto scan = theta::dm_scan(k, axis, o.common.cfg);
      Table t;
      for (int j = 0; j < k.arity(); ++j)
        t.headers.push_back("p" + std::to_string(j + 1));
      t.headers.insert(t.headers.end(), {"theta", "abs_err", "membership"});
      bool any_unknown = false;
      for (const auto& pt : scan.points) {
        std::vector<std::string> row;
        for (double pj : pt.p) row.push_back(fmt(pj));
        row.push_back(fmt(pt.theta));
        row.push_back(fmt(pt.abs_error));
        row.push_back(membership_str(pt.membership));
        any_unknown = any_unknown || pt.membership == theta::Membership::unknown;
        t.rows.push_back(std::move(row));
      }
      t.summary.emplace_back("open_set_proxy", scan.open_set_proxy ? "true" : "false");
      emit(t, o.common);
      return any_unknown ? kExitInconclusive : kExitOk;
    }

    if (gls_cmd->parsed()) {
      const auto& o = gls_o;
      const auto f = make_test_function(o.f);
      const auto psi = make_psi(o.psi);
      const auto n = gls::gls_norm(f, psi, o.common.cfg);
      Table t;
      t.headers = {"value", "arg_p", "capped"};
      t.rows.push_back({fmt(n.value), fmt(n.arg_p), n.capped ? "true" : "false"});
      emit(t, o.common);
      if (n.capped || std::isnan(n.value)) return kExitInconclusive;
      return kExitOk;
    }

    if (beta_cmd->parsed()) {
      const auto& o = beta_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      if (static_cast<int>(o.psis.size()) != k.arity())
        fail_config("need exactly one --psi per kernel slot");
      std::vector<gls::GeneratingFunction> psis;
      for (const auto& s : o.psis) psis.push_back(make_psi(s));
      std::vector<double> norms(psis.size(), 1.0);
      if (!o.norms.empty()) {
        norms = parse_double_list(o.norms, "--norms");
        if (norms.size() != psis.size())
          fail_config("--norms length must match the kernel arity");
      }
      const auto grid = parse_grid(o.p_grid, "--p-grid");
      const auto curve = beta::beta_curve(k, psis, norms, grid, o.common.cfg);
      Table t;
      t.headers = {"p", "beta"};
      for (int j = 0; j < k.arity(); ++j)
        t.headers.push_back("p" + std::to_string(j + 1) + "*");
      t.headers.push_back("status");
      for (const auto& s : curve.samples) {
        std::vector<std::string> row = {fmt(s.p), fmt(s.value)};
        for (int j = 0; j < k.arity(); ++j)
          row.push_back(s.finite() ? fmt(s.argmin_p[static_cast<std::size_t>(j)])
                                   : "nan");
        switch (s.status) {
          case beta::PointStatus::finite: row.push_back("finite"); break;
          case beta::PointStatus::infeasible: row.push_back("infeasible"); break;
          case beta::PointStatus::theta_infinite: row.push_back("theta_infinite"); break;
          case beta::PointStatus::nonfinite: row.push_back("nonfinite"); break;
        }
        t.rows.push_back(std::move(row));
      }
      t.summary.emplace_back("interval_lo", fmt(curve.interval_lo));
      t.summary.emplace_back("interval_hi", fmt(curve.interval_hi));
      t.summary.emplace_back("contiguous", curve.contiguous ? "true" : "false");
      emit(t, o.common);
      return kExitOk;
    }

    if (cert_cmd->parsed()) {
      const auto& o = cert_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      if (static_cast<int>(o.fs.size()) != k.arity() ||
          static_cast<int>(o.psis.size()) != k.arity())
        fail_config("need exactly one --f and one --psi per kernel slot");
      std::vector<gls::TestFunction> fs;
      for (const auto& s : o.fs) fs.push_back(make_test_function(s));
      std::vector<gls::GeneratingFunction> psis;
      for (const auto& s : o.psis) psis.push_back(make_psi(s));
      const auto grid = parse_grid(o.p_grid, "--p-grid");
      beta::CertifyReport rep;
      try {
        rep = beta::certify_theorem(k, fs, psis, grid, o.common.cfg);
      } catch (const std::invalid_argument& e) {
        fail_config(e.what());
      }
      Table t;
      t.headers = {"p", "beta", "operator_norm", "status"};
      bool any_unknown = false;
      for (const auto& pt : rep.points) {
        const char* st = "unconstrained";
        switch (pt.status) {
          case beta::CertifyPointStatus::pass: st = "pass"; break;
          case beta::CertifyPointStatus::fail: st = "fail"; break;
          case beta::CertifyPointStatus::unknown: st = "unknown"; any_unknown = true; break;
          case beta::CertifyPointStatus::unconstrained: break;
        }
        t.rows.push_back({fmt(pt.p), fmt(pt.beta_value), fmt(pt.operator_norm), st});
      }
      for (std::size_t j = 0; j < rep.norms.size(); ++j)
        t.summary.emplace_back("gls_norm_" + std::to_string(j + 1), fmt(rep.norms[j]));
      t.summary.emplace_back("pass", rep.pass ? "true" : "false");
      emit(t, o.common);
      if (!rep.pass) return kExitCheckFailed;
      return any_unknown ? kExitInconclusive : kExitOk;
    }

    if (tail_cmd->parsed()) {
      const auto& o = tail_o;
      const auto psi = make_psi(o.psi);
      const auto ts = parse_double_list(o.t, "--t");
      for (double tv : ts)
        if (!(tv >= tail::kE)) fail_config("--t values must be >= e");
      Table t;
      t.headers = {"t", "bound", "measured_tail", "pass"};
      bool all_pass = true;
      if (!o.f.empty()) {
        const auto f = make_test_function(o.f);
        tail::TailCheckReport rep;
        try {
          rep = tail::tail_check(f, psi, ts, o.common.cfg);
        } catch (const std::invalid_argument& e) {
          fail_config(e.what());
        }
        for (const auto& pt : rep.points)
          t.rows.push_back({fmt(pt.t), fmt(pt.bound), fmt(pt.measured),
                            pt.pass ? "true" : "false"});
        t.summary.emplace_back("gls_norm", fmt(rep.norm));
        all_pass = rep.pass;
      } else {
        for (double tv : ts) {
          const auto c = tail::young_fenchel(psi, std::log(tv));
          t.rows.push_back({fmt(tv), fmt(std::exp(-c.value)), "", "true"});
        }
      }
      emit(t, o.common);
      return all_pass ? kExitOk : kExitCheckFailed;
    }

    if (verify_cmd->parsed()) {
      const auto& o = verify_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      if (static_cast<int>(o.fs.size()) != k.arity())
        fail_config("need exactly one --f per kernel slot");
      std::vector<gls::TestFunction> fs;
      for (const auto& s : o.fs) fs.push_back(make_test_function(s));
      const auto p = parse_double_list(o.p, "--p");
      if (static_cast<int>(p.size()) != k.arity())
        fail_config("--p length must match the kernel arity");
      verify::InequalityReport rep;
      try {
        rep = verify::check_inequality(k, fs, theta::ExponentVector(p),
                                       o.common.cfg);
      } catch (const std::invalid_argument& e) {
        fail_config(e.what());
      }
      Table t;
      t.headers = {"p", "lhs", "rhs", "margin", "status"};
      const char* st = "unknown";
      switch (rep.status) {
        case verify::CheckStatus::pass: st = "pass"; break;
        case verify::CheckStatus::fail: st = "fail"; break;
        case verify::CheckStatus::vacuous: st = "vacuous"; break;
        case verify::CheckStatus::unknown: break;
      }
      t.rows.push_back({fmt(rep.p), fmt(rep.lhs), fmt(rep.rhs), fmt(rep.margin), st});
      emit(t, o.common);
      switch (rep.status) {
        case verify::CheckStatus::pass: return kExitOk;
        case verify::CheckStatus::fail: return kExitCheckFailed;
        default: return kExitInconclusive;
      }
    }

    if (sharp_cmd->parsed()) {
      const auto& o = sharp_o;
      auto k = make_kernel(o.kernel, o.common.unchecked);
      const auto p = parse_double_list(o.p, "--p");
      if (static_cast<int>(p.size()) != k.arity())
        fail_config("--p length must match the kernel arity");
      const auto eps = parse_double_list(o.eps, "--eps");
      verify::SharpnessProbe probe;
      try {
        probe = verify::sharpness_probe(k, theta::ExponentVector(p), eps,
                                        o.common.cfg);
      } catch (const std::invalid_argument& e) {
        fail_config(e.what());
      }
      Table t;
      t.headers = {"eps", "ratio", "target"};
      for (std::size_t i = 0; i < probe.eps.size(); ++i)
        t.rows.push_back({fmt(probe.eps[i]), fmt(probe.ratios[i]), fmt(probe.target)});
      t.summary.emplace_back("extrapolated_limit", fmt(probe.extrapolated_limit));
      t.summary.emplace_back("fit_gamma", fmt(probe.fit_gamma));
      t.summary.emplace_back("fit_residual", fmt(probe.fit_residual));
      emit(t, o.common);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitConfig;
  } catch (const expr::ParseError& e) {
    std::cerr << json{{"error", e.what()}, {"offset", e.offset}}.dump() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitCheckFailed;
  }
  return kExitConfig;
}
