#pragma once

// End-to-end verification suites: run one configured check, collect a
// relation report and assemble a deterministic JSON bundle.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/blocks.hpp"
#include "ozcheck/io.hpp"
#include "ozcheck/pl_identities.hpp"
#include "ozcheck/tower.hpp"
#include "ozcheck/traces.hpp"

namespace ozcheck {

struct SuiteConfig {
  std::string command = "verify";  // verify | traces | simplicity | export
  std::string suite = "z";
  unsigned p = 2;
  std::size_t n = 2;
  std::size_t grid = kDefaultGrid;
  std::optional<double> tol;  // per-suite default when unset
  unsigned steps = 1;
  double eps = 0.05;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& suites_for(const std::string& command) {
  static const std::vector<std::string> verify{"pl", "cone", "z", "w", "alt1", "tower-z", "tower-w", "fingerprint"};
  static const std::vector<std::string> traces{"collapse", "pullback"};
  static const std::vector<std::string> simplicity{"simplicity"};
  static const std::vector<std::string> exports{"z", "w", "alt1"};
  if (command == "verify") return verify;
  if (command == "traces") return traces;
  if (command == "simplicity") return simplicity;
  if (command == "export") return exports;
  throw DomainError("unknown command '" + command + "'");
}

inline double default_tolerance(const std::string& suite) {
  if (suite == "pl" || suite == "simplicity") return 0.0;
  if (suite == "alt1" || suite == "fingerprint" || suite == "pullback") return 1e-9;
  if (suite == "tower-z" || suite == "tower-w") return 1e-8;
  return 1e-10;
}

inline double tolerance_of(const SuiteConfig& c) { return c.tol.value_or(default_tolerance(c.suite)); }

/// Throws DomainError for a configuration no suite can run.
inline void validate_config(const SuiteConfig& c) {
  const auto& allowed = suites_for(c.command);
  if (std::find(allowed.begin(), allowed.end(), c.suite) == allowed.end())
    throw DomainError("suite '" + c.suite + "' is not available for '" + c.command + "'");
  if (c.n < 2) throw DomainError("--n must be at least 2");
  if (c.p < 2) throw DomainError("--p must be at least 2");
  if (c.grid < 2) throw DomainError("--grid must be at least 2");
  if (c.steps < 1) throw DomainError("--steps must be at least 1");
  if (c.tol && !(*c.tol >= 0.0 && std::isfinite(*c.tol))) throw DomainError("--tol must be finite and >= 0");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw DomainError("--eps must lie in (0, 1)");
}

inline Json config_json(const SuiteConfig& c) {
  Json out;
  out["command"] = c.command;
  out["suite"] = c.suite;
  out["p"] = c.p;
  out["n"] = c.n;
  out["grid"] = c.grid;
  out["tol"] = tolerance_of(c);
  out["steps"] = c.steps;
  out["eps"] = c.eps;
  out["seed"] = c.seed;
  return out;
}

struct SuiteResult {
  RelationReport report;
  Json results = Json::object();  // suite-specific quantities
};

namespace detail {

inline Mat seeded_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

inline void add_membership(RelationReport& report, const std::string& name, const MatFun& x, double tol) {
  report.add(name, membership_residual(x), tol);
}

inline Json fraction_json(const Rational& r) {
  Json out;
  out["exact"] = to_string(r);
  out["value"] = to_double(r);
  return out;
}

inline SuiteResult run_verify(const SuiteConfig& c) {
  const double tol = tolerance_of(c);
  const GridSpec grid(c.grid);
  SuiteResult out;
  RelationReport& r = out.report;
  if (c.suite == "pl") {
    r = verify_pl_identities();
  } else if (c.suite == "cone") {
    const Witness z = z_witness(c.n, grid);
    const Witness w = w_witness(c.n, grid);
    r.merge(validate_cone(cone_generators(z.phi), tol), "z phi: ");
    r.merge(validate_cone(cone_generators(z.psi), tol), "z psi: ");
    r.merge(validate_cone(cone_generators(w.phi), tol), "w phi: ");
    r.merge(validate_cone(cone_generators(w.psi), tol), "w psi: ");
  } else if (c.suite == "z") {
    const Witness z = z_witness(c.n, grid);
    r = validate_R(z.phi, z.psi, tol);
    r.merge(validate_support(z.phi, tol), "support: ");
    add_membership(r, "phi(1) in Z(n, n+1)", z.phi.unit(), tol);
    add_membership(r, "v in Z(n, n+1)", z.v, tol);
  } else if (c.suite == "w") {
    const Witness w = w_witness(c.n, grid);
    r = validate_Rhat(w.phi, w.psi, tol);
    r.merge(w_center_check(c.n, grid, tol), "center: ");
    add_membership(r, "phi(1) in W(n, n+1)", w.phi.unit(), tol);
    add_membership(r, "v in W(n, n+1)", w.v, tol);
  } else if (c.suite == "alt1") {
    // Built without the internal gate so that the report shows every residual.
    const Alt1Witness a = alt1_witness(c.n, grid, std::numeric_limits<double>::infinity());
    r = validate_alt1(a.phi, a.psi, a.h, tol);
    add_membership(r, "h in Z(n, n+1)", a.h, tol);
  } else if (c.suite == "tower-z" || c.suite == "tower-w") {
    require_numeric_stage(c.n);
    const std::size_t next = c.n * c.n * c.n;
    const bool is_z = c.suite == "tower-z";
    const Witness w = is_z ? z_witness(next, grid) : w_witness(next, grid);
    const HatMaps hat = is_z ? hat_maps_z(w.phi, w.psi, tol) : hat_maps_w(w.phi, w.psi, tol);
    r = hat.report;
    out.results["source_level"] = next;
    out.results["target_dim"] = hat.phi_hat.dim();
  } else if (c.suite == "fingerprint") {
    std::mt19937_64 rng(c.seed);
    double worst = 0.0;
    std::optional<double> worst_t;
    constexpr int kSamples = 20;
    constexpr int kTimes = 9;
    for (int k = 0; k < kSamples; ++k) {
      const Mat a = seeded_hermitian(c.n, rng);
      for (int i = 0; i < kTimes; ++i) {
        const double t = static_cast<double>(i) / (kTimes - 1);
        const double m = fingerprint(c.n, a, t).max_mismatch;
        if (m > worst || !worst_t) {
          worst = std::max(worst, m);
          worst_t = t;
        }
      }
    }
    r.add("eigenvalue multiset match", worst, tol, worst_t);
    out.results["samples"] = kSamples;
    out.results["times"] = kTimes;
  }
  return out;
}

inline SuiteResult run_traces(const SuiteConfig& c) {
  const double tol = tolerance_of(c);
  const GridSpec grid(c.grid);
  SuiteResult out;
  const Witness z = z_witness(c.p, grid);
  if (c.suite == "collapse") {
    const CollapseResult col = collapse_check(BigInt(c.p), c.steps, z.phi.unit());
    out.report = col.report;
    const BoundednessResult bd = w_boundedness_check(BigInt(c.p), c.steps);
    out.report.merge(bd.report, "boundedness: ");
    out.results["sup_difference"] = col.sup_difference;
    out.results["argmax_t"] = col.argmax_t;
    out.results["argmin_t"] = col.argmin_t;
    out.results["b_norm"] = col.b_norm;
    out.results["factor"] = fraction_json(col.factor);
    out.results["bound"] = col.bound;
    out.results["ratio"] = col.ratio;
    Json products = Json::array();
    for (const auto& q : bd.partial_products) products.push_back(fraction_json(q));
    out.results["partial_products"] = std::move(products);
  } else {
    std::mt19937_64 rng(c.seed);
    const ConnectorSymbolic lam = lambda_sequence(c.p);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(grid.size());
    double total = 0.0;
    for (double& x : w) total += (x = u(rng));
    for (double& x : w) x /= total;
    const TraceMeasure nu(grid, std::move(w));
    const TraceMeasure pulled = pullback_trace(nu, lam);
    out.report.add("pullback mass = 1", std::abs(pulled.total_mass() - 1.0), tol);
    const Mat cst = seeded_hermitian(z.phi.dim(), rng);
    const MatFun x = MatFun::constant(grid, cst);
    out.report.add("pullback preserves traces of constants", std::abs(trace_of(pulled, x) - trace_of(nu, x)), tol);

    double worst = 0.0;
    std::optional<double> worst_t;
    for (int k = 0; k < 5; ++k) {
      const Mat a = seeded_hermitian(c.p, rng);
      const MatFun pa = z.phi.image(a);
      for (int i = 0; i <= 8; ++i) {
        const double t = grid.t(static_cast<std::size_t>(i) * (grid.size() - 1) / 8);
        const double lhs = trace_of(pullback_trace(TraceMeasure::dirac(grid, t), lam), pa);
        const double rhs = normalized_trace(alpha_t_phi(c.p, a, t)).real();
        if (std::abs(lhs - rhs) > worst || !worst_t) {
          worst = std::max(worst, std::abs(lhs - rhs));
          worst_t = t;
        }
      }
    }
    out.report.add("pulled-back Dirac trace = trace of connecting map", worst, tol, worst_t);
    out.results["lambda_entries"] = lam.entry_count().str();
  }
  return out;
}

inline SuiteResult run_simplicity(const SuiteConfig& c) {
  const SimplicityResult s = simplicity_witness(BigInt(c.p), c.eps, c.steps);
  SuiteResult out;
  out.report = s.report;
  out.report.add_flag("criterion 1/q < eps/4^n", s.criterion);
  out.results["q"] = s.q_steps.str();
  out.results["slope"] = to_string(s.ramp.slope);
  out.results["offset"] = to_string(s.ramp.offset);
  out.results["criterion_value"] = fraction_json(s.criterion_value);
  out.results["covering_radius"] = fraction_json(s.covering_radius);
  out.results["bound"] = s.bound;
  return out;
}

}  // namespace detail

/// Runs the configured suite. Throws DomainError for an invalid config and
/// ResourceError when a numeric stage is too large.
inline SuiteResult run_suite(const SuiteConfig& c) {
  validate_config(c);
  if (c.command == "verify") return detail::run_verify(c);
  if (c.command == "traces") return detail::run_traces(c);
  if (c.command == "simplicity") return detail::run_simplicity(c);
  throw DomainError("run_suite: '" + c.command + "' produces no report");
}

/// {"schema", "command", "suite", "config", "seed", "relations", "results",
/// "pass", "failures"}. No timings, so identical configs give identical bytes.
inline Json bundle_json(const SuiteConfig& c, const SuiteResult& r) {
  Json out;
  out["schema"] = kSchemaVersion;
  out["command"] = c.command;
  out["suite"] = c.suite;
  out["config"] = config_json(c);
  out["seed"] = c.seed;
  out["relations"] = r.report.to_json();
  out["results"] = r.results;
  out["pass"] = r.report.all_pass();
  Json failures = Json::array();
  for (const auto& f : r.report.failures()) failures.push_back(f);
  out["failures"] = std::move(failures);
  return out;
}

/// Plot data: one row per grid point, one column per relation that kept its
/// per-fibre residuals. Empty when no relation has a curve.
inline std::string curves_csv(const RelationReport& report, const GridSpec& grid) {
  std::vector<const RelationResult*> cols;
  for (const auto& e : report.entries())
    if (e.curve.size() == grid.size()) cols.push_back(&e);
  if (cols.empty()) return {};
  std::ostringstream os;
  os << "t";
  for (const auto* e : cols) {
    std::string quoted;
    for (char ch : e->name) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    os << ",\"" << quoted << '"';
  }
  os << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << detail::format_double(grid.t(j));
    for (const auto* e : cols) os << ',' << detail::format_double(e->curve[j]);
    os << '\n';
  }
  return os.str();
}

/// Named witness elements for external cross-checking.
inline std::vector<std::pair<std::string, MatFun>> export_witness(const SuiteConfig& c) {
  validate_config(c);
  const GridSpec grid(c.grid);
  const Mat e11 = matrix_unit(2, 0, 0);
  const Mat e22 = matrix_unit(2, 1, 1);
  std::vector<std::pair<std::string, MatFun>> out;
  auto add_maps = [&](const OrderZeroMap& phi, const OrderZeroMap& psi) {
    out.emplace_back("phi_1", phi.unit());
    out.emplace_back("phi_e11", phi.image(matrix_unit(c.n, 0, 0)));
    out.emplace_back("psi_e11", psi.image(e11));
    out.emplace_back("psi_e22", psi.image(e22));
  };
  if (c.suite == "alt1") {
    const Alt1Witness a = alt1_witness(c.n, grid);
    add_maps(a.phi, a.psi);
    out.emplace_back("h", a.h);
    out.emplace_back("v", a.w);
  } else {
    const Witness w = c.suite == "z" ? z_witness(c.n, grid) : w_witness(c.n, grid);
    add_maps(w.phi, w.psi);
    out.emplace_back("v", w.v);
  }
  return out;
}

}  // namespace ozcheck
