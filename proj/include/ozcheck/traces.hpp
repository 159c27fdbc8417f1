#pragma once

// Tracial states on building blocks as grid measures against the normalized
// fibre trace, their pullback along connecting maps, the trace-collapse bound,
// boundedness of the degenerate corner in the W-tower, and the simplicity
// witness built from the iterated ramp h^(n).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ozcheck/connector.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

/// Weights w_j >= 0 on the grid points t_j with Σ w_j = 1.
class TraceMeasure {
 public:
  TraceMeasure(GridSpec grid, std::vector<double> weights) : grid_(grid), weights_(std::move(weights)) {
    if (weights_.size() != grid_.size()) throw StructuralError("TraceMeasure: weight count does not match grid");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw DomainError("TraceMeasure: negative weight " + std::to_string(w));
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-14 * static_cast<double>(weights_.size()))
      throw DomainError("TraceMeasure: total mass " + std::to_string(total));
  }

  /// Point mass at t; an off-grid t is split linearly between its neighbours.
  static TraceMeasure dirac(GridSpec grid, double t) {
    std::vector<double> w(grid.size(), 0.0);
    deposit(grid, w, t, 1.0);
    return TraceMeasure(grid, std::move(w));
  }

  /// Lebesgue measure by the trapezoid rule, exact on functions linear in t.
  static TraceMeasure uniform(GridSpec grid) {
    const double h = 1.0 / static_cast<double>(grid.size() - 1);
    std::vector<double> w(grid.size(), h);
    w.front() = w.back() = h / 2;
    return TraceMeasure(grid, std::move(w));
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] double total_mass() const {
    double total = 0.0;
    for (double w : weights_) total += w;
    return total;
  }

  /// Adds mass at t to w, split linearly between the neighbouring grid points.
  static void deposit(const GridSpec& grid, std::vector<double>& w, double t, double mass) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("TraceMeasure: atom outside [0,1]");
    const double pos = t * static_cast<double>(grid.size() - 1);
    const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), grid.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    w[lo] += mass * (1.0 - frac);
    w[lo + 1] += mass * frac;
  }

 private:
  GridSpec grid_;
  std::vector<double> weights_;
};

/// Σ_j w_j tr(x(t_j)) with tr the normalized trace.
inline Cplx trace_of_complex(const TraceMeasure& mu, const MatFun& x) {
  if (!(mu.grid() == x.grid())) throw StructuralError("trace_of: measure and function live on different grids");
  Cplx total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (mu.weights()[j] != 0.0) total += mu.weights()[j] * normalized_trace(x[j]);
  return total;
}

/// Real part of the trace. For self-adjoint x the imaginary part is roundoff
/// and must stay below 1e-12.
inline double trace_of(const TraceMeasure& mu, const MatFun& x) {
  const Cplx v = trace_of_complex(mu, x);
  if (std::abs(v.imag()) > 1e-12) {
    bool self_adjoint = true;
    for (std::size_t j = 0; j < x.size() && self_adjoint; ++j) self_adjoint = is_hermitian(x[j], 1e-12);
    if (self_adjoint) throw std::logic_error("trace_of: imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

/// (1/|Λ|) Σ_{F ∈ Λ} F_*ν. Equal weights per entry: every summand of the
/// fibrewise decomposition has the same fibre dimension.
inline TraceMeasure pullback_trace(const TraceMeasure& nu, const ConnectorSymbolic& lambda) {
  const GridSpec& grid = nu.grid();
  const double total = lambda.entry_count().convert_to<double>();
  std::vector<double> w(grid.size(), 0.0);
  for (const auto& e : lambda.entries()) {
    const double share = e.multiplicity.convert_to<double>() / total;
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (nu.weights()[j] != 0.0) TraceMeasure::deposit(grid, w, e.fn(grid.t(j)), nu.weights()[j] * share);
  }
  // Renormalize away summation roundoff; the mass is 1 to ~1e-15.
  double mass = 0.0;
  for (double x : w) mass += x;
  for (double& x : w) x /= mass;
  return TraceMeasure(grid, std::move(w));
}

/// Levels q_j = q^(3^j), j = 0..steps-1.
inline std::vector<BigInt> tower_levels(const BigInt& q, unsigned steps) {
  std::vector<BigInt> out;
  BigInt level = q;
  for (unsigned j = 0; j < steps; ++j) {
    out.push_back(level);
    level = level * level * level;
  }
  return out;
}

/// Π_j 1/(q_j² - q_j + 1) over the first `steps` levels.
inline Rational proportion_product(const BigInt& q, unsigned steps) {
  Rational p = 1;
  for (const auto& qj : tower_levels(q, steps)) p /= Rational(qj * qj - qj + 1);
  return p;
}

struct CollapseResult {
  double sup_difference = 0.0;  // max over Dirac pairs |τ_1(b) - τ_2(b)|
  double argmax_t = 0.0;
  double argmin_t = 0.0;
  double b_norm = 0.0;
  Rational factor;  // Π 1/(q_j² - q_j + 1)
  double bound = 0.0;  // 2‖b‖·factor
  double ratio = 0.0;  // sup_difference / bound (0 when the bound is 0)
  RelationReport report;
};

/// Pulls every Dirac measure on b's grid back `steps` levels and measures the
/// spread of the resulting traces of b. The sup over pairs of grid points is
/// max - min of t -> τ_t(b).
inline CollapseResult collapse_check(const BigInt& q, unsigned steps, const MatFun& b,
                                     std::size_t budget = kConnectorBudget) {
  const ConnectorSymbolic lambda = connector_symbolic(q, steps, budget);
  const GridSpec& grid = b.grid();
  std::vector<double> tr(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) tr[j] = normalized_trace(b[j]).real();
  auto trace_at = [&](double s) {
    const double pos = s * static_cast<double>(grid.size() - 1);
    const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), grid.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    return (1.0 - frac) * tr[lo] + frac * tr[lo + 1];
  };
  const double total = lambda.entry_count().convert_to<double>();
  std::vector<double> value(grid.size(), 0.0);
  for (const auto& e : lambda.entries()) {
    const double share = e.multiplicity.convert_to<double>() / total;
    for (std::size_t j = 0; j < grid.size(); ++j) value[j] += share * trace_at(e.fn(grid.t(j)));
  }
  const auto [mn, mx] = std::minmax_element(value.begin(), value.end());

  CollapseResult out;
  out.sup_difference = *mx - *mn;
  out.argmax_t = grid.t(static_cast<std::size_t>(mx - value.begin()));
  out.argmin_t = grid.t(static_cast<std::size_t>(mn - value.begin()));
  out.b_norm = sup_norm(b);
  out.factor = proportion_product(q, steps);
  out.bound = 2.0 * out.b_norm * to_double(out.factor);
  out.ratio = out.bound > 0 ? out.sup_difference / out.bound : 0.0;
  out.report.add("sup |tau_1(b) - tau_2(b)| <= 2 ||b|| prod 1/(q_j^2 - q_j + 1)", out.sup_difference,
                 out.bound + 1e-12, out.argmax_t);
  return out;
}

struct BoundednessResult {
  std::vector<BigInt> levels;
  std::vector<Rational> partial_products;
  RelationReport report;
};

/// Fraction of fibre dimension through which the degenerate corner of the
/// W-tower propagates: partial products of 1/(q_j² - q_j + 1). Cross-checked
/// against the symbolic connector's non-constant fraction up to
/// `symbolic_steps` stages.
inline BoundednessResult w_boundedness_check(const BigInt& q, unsigned steps, unsigned symbolic_steps = 2) {
  if (steps == 0) throw DomainError("w_boundedness_check needs steps >= 1");
  BoundednessResult out;
  out.levels = tower_levels(q, steps);
  for (unsigned k = 1; k <= steps; ++k) out.partial_products.push_back(proportion_product(q, k));
  bool decreasing = out.partial_products.front() < 1;
  for (std::size_t k = 1; k < out.partial_products.size(); ++k)
    decreasing = decreasing && out.partial_products[k] < out.partial_products[k - 1];
  out.report.add_flag("partial products strictly decreasing", decreasing);
  // Summability: each factor is at most 1/3, so the products are dominated by 3^-k.
  bool geometric = true;
  for (std::size_t k = 0; k < out.partial_products.size(); ++k)
    geometric = geometric && out.partial_products[k] * pow(BigInt(3), static_cast<unsigned>(k + 1)) <= 1;
  out.report.add_flag("partial products <= 3^-k", geometric);
  for (unsigned k = 1; k <= std::min(steps, symbolic_steps); ++k) {
    const Rational symbolic = connector_symbolic(q, k).nonconstant_fraction();
    out.report.add_flag("symbolic non-constant fraction at step " + std::to_string(k),
                        symbolic == out.partial_products[k - 1]);
  }
  return out;
}

struct SimplicityResult {
  BigInt q_steps;
  RampForm ramp;
  Rational criterion_value;  // 4^steps / q_steps
  bool criterion = false;    // 1/q_steps < ε/4^steps
  Rational covering_radius;  // largest gap of P ∪ {0,1}
  double bound = 0.0;        // max(ε, 4^steps/q_steps)
  RelationReport report;
};

/// Largest gap of {fn(i/Q) : 1 <= i <= Q-1} ∪ {0, 1} for a clamp ramp fn,
/// computed from the ramp's arithmetic progression without enumerating i.
inline Rational ramp_covering_radius(const RampForm& r, const BigInt& Q) {
  // fn(i/Q) lies strictly inside (0,1) iff offset·Q/slope < i < (offset+1)·Q/slope.
  const Rational lo = r.offset * Rational(Q) / r.slope;
  const Rational hi = (r.offset + 1) * Rational(Q) / r.slope;
  BigInt i_lo = numerator(lo) / denominator(lo) + 1;  // floor(lo) + 1, lo >= 0
  BigInt hi_floor = numerator(hi) / denominator(hi);
  BigInt i_hi = denominator(hi) == 1 ? hi_floor - 1 : hi_floor;
  i_lo = std::max(i_lo, BigInt(1));
  i_hi = std::min(i_hi, BigInt(Q - 1));
  if (i_lo > i_hi) return 1;
  auto value = [&](const BigInt& i) { return r.slope * Rational(i, Q) - r.offset; };
  Rational gap = std::max(Rational(value(i_lo)), Rational(1 - value(i_hi)));
  if (i_hi > i_lo) gap = std::max(gap, Rational(r.slope / Rational(Q)));
  return gap;
}

/// Offsets l_n of h^(n) = clamp(4^n t - l_n) for n = 1..max_n.
inline std::vector<Rational> ramp_offsets(unsigned max_n) {
  std::vector<Rational> out;
  PLFunc it = shapes::h();
  for (unsigned n = 1; n <= max_n; ++n) {
    if (n > 1) it = compose(shapes::h(), it);
    out.push_back(ramp_form(it).offset);
  }
  return out;
}

inline SimplicityResult simplicity_witness(const BigInt& q0, double eps, unsigned steps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("simplicity_witness needs 0 < eps < 1");
  if (steps == 0) throw DomainError("simplicity_witness needs steps >= 1");
  if (q0 < 2) throw DomainError("simplicity_witness needs q0 >= 2");
  SimplicityResult out;
  unsigned e = 1;
  for (unsigned k = 0; k < steps; ++k) e *= 3;
  out.q_steps = pow(q0, e);
  out.ramp = ramp_form(shapes::h_iterate(steps));
  out.criterion_value = out.ramp.slope / Rational(out.q_steps);
  out.criterion = Rational(1) / Rational(out.q_steps) * out.ramp.slope < Rational(eps);
  out.covering_radius = ramp_covering_radius(out.ramp, out.q_steps);
  out.bound = std::max(eps, to_double(out.criterion_value));

  out.report.add_flag("slope = 4^n", out.ramp.slope == Rational(pow(BigInt(4), steps)));
  const auto offsets = ramp_offsets(std::max(steps, 6u));
  bool recursion = offsets.front() == 2;
  for (std::size_t k = 1; k < offsets.size(); ++k) recursion = recursion && offsets[k] == 4 * offsets[k - 1] + 2;
  out.report.add_flag("l_{n+1} = 4 l_n + 2", recursion);
  out.report.add_flag("1/q < eps/4^n", out.criterion);
  out.report.add("covering radius <= max(eps, 4^n/q)", to_double(out.covering_radius), out.bound);
  return out;
}

}  // namespace ozcheck
