#pragma once

// Exact verification of product identities a·b = b between piecewise-linear
// (and parabolically precomposed) profiles.
//
// Products of PL functions are not PL, so "a·b = b" is decided by the
// equivalent support/unit criterion: for b >= 0, a·b = b iff a == 1 on the
// closure of supp(b).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

struct ClosedInterval {
  Rational lo;
  Rational hi;
  bool operator==(const ClosedInterval&) const = default;
};

/// Finite union of closed intervals (points allowed), kept sorted and merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<ClosedInterval> parts) : parts_(parts) { normalize(); }

  void add(Rational lo, Rational hi) {
    if (hi < lo) std::swap(lo, hi);
    parts_.push_back({std::move(lo), std::move(hi)});
    normalize();
  }

  [[nodiscard]] const std::vector<ClosedInterval>& parts() const { return parts_; }
  [[nodiscard]] bool empty() const { return parts_.empty(); }

  [[nodiscard]] bool contains(const Rational& t) const {
    return std::any_of(parts_.begin(), parts_.end(),
                       [&](const auto& p) { return p.lo <= t && t <= p.hi; });
  }

  [[nodiscard]] bool contains(const ClosedInterval& iv) const {
    return std::any_of(parts_.begin(), parts_.end(),
                       [&](const auto& p) { return p.lo <= iv.lo && iv.hi <= p.hi; });
  }

  [[nodiscard]] bool contains(const IntervalSet& other) const {
    return std::all_of(other.parts_.begin(), other.parts_.end(),
                       [&](const auto& iv) { return contains(iv); });
  }

  [[nodiscard]] std::string to_string() const {
    std::string out;
    for (const auto& p : parts_) {
      if (!out.empty()) out += " u ";
      out += "[" + ozcheck::to_string(p.lo) + "," + ozcheck::to_string(p.hi) + "]";
    }
    return out.empty() ? "{}" : out;
  }

  bool operator==(const IntervalSet&) const = default;

 private:
  void normalize() {
    std::sort(parts_.begin(), parts_.end(),
              [](const auto& a, const auto& b) { return a.lo < b.lo; });
    std::vector<ClosedInterval> merged;
    for (auto& p : parts_) {
      if (!merged.empty() && p.lo <= merged.back().hi) {
        if (merged.back().hi < p.hi) merged.back().hi = p.hi;
      } else {
        merged.push_back(std::move(p));
      }
    }
    parts_ = std::move(merged);
  }

  std::vector<ClosedInterval> parts_;
};

/// Closure of {t : b(t) != 0}. A linear piece that is not identically zero
/// vanishes at most at one point, so its whole piece lies in the closure.
inline IntervalSet support_closure(const PLFunc& b) {
  IntervalSet out;
  const auto& p = b.breakpoints();
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    if (p[k].y != 0 || p[k + 1].y != 0) out.add(p[k].x, p[k + 1].x);
  return out;
}

/// {t : a(t) == 1}.
inline IntervalSet unit_set(const PLFunc& a) {
  IntervalSet out;
  const auto& p = a.breakpoints();
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const auto& l = p[k];
    const auto& r = p[k + 1];
    if (l.y == 1 && r.y == 1) {
      out.add(l.x, r.x);
    } else if (l.y == 1) {
      out.add(l.x, l.x);
    } else if (r.y == 1) {
      out.add(r.x, r.x);
    } else if ((l.y - 1) * (r.y - 1) < 0) {
      const Rational t = l.x + (1 - l.y) * (r.x - l.x) / (r.y - l.y);
      out.add(t, t);
    }
  }
  return out;
}

/// Closure of {t : 0 < f(t) < 1}, i.e. of supp(f - f^2), for f with values in [0,1].
inline IntervalSet fractional_support_closure(const PLFunc& fn) {
  if (fn.min_value() < 0 || fn.max_value() > 1)
    throw DomainError("fractional_support_closure needs values in [0,1]");
  IntervalSet out;
  const auto& p = fn.breakpoints();
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const auto& l = p[k];
    const auto& r = p[k + 1];
    if (l.y == r.y) {
      if (l.y != 0 && l.y != 1) out.add(l.x, r.x);
      continue;
    }
    // Preimage of [0,1] under the affine piece, intersected with the piece.
    auto preimage = [&](const Rational& level) {
      return l.x + (level - l.y) * (r.x - l.x) / (r.y - l.y);
    };
    Rational a = preimage(0);
    Rational b = preimage(1);
    if (b < a) std::swap(a, b);
    if (a < l.x) a = l.x;
    if (b > r.x) b = r.x;
    if (a < b) out.add(a, b);
  }
  return out;
}

/// {t in [0,1] : t(1-t) in s_set}. Exact when the boundary levels give
/// rational roots; otherwise DomainError.
inline IntervalSet parabolic_preimage(const IntervalSet& s_set) {
  const Rational quarter = make_rational(1, 4);
  auto roots = [&](const Rational& level) {
    auto disc = exact_sqrt(1 - 4 * level);
    if (!disc) throw DomainError("irrational preimage of level " + to_string(level));
    return std::pair<Rational, Rational>{(1 - *disc) / 2, (1 + *disc) / 2};
  };
  IntervalSet out;
  for (const auto& iv : s_set.parts()) {
    if (iv.lo > quarter || iv.hi < 0) continue;
    const Rational lo = iv.lo < 0 ? Rational(0) : iv.lo;
    const Rational hi = iv.hi > quarter ? quarter : iv.hi;
    const auto [lo_minus, lo_plus] = roots(lo);
    const auto [hi_minus, hi_plus] = roots(hi);
    out.add(lo_minus, hi_minus);
    out.add(hi_plus, lo_plus);
  }
  return out;
}

/// t -> outer(t(1-t)); not piecewise linear in general, but exact at
/// rational t and with an exactly computable unit set.
struct ParabolicComposite {
  PLFunc outer;

  [[nodiscard]] Rational operator()(const Rational& t) const { return outer(t * (1 - t)); }
  [[nodiscard]] double operator()(double t) const { return outer(t * (1.0 - t)); }
  [[nodiscard]] IntervalSet unit_set() const { return parabolic_preimage(ozcheck::unit_set(outer)); }
};

namespace shapes {
/// t -> d(t(1-t)).
inline ParabolicComposite d_hat() { return {d()}; }
}  // namespace shapes

/// Outcome of a dominance check a·b = b.
struct DominanceCheck {
  bool holds = false;
  IntervalSet unit_of_a;
  IntervalSet closure_supp_b;
  /// max |(a-1)·b| over a dyadic probe set; 0 when the identity holds.
  double residual = 0.0;
  std::optional<Rational> worst_t;
};

/// Decides a·b = b via the support/unit criterion. `a` and `b` are exact
/// evaluators used only to measure the violation when the criterion fails.
inline DominanceCheck check_dominance(IntervalSet unit_of_a, IntervalSet closure_supp_b,
                                      const std::function<Rational(const Rational&)>& a,
                                      const std::function<Rational(const Rational&)>& b) {
  DominanceCheck out;
  out.holds = unit_of_a.contains(closure_supp_b);
  out.unit_of_a = std::move(unit_of_a);
  out.closure_supp_b = std::move(closure_supp_b);
  if (out.holds) return out;
  constexpr int probes = 4096;
  Rational worst_val = 0;
  for (int i = 0; i <= probes; ++i) {
    const Rational t = make_rational(i, probes);
    Rational v = (a(t) - 1) * b(t);
    if (v < 0) v = -v;
    if (v > worst_val) {
      worst_val = v;
      out.worst_t = t;
    }
  }
  out.residual = to_double(worst_val);
  if (!out.worst_t) {
    // Violation narrower than the probe spacing: report the first uncovered
    // piece of the support.
    for (const auto& iv : out.closure_supp_b.parts())
      if (!out.unit_of_a.contains(iv)) {
        out.worst_t = iv.lo;
        break;
      }
    out.residual = 1.0;
  }
  return out;
}

/// The six reference identities
///   g = f - h,  hf = h,  (1-f)d̄ = 1-f,  g d̄ = g,  (f-f²)d̂ = f-f²,  g d̂ = g,
/// decided exactly. Residuals are 0 on success.
inline RelationReport verify_pl_identities() {
  using namespace shapes;
  const PLFunc F = f();
  const PLFunc G = g();
  const PLFunc H = h();
  const PLFunc DB = d_bar();
  const ParabolicComposite DH = d_hat();
  const PLFunc one_minus_f = PLFunc::constant(1) - F;

  RelationReport report;

  {
    const PLFunc diff = F - H;
    double worst = 0.0;
    std::optional<double> where;
    for (const auto& x : detail::merged_abscissas(G, diff)) {
      const double dev = to_double(G(x) - diff(x));
      if (std::abs(dev) > worst) {
        worst = std::abs(dev);
        where = to_double(x);
      }
    }
    report.add("g = f - h", G == diff ? 0.0 : worst, 0.0, where);
  }

  auto pl = [](const PLFunc& fn) {
    return std::function<Rational(const Rational&)>([fn](const Rational& t) { return fn(t); });
  };
  auto add = [&](const std::string& name, DominanceCheck c) {
    std::optional<double> where;
    if (c.worst_t) where = to_double(*c.worst_t);
    report.add(name, c.holds ? 0.0 : c.residual, 0.0, where);
  };

  add("hf = h", check_dominance(unit_set(F), support_closure(H), pl(F), pl(H)));
  add("(1-f)dbar = 1-f",
      check_dominance(unit_set(DB), support_closure(one_minus_f), pl(DB), pl(one_minus_f)));
  add("g dbar = g", check_dominance(unit_set(DB), support_closure(G), pl(DB), pl(G)));
  add("(f-f^2)dhat = f-f^2",
      check_dominance(DH.unit_set(), fractional_support_closure(F),
                      [DH](const Rational& t) { return DH(t); },
                      [F](const Rational& t) {
                        const Rational v = F(t);
                        return v - v * v;
                      }));
  add("g dhat = g", check_dominance(DH.unit_set(), support_closure(G),
                                    [DH](const Rational& t) { return DH(t); }, pl(G)));
  return report;
}

}  // namespace ozcheck
