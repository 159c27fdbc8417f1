#pragma once

// Exact piecewise-linear functions on [0,1].

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/errors.hpp"
#include "ozcheck/rational.hpp"

namespace ozcheck {

struct Breakpoint {
  Rational x;
  Rational y;
  bool operator==(const Breakpoint&) const = default;
};

/// Continuous piecewise-linear function on [0,1], stored by its breakpoints
/// with exact rational coordinates. Always kept in canonical form: abscissas
/// strictly increasing from 0 to 1 and no redundant collinear breakpoints, so
/// two PLFuncs are equal as functions iff their breakpoint lists are equal.
class PLFunc {
 public:
  explicit PLFunc(std::vector<Breakpoint> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw DomainError("PLFunc needs at least two breakpoints");
    if (points_.front().x != 0 || points_.back().x != 1)
      throw DomainError("PLFunc breakpoints must start at 0 and end at 1");
    for (std::size_t k = 1; k < points_.size(); ++k)
      if (!(points_[k - 1].x < points_[k].x))
        throw DomainError("PLFunc abscissas must be strictly increasing");
    canonicalize();
    cache_doubles();
  }

  PLFunc(std::initializer_list<Breakpoint> points)
      : PLFunc(std::vector<Breakpoint>(points)) {}

  static PLFunc constant(const Rational& c) { return PLFunc({{0, c}, {1, c}}); }
  static PLFunc identity() { return PLFunc({{0, 0}, {1, 1}}); }

  [[nodiscard]] const std::vector<Breakpoint>& breakpoints() const { return points_; }

  [[nodiscard]] bool is_constant() const {
    return points_.size() == 2 && points_[0].y == points_[1].y;
  }

  [[nodiscard]] Rational min_value() const {
    return std::min_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.y < b.y; })
        ->y;
  }
  [[nodiscard]] Rational max_value() const {
    return std::max_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.y < b.y; })
        ->y;
  }

  /// Exact evaluation.
  [[nodiscard]] Rational operator()(const Rational& t) const {
    if (t < 0 || t > 1) throw DomainError("PLFunc evaluated outside [0,1]: " + to_string(t));
    const std::size_t k = piece_of(t);
    const auto& a = points_[k];
    const auto& b = points_[k + 1];
    return a.y + (t - a.x) * (b.y - a.y) / (b.x - a.x);
  }

  /// Floating evaluation; exact at breakpoints up to the double rounding of
  /// the breakpoint values themselves.
  [[nodiscard]] double operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
      throw DomainError("PLFunc evaluated outside [0,1]: " + std::to_string(t));
    auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
    std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (k + 1 >= xs_.size()) k = xs_.size() - 2;
    if (t == xs_[k]) return ys_[k];
    if (t == xs_[k + 1]) return ys_[k + 1];
    const double w = (t - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return ys_[k] + w * (ys_[k + 1] - ys_[k]);
  }
  [[nodiscard]] double operator()(int t) const { return (*this)(static_cast<double>(t)); }

  /// t -> f(1 - t).
  [[nodiscard]] PLFunc reflected() const {
    std::vector<Breakpoint> pts;
    pts.reserve(points_.size());
    for (auto it = points_.rbegin(); it != points_.rend(); ++it) pts.push_back({1 - it->x, it->y});
    return PLFunc(std::move(pts));
  }

  /// Slope of the linear piece containing (x_k, x_{k+1}).
  [[nodiscard]] Rational slope(std::size_t k) const {
    return (points_[k + 1].y - points_[k].y) / (points_[k + 1].x - points_[k].x);
  }

  /// Index k of the piece [x_k, x_{k+1}] containing t (leftmost for breakpoints
  /// other than 1).
  [[nodiscard]] std::size_t piece_of(const Rational& t) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](const Rational& v, const Breakpoint& p) { return v < p.x; });
    std::size_t k = it == points_.begin() ? 0 : static_cast<std::size_t>(it - points_.begin()) - 1;
    return std::min(k, points_.size() - 2);
  }

  bool operator==(const PLFunc& other) const { return points_ == other.points_; }

  /// Compact text key, e.g. "0:0,3/16:1,1:1".
  [[nodiscard]] std::string key() const {
    std::string out;
    for (const auto& p : points_) {
      if (!out.empty()) out += ',';
      out += to_string(p.x) + ':' + to_string(p.y);
    }
    return out;
  }

 private:
  void canonicalize() {
    std::vector<Breakpoint> kept;
    kept.reserve(points_.size());
    for (auto& p : points_) {
      while (kept.size() >= 2) {
        const auto& a = kept[kept.size() - 2];
        const auto& b = kept.back();
        if ((b.y - a.y) * (p.x - b.x) == (p.y - b.y) * (b.x - a.x))
          kept.pop_back();
        else
          break;
      }
      kept.push_back(std::move(p));
    }
    points_ = std::move(kept);
  }

  void cache_doubles() {
    xs_.clear();
    ys_.clear();
    for (const auto& p : points_) {
      xs_.push_back(to_double(p.x));
      ys_.push_back(to_double(p.y));
    }
  }

  std::vector<Breakpoint> points_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

namespace detail {

inline std::vector<Rational> merged_abscissas(const PLFunc& a, const PLFunc& b) {
  std::vector<Rational> xs;
  for (const auto& p : a.breakpoints()) xs.push_back(p.x);
  for (const auto& p : b.breakpoints()) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

template <class Op>
PLFunc combine(const PLFunc& a, const PLFunc& b, Op op) {
  std::vector<Breakpoint> pts;
  for (const auto& x : merged_abscissas(a, b)) pts.push_back({x, op(a(x), b(x))});
  return PLFunc(std::move(pts));
}

}  // namespace detail

inline PLFunc operator+(const PLFunc& a, const PLFunc& b) {
  return detail::combine(a, b, [](const Rational& u, const Rational& v) { return u + v; });
}
inline PLFunc operator-(const PLFunc& a, const PLFunc& b) {
  return detail::combine(a, b, [](const Rational& u, const Rational& v) { return u - v; });
}
// Constrained so that unrelated products (e.g. of Eigen matrices) found by
// lookup in this namespace never probe conversions to Rational.
template <class R>
  requires std::same_as<R, Rational>
PLFunc operator*(const R& c, const PLFunc& a) {
  std::vector<Breakpoint> pts;
  for (const auto& p : a.breakpoints()) pts.push_back({p.x, c * p.y});
  return PLFunc(std::move(pts));
}

/// Exact composite outer ∘ inner. The inner function must take values in [0,1];
/// out-of-range values are an error rather than being clipped.
inline PLFunc compose(const PLFunc& outer, const PLFunc& inner) {
  if (inner.min_value() < 0 || inner.max_value() > 1)
    throw DomainError("compose: inner function leaves [0,1]");
  const auto& in = inner.breakpoints();
  std::vector<Rational> ts;
  for (std::size_t k = 0; k + 1 < in.size(); ++k) {
    ts.push_back(in[k].x);
    const Rational& y0 = in[k].y;
    const Rational& y1 = in[k + 1].y;
    if (y0 == y1) continue;
    const Rational lo = y0 < y1 ? y0 : y1;
    const Rational hi = y0 < y1 ? y1 : y0;
    for (const auto& s : outer.breakpoints()) {
      if (s.x > lo && s.x < hi)
        ts.push_back(in[k].x + (s.x - y0) * (in[k + 1].x - in[k].x) / (y1 - y0));
    }
  }
  ts.push_back(1);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<Breakpoint> pts;
  pts.reserve(ts.size());
  for (const auto& t : ts) pts.push_back({t, outer(inner(t))});
  return PLFunc(std::move(pts));
}

/// f ∘ f ∘ ... ∘ f (n times); n = 0 gives the identity.
inline PLFunc iterate(const PLFunc& f, unsigned n) {
  PLFunc out = PLFunc::identity();
  for (unsigned k = 0; k < n; ++k) out = compose(f, out);
  return out;
}

/// The four reference profiles and their derived families.
namespace shapes {

/// Ramp 0 -> 1 on [0, 3/16], then 1.
inline PLFunc d() { return PLFunc({{0, 0}, {make_rational(3, 16), 1}, {1, 1}}); }

/// 0 on [0,1/4], ramp to 1 on [1/4,1/2], then 1.
inline PLFunc f() {
  return PLFunc({{0, 0}, {make_rational(1, 4), 0}, {make_rational(1, 2), 1}, {1, 1}});
}

/// Tent supported on [1/4,3/4] with peak 1 at 1/2.
inline PLFunc g() {
  return PLFunc({{0, 0},
                 {make_rational(1, 4), 0},
                 {make_rational(1, 2), 1},
                 {make_rational(3, 4), 0},
                 {1, 0}});
}

/// 0 on [0,1/2], ramp to 1 on [1/2,3/4], then 1.
inline PLFunc h() {
  return PLFunc({{0, 0}, {make_rational(1, 2), 0}, {make_rational(3, 4), 1}, {1, 1}});
}

/// t -> d(1 - t).
inline PLFunc d_bar() { return d().reflected(); }

/// t -> 1 - i f(1-t) / q, for 1 <= i <= q. h_indexed(q, q) == h().
inline PLFunc h_indexed(unsigned i, unsigned q) {
  if (q == 0 || i < 1 || i > q) throw DomainError("h_indexed requires 1 <= i <= q");
  return PLFunc::constant(1) - make_rational(i, q) * f().reflected();
}

/// n-fold iterate of h.
inline PLFunc h_iterate(unsigned n) { return iterate(h(), n); }

}  // namespace shapes

/// Clamp-shaped function t -> clamp(slope * t - offset, 0, 1).
struct RampForm {
  Rational slope;
  Rational offset;
};

/// Recovers slope and offset of a nondecreasing clamp ramp (0, then linear,
/// then 1). Throws DomainError for any other shape.
inline RampForm ramp_form(const PLFunc& fn) {
  const auto& p = fn.breakpoints();
  std::size_t ramp = p.size();
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (p[k].y == p[k + 1].y) {
      if (p[k].y != 0 && p[k].y != 1) throw DomainError("not a clamp ramp");
      continue;
    }
    if (ramp != p.size() || p[k].y != 0 || p[k + 1].y != 1) throw DomainError("not a clamp ramp");
    ramp = k;
  }
  if (ramp == p.size()) throw DomainError("constant function has no ramp");
  const Rational slope = fn.slope(ramp);
  return {slope, slope * p[ramp].x};
}

}  // namespace ozcheck
