#pragma once

// Matrix-valued functions on [0,1], sampled on a uniform grid that always
// contains both endpoints, with optional building-block boundary conditions.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ozcheck/linalg.hpp"
#include "ozcheck/plfun.hpp"

namespace ozcheck {

inline constexpr std::size_t kDefaultGrid = 257;

/// Uniform grid t_j = j/(M-1), j = 0..M-1.
class GridSpec {
 public:
  explicit GridSpec(std::size_t sample_count = kDefaultGrid) : count_(sample_count) {
    if (count_ < 2) throw DomainError("grid needs at least 2 samples");
  }
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] double t(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(count_ - 1);
  }
  [[nodiscard]] Rational exact_t(std::size_t j) const {
    return Rational(BigInt(j), BigInt(count_ - 1));
  }
  /// Index of a grid point equal to t (within 1e-12), if any.
  [[nodiscard]] std::optional<std::size_t> index_of(double t) const {
    const double pos = t * static_cast<double>(count_ - 1);
    const double r = std::round(pos);
    if (r < 0 || r > static_cast<double>(count_ - 1) || std::abs(pos - r) > 1e-9) return std::nullopt;
    return static_cast<std::size_t>(r);
  }
  bool operator==(const GridSpec&) const = default;

 private:
  std::size_t count_;
};

struct ZBlock {
  std::size_t p;
  std::size_t q;
  bool operator==(const ZBlock&) const = default;
};
struct WBlock {
  std::size_t n;
  std::size_t m;
  bool operator==(const WBlock&) const = default;
};

/// Building-block membership: Z(p,q) dimension-drop fibres (f(0) in M_p⊗1,
/// f(1) in 1⊗M_q), W(n,m) fibres (f(0) = a⊗1_m, f(1) = a⊗1_{m-1} in the
/// leading corner, same a), or unconstrained.
class BlockSpec {
 public:
  BlockSpec() = default;

  static BlockSpec z(std::size_t p, std::size_t q) {
    if (p == 0 || q == 0) throw StructuralError("Z block needs p, q >= 1");
    if (std::gcd(p, q) != 1)
      throw StructuralError("Z(" + std::to_string(p) + "," + std::to_string(q) + "): p and q must be coprime");
    BlockSpec b;
    b.kind_ = ZBlock{p, q};
    return b;
  }
  static BlockSpec w(std::size_t n, std::size_t m) {
    if (n == 0 || m <= 1) throw StructuralError("W block needs n >= 1 and m > 1");
    BlockSpec b;
    b.kind_ = WBlock{n, m};
    return b;
  }

  [[nodiscard]] bool present() const { return !std::holds_alternative<std::monostate>(kind_); }
  [[nodiscard]] const ZBlock* as_z() const { return std::get_if<ZBlock>(&kind_); }
  [[nodiscard]] const WBlock* as_w() const { return std::get_if<WBlock>(&kind_); }

  [[nodiscard]] std::optional<std::size_t> dimension() const {
    if (auto* z = as_z()) return z->p * z->q;
    if (auto* w = as_w()) return w->n * w->m;
    return std::nullopt;
  }

  [[nodiscard]] std::string to_string() const {
    if (auto* z = as_z()) return "Z(" + std::to_string(z->p) + "," + std::to_string(z->q) + ")";
    if (auto* w = as_w()) return "W(" + std::to_string(w->n) + "," + std::to_string(w->m) + ")";
    return "none";
  }

  bool operator==(const BlockSpec&) const = default;

 private:
  std::variant<std::monostate, ZBlock, WBlock> kind_;
};

/// Grid-sampled D×D complex matrix-valued function. Immutable after
/// construction.
class MatFun {
 public:
  MatFun(GridSpec grid, std::vector<Mat> samples, BlockSpec block = {})
      : grid_(grid), samples_(std::move(samples)), block_(std::move(block)) {
    if (samples_.size() != grid_.size())
      throw StructuralError("MatFun: " + std::to_string(samples_.size()) + " samples for a grid of " +
                            std::to_string(grid_.size()));
    const Eigen::Index d = samples_.front().rows();
    for (const auto& s : samples_)
      if (s.rows() != d || s.cols() != d) throw StructuralError("MatFun samples must be square of equal size");
    if (auto bd = block_.dimension(); bd && *bd != static_cast<std::size_t>(d))
      throw StructuralError("MatFun fibre dimension " + std::to_string(d) + " does not match block " +
                            block_.to_string());
  }

  /// Samples fn(t_j) (in parallel; fn must be thread-safe).
  template <class Fn>
  static MatFun sample(GridSpec grid, Fn&& fn, BlockSpec block = {}) {
    std::vector<Mat> samples(grid.size());
    parallel_for(grid.size(), [&](std::size_t j) { samples[j] = fn(grid.t(j)); });
    return MatFun(grid, std::move(samples), std::move(block));
  }

  /// Builds fibres from their grid index.
  template <class Fn>
  static MatFun from_index(GridSpec grid, Fn&& fn, BlockSpec block = {}) {
    std::vector<Mat> samples(grid.size());
    parallel_for(grid.size(), [&](std::size_t j) { samples[j] = fn(j); });
    return MatFun(grid, std::move(samples), std::move(block));
  }

  static MatFun constant(GridSpec grid, const Mat& value, BlockSpec block = {}) {
    return MatFun(grid, std::vector<Mat>(grid.size(), value), std::move(block));
  }

  static MatFun identity(GridSpec grid, std::size_t dim, BlockSpec block = {}) {
    return constant(grid, ozcheck::identity(dim), std::move(block));
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const BlockSpec& block() const { return block_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(samples_.front().rows()); }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] const Mat& operator[](std::size_t j) const { return samples_[j]; }
  [[nodiscard]] const std::vector<Mat>& samples() const { return samples_; }
  [[nodiscard]] double t(std::size_t j) const { return grid_.t(j); }

  [[nodiscard]] MatFun with_block(BlockSpec block) const { return MatFun(grid_, samples_, std::move(block)); }

  [[nodiscard]] MatFun adjoint() const {
    std::vector<Mat> out(samples_.size());
    for (std::size_t j = 0; j < samples_.size(); ++j) out[j] = samples_[j].adjoint();
    return MatFun(grid_, std::move(out), block_);
  }

  /// Fibrewise map of the samples.
  template <class Fn>
  [[nodiscard]] MatFun map(Fn&& fn, BlockSpec block = {}) const {
    std::vector<Mat> out(samples_.size());
    parallel_for(samples_.size(), [&](std::size_t j) { out[j] = fn(samples_[j]); });
    return MatFun(grid_, std::move(out), std::move(block));
  }

 private:
  GridSpec grid_;
  std::vector<Mat> samples_;
  BlockSpec block_;
};

namespace detail {

inline void require_compatible(const MatFun& x, const MatFun& y, const char* op) {
  if (!(x.grid() == y.grid()))
    throw StructuralError(std::string(op) + ": grid mismatch (" + std::to_string(x.grid().size()) + " vs " +
                          std::to_string(y.grid().size()) + ")");
  if (x.dim() != y.dim())
    throw StructuralError(std::string(op) + ": dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                          std::to_string(y.dim()) + ")");
}

inline BlockSpec common_block(const MatFun& x, const MatFun& y) {
  return x.block() == y.block() ? x.block() : BlockSpec{};
}

template <class Op>
MatFun zip(const MatFun& x, const MatFun& y, const char* name, Op op) {
  require_compatible(x, y, name);
  std::vector<Mat> out(x.size());
  parallel_for(x.size(), [&](std::size_t j) { out[j] = op(x[j], y[j]); });
  return MatFun(x.grid(), std::move(out), common_block(x, y));
}

}  // namespace detail

inline MatFun operator+(const MatFun& x, const MatFun& y) {
  return detail::zip(x, y, "add", [](const Mat& a, const Mat& b) -> Mat { return a + b; });
}
inline MatFun operator-(const MatFun& x, const MatFun& y) {
  return detail::zip(x, y, "subtract", [](const Mat& a, const Mat& b) -> Mat { return a - b; });
}
inline MatFun operator*(const MatFun& x, const MatFun& y) {
  return detail::zip(x, y, "multiply", [](const Mat& a, const Mat& b) -> Mat { return a * b; });
}
inline MatFun operator*(Cplx c, const MatFun& x) {
  return x.map([c](const Mat& a) -> Mat { return c * a; }, x.block());
}
inline MatFun operator*(double c, const MatFun& x) { return Cplx(c, 0.0) * x; }

/// Fibrewise xy - yx.
inline MatFun commutator(const MatFun& x, const MatFun& y) {
  return detail::zip(x, y, "commutator", [](const Mat& a, const Mat& b) -> Mat { return a * b - b * a; });
}

/// Fibrewise scalar multiplication by a real function of t.
template <class Fn>
MatFun scale_by(const MatFun& x, Fn&& fn) {
  return MatFun::from_index(x.grid(), [&](std::size_t j) -> Mat { return fn(x.t(j)) * x[j]; }, x.block());
}

struct FibreMax {
  double value = 0.0;
  std::size_t index = 0;
  double t = 0.0;
};

/// Maximum over fibres of a per-fibre quantity; ties resolve to the lowest
/// index so the reduction is order independent.
template <class Fn>
FibreMax fibre_max(const GridSpec& grid, Fn&& per_fibre) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { values[j] = per_fibre(j); });
  FibreMax out;
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (std::isnan(values[j])) return {values[j], j, grid.t(j)};
    if (values[j] > out.value) {
      out.value = values[j];
      out.index = j;
    }
  }
  out.t = grid.t(out.index);
  return out;
}

/// max_j ||x(t_j)|| with the location of the maximum.
inline FibreMax sup_norm_at(const MatFun& x) {
  return fibre_max(x.grid(), [&](std::size_t j) { return op_norm(x[j]); });
}

inline double sup_norm(const MatFun& x) { return sup_norm_at(x).value; }

/// Partial traces on C^p ⊗ C^q (index i*q + k).
inline Mat partial_trace_second(const Mat& x, std::size_t p, std::size_t q) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < q; ++k)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            x(static_cast<Eigen::Index>(i * q + k), static_cast<Eigen::Index>(j * q + k));
  return out;
}
inline Mat partial_trace_first(const Mat& x, std::size_t p, std::size_t q) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = 0; l < q; ++l)
      for (std::size_t i = 0; i < p; ++i)
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) +=
            x(static_cast<Eigen::Index>(i * q + k), static_cast<Eigen::Index>(i * q + l));
  return out;
}

/// Projection onto the first `keep` basis vectors of C^m.
inline Mat corner_projection(std::size_t m, std::size_t keep) {
  Mat p = Mat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < keep; ++k) p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return p;
}

/// Distance of the endpoint fibres from the block's boundary subspaces. The
/// nearest point is taken by Hilbert-Schmidt orthogonal projection and the
/// distance reported in operator norm (an upper bound, within a factor 2, of
/// the operator-norm distance).
inline double membership_residual(const MatFun& x) {
  const Mat& x0 = x[0];
  const Mat& x1 = x[x.size() - 1];
  if (const auto* z = x.block().as_z()) {
    const Mat a = partial_trace_second(x0, z->p, z->q) / static_cast<double>(z->q);
    const Mat b = partial_trace_first(x1, z->p, z->q) / static_cast<double>(z->p);
    const double d0 = op_norm(x0 - kron(a, identity(z->q)));
    const double d1 = op_norm(x1 - kron(identity(z->p), b));
    return std::max(d0, d1);
  }
  if (const auto* w = x.block().as_w()) {
    const Mat corner = corner_projection(w->m, w->m - 1);
    const Mat cut = kron(identity(w->n), corner);
    const Mat a = (partial_trace_second(x0, w->n, w->m) + partial_trace_second(cut * x1 * cut, w->n, w->m)) /
                  static_cast<double>(2 * w->m - 1);
    const double d0 = op_norm(x0 - kron(a, identity(w->m)));
    const double d1 = op_norm(x1 - kron(a, corner));
    return std::max(d0, d1);
  }
  throw StructuralError("membership_residual: MatFun has no block spec");
}

/// Fibrewise continuous functional calculus fn(x) for self-adjoint x with
/// spectrum in [0, upper] up to tol. Eigenvalues slightly outside the range
/// (within tol) are clamped onto it.
template <class Fn>
  requires(!std::same_as<std::remove_cvref_t<Fn>, PLFunc>)
MatFun scalar_calc(const MatFun& x, Fn&& fn, double tol = 1e-10,
                   double upper = std::numeric_limits<double>::infinity()) {
  return MatFun::from_index(
      x.grid(),
      [&](std::size_t j) -> Mat {
        const Mat& m = x[j];
        if (!is_hermitian(m, 1e-9))
          throw DomainError("scalar_calc: fibre at t=" + std::to_string(x.t(j)) + " is not self-adjoint");
        return hermitian_calculus(m, [&](double v) {
          if (v < -tol)
            throw PositivityError("scalar_calc: eigenvalue " + std::to_string(v) + " at t=" + std::to_string(x.t(j)));
          if (v > upper + tol)
            throw DomainError("scalar_calc: eigenvalue " + std::to_string(v) + " above " + std::to_string(upper));
          return static_cast<double>(fn(std::clamp(v, 0.0, upper)));
        });
      },
      x.block());
}

inline MatFun scalar_calc(const MatFun& x, const PLFunc& f, double tol = 1e-10) {
  return scalar_calc(x, [&f](double v) { return f(v); }, tol, 1.0);
}

/// Fibrewise positive square root.
inline MatFun sqrt_calc(const MatFun& x, double tol = 1e-10) {
  return scalar_calc(x, [](double v) { return std::sqrt(v); }, tol);
}

/// Tensor flip F(ξ⊗η) = η⊗ξ on C^q ⊗ C^q.
inline Mat flip_matrix(std::size_t q) {
  const auto n = static_cast<Eigen::Index>(q);
  Mat f = Mat::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) f(j * n + i, i * n + j) = 1.0;
  return f;
}

/// u(t) = P_sym + e^{iπt} P_asym: a unitary path from 1 to the flip.
inline Mat flip_unitary(std::size_t q, double t) {
  const Mat f = flip_matrix(q);
  const Mat one = identity(q * q);
  const Mat sym = 0.5 * (one + f);
  const Mat asym = 0.5 * (one - f);
  const Cplx phase = std::polar(1.0, std::numbers::pi * t);
  Mat u = sym + phase * asym;
  if (t == 1.0) u = f;  // endpoint exactly the flip
  return u;
}

inline MatFun flip_path(std::size_t q, GridSpec grid = GridSpec{}) {
  if (q < 2) throw DomainError("flip_path requires q >= 2");
  return MatFun::sample(grid, [q](double t) { return flip_unitary(q, t); });
}

}  // namespace ozcheck
