#pragma once

// Completely positive contractive order zero maps M_n -> C([0,1], M_D),
// sampled on a grid, together with their supporting homomorphisms, the
// order zero functional calculus and the relation checkers.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/errors.hpp"
#include "ozcheck/linalg.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

/// Linear fibre evaluation b -> φ(b)(t_j).
using FibreMap = std::function<Mat(const Mat& b, std::size_t j)>;

/// An order zero map is held as a (lazy) linear fibre map rather than as the
/// n² sampled matrix-unit images, since images are needed on arbitrary
/// elements (ρ(a), v, 1 - ρ(1)) and the materialized form of a map on M_8 with
/// 72-dimensional fibres would not fit in memory.
class OrderZeroMap {
 public:
  OrderZeroMap(std::size_t n, GridSpec grid, std::size_t dim, FibreMap eval,
               std::optional<FibreMap> support = std::nullopt, BlockSpec block = {})
      : n_(n), grid_(grid), dim_(dim), eval_(std::move(eval)), support_(std::move(support)),
        block_(std::move(block)) {
    if (n_ == 0) throw StructuralError("OrderZeroMap: domain M_0");
    if (auto bd = block_.dimension(); bd && *bd != dim_)
      throw StructuralError("OrderZeroMap: fibre dimension does not match " + block_.to_string());
  }

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const BlockSpec& block() const { return block_; }
  [[nodiscard]] bool has_support() const { return support_.has_value(); }

  [[nodiscard]] Mat at(const Mat& b, std::size_t j) const {
    check_domain(b);
    return eval_(b, j);
  }

  [[nodiscard]] Mat support_at(const Mat& b, std::size_t j) const {
    if (!support_) throw PreconditionError("OrderZeroMap: no supporting homomorphism attached");
    check_domain(b);
    return (*support_)(b, j);
  }

  [[nodiscard]] MatFun image(const Mat& b) const {
    check_domain(b);
    return MatFun::from_index(grid_, [&](std::size_t j) { return eval_(b, j); }, block_);
  }
  [[nodiscard]] MatFun image(std::size_t i, std::size_t j) const { return image(matrix_unit(n_, i, j)); }
  [[nodiscard]] MatFun unit() const { return image(identity(n_)); }

  [[nodiscard]] MatFun support_image(const Mat& b) const {
    return MatFun::from_index(grid_, [&](std::size_t j) { return support_at(b, j); }, block_);
  }

  [[nodiscard]] OrderZeroMap with_support(FibreMap support) const {
    return OrderZeroMap(n_, grid_, dim_, eval_, std::move(support), block_);
  }
  [[nodiscard]] OrderZeroMap with_block(BlockSpec block) const {
    return OrderZeroMap(n_, grid_, dim_, eval_, support_, std::move(block));
  }

  [[nodiscard]] const FibreMap& fibre_map() const { return eval_; }
  [[nodiscard]] const std::optional<FibreMap>& support_map() const { return support_; }

 private:
  void check_domain(const Mat& b) const {
    if (static_cast<std::size_t>(b.rows()) != n_ || static_cast<std::size_t>(b.cols()) != n_)
      throw StructuralError("OrderZeroMap: argument is " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ", domain is M_" + std::to_string(n_));
  }

  std::size_t n_;
  GridSpec grid_;
  std::size_t dim_;
  FibreMap eval_;
  std::optional<FibreMap> support_;
  BlockSpec block_;
};

/// An order zero map that does not depend on t, e.g. ρ : M_n -> M_{n³}.
struct ConstantOrderZero {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::function<Mat(const Mat&)> eval;
  std::function<Mat(const Mat&)> support;

  Mat operator()(const Mat& a) const { return eval(a); }

  [[nodiscard]] OrderZeroMap on_grid(GridSpec grid) const {
    auto e = eval;
    auto s = support;
    return OrderZeroMap(
        n, grid, dim, [e](const Mat& b, std::size_t) { return e(b); },
        s ? std::optional<FibreMap>([s](const Mat& b, std::size_t) { return s(b); }) : std::nullopt);
  }
};

/// φ∘ρ. The supporting homomorphism is π_φ∘π_ρ.
inline OrderZeroMap compose(const OrderZeroMap& phi, const ConstantOrderZero& rho) {
  if (phi.n() != rho.dim) throw StructuralError("compose: inner map lands in M_" + std::to_string(rho.dim) +
                                                ", outer map is defined on M_" + std::to_string(phi.n()));
  FibreMap eval = [phi, rho](const Mat& a, std::size_t j) { return phi.at(rho(a), j); };
  std::optional<FibreMap> support;
  if (phi.has_support() && rho.support)
    support = [phi, rho](const Mat& a, std::size_t j) { return phi.support_at(rho.support(a), j); };
  return OrderZeroMap(rho.n, phi.grid(), phi.dim(), std::move(eval), std::move(support), phi.block());
}

namespace detail {

inline double signed_sqrt(double v) { return v >= 0 ? std::sqrt(v) : -std::sqrt(-v); }

/// Per-fibre residual vectors reduced to a report (max over fibres, lowest
/// index on ties).
template <class Fn>
RelationReport fibrewise_report(const GridSpec& grid, const std::vector<std::string>& names, double tol,
                                Fn&& per_fibre) {
  std::vector<std::vector<double>> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { values[j] = per_fibre(j); });
  RelationReport report;
  for (std::size_t k = 0; k < names.size(); ++k) {
    double worst = 0.0;
    std::optional<double> where;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double v = values[j].at(k);
      if (std::isnan(v)) {
        worst = v;
        where = grid.t(j);
        break;
      }
      if (v > worst) {
        worst = v;
        where = grid.t(j);
      }
    }
    std::vector<double> curve(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) curve[j] = values[j][k];
    report.add_curve(names[k], std::move(curve), worst, tol, where);
  }
  return report;
}

inline const std::vector<std::string>& cone_names() {
  static const std::vector<std::string> names{"||x_i|| <= 1", "x_1 >= 0", "x_i x_i* = x_1^2",
                                              "x_j* x_j x_i* x_i = 0"};
  return names;
}

/// Cone relations on one fibre: norm excess, positivity defect of x_1,
/// max ||x_i x_i* - x_1²||, max ||x_j*x_j x_i*x_i|| over i != j.
inline std::array<double, 4> cone_residuals(const std::vector<Mat>& x) {
  std::array<double, 4> r{0, 0, 0, 0};
  if (x.empty()) return r;
  const Mat x1sq = x[0] * x[0];
  for (const auto& xi : x) {
    const Mat xxs = xi * xi.adjoint();
    r[0] = std::max(r[0], std::sqrt(op_norm(xxs)) - 1.0);
    r[2] = std::max(r[2], op_norm(xxs - x1sq));
  }
  r[0] = std::max(r[0], 0.0);
  const Eigen::VectorXd ev = hermitian_eigenvalues(x[0]);
  r[1] = std::max(op_norm(x[0] - x[0].adjoint()), std::max(0.0, -ev(0)));
  std::vector<Mat> q;
  q.reserve(x.size());
  for (const auto& xi : x) q.push_back(xi.adjoint() * xi);
  // Both factors are hermitian, so ||Q_j Q_i|| = ||Q_i Q_j||.
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) r[3] = std::max(r[3], op_norm(q[j] * q[i]));
  return r;
}

}  // namespace detail

/// Cone generators x_i(t_j) = π(e_{1i})φ(1)^{1/2} on one fibre. Without an
/// attached support the equivalent φ(e_{1i})φ(1)^{-1/2} (inverse on the
/// support) is used. Negative eigenvalues of φ(1) are carried through with
/// sign so that the positivity residual sees them; eigenvalues below the
/// roundoff floor count as zero.
inline std::vector<Mat> cone_generators_at(const OrderZeroMap& phi, std::size_t j) {
  const Mat one = phi.at(identity(phi.n()), j);
  std::vector<Mat> x;
  x.reserve(phi.n());
  if (phi.has_support()) {
    // Eigenvalues within roundoff of zero would turn into ~1e-8 after the root.
    const double floor = kRoundoffFloor * std::max(1.0, op_norm(one));
    const Mat root =
        hermitian_calculus(one, [floor](double v) { return std::abs(v) <= floor ? 0.0 : detail::signed_sqrt(v); });
    for (std::size_t i = 0; i < phi.n(); ++i) x.push_back(phi.support_at(matrix_unit(phi.n(), 0, i), j) * root);
  } else {
    const Mat inv_root = hermitian_calculus(one, [](double v) { return v > kRankCutoff ? 1.0 / std::sqrt(v) : 0.0; });
    for (std::size_t i = 0; i < phi.n(); ++i) x.push_back(phi.at(matrix_unit(phi.n(), 0, i), j) * inv_root);
  }
  return x;
}

inline std::vector<MatFun> cone_generators(const OrderZeroMap& phi) {
  std::vector<std::vector<Mat>> per_fibre(phi.grid().size());
  parallel_for(per_fibre.size(), [&](std::size_t j) { per_fibre[j] = cone_generators_at(phi, j); });
  std::vector<MatFun> out;
  for (std::size_t i = 0; i < phi.n(); ++i) {
    std::vector<Mat> samples(per_fibre.size());
    for (std::size_t j = 0; j < per_fibre.size(); ++j) samples[j] = std::move(per_fibre[j][i]);
    out.emplace_back(phi.grid(), std::move(samples), phi.block());
  }
  return out;
}

/// Residuals of the cone relations for generators x_1..x_n.
inline RelationReport validate_cone(const std::vector<MatFun>& x, double tol = 1e-10) {
  if (x.empty()) return {};
  for (const auto& xi : x) detail::require_compatible(x.front(), xi, "validate_cone");
  return detail::fibrewise_report(x.front().grid(), detail::cone_names(), tol, [&](std::size_t j) {
    std::vector<Mat> fibre;
    fibre.reserve(x.size());
    for (const auto& xi : x) fibre.push_back(xi[j]);
    const auto r = detail::cone_residuals(fibre);
    return std::vector<double>(r.begin(), r.end());
  });
}

/// The order zero map on M_2 determined by a square-zero contraction v:
/// ψ(e11) = vv*, ψ(e22) = v*v, ψ(e12) = v|v|, with supporting homomorphism
/// built from the polar part w of v (π(e12) = w).
inline OrderZeroMap from_square_zero(const MatFun& v, double tol = 1e-10) {
  const FibreMax norm = sup_norm_at(v);
  if (norm.value > 1.0 + tol)
    throw ContractionError("from_square_zero: ||v|| = " + std::to_string(norm.value) + " at t=" +
                           std::to_string(norm.t));
  const FibreMax sq = fibre_max(v.grid(), [&](std::size_t j) { return op_norm(v[j] * v[j]); });
  if (sq.value > tol)
    throw NotSquareZeroError("from_square_zero: ||v^2|| = " + std::to_string(sq.value) + " at t=" +
                             std::to_string(sq.t));

  struct Data {
    std::vector<Mat> v, w, vmod;
  };
  auto data = std::make_shared<Data>();
  data->v = v.samples();
  data->w.resize(v.size());
  data->vmod.resize(v.size());
  parallel_for(v.size(), [&](std::size_t j) {
    const PolarDecomposition pd = polar_decomposition(v[j]);
    data->w[j] = pd.partial_isometry;
    data->vmod[j] = v[j] * pd.modulus;
  });

  FibreMap eval = [data](const Mat& b, std::size_t j) -> Mat {
    const Mat& x = data->v[j];
    const Mat& p = data->vmod[j];
    return b(0, 0) * (x * x.adjoint()) + b(1, 1) * (x.adjoint() * x) + b(0, 1) * p + b(1, 0) * p.adjoint();
  };
  FibreMap support = [data](const Mat& b, std::size_t j) -> Mat {
    const Mat& w = data->w[j];
    return b(0, 0) * (w * w.adjoint()) + b(1, 1) * (w.adjoint() * w) + b(0, 1) * w + b(1, 0) * w.adjoint();
  };
  return OrderZeroMap(2, v.grid(), v.dim(), std::move(eval), std::move(support), v.block());
}

struct IllConditionedSupport {
  double eigenvalue;
  double t;
};

struct SupportResult {
  OrderZeroMap map;  // input map with the computed support attached
  std::optional<IllConditionedSupport> warning;
};

/// Recovers π_φ fibrewise: π(b) = φ(b)·φ(1)^+, the inverse taken on the
/// support projection of φ(1) (spectral cutoff kRankCutoff). Eigenvalues in
/// (cutoff, 10·cutoff) make the support ill-conditioned; the first such
/// fibre is reported.
inline SupportResult support_hom_of(const OrderZeroMap& phi, double cutoff = kRankCutoff) {
  auto pinv = std::make_shared<std::vector<Mat>>(phi.grid().size());
  std::vector<std::optional<double>> flagged(phi.grid().size());
  const Mat one = identity(phi.n());
  parallel_for(phi.grid().size(), [&](std::size_t j) {
    const SpectralDecomposition sd = hermitian_eigensystem(phi.at(one, j));
    Eigen::VectorXd inv(sd.values.size());
    for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
      const double v = sd.values(k);
      inv(k) = v > cutoff ? 1.0 / v : 0.0;
      if (v > cutoff && v < 10 * cutoff && !flagged[j]) flagged[j] = v;
    }
    (*pinv)[j] = sd.vectors * inv.asDiagonal() * sd.vectors.adjoint();
  });
  std::optional<IllConditionedSupport> warning;
  for (std::size_t j = 0; j < flagged.size(); ++j)
    if (flagged[j]) {
      warning = IllConditionedSupport{*flagged[j], phi.grid().t(j)};
      break;
    }
  const FibreMap eval = phi.fibre_map();
  FibreMap support = [eval, pinv](const Mat& b, std::size_t j) -> Mat { return eval(b, j) * (*pinv)[j]; };
  return {phi.with_support(std::move(support)), warning};
}

/// Residuals of π(e_ij)* = π(e_ji), π(e_i1)π(e_1j) = π(e_ij),
/// π(e_1i)π(e_j1) = δ_ij π(e_11) and π(e_ij)φ(1) = φ(e_ij). Together these
/// give multiplicativity on all pairs of matrix units.
inline RelationReport validate_support(const OrderZeroMap& phi, double tol = 1e-10) {
  const std::size_t n = phi.n();
  static const std::vector<std::string> names{"pi(e_ij)* = pi(e_ji)", "pi(e_ij) pi(e_kl) = delta_jk pi(e_il)",
                                              "pi(e_ij) phi(1) = phi(e_ij)"};
  return detail::fibrewise_report(phi.grid(), names, tol, [&](std::size_t j) {
    std::vector<Mat> pi(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) pi[a * n + b] = phi.support_at(matrix_unit(n, a, b), j);
    const Mat one = phi.at(identity(n), j);
    std::vector<double> r(3, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        r[0] = std::max(r[0], op_norm(pi[a * n + b].adjoint() - pi[b * n + a]));
        r[1] = std::max(r[1], op_norm(pi[a * n] * pi[b] - pi[a * n + b]));
        const Mat expected = a == b ? pi[0] : Mat::Zero(pi[0].rows(), pi[0].cols());
        r[1] = std::max(r[1], op_norm(pi[a] * pi[b * n] - expected));
        r[2] = std::max(r[2], op_norm(pi[a * n + b] * one - phi.at(matrix_unit(n, a, b), j)));
      }
    return r;
  });
}

/// f(φ)(b) = π_φ(b)·fn(φ(1)) for a scalar function with fn(0) = 0. The result
/// keeps π_φ as its supporting homomorphism: fn(φ(1)) lives on the support of
/// φ(1), so any further calculus is unaffected by the larger support.
template <class Fn>
OrderZeroMap oz_calc_fn(Fn fn, const OrderZeroMap& phi, double tol = 1e-10) {
  if (fn(0.0) != 0.0) throw CalculusDomainError("order zero calculus needs f(0) = 0");
  const OrderZeroMap with_pi = phi.has_support() ? phi : support_hom_of(phi).map;
  auto values = std::make_shared<std::vector<Mat>>(phi.grid().size());
  const Mat one = identity(phi.n());
  parallel_for(phi.grid().size(), [&](std::size_t j) {
    const double t = phi.grid().t(j);
    (*values)[j] = hermitian_calculus(with_pi.at(one, j), [&](double v) {
      if (v < -tol) throw PositivityError("oz_calc: phi(1) has eigenvalue " + std::to_string(v) + " at t=" +
                                          std::to_string(t));
      return static_cast<double>(fn(std::max(v, 0.0)));
    });
  });
  const FibreMap support = *with_pi.support_map();
  FibreMap eval = [support, values](const Mat& b, std::size_t j) -> Mat { return support(b, j) * (*values)[j]; };
  return OrderZeroMap(phi.n(), phi.grid(), phi.dim(), std::move(eval), support, phi.block());
}

/// Order zero calculus with a PL function f, 0 <= f <= 1, f(0) = 0.
inline OrderZeroMap oz_calc(const PLFunc& f, const OrderZeroMap& phi, double tol = 1e-10) {
  if (f(Rational(0)) != 0) throw CalculusDomainError("order zero calculus needs f(0) = 0, got " + to_string(f(Rational(0))));
  if (f.min_value() < 0 || f.max_value() > 1)
    throw CalculusDomainError("order zero calculus needs 0 <= f <= 1");
  return oz_calc_fn([f](double v) { return f(std::min(v, 1.0)); }, phi, tol);
}

inline OrderZeroMap oz_sqrt(const OrderZeroMap& phi, double tol = 1e-10) {
  return oz_calc_fn([](double v) { return std::sqrt(v); }, phi, tol);
}

/// max_t ||f(φ)(p) - f(φ(p))|| for a projection p.
inline FibreMax calc_projection_residual(const PLFunc& f, const OrderZeroMap& phi, const Mat& p) {
  const OrderZeroMap fphi = oz_calc(f, phi);
  return fibre_max(phi.grid(), [&](std::size_t j) {
    const Mat direct = hermitian_calculus(phi.at(p, j), [&f](double v) { return f(std::clamp(v, 0.0, 1.0)); });
    return op_norm(fphi.at(p, j) - direct);
  });
}

namespace detail {

inline void require_same_target(const OrderZeroMap& a, const OrderZeroMap& b, const char* op) {
  if (!(a.grid() == b.grid())) throw StructuralError(std::string(op) + ": grid mismatch");
  if (a.dim() != b.dim()) throw StructuralError(std::string(op) + ": fibre dimension mismatch");
}

inline std::vector<std::string> prefixed_cone_names(const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& n : cone_names()) out.push_back(prefix + n);
  return out;
}

enum class DefectForm { unital, nonunital };

inline RelationReport validate_drop(const OrderZeroMap& phi, const OrderZeroMap& psi, double tol, DefectForm form) {
  require_same_target(phi, psi, form == DefectForm::unital ? "validate_R" : "validate_Rhat");
  if (psi.n() != 2) throw StructuralError("the second map must be defined on M_2");
  std::vector<std::string> names = prefixed_cone_names("phi: ");
  for (const auto& n : prefixed_cone_names("psi: ")) names.push_back(n);
  names.push_back(form == DefectForm::unital ? "psi(e11) = 1 - phi(1)" : "psi(e11) = phi(1)(1 - phi(1))");
  names.push_back("psi(e22) phi(e11) = psi(e22)");
  const Mat one = identity(phi.n());
  const Mat e11 = matrix_unit(phi.n(), 0, 0);
  return fibrewise_report(phi.grid(), names, tol, [&](std::size_t j) {
    std::vector<double> r;
    for (double v : cone_residuals(cone_generators_at(phi, j))) r.push_back(v);
    for (double v : cone_residuals(cone_generators_at(psi, j))) r.push_back(v);
    const Mat p1 = phi.at(one, j);
    const Mat id = Mat::Identity(p1.rows(), p1.cols());
    const Mat defect = form == DefectForm::unital ? Mat(id - p1) : Mat(p1 * (id - p1));
    r.push_back(op_norm(psi.at(matrix_unit(2, 0, 0), j) - defect));
    const Mat s22 = psi.at(matrix_unit(2, 1, 1), j);
    r.push_back(op_norm(s22 * phi.at(e11, j) - s22));
    return r;
  });
}

}  // namespace detail

/// Relations R_n: both maps order zero (cone relations), ψ(e11) = 1 - φ(1)
/// and ψ(e22)φ(e11) = ψ(e22).
inline RelationReport validate_R(const OrderZeroMap& phi, const OrderZeroMap& psi, double tol = 1e-10) {
  return detail::validate_drop(phi, psi, tol, detail::DefectForm::unital);
}

/// As validate_R with ψ(e11) = φ(1)(1 - φ(1)).
inline RelationReport validate_Rhat(const OrderZeroMap& phi, const OrderZeroMap& psi, double tol = 1e-10) {
  return detail::validate_drop(phi, psi, tol, detail::DefectForm::nonunital);
}

/// The alternative presentation with an extra positive contraction h:
/// [ψ(e11), φ(e_ij)] = 0, [h, φ(e_ij)] = 0, ψ(e11)h = h,
/// h(1 - φ(1)) = 1 - φ(1), ψ(e22)φ(e11) = ψ(e22).
inline RelationReport validate_alt1(const OrderZeroMap& phi, const OrderZeroMap& psi, const MatFun& h,
                                    double tol = 1e-9) {
  detail::require_same_target(phi, psi, "validate_alt1");
  if (!(h.grid() == phi.grid()) || h.dim() != phi.dim()) throw StructuralError("validate_alt1: h does not match");
  if (psi.n() != 2) throw StructuralError("the second map must be defined on M_2");
  std::vector<std::string> names = detail::prefixed_cone_names("phi: ");
  for (const auto& n : detail::prefixed_cone_names("psi: ")) names.push_back(n);
  for (const char* n : {"0 <= h <= 1", "[psi(e11), phi(e_ij)] = 0", "[h, phi(e_ij)] = 0", "psi(e11) h = h",
                        "h(1 - phi(1)) = 1 - phi(1)", "psi(e22) phi(e11) = psi(e22)"})
    names.emplace_back(n);
  const std::size_t n = phi.n();
  return detail::fibrewise_report(phi.grid(), names, tol, [&](std::size_t j) {
    std::vector<double> r;
    for (double v : detail::cone_residuals(cone_generators_at(phi, j))) r.push_back(v);
    for (double v : detail::cone_residuals(cone_generators_at(psi, j))) r.push_back(v);
    const Mat& hj = h[j];
    const Eigen::VectorXd hev = hermitian_eigenvalues(hj);
    r.push_back(std::max({op_norm(hj - hj.adjoint()), -hev(0), hev(hev.size() - 1) - 1.0, 0.0}));
    const Mat s11 = psi.at(matrix_unit(2, 0, 0), j);
    double c_psi = 0.0;
    double c_h = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const Mat pe = phi.at(matrix_unit(n, a, b), j);
        c_psi = std::max(c_psi, op_norm(s11 * pe - pe * s11));
        c_h = std::max(c_h, op_norm(hj * pe - pe * hj));
      }
    r.push_back(c_psi);
    r.push_back(c_h);
    r.push_back(op_norm(s11 * hj - hj));
    const Mat p1 = phi.at(identity(n), j);
    const Mat defect = Mat::Identity(p1.rows(), p1.cols()) - p1;
    r.push_back(op_norm(hj * defect - defect));
    const Mat s22 = psi.at(matrix_unit(2, 1, 1), j);
    r.push_back(op_norm(s22 * phi.at(matrix_unit(n, 0, 0), j) - s22));
    return r;
  });
}

}  // namespace ozcheck
