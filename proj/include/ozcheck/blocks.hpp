#pragma once

// Explicit generator witnesses inside the building blocks Z(n, n+1) and
// W(n, n+1), and the numeric checks used for the universality arguments.
//
// Fibres are C^n ⊗ C^{n+1} with index a·(n+1) + b. The map E embeds
// C^n ⊗ C^n as the corner spanned by the first n basis vectors of the second
// factor, and u(t) is the unitary path from 1 to the tensor flip.

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

#include "ozcheck/linalg.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/ordzero.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

/// Isometry C^n ⊗ C^n -> C^n ⊗ C^{n+1}, (a,b) -> (a,b).
inline Mat corner_embedding(std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  Mat e = Mat::Zero(N * (N + 1), N * N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) e(a * (N + 1) + b, a * N + b) = 1.0;
  return e;
}

/// Closed forms of the Z(n, n+1) generator φ at an arbitrary parameter s:
///   φ(a)(s) = E u(s)(a⊗1)u(s)* E* + c·(a⊗e_{n+1,n+1}),
///   π(a)(s) = E u(s)(a⊗1)u(s)* E* + a⊗e_{n+1,n+1},
/// with c = 1 - s for the plain witness.
struct ZGeneratorForm {
  std::size_t n;
  Mat embed;
  Mat corner_unit;  // 1_n ⊗ e_{n+1,n+1}

  explicit ZGeneratorForm(std::size_t n_) : n(n_), embed(corner_embedding(n_)) {
    corner_unit = kron(identity(n), matrix_unit(n + 1, n, n));
  }

  [[nodiscard]] Mat conjugated(const Mat& a, const Mat& u) const {
    return embed * u * kron(a, identity(n)) * u.adjoint() * embed.adjoint();
  }
  [[nodiscard]] Mat phi(const Mat& a, const Mat& u, double c) const {
    return conjugated(a, u) + c * kron(a, matrix_unit(n + 1, n, n));
  }
  [[nodiscard]] Mat support(const Mat& a, const Mat& u) const { return phi(a, u, 1.0); }

  /// Σ_j |f_j ⊗ e_{n+1}⟩⟨E u (e_1 ⊗ f_j)|, a partial isometry from the
  /// conjugated e_11-row onto 1_n ⊗ e_{n+1}.
  [[nodiscard]] Mat link(const Mat& u) const {
    const auto N = static_cast<Eigen::Index>(n);
    Mat v = Mat::Zero(N * (N + 1), N * (N + 1));
    const Mat cols = embed * u;
    for (Eigen::Index j = 0; j < N; ++j) v.row(j * (N + 1) + N) = cols.col(j).adjoint();
    return v;
  }
};

/// φ_n(a)(s) of the Z(n, n+1) witness at an arbitrary s in [0,1].
inline Mat z_phi_at(std::size_t n, const Mat& a, double s) {
  const ZGeneratorForm form(n);
  return form.phi(a, flip_unitary(n, s), 1.0 - s);
}

/// π_n(a)(s) of the Z(n, n+1) witness.
inline Mat z_support_at(std::size_t n, const Mat& a, double s) {
  const ZGeneratorForm form(n);
  return form.support(a, flip_unitary(n, s));
}

struct Witness {
  OrderZeroMap phi;
  OrderZeroMap psi;
  MatFun v;  // ψ^{1/2}(e12)
};

namespace detail {

inline OrderZeroMap z_type_phi(std::size_t n, GridSpec grid, const PLFunc& c_profile) {
  auto form = std::make_shared<const ZGeneratorForm>(n);
  auto u = std::make_shared<const MatFun>(flip_path(n, grid));
  auto c = std::make_shared<std::vector<double>>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) (*c)[j] = c_profile(grid.t(j));
  FibreMap eval = [form, u, c](const Mat& a, std::size_t j) { return form->phi(a, (*u)[j], (*c)[j]); };
  FibreMap support = [form, u](const Mat& a, std::size_t j) { return form->support(a, (*u)[j]); };
  return OrderZeroMap(n, grid, n * (n + 1), std::move(eval), std::move(support), BlockSpec::z(n, n + 1));
}

inline void require_level(std::size_t n) {
  if (n < 2) throw DomainError("witness needs n >= 2");
}

}  // namespace detail

/// Generators (φ, ψ) of Z(n, n+1):
///   φ(a)(t) = E u(t)(a⊗1)u(t)* E* + (1-t)(a⊗e_{n+1,n+1}),
///   v(t) = t^{1/2} Σ_j |f_j⊗e_{n+1}⟩⟨E u(t)(e_1⊗f_j)|,  ψ = from_square_zero(v).
/// Then vv* = 1 - φ(1), v*v = t·E u(e11⊗1)u* E*, v² = 0 and v(1) = 1⊗e_{n+1,1}.
inline Witness z_witness(std::size_t n, GridSpec grid = GridSpec{}) {
  detail::require_level(n);
  const PLFunc one_minus_t({{0, 1}, {1, 0}});
  OrderZeroMap phi = detail::z_type_phi(n, grid, one_minus_t);
  const ZGeneratorForm form(n);
  MatFun v = MatFun::sample(
      grid, [&](double t) -> Mat { return std::sqrt(t) * form.link(flip_unitary(n, t)); }, BlockSpec::z(n, n + 1));
  OrderZeroMap psi = from_square_zero(v);
  return {std::move(phi), std::move(psi), std::move(v)};
}

/// Generators (φ, ψ) of W(n, n+1):
///   φ(a)(t) = a ⊗ diag(1,…,1,1-t),
///   v(t) = (t(1-t))^{1/2} Σ_j e_{j1} ⊗ e_{n+1,j},  ψ = from_square_zero(v).
inline Witness w_witness(std::size_t n, GridSpec grid = GridSpec{}) {
  detail::require_level(n);
  const auto N = static_cast<Eigen::Index>(n);
  auto diag = std::make_shared<std::vector<Mat>>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    Mat d = identity(n + 1);
    d(N, N) = 1.0 - grid.t(j);
    (*diag)[j] = d;
  }
  const Mat one_m = identity(n + 1);
  FibreMap eval = [diag](const Mat& a, std::size_t j) { return kron(a, (*diag)[j]); };
  FibreMap support = [one_m](const Mat& a, std::size_t) { return kron(a, one_m); };
  OrderZeroMap phi(n, grid, n * (n + 1), std::move(eval), std::move(support), BlockSpec::w(n, n + 1));

  Mat link = Mat::Zero(N * (N + 1), N * (N + 1));
  for (Eigen::Index j = 0; j < N; ++j) link(j * (N + 1) + N, j) = 1.0;  // e_j⊗e_{n+1} <- e_1⊗e_j
  MatFun v = MatFun::sample(
      grid, [&](double t) -> Mat { return std::sqrt(t * (1.0 - t)) * link; }, BlockSpec::w(n, n + 1));
  OrderZeroMap psi = from_square_zero(v);
  return {std::move(phi), std::move(psi), std::move(v)};
}

/// Checks for the W witness: v x_1 = v, vv* = φ(1)(1 - φ(1)), and the
/// central element z = ψ(e11) + Σ_i ψ_i(e22) = t(1-t)·1, where ψ_i is the
/// order zero map with ψ_i^{1/2}(e12) = v·φ^{1/2}(e_{1i}).
inline RelationReport w_center_check(std::size_t n, GridSpec grid = GridSpec{}, double tol = 1e-10) {
  const Witness w = w_witness(n, grid);
  const std::vector<MatFun> x = cone_generators(w.phi);
  const MatFun vvs = w.v * w.v.adjoint();
  const MatFun p1 = w.phi.unit();
  const MatFun id = MatFun::identity(grid, p1.dim(), p1.block());

  RelationReport report;
  const FibreMax vx1 = sup_norm_at(w.v * x[0] - w.v);
  report.add("v x_1 = v", vx1.value, tol, vx1.t);
  const FibreMax def = sup_norm_at(vvs - p1 * (id - p1));
  report.add("vv* = phi(1)(1 - phi(1))", def.value, tol, def.t);

  MatFun z = w.psi.image(matrix_unit(2, 0, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const OrderZeroMap psi_i = from_square_zero(w.v * x[i]);
    z = z + psi_i.image(matrix_unit(2, 1, 1));
  }
  const MatFun expected = scale_by(id, [](double t) { return t * (1.0 - t); });
  const FibreMax zc = sup_norm_at(z - expected);
  report.add("z = t(1-t) 1", zc.value, tol, zc.t);
  return report;
}

struct Alt1Witness {
  OrderZeroMap phi;
  OrderZeroMap psi;
  MatFun h;
  MatFun w;  // ψ^{1/2}(e12)
};

namespace alt1_profiles {
/// c: 1 on [0,3/4], linear to 0 at 1.
inline PLFunc defect_profile() {
  return PLFunc({{0, 1}, {make_rational(3, 4), 1}, {1, 0}});
}
/// η = h-shape: 0 on [0,1/2], ramp to 1 at 3/4.
inline PLFunc h_profile() { return shapes::h(); }
/// ν: ramp from 0 at t = 0 to 1 at t = 1/2. A profile vanishing on a whole
/// interval [0, a] would leave ψ = 0 and h = 0 there, and the fibres would
/// then only see the unital copy φ(M_n).
inline PLFunc link_profile() {
  return PLFunc({{0, 0}, {make_rational(1, 2), 1}, {1, 1}});
}
}  // namespace alt1_profiles

/// A triple (φ, ψ, h) in Z(n, n+1) for the alternative presentation:
///   φ(a)(t) = E u(t)(a⊗1)u(t)* E* + c(t)(a⊗e_{n+1,n+1}),
///   h(t) = η(t)·1_n⊗e_{n+1,n+1},
///   w(t) = ν(t)^{1/2} Σ_j |f_j⊗e_{n+1}⟩⟨E u(t)(e_1⊗f_j)|,  ψ = from_square_zero(w).
/// The defect 1 - φ(1) = (1-c)·1⊗e lives on (3/4, 1], where η = 1, and
/// ψ(e11) = ν·1⊗e is 1 wherever η > 0.
inline Alt1Witness alt1_witness(std::size_t n, GridSpec grid = GridSpec{}, double tol = 1e-9) {
  detail::require_level(n);
  OrderZeroMap phi = detail::z_type_phi(n, grid, alt1_profiles::defect_profile());
  const ZGeneratorForm form(n);
  const PLFunc eta = alt1_profiles::h_profile();
  const PLFunc nu = alt1_profiles::link_profile();
  MatFun h = MatFun::sample(grid, [&](double t) -> Mat { return eta(t) * form.corner_unit; }, BlockSpec::z(n, n + 1));
  MatFun w = MatFun::sample(
      grid, [&](double t) -> Mat { return std::sqrt(nu(t)) * form.link(flip_unitary(n, t)); },
      BlockSpec::z(n, n + 1));
  OrderZeroMap psi = from_square_zero(w);
  Alt1Witness out{std::move(phi), std::move(psi), std::move(h), std::move(w)};
  const RelationReport check = validate_alt1(out.phi, out.psi, out.h, tol);
  if (!check.all_pass())
    throw ConstructionInfeasible("alt1 witness violates " + check.failures().front());
  return out;
}

/// Dimension of the linear span of all nonempty words of length <= max_len in
/// the generator fibres at grid index j and their adjoints. Words are grown
/// from a basis of the previous length, which spans the same space.
inline std::size_t fibre_span_dimension(const std::vector<Mat>& generators, std::size_t max_len = 4,
                                        double rel_tol = 1e-9) {
  if (generators.empty()) return 0;
  std::vector<Mat> letters;
  for (const auto& g : generators) {
    letters.push_back(g);
    if (!is_hermitian(g, 1e-14)) letters.push_back(g.adjoint());
  }
  double scale = 0.0;
  for (const auto& g : letters) scale = std::max(scale, g.norm());
  if (scale == 0.0) return 0;

  std::vector<Vec> basis;  // orthonormal, in flattened form
  auto try_add = [&](const Mat& m) {
    Vec x = Eigen::Map<const Vec>(m.data(), m.size());
    const double norm0 = x.norm();
    if (norm0 <= rel_tol * scale) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x -= b.dot(x) * b;
    if (x.norm() <= rel_tol * norm0 || x.norm() <= rel_tol * scale) return false;
    basis.push_back(x / x.norm());
    return true;
  };

  std::vector<Mat> frontier;
  for (const auto& g : letters)
    if (try_add(g)) frontier.push_back(g);
  for (std::size_t len = 2; len <= max_len && !frontier.empty(); ++len) {
    std::vector<Mat> next;
    for (const auto& g : letters)
      for (const auto& w : frontier) {
        Mat word = g * w;
        if (try_add(word)) next.push_back(std::move(word));
      }
    frontier = std::move(next);
  }
  return basis.size();
}

namespace detail {
inline std::vector<Mat> fibres_at(const std::vector<MatFun>& generators, double t) {
  const auto j = generators.front().grid().index_of(t);
  if (!j) throw DomainError("fibre_span_check: t is not a grid point");
  std::vector<Mat> fibres;
  for (const auto& g : generators) fibres.push_back(g[*j]);
  return fibres;
}
}  // namespace detail

inline std::size_t fibre_span_check(const std::vector<MatFun>& generators, double t, std::size_t max_len = 4) {
  if (generators.empty()) return 0;
  return fibre_span_dimension(detail::fibres_at(generators, t), max_len);
}

/// Dimension of the (non-unital) algebra generated at t: words of any length.
inline std::size_t fibre_algebra_dimension(const std::vector<MatFun>& generators, double t) {
  if (generators.empty()) return 0;
  const std::size_t d = generators.front().dim();
  return fibre_span_dimension(detail::fibres_at(generators, t), d * d);
}

/// Cone generators x_i = φ^{1/2}(e_{1i}) and x = ψ^{1/2}(e12): the elements
/// the generating monomials are written in.
inline std::vector<MatFun> witness_generators(const OrderZeroMap& phi, const OrderZeroMap& psi) {
  std::vector<MatFun> out = cone_generators(phi);
  out.push_back(cone_generators(psi).at(1));
  return out;
}

}  // namespace ozcheck
