#pragma once

// Connecting data between consecutive levels n -> n³ of the tower: the
// order zero map ρ, the partial isometry v, the hatted generator images and
// their relation checks, the fibrewise eigenvalue fingerprint, and symbolic
// multi-stage connectors.
//
// M_{n³} is identified with M_n ⊗ M_n ⊗ M_n, basis triple (a,b,c) at index
// (a·n + b)·n + c.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ozcheck/blocks.hpp"
#include "ozcheck/connector.hpp"
#include "ozcheck/linalg.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/ordzero.hpp"
#include "ozcheck/pl_identities.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

/// Levels q(k) = p^(3^k).
struct TowerConfig {
  unsigned p = 2;
  /// The single numeric stage n -> n³ that is materialized.
  std::size_t numeric_step = 2;

  [[nodiscard]] BigInt q(unsigned k) const {
    unsigned e = 1;
    for (unsigned i = 0; i < k; ++i) e *= 3;
    return pow(BigInt(p), e);
  }
};

/// Largest fibre dimension a numeric stage may materialize.
inline constexpr std::size_t kMaxNumericFibre = 1000;

inline void require_numeric_stage(std::size_t n) {
  if (n < 2) throw DomainError("numeric stage needs n >= 2");
  const std::size_t big = n * n * n;
  const std::size_t fibre = big * (big + 1);
  if (fibre > kMaxNumericFibre)
    throw ResourceError("numeric stage n = " + std::to_string(n) + " needs " + std::to_string(fibre) +
                        "-dimensional fibres");
}

/// Diagonal of 1 ⊗ D with D on (b,c): 1 if b < n-1, (c+1)/n if b = n-1.
inline Eigen::VectorXd rho_profile(std::size_t n) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(n * n));
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c)
      d(static_cast<Eigen::Index>(b * n + c)) = b + 1 < n ? 1.0 : static_cast<double>(c + 1) / static_cast<double>(n);
  return d;
}

/// ρ(a) = a⊗1_{n-1}⊗1_n ⊕ ⊕_i (i/n)(a⊗e_nn⊗e_ii), with support a⊗1⊗1.
inline ConstantOrderZero rho(std::size_t n) {
  if (n < 2) throw DomainError("rho needs n >= 2");
  const Mat diag = rho_profile(n).cast<Cplx>().asDiagonal();
  const Mat one = identity(n * n);
  ConstantOrderZero out;
  out.n = n;
  out.dim = n * n * n;
  out.eval = [diag](const Mat& a) { return kron(a, diag); };
  out.support = [one](const Mat& a) { return kron(a, one); };
  return out;
}

using Triple = std::array<std::size_t, 3>;

inline std::size_t triple_index(const Triple& x, std::size_t n) { return (x[0] * n + x[1]) * n + x[2]; }

/// Initial triples (0,b,c) with b < n-1, plus (0,n-1,n-1), minus (0,0,0);
/// final triples (a,n-1,c) with c < n-1. Both have n² - n elements and are
/// paired in lexicographic order.
inline std::pair<std::vector<Triple>, std::vector<Triple>> v_supports(std::size_t n) {
  std::vector<Triple> initial;
  for (std::size_t b = 0; b + 1 < n; ++b)
    for (std::size_t c = 0; c < n; ++c)
      if (b != 0 || c != 0) initial.push_back({0, b, c});
  initial.push_back({0, n - 1, n - 1});
  std::vector<Triple> final_;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c + 1 < n; ++c) final_.push_back({a, n - 1, c});
  std::sort(initial.begin(), initial.end());
  std::sort(final_.begin(), final_.end());
  return {initial, final_};
}

inline Mat v_matrix(std::size_t n) {
  if (n < 2) throw DomainError("v_matrix needs n >= 2");
  const auto [initial, final_] = v_supports(n);
  const auto d = static_cast<Eigen::Index>(n * n * n);
  Mat v = Mat::Zero(d, d);
  for (std::size_t k = 0; k < initial.size(); ++k)
    v(static_cast<Eigen::Index>(triple_index(final_[k], n)), static_cast<Eigen::Index>(triple_index(initial[k], n))) =
        1.0;
  return v;
}

/// Residuals of the defining properties of v: the two projections, v² = 0,
/// v*v ⊥ e11, ρ(e11)v*v = v*v and (1 - ρ(1))vv* = 1 - ρ(1).
inline RelationReport validate_v(std::size_t n, double tol = 0.0) {
  const Mat v = v_matrix(n);
  const ConstantOrderZero r = rho(n);
  const Mat vvs = v * v.adjoint();
  const Mat vsv = v.adjoint() * v;
  const Mat one = identity(n);
  const Mat e11 = matrix_unit(n, 0, 0);
  const Mat top = matrix_unit(n, n - 1, n - 1);
  const Mat expected_final = kron(kron(one, top), corner_projection(n, n - 1));
  const Mat expected_initial = kron(kron(e11, corner_projection(n, n - 1)), one) + kron(kron(e11, top), top) -
                               kron(kron(e11, e11), e11);
  const Mat defect = identity(n * n * n) - r(one);
  const Mat big_e11 = matrix_unit(n * n * n, 0, 0);
  RelationReport report;
  report.add("vv* = 1 (x) e_nn (x) 1_{n-1}", (vvs - expected_final).cwiseAbs().maxCoeff(), tol);
  report.add("v*v = initial projection", (vsv - expected_initial).cwiseAbs().maxCoeff(), tol);
  report.add("v^2 = 0", (v * v).cwiseAbs().maxCoeff(), tol);
  report.add("v*v e11 = 0", (vsv * big_e11).cwiseAbs().maxCoeff(), tol);
  report.add("rho(e11) v*v = v*v", (r(e11) * vsv - vsv).cwiseAbs().maxCoeff(), tol);
  report.add("(1 - rho(1)) vv* = 1 - rho(1)", (defect * vvs - defect).cwiseAbs().maxCoeff(), tol);
  return report;
}

struct HatMaps {
  OrderZeroMap phi_hat;
  OrderZeroMap psi_hat;
  MatFun link;  // ψ̂^{1/2}(e12) = γ + δ
  RelationReport report;
};

namespace detail {

inline std::size_t cube_root_exact(std::size_t big) {
  auto n = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(big))));
  if (n * n * n != big) throw StructuralError("map is not defined on M_{n^3}: M_" + std::to_string(big));
  return n;
}

/// Fibrewise data shared by both connecting steps.
struct StepData {
  std::size_t n;
  OrderZeroMap f_phi;
  OrderZeroMap g_phi;
  OrderZeroMap h_phi;
  OrderZeroMap d_psi;
  ConstantOrderZero r;
  Mat v;
  Mat defect;  // 1 - ρ(1)
};

inline StepData step_data(const OrderZeroMap& phi_next, const OrderZeroMap& psi_next) {
  const std::size_t n = cube_root_exact(phi_next.n());
  ConstantOrderZero r = rho(n);
  Mat defect = identity(n * n * n) - r(identity(n));
  return {n,
          oz_calc(shapes::f(), phi_next),
          oz_calc(shapes::g(), phi_next),
          oz_calc(shapes::h(), phi_next),
          oz_calc(shapes::d(), psi_next),
          std::move(r),
          v_matrix(n),
          std::move(defect)};
}

/// Square root of a positive matrix. Eigenvalues within roundoff of zero are
/// treated as zero: their square roots (~1e-8) would otherwise leak into
/// products that vanish exactly, while the square changes by at most the floor.
inline Mat psd_sqrt(const Mat& x) {
  const double floor = kRoundoffFloor * std::max(1.0, op_norm(x));
  return hermitian_calculus(x, [floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
}

}  // namespace detail

/// Connecting step for the Z-tower. φ̂ = f(φ')∘ρ and ψ̂^{1/2}(e12) = γ + δ with
///   γ = (1 - f(φ')(1) + g(φ')(1 - ρ(1)))^{1/2} d(ψ')(e12),
///   δ = h(φ')(1 - ρ(1))^{1/2} f(φ')(v).
inline HatMaps hat_maps_z(const OrderZeroMap& phi_next, const OrderZeroMap& psi_next, double tol = 1e-8,
                          double cross_tol = 1e-10) {
  const RelationReport pre = validate_R(phi_next, psi_next, 1e-10);
  if (!pre.all_pass()) throw PreconditionError("hat_maps_z: inputs violate " + pre.failures().front());
  const detail::StepData s = detail::step_data(phi_next, psi_next);
  const GridSpec grid = phi_next.grid();
  const Mat big_one = identity(phi_next.n());
  const Mat e12 = matrix_unit(2, 0, 1);

  std::vector<Mat> gamma(grid.size()), delta(grid.size());
  std::vector<std::array<double, 2>> sub(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) {
    const Mat f1 = s.f_phi.at(big_one, j);
    const Mat id = Mat::Identity(f1.rows(), f1.cols());
    const Mat a = id - f1 + s.g_phi.at(s.defect, j);
    const Mat hr = s.h_phi.at(s.defect, j);
    gamma[j] = detail::psd_sqrt(a) * s.d_psi.at(e12, j);
    delta[j] = detail::psd_sqrt(hr) * s.f_phi.at(s.v, j);
    sub[j] = {op_norm(delta[j] * delta[j].adjoint() - hr), op_norm(gamma[j] * gamma[j].adjoint() - a)};
  });
  const MatFun g(grid, gamma, phi_next.block());
  const MatFun d(grid, delta, phi_next.block());
  const MatFun link = g + d;

  RelationReport report;
  auto add_sup = [&](const std::string& name, const MatFun& x, double t) {
    const FibreMax m = sup_norm_at(x);
    report.add(name, m.value, t, m.t);
  };
  add_sup("(gamma + delta)^2 = 0", link * link, cross_tol);
  add_sup("gamma delta* = 0", g * d.adjoint(), cross_tol);
  add_sup("delta gamma* = 0", d * g.adjoint(), cross_tol);
  const FibreMax dd = fibre_max(grid, [&](std::size_t j) { return sub[j][0]; });
  report.add("delta delta* = h(phi)(1 - rho(1))", dd.value, 1e-9, dd.t);
  const FibreMax gg = fibre_max(grid, [&](std::size_t j) { return sub[j][1]; });
  report.add("gamma gamma* = 1 - f(phi)(1) + g(phi)(1 - rho(1))", gg.value, 1e-9, gg.t);

  OrderZeroMap phi_hat = compose(s.f_phi, s.r);
  // Square-zero and contraction residuals are recorded in the report, not enforced here.
  OrderZeroMap psi_hat = from_square_zero(link, 1.0);
  const Mat one = identity(s.n);
  const FibreMax c1 = fibre_max(grid, [&](std::size_t j) {
    const Mat p = phi_hat.at(one, j);
    return op_norm(psi_hat.at(matrix_unit(2, 0, 0), j) - (Mat::Identity(p.rows(), p.cols()) - p));
  });
  report.add("Claim 1: psihat(e11) = 1 - phihat(1)", c1.value, tol, c1.t);
  const FibreMax c2 = fibre_max(grid, [&](std::size_t j) {
    const Mat s22 = psi_hat.at(matrix_unit(2, 1, 1), j);
    return op_norm(s22 * phi_hat.at(matrix_unit(s.n, 0, 0), j) - s22);
  });
  report.add("Claim 2: psihat(e22) phihat(e11) = psihat(e22)", c2.value, tol, c2.t);
  report.merge(validate_R(phi_hat, psi_hat, tol), "R: ");
  return {std::move(phi_hat), std::move(psi_hat), link, std::move(report)};
}

/// Connecting step for the W-tower. φ̂ = f(φ')∘ρ and
///   ψ̂^{1/2}(e12) = f(φ')(ρ(1))^{1/2} (μ f(φ')(v) + λ d(ψ')(e12)),
/// λ = (1 - f(φ')(1) + g(φ')(1 - ρ(1)))^{1/2}, μ = h(φ')(1 - ρ(1))^{1/2}.
inline HatMaps hat_maps_w(const OrderZeroMap& phi_next, const OrderZeroMap& psi_next, double tol = 1e-8,
                          double cross_tol = 1e-10) {
  const RelationReport pre = validate_Rhat(phi_next, psi_next, 1e-10);
  if (!pre.all_pass()) throw PreconditionError("hat_maps_w: inputs violate " + pre.failures().front());
  const detail::StepData s = detail::step_data(phi_next, psi_next);
  const GridSpec grid = phi_next.grid();
  const Mat big_one = identity(phi_next.n());
  const Mat rho_one = s.r(identity(s.n));
  const Mat e11 = matrix_unit(2, 0, 0);
  const Mat e12 = matrix_unit(2, 0, 1);
  const PLFunc d = shapes::d();

  std::vector<Mat> gamma(grid.size()), delta(grid.size());
  // sub-identity, d(ψ')(e11) = d̂(φ'(1)), [λ, P^{1/2}], [μ, P^{1/2}]
  std::vector<std::array<double, 4>> sub(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) {
    const Mat f1 = s.f_phi.at(big_one, j);
    const Mat id = Mat::Identity(f1.rows(), f1.cols());
    const Mat p = s.f_phi.at(rho_one, j);
    const Mat p_half = detail::psd_sqrt(p);
    const Mat lambda = detail::psd_sqrt(id - f1 + s.g_phi.at(s.defect, j));
    const Mat mu = detail::psd_sqrt(s.h_phi.at(s.defect, j));
    gamma[j] = p_half * lambda * s.d_psi.at(e12, j);
    delta[j] = p_half * mu * s.f_phi.at(s.v, j);
    const Mat d11 = s.d_psi.at(e11, j);
    const Mat lhs = p * (id - f1);
    const Mat dhat = hermitian_calculus(phi_next.at(big_one, j), [&d](double x) {
      const double c = std::clamp(x, 0.0, 1.0);
      return d(c * (1.0 - c));
    });
    sub[j] = {op_norm(lhs * d11 - lhs), op_norm(d11 - dhat), op_norm(lambda * p_half - p_half * lambda),
              op_norm(mu * p_half - p_half * mu)};
  });
  const MatFun g(grid, gamma, phi_next.block());
  const MatFun dl(grid, delta, phi_next.block());
  const MatFun link = g + dl;

  RelationReport report;
  auto add_sup = [&](const std::string& name, const MatFun& x, double t) {
    const FibreMax m = sup_norm_at(x);
    report.add(name, m.value, t, m.t);
  };
  add_sup("(gamma + delta)^2 = 0", link * link, cross_tol);
  add_sup("gamma delta* = 0", g * dl.adjoint(), cross_tol);
  add_sup("delta gamma* = 0", dl * g.adjoint(), cross_tol);
  const std::array<std::pair<const char*, double>, 4> sub_names{{
      {"f(phi)(rho(1))(1 - f(phi)(1)) d(psi)(e11) = f(phi)(rho(1))(1 - f(phi)(1))", tol},
      {"d(psi)(e11) = dhat(phi(1))", 1e-10},
      {"[lambda, f(phi)(rho(1))^1/2] = 0", 1e-10},
      {"[mu, f(phi)(rho(1))^1/2] = 0", 1e-10},
  }};
  for (std::size_t k = 0; k < sub_names.size(); ++k) {
    const FibreMax m = fibre_max(grid, [&](std::size_t j) { return sub[j][k]; });
    report.add(sub_names[k].first, m.value, sub_names[k].second, m.t);
  }

  OrderZeroMap phi_hat = compose(s.f_phi, s.r);
  // Square-zero and contraction residuals are recorded in the report, not enforced here.
  OrderZeroMap psi_hat = from_square_zero(link, 1.0);
  const Mat one = identity(s.n);
  const FibreMax c1 = fibre_max(grid, [&](std::size_t j) {
    const Mat p = phi_hat.at(one, j);
    return op_norm(psi_hat.at(e11, j) - p * (Mat::Identity(p.rows(), p.cols()) - p));
  });
  report.add("S: psihat(e11) = phihat(1)(1 - phihat(1))", c1.value, tol, c1.t);
  const FibreMax c2 = fibre_max(grid, [&](std::size_t j) {
    const Mat s22 = psi_hat.at(matrix_unit(2, 1, 1), j);
    return op_norm(s22 * phi_hat.at(matrix_unit(s.n, 0, 0), j) - s22);
  });
  report.add("S: psihat(e22) phihat(e11) = psihat(e22)", c2.value, tol, c2.t);
  report.merge(validate_Rhat(phi_hat, psi_hat, tol), "Rhat: ");
  return {std::move(phi_hat), std::move(psi_hat), link, std::move(report)};
}

/// Eigenvalue comparison of α^t(φ_n(a)) = f(φ_{n³})(ρ(a))(t) with the
/// multiset ⋃_{F ∈ Λ(n)} spec φ_n(a)(F(t)), both from the Z witnesses'
/// closed forms at an arbitrary t.
struct FingerprintResult {
  Eigen::VectorXd computed;   // ascending
  Eigen::VectorXd predicted;  // ascending
  double max_mismatch = 0.0;
  std::size_t worst_index = 0;
};

/// α^t(φ_n(a)) for the Z witnesses at levels n and n³.
inline Mat alpha_t_phi(std::size_t n, const Mat& a, double t) {
  require_numeric_stage(n);
  const std::size_t big = n * n * n;
  const ConstantOrderZero r = rho(n);
  const ZGeneratorForm form(big);
  const Mat u = flip_unitary(big, t);
  const Mat one = form.phi(identity(big), u, 1.0 - t);
  const PLFunc f = shapes::f();
  const Mat f_one = hermitian_calculus(one, [&f](double x) { return f(std::clamp(x, 0.0, 1.0)); });
  return form.support(r(a), u) * f_one;
}

inline FingerprintResult fingerprint(std::size_t n, const Mat& a, double t) {
  if (!is_hermitian(a, 1e-12)) throw DomainError("fingerprint_check needs a hermitian a");
  FingerprintResult out;
  out.computed = hermitian_eigenvalues(alpha_t_phi(n, a, t));
  std::vector<double> predicted;
  const ConnectorSymbolic lambda = lambda_sequence(static_cast<unsigned>(n));
  for (const auto& e : lambda.entries()) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(z_phi_at(n, a, e.fn(t)));
    const auto mult = e.multiplicity.convert_to<std::size_t>();
    for (std::size_t m = 0; m < mult; ++m) predicted.insert(predicted.end(), ev.data(), ev.data() + ev.size());
  }
  std::sort(predicted.begin(), predicted.end());
  out.predicted = Eigen::Map<Eigen::VectorXd>(predicted.data(), static_cast<Eigen::Index>(predicted.size()));
  if (out.predicted.size() != out.computed.size())
    throw DecompositionViolation("fingerprint: dimension " + std::to_string(out.computed.size()) + " vs predicted " +
                                     std::to_string(out.predicted.size()),
                                 0.0);
  for (Eigen::Index k = 0; k < out.computed.size(); ++k) {
    const double diff = std::abs(out.computed(k) - out.predicted(k));
    if (diff > out.max_mismatch) {
      out.max_mismatch = diff;
      out.worst_index = static_cast<std::size_t>(k);
    }
  }
  return out;
}

/// Throws DecompositionViolation carrying the offending eigenvalue when the
/// multisets differ by more than tol.
inline RelationReport fingerprint_check(std::size_t n, const Mat& a, double t, double tol = 1e-9) {
  const FingerprintResult r = fingerprint(n, a, t);
  if (r.max_mismatch > tol)
    throw DecompositionViolation("eigenvalue " + std::to_string(r.computed(static_cast<Eigen::Index>(r.worst_index))) +
                                     " has no partner within " + std::to_string(tol),
                                 r.computed(static_cast<Eigen::Index>(r.worst_index)));
  RelationReport report;
  report.add("eigenvalue multiset match", r.max_mismatch, tol, t);
  return report;
}

}  // namespace ozcheck
