#pragma once

// Dense complex matrix helpers shared by the fibre-level code.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ozcheck/errors.hpp"

namespace ozcheck {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Eigenvalues within this distance are treated as one cluster by the
/// functional calculus.
inline constexpr double kClusterTol = 1e-10;
/// Singular/eigenvalues below this are treated as zero when forming support
/// projections and polar parts.
inline constexpr double kRankCutoff = 1e-9;
/// Relative size below which an eigenvalue is treated as a roundoff zero
/// before taking square roots.
inline constexpr double kRoundoffFloor = 1e-13;

inline Mat matrix_unit(std::size_t n, std::size_t i, std::size_t j) {
  Mat e = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return e;
}

inline Mat identity(std::size_t n) {
  return Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

/// Kronecker product a ⊗ b, with (i,k),(j,l) -> (i*rows(b)+k, j*cols(b)+l).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const Mat& m, double tol = 1e-13) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Ascending real eigenvalues of the hermitian part of m.
inline Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
  const Mat herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Operator norm (largest singular value).
inline double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const double maxabs = m.cwiseAbs().maxCoeff();
  if (maxabs == 0.0) return 0.0;
  if (m.rows() == m.cols() && is_hermitian(m, 1e-15)) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  if (m.rows() <= 16 && m.cols() <= 16) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
  }
  // sqrt of the top eigenvalue of m*m; rescaled so tiny residuals do not underflow.
  const Mat scaled = m / maxabs;
  const Mat gram = scaled.adjoint() * scaled;
  const Eigen::VectorXd ev = hermitian_eigenvalues(gram);
  return maxabs * std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

struct SpectralDecomposition {
  Eigen::VectorXd values;  // ascending
  Mat vectors;             // columns
};

inline SpectralDecomposition hermitian_eigensystem(const Mat& m) {
  const Mat herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Continuous functional calculus fn(x) for hermitian x. Eigenvalues closer
/// than kClusterTol are grouped and fn is applied to the cluster mean.
template <class Fn>
Mat hermitian_calculus(const Mat& x, Fn&& fn) {
  const SpectralDecomposition sd = hermitian_eigensystem(x);
  const Eigen::Index n = sd.values.size();
  Eigen::VectorXd mapped(n);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && sd.values(end) - sd.values(end - 1) <= kClusterTol) ++end;
    const double mean = sd.values.segment(start, end - start).mean();
    const double value = fn(mean);
    for (Eigen::Index k = start; k < end; ++k) mapped(k) = value;
    start = end;
  }
  return sd.vectors * mapped.asDiagonal() * sd.vectors.adjoint();
}

/// Projection onto the span of eigenvectors of a positive matrix with
/// eigenvalue above cutoff.
inline Mat support_projection(const Mat& positive, double cutoff = kRankCutoff) {
  return hermitian_calculus(positive, [cutoff](double v) { return v > cutoff ? 1.0 : 0.0; });
}

/// Moore-Penrose style inverse of a positive matrix on its support.
inline Mat support_inverse(const Mat& positive, double cutoff = kRankCutoff) {
  return hermitian_calculus(positive, [cutoff](double v) { return v > cutoff ? 1.0 / v : 0.0; });
}

/// Polar part w of v = w|v|, with singular values below cutoff discarded.
struct PolarDecomposition {
  Mat partial_isometry;  // w
  Mat modulus;           // |v| = (v*v)^{1/2}
};

inline PolarDecomposition polar_decomposition(const Mat& v, double cutoff = kRankCutoff) {
  auto build = [&](const auto& svd) {
    const auto& s = svd.singularValues();
    PolarDecomposition out{Mat::Zero(v.rows(), v.cols()), Mat::Zero(v.cols(), v.cols())};
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const auto vk = svd.matrixV().col(k);
      out.modulus += s(k) * vk * vk.adjoint();
      if (s(k) > cutoff) out.partial_isometry += svd.matrixU().col(k) * vk.adjoint();
    }
    return out;
  };
  // JacobiSVD throughout: Eigen 3.4's BDCSVD loses the factorization on
  // complex matrices with clustered singular values (e.g. ψ links at n = 8).
  return build(Eigen::JacobiSVD<Mat>(v, Eigen::ComputeThinU | Eigen::ComputeThinV));
}

inline Mat polar_part(const Mat& v, double cutoff = kRankCutoff) {
  return polar_decomposition(v, cutoff).partial_isometry;
}

/// Rank with a relative singular value cutoff.
inline Eigen::Index numerical_rank(const Mat& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * s(0)) ++r;
  return r;
}

/// Normalized trace tr(m)/dim.
inline Cplx normalized_trace(const Mat& m) {
  return m.trace() / static_cast<double>(m.rows());
}

/// Worker count from OZCHECK_THREADS (default: hardware concurrency).
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OZCHECK_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) return std::min<unsigned>(static_cast<unsigned>(requested), std::max(hw, 1u) * 4);
  }
  return hw;
}

/// Runs body(i) for i in [0, count). Each index is processed exactly once and
/// results must be written to per-index slots, so the outcome does not depend
/// on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ozcheck
