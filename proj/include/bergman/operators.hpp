#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/kernels.hpp"
#include "bergman/measures.hpp"

namespace bergman {

/// Orthonormal monomial basis e_m = z^m / ||z^m|| of A^2_alpha, |m| <= D.
struct BasisSpec {
  int n = 1;
  double alpha = 0.0;
  int D = 0;
  std::vector<MultiIndex> ordering;
  std::vector<double> norms;  // ||z^m||_{A^2_alpha}

  std::size_t size() const noexcept { return ordering.size(); }
  KernelParams kernel() const { return {n, alpha}; }
};

/// log ||z^m||^2 = log m! + log Gamma(n+1+alpha) - log Gamma(n+1+|m|+alpha)
inline double log_monomial_norm2(int n, double alpha, const MultiIndex& m) {
  return log_multi_factorial(m) + log_gamma(n + 1.0 + alpha) - log_gamma(n + 1.0 + total_degree(m) + alpha);
}

inline BasisSpec build_basis(int n, double alpha, int D) {
  KernelParams{n, alpha}.validate();
  if (D < 0) throw ConfigError("build_basis: D must be >= 0");
  BasisSpec b;
  b.n = n;
  b.alpha = alpha;
  b.D = D;
  b.ordering = graded_lex_indices(n, D);
  b.norms.reserve(b.ordering.size());
  for (const auto& m : b.ordering) b.norms.push_back(std::exp(0.5 * log_monomial_norm2(n, alpha, m)));
  return b;
}

/// Values e_m(z) for the whole basis.  For n = 1 the powers are built in log
/// form so that large m neither overflow nor lose the norm constant.
inline Eigen::VectorXcd basis_values(const BasisSpec& b, const BallPoint& z) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(b.size()));
  if (b.n == 1) {
    const cplx w = z.first();
    if (w == cplx{}) {
      v.setZero();
      v(0) = 1.0 / b.norms[0];
      return v;
    }
    const double lr = std::log(std::abs(w));
    const double th = std::arg(w);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double m = static_cast<double>(k);
      const double ln = 0.5 * log_monomial_norm2(1, b.alpha, b.ordering[k]);
      v(static_cast<Eigen::Index>(k)) = std::polar(std::exp(m * lr - ln), m * th);
    }
    return v;
  }
  for (std::size_t k = 0; k < b.size(); ++k) v(static_cast<Eigen::Index>(k)) = monomial(z, b.ordering[k]) / b.norms[k];
  return v;
}

enum class OperatorKind { toeplitz, embedding_gram };

struct TruncatedOperator {
  BasisSpec basis;
  Eigen::MatrixXcd matrix;
  OperatorKind kind = OperatorKind::toeplitz;
};

namespace detail {

/// Closed form of the r-integral of r^k (a + b r) 2 dr, k >= 0.
inline double poly_moment(double k, double r0, double r1, double a, double b) {
  auto prim = [&](double r) {
    return 2.0 * (a * std::pow(r, k + 1.0) / (k + 1.0) + b * std::pow(r, k + 2.0) / (k + 2.0));
  };
  return prim(r1) - prim(r0);
}

/// (1/2pi) integral over theta of a periodic piecewise-linear row times e^{-i k theta}.
inline cplx row_fourier(const GridDensityMeasure& g, const std::vector<double>& row, int k) {
  const std::size_t m = g.theta.size();
  if (m == 1) return k == 0 ? cplx(row.front()) : cplx{};
  cplx acc{};
  for (std::size_t j = 0; j < m; ++j) {
    const double a = g.theta[j];
    const double b = j + 1 < m ? g.theta[j + 1] : g.theta[0] + 2.0 * kPi;
    const double v0 = row[j], v1 = row[(j + 1) % m];
    const double h = b - a;
    if (k == 0) {
      acc += 0.5 * h * (v0 + v1);
      continue;
    }
    const cplx ik(0.0, static_cast<double>(k));
    const cplx ea = std::exp(-ik * a), eb = std::exp(-ik * b);
    const cplx i0 = (ea - eb) / ik;
    const cplx i1 = -h * eb / ik + (ea - eb) / (ik * ik);
    acc += v0 * i0 + (v1 - v0) / h * i1;
  }
  return acc / (2.0 * kPi);
}

}  // namespace detail

/// Matrix of T_mu on the basis: entry (i, j) = integral of e_j conj(e_i) dmu.
inline TruncatedOperator toeplitz_matrix(const MeasureSpec& mu, const BasisSpec& b) {
  validate(mu);
  const auto d = static_cast<Eigen::Index>(b.size());
  TruncatedOperator T{b, Eigen::MatrixXcd::Zero(d, d), OperatorKind::toeplitz};
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    Eigen::MatrixXcd E(static_cast<Eigen::Index>(a->points.size()), d);
    for (std::size_t k = 0; k < a->points.size(); ++k) {
      if (a->points[k].dim() != b.n) throw ConfigError("toeplitz_matrix: dimension mismatch");
      E.row(static_cast<Eigen::Index>(k)) = std::sqrt(a->masses[k]) * basis_values(b, a->points[k]).transpose();
    }
    T.matrix = E.adjoint() * E;
    return T;
  }
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    if (rp->n != b.n) throw ConfigError("toeplitz_matrix: dimension mismatch");
    const int n = b.n;
    for (Eigen::Index k = 0; k < d; ++k) {
      const int deg = total_degree(b.ordering[static_cast<std::size_t>(k)]);
      const double lv = log_gamma(n + 1.0) + log_gamma(rp->t + 1.0) + log_gamma(n + 1.0 + deg + b.alpha) -
                        log_gamma(n + 1.0 + deg + rp->t) - log_gamma(n + 1.0 + b.alpha);
      T.matrix(k, k) = rp->scale * std::exp(lv);
    }
    return T;
  }
  const auto& g = std::get<GridDensityMeasure>(mu);
  if (b.n != 1) throw ConfigError("toeplitz_matrix: grid measures are defined on the disc");
  const int D = b.D;
  const std::size_t rows = g.r.size();
  const int kmax = grid_is_radial(g) ? 0 : D;
  // Row Fourier coefficients rho_i^(k), k = -kmax..kmax.
  std::vector<std::vector<cplx>> four(rows, std::vector<cplx>(static_cast<std::size_t>(2 * kmax + 1)));
  for (std::size_t i = 0; i < rows; ++i)
    for (int k = -kmax; k <= kmax; ++k)
      four[i][static_cast<std::size_t>(k + kmax)] = detail::row_fourier(g, g.values[i], k);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const int freq = static_cast<int>(i - j);
      if (std::abs(freq) > kmax) continue;
      const double power = static_cast<double>(i + j);
      cplx acc{};
      for (std::size_t s = 0; s + 1 < rows; ++s) {
        const double r0 = g.r[s], r1 = g.r[s + 1];
        const cplx A = four[s][static_cast<std::size_t>(freq + kmax)];
        const cplx B = four[s + 1][static_cast<std::size_t>(freq + kmax)];
        // density row is (1-u) A + u B with u = (r - r0)/(r1 - r0)
        const double h = r1 - r0;
        const double re = detail::poly_moment(power + 1.0, r0, r1, (A.real() * r1 - B.real() * r0) / h, (B.real() - A.real()) / h);
        const double im = detail::poly_moment(power + 1.0, r0, r1, (A.imag() * r1 - B.imag() * r0) / h, (B.imag() - A.imag()) / h);
        acc += cplx(re, im);
      }
      const double scale = std::exp(-0.5 * (log_monomial_norm2(1, b.alpha, b.ordering[static_cast<std::size_t>(i)]) +
                                            log_monomial_norm2(1, b.alpha, b.ordering[static_cast<std::size_t>(j)])));
      T.matrix(i, j) = acc * scale;
    }
  }
  return T;
}

/// Gram matrix of the embedding J_mu restricted to the basis; same entries
/// as the Toeplitz matrix.
inline TruncatedOperator embedding_gram(const MeasureSpec& mu, const BasisSpec& b) {
  TruncatedOperator T = toeplitz_matrix(mu, b);
  T.kind = OperatorKind::embedding_gram;
  return T;
}

inline double hs_norm(const Eigen::MatrixXcd& m) { return m.norm(); }
inline double hs_norm(const TruncatedOperator& T) { return hs_norm(T.matrix); }

/// Largest singular value by power iteration on M^H M from the normalized
/// all-ones vector; stops when ||A v - lambda v|| <= tol * lambda.
inline double op_norm(const Eigen::MatrixXcd& m, double tol = 1e-10, int max_iter = 10000) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXcd A = m.rows() >= m.cols() ? Eigen::MatrixXcd(m.adjoint() * m) : Eigen::MatrixXcd(m * m.adjoint());
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXcd w = A * v;
    const double wn = w.norm();
    if (wn == 0.0) {
      if (A.norm() == 0.0) return 0.0;
      // Start vector in the kernel; move to the first nonzero column.
      Eigen::Index col = 0;
      A.colwise().norm().maxCoeff(&col);
      v = A.col(col) / A.col(col).norm();
      continue;
    }
    const double lambda = v.dot(w).real();
    if ((w - lambda * v).norm() <= tol * std::abs(lambda)) return std::sqrt(std::max(lambda, 0.0));
    v = w / wn;
  }
  throw NumericError("op_norm: power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

inline double op_norm(const TruncatedOperator& T) { return op_norm(T.matrix); }

/// T_mu f(z) = sum_k m_k f(a_k) K_alpha(z, a_k) for an atomic measure.
template <class F>
cplx toeplitz_apply(const AtomicMeasure& a, F&& f, const BallPoint& z, const KernelParams& kp = {}) {
  std::vector<cplx> terms;
  terms.reserve(a.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    terms.push_back(a.masses[k] * cplx(f(a.points[k])) * kernel_eval(kp, z, a.points[k]));
  }
  return pairwise_sum(terms);
}

}  // namespace bergman
