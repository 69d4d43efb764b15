#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

/// Weight data for A^2_alpha on B_n; c() = n + 1 + alpha is the kernel exponent.
struct KernelParams {
  int n = 1;
  double alpha = 0.0;

  double c() const noexcept { return n + 1.0 + alpha; }
  void validate() const {
    if (n < 1) throw ConfigError("KernelParams: n must be >= 1");
    if (!(alpha > -1.0)) throw ConfigError("KernelParams: alpha must exceed -1");
  }
};

/// K_alpha(z, w) = (1 - <z, w>)^(-(n+1+alpha))
inline cplx kernel_eval(const KernelParams& kp, const BallPoint& z, const BallPoint& w) {
  return std::exp(-kp.c() * std::log(1.0 - inner(z, w)));
}

/// K_alpha(z, z) = (1 - |z|^2)^(-(n+1+alpha))
inline double kernel_diag(const KernelParams& kp, double defect) { return std::pow(defect, -kp.c()); }
inline double kernel_diag(const KernelParams& kp, const BallPoint& z) { return kernel_diag(kp, z.defect()); }

/// Normalized weighted volume v_alpha of B_n's density against dv:
/// Gamma(n+alpha+1) / (n! Gamma(alpha+1)) (1 - |z|^2)^alpha.
inline double weight_constant(const KernelParams& kp) {
  return std::exp(log_gamma(kp.n + kp.alpha + 1.0) - log_gamma(kp.n + 1.0) - log_gamma(kp.alpha + 1.0));
}

/// ||K_z||_{A^p_alpha}.  The p-th power is 2F1(pc/2, pc/2; c; |z|^2) with
/// c = n + 1 + alpha; p = 1 is the logarithmic borderline.
inline Flagged kernel_ap_norm(const KernelParams& kp, const BallPoint& z, double p) {
  kp.validate();
  if (!(p >= 1.0)) throw ConfigError("kernel_ap_norm: p must be >= 1");
  if (z.dim() != kp.n) throw ConfigError("kernel_ap_norm: dimension mismatch");
  if (p == 2.0) return Flagged::exact(std::sqrt(kernel_diag(kp, z)));
  const double c = kp.c();
  const double x = z.norm2();
  Flagged out = Flagged::exact(std::pow(hyp2f1_symmetric(0.5 * p * c, c, x), 1.0 / p));
  out.borderline = p == 1.0;
  return out;
}

/// k_{z,p}(w) = K(w, z) / ||K_z||_{A^p_alpha}
inline cplx normalized_kernel_eval(const KernelParams& kp, const BallPoint& z, double p, const BallPoint& w) {
  const Flagged norm = kernel_ap_norm(kp, z, p);
  if (!norm.finite()) throw NumericError("normalized_kernel_eval: kernel norm is infinite");
  return kernel_eval(kp, w, z) / norm.value;
}

/// Integral of (1-|w|^2)^b |1 - <z,w>|^(-c) against dv.  Boundary-refined
/// quadrature in the disc, exact hypergeometric series for n >= 2.
inline Flagged forelli_rudin(double b, double c, const KernelParams& kp, const BallPoint& z,
                             const QuadratureScheme& q = {}) {
  if (!(b > -1.0)) throw ConfigError("forelli_rudin: b must exceed -1");
  if (z.dim() != kp.n) throw ConfigError("forelli_rudin: dimension mismatch");
  const int n = kp.n;
  if (n >= 2) {
    const double mass = std::exp(log_gamma(n + 1.0) + log_gamma(b + 1.0) - log_gamma(n + b + 1.0));
    if (c == 0.0) return Flagged::exact(mass);
    return Flagged::exact(mass * hyp2f1_symmetric(0.5 * c, n + 1.0 + b, z.norm2()));
  }
  const cplx zc = std::conj(z.first());
  auto integrand = [&](const DiskNode& nd) {
    const double base = b == 0.0 ? 1.0 : std::pow(nd.c, b);
    if (c == 0.0) return base;
    return base * std::pow(std::norm(1.0 - nd.z * zc), -0.5 * c);
  };
  return integrate_ball_refined(integrand, q, z.first());
}

/// S_{b,c} f(z) together with the refinement-divergence flag.
struct SValue {
  cplx value;
  bool divergent;
  cplx coarse;
  cplx refined;
};

/// S_{b,c} f(z) = integral of f(w) (1-|w|^2)^b |1 - <z,w>|^(-c) dv(w) in the
/// disc; f takes a DiskNode.
template <class F>
SValue apply_S(double b, double c, F&& f, const BallPoint& z, const QuadratureScheme& q = {}) {
  if (!(b > -1.0)) throw ConfigError("apply_S: b must exceed -1");
  if (z.dim() != 1) throw ConfigError("apply_S: quadrature engine supports n = 1");
  const cplx zc = std::conj(z.first());
  auto integrand = [&](const DiskNode& nd) -> cplx {
    const double base = b == 0.0 ? 1.0 : std::pow(nd.c, b);
    const double ker = c == 0.0 ? 1.0 : std::pow(std::norm(1.0 - nd.z * zc), -0.5 * c);
    return cplx(f(nd)) * (base * ker);
  };
  const cplx coarse = integrate_ball(integrand, q, z.first());
  const cplx fine = integrate_ball(integrand, q.refined(), z.first());
  const double scale = std::abs(fine);
  const bool divergent = !(std::isfinite(scale)) || (scale > 0.0 && std::abs(fine - coarse) > 0.1 * scale);
  return {divergent ? cplx(kInf, 0.0) : fine, divergent, coarse, fine};
}

/// L(z, w) = (n+1) conj(w_1) (1 - <z, w>)^(-(n+2))
inline cplx derivative_kernel(const BallPoint& z, const BallPoint& w) {
  const int n = z.dim();
  return (n + 1.0) * std::conj(w.first()) * std::exp(-(n + 2.0) * std::log(1.0 - inner(z, w)));
}

using MultiIndex = std::vector<int>;

/// Multi-indices with |m| <= D: by total degree, then lexicographically
/// decreasing in (m_1, ..., m_n).
inline std::vector<MultiIndex> graded_lex_indices(int n, int D) {
  if (n < 1 || D < 0) throw ConfigError("graded_lex_indices: need n >= 1 and D >= 0");
  std::vector<MultiIndex> out;
  MultiIndex m(static_cast<std::size_t>(n), 0);
  for (int deg = 0; deg <= D; ++deg) {
    // Enumerate compositions of deg into n parts, first part largest first.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == n - 1) {
        m[static_cast<std::size_t>(pos)] = remaining;
        out.push_back(m);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        m[static_cast<std::size_t>(pos)] = v;
        self(self, pos + 1, remaining - v);
      }
    };
    rec(rec, 0, deg);
  }
  return out;
}

inline int total_degree(const MultiIndex& m) {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

/// log m! = sum log m_i!
inline double log_multi_factorial(const MultiIndex& m) {
  double s = 0.0;
  for (int v : m) s += log_gamma(v + 1.0);
  return s;
}

/// z^m
inline cplx monomial(const BallPoint& z, const MultiIndex& m) {
  cplx out{1.0, 0.0};
  for (int j = 0; j < z.dim(); ++j) {
    if (m[static_cast<std::size_t>(j)] > 0) out *= std::pow(z[j], m[static_cast<std::size_t>(j)]);
  }
  return out;
}

/// Holomorphic polynomial of degree <= D; coefficient k belongs to index[k].
struct HoloPoly {
  int n = 1;
  int degree = 0;
  std::vector<MultiIndex> index;
  std::vector<cplx> coeffs;

  static HoloPoly zero(int n, int D) {
    HoloPoly f;
    f.n = n;
    f.degree = D;
    f.index = graded_lex_indices(n, D);
    f.coeffs.assign(f.index.size(), cplx{});
    return f;
  }

  /// Coefficient position of m, or nullopt if |m| > degree.
  std::optional<std::size_t> position(const MultiIndex& m) const {
    if (static_cast<int>(m.size()) != n || total_degree(m) > degree) return std::nullopt;
    if (n == 1) return static_cast<std::size_t>(m[0]);
    for (std::size_t k = 0; k < index.size(); ++k)
      if (index[k] == m) return k;
    return std::nullopt;
  }

  cplx operator()(const BallPoint& z) const {
    if (z.dim() != n) throw ConfigError("HoloPoly: dimension mismatch");
    if (n == 1) return eval_disc(z.first());
    cplx s{};
    for (std::size_t k = 0; k < index.size(); ++k)
      if (coeffs[k] != cplx{}) s += coeffs[k] * monomial(z, index[k]);
    return s;
  }

  /// Horner evaluation for n = 1.
  cplx eval_disc(cplx z) const {
    cplx s{};
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * z + coeffs[k];
    return s;
  }
};

/// Degree-<=D truncation of (1 - <z, w>)^(-c): coefficient of z^m is
/// Gamma(c+|m|) / (Gamma(c) m!) conj(w)^m.
inline HoloPoly binomial_kernel_truncation(double c, const BallPoint& w, int D) {
  HoloPoly f = HoloPoly::zero(w.dim(), D);
  for (std::size_t k = 0; k < f.index.size(); ++k) {
    const auto& m = f.index[k];
    double log_mag = log_gamma(c + total_degree(m)) - log_gamma(c) - log_multi_factorial(m);
    cplx phase{1.0, 0.0};
    bool zero = false;
    for (int j = 0; j < w.dim(); ++j) {
      const int e = m[static_cast<std::size_t>(j)];
      if (e == 0) continue;
      const cplx wc = std::conj(w[j]);
      if (wc == cplx{}) {
        zero = true;
        break;
      }
      log_mag += e * std::log(std::abs(wc));
      phase *= std::polar(1.0, e * std::arg(wc));
    }
    f.coeffs[k] = zero ? cplx{} : std::exp(log_mag) * phase;
  }
  return f;
}

/// Degree-<=D truncation of K_alpha(., w).
inline HoloPoly kernel_truncation(const KernelParams& kp, const BallPoint& w, int D) {
  if (w.dim() != kp.n) throw ConfigError("kernel_truncation: dimension mismatch");
  return binomial_kernel_truncation(kp.c(), w, D);
}

enum class FractionalDirection { raise, lower };

/// log of the degree-j factor Gamma(n+1) Gamma(n+1+j+N) / (Gamma(n+1+N) Gamma(n+1+j)).
inline double fractional_log_factor(int n, int j, double N) {
  return log_gamma(n + 1.0) + log_gamma(n + 1.0 + j + N) - log_gamma(n + 1.0 + N) - log_gamma(n + 1.0 + j);
}

/// R^{0,N} (raise) or R_{0,N} (lower) acting blockwise on homogeneous parts.
inline HoloPoly apply_fractional(FractionalDirection dir, double N, const HoloPoly& f) {
  if (!(N > 0.0)) throw ConfigError("apply_fractional: N must be positive");
  HoloPoly g = f;
  const double sign = dir == FractionalDirection::raise ? 1.0 : -1.0;
  for (std::size_t k = 0; k < g.coeffs.size(); ++k) {
    g.coeffs[k] *= std::exp(sign * fractional_log_factor(f.n, total_degree(f.index[k]), N));
  }
  return g;
}

/// ||f||_{A^p_alpha} in the disc by quadrature; f takes a DiskNode.
template <class F>
double disc_ap_norm(F&& f, double p, double alpha = 0.0, const QuadratureScheme& q = {},
                    std::optional<cplx> focus = {}) {
  const double wc = alpha + 1.0;
  auto integrand = [&](const DiskNode& nd) {
    const double weight = alpha == 0.0 ? 1.0 : wc * std::pow(nd.c, alpha);
    return std::pow(std::abs(cplx(f(nd))), p) * weight;
  };
  return std::pow(integrate_ball(integrand, q, focus), 1.0 / p);
}

}  // namespace bergman
