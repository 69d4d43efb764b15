#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/operators.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

/// Bracket [lower, upper] for pi_r at truncation degree D.
struct SummingEstimate {
  double r = 2.0;
  double lower = 0.0;
  Flagged upper = Flagged::inf();
  std::string method;
  int D = 0;
};

enum class FamilyKind { kernel, rademacher, derivative, onb };

inline const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::kernel: return "kernel";
    case FamilyKind::rademacher: return "rademacher";
    case FamilyKind::derivative: return "derivative";
    case FamilyKind::onb: return "onb";
  }
  return "?";
}

/// Finite sequence in A^p_alpha, members stored as coefficient vectors in
/// the orthonormal basis of A^2_alpha (truncated at the basis degree).
struct TestFamily {
  FamilyKind kind = FamilyKind::onb;
  double p = 2.0;
  BasisSpec basis;
  std::vector<Eigen::VectorXcd> members;
  std::vector<std::vector<int>> signs;  // rademacher draws, one row per member
};

/// Coefficients of K_alpha(., w) in the orthonormal basis: conj(e_m(w)).
inline Eigen::VectorXcd kernel_coefficients(const BasisSpec& b, const BallPoint& w) {
  return basis_values(b, w).conjugate();
}

/// ||K_w||_{A^q_alpha} with q = infinity allowed (sup norm (1-|w|)^(-c)).
inline double kernel_norm_any(const KernelParams& kp, const BallPoint& w, double q) {
  if (std::isinf(q)) return std::pow(1.0 - w.norm(), -kp.c());
  return kernel_ap_norm(kp, w, q).value;
}

inline TestFamily kernel_family(const Lattice& lat, double p, const BasisSpec& b) {
  TestFamily f{FamilyKind::kernel, p, b, {}, {}};
  const KernelParams kp = b.kernel();
  for (const auto& a : lat.points) f.members.push_back(kernel_coefficients(b, a) / kernel_norm_any(kp, a, p));
  return f;
}

inline TestFamily onb_family(const BasisSpec& b) {
  TestFamily f{FamilyKind::onb, 2.0, b, {}, {}};
  const auto d = static_cast<Eigen::Index>(b.size());
  for (Eigen::Index k = 0; k < d; ++k) f.members.push_back(Eigen::VectorXcd::Unit(d, k));
  return f;
}

/// Sign patterns: draw k uses consecutive mt19937_64 words, one bit per sign.
inline std::vector<std::vector<int>> rademacher_signs(std::size_t m, std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::vector<int>> out(draws, std::vector<int>(m));
  for (auto& row : out) {
    std::uint64_t word = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j % 64 == 0) word = gen();
      row[j] = (word >> (j % 64)) & 1U ? 1 : -1;
    }
  }
  return out;
}

/// Members f_t = sum_j c_j r_j(t) k_{a_j, p} for `draws` seeded sign patterns.
inline TestFamily rademacher_family(const Lattice& lat, const std::vector<cplx>& c, double p, std::size_t draws,
                                    std::uint64_t seed, const BasisSpec& b) {
  if (c.size() != lat.points.size()) throw ConfigError("rademacher_family: coefficient count must match lattice size");
  if (draws == 0) throw ConfigError("rademacher_family: draws must be positive");
  const TestFamily kern = kernel_family(lat, p, b);
  TestFamily f{FamilyKind::rademacher, p, b, {}, rademacher_signs(c.size(), draws, seed)};
  for (const auto& row : f.signs) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
    for (std::size_t j = 0; j < c.size(); ++j) v += (c[j] * static_cast<double>(row[j])) * kern.members[j];
    f.members.push_back(std::move(v));
  }
  return f;
}

/// Normalized L(., a_k) on the disc: coefficients (k+1)(k+2) conj(a)^{k+1} of
/// z^k, divided by the quadrature A^p_alpha norm of L(., a_k).
inline TestFamily derivative_family(const Lattice& lat, double p, const BasisSpec& b, const QuadratureScheme& q = {}) {
  if (b.n != 1) throw ConfigError("derivative_family: disc only");
  TestFamily f{FamilyKind::derivative, p, b, {}, {}};
  for (const auto& a : lat.points) {
    const cplx ac = std::conj(a.first());
    if (ac == cplx{}) continue;
    auto L = [&](const DiskNode& nd) { return derivative_kernel(BallPoint(nd.z), a); };
    const double norm = disc_ap_norm(L, p, b.alpha, q, a.first());
    Eigen::VectorXcd v(static_cast<Eigen::Index>(b.size()));
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double kd = static_cast<double>(k);
      v(static_cast<Eigen::Index>(k)) = (kd + 1.0) * (kd + 2.0) * std::pow(ac, kd + 1.0) * b.norms[k] / norm;
    }
    f.members.push_back(std::move(v));
  }
  return f;
}

/// Candidate functionals g (coefficient vectors, pairing <x, g> = g^H x) of
/// unit A^{p'} norm; exact_hilbert enables the closed-form supremum at p = r = 2.
struct DualSampler {
  std::vector<Eigen::VectorXcd> candidates;
  bool exact_hilbert = true;
  double p_dual = 2.0;
};

/// ||z^j||_{A^q_alpha} on the disc (q = infinity gives 1).
inline double monomial_norm_any(int j, double alpha, double q) {
  if (std::isinf(q)) return 1.0;
  const double s = 0.5 * j * q;
  return std::exp((log_gamma(2.0 + alpha) + log_gamma(s + 1.0) - log_gamma(2.0 + alpha + s)) / q);
}

/// Kernels k_{w,p'} on `radii` x `angles` points uniform in hyperbolic
/// radius up to `max_radius`, plus the first `monomials` normalized monomials.
inline DualSampler default_sampler(const BasisSpec& b, double p, bool exact_hilbert = true, int radii = 60,
                                   int angles = 32, int monomials = 64, double max_radius = 3.0) {
  if (b.n != 1) throw ConfigError("default_sampler: disc only");
  DualSampler s;
  s.exact_hilbert = exact_hilbert;
  s.p_dual = conjugate(p);
  const KernelParams kp = b.kernel();
  for (int i = 0; i < radii; ++i) {
    const double rho = std::tanh(max_radius * (i + 1.0) / radii);
    for (int j = 0; j < angles; ++j) {
      const BallPoint w(std::polar(rho, 2.0 * kPi * j / angles));
      s.candidates.push_back(kernel_coefficients(b, w) / kernel_norm_any(kp, w, s.p_dual));
    }
  }
  const int mono = std::min<int>(monomials, static_cast<int>(b.size()));
  for (int j = 0; j < mono; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
    v(j) = b.norms[static_cast<std::size_t>(j)] / monomial_norm_any(j, b.alpha, s.p_dual);
    s.candidates.push_back(std::move(v));
  }
  return s;
}

struct WeakNorm {
  double value = 0.0;
  bool exact = false;
};

inline Eigen::MatrixXcd member_matrix(const TestFamily& f) {
  const auto d = static_cast<Eigen::Index>(f.basis.size());
  Eigen::MatrixXcd X(d, static_cast<Eigen::Index>(f.members.size()));
  for (std::size_t k = 0; k < f.members.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = f.members[k];
  return X;
}

/// sup over the sampler of (sum_k |<x_k, g>|^r)^{1/r}; exact at p = r = 2.
inline WeakNorm weak_r_norm(const TestFamily& f, double r, const DualSampler& s) {
  if (f.members.empty()) throw ConfigError("weak_r_norm: empty family");
  if (!(r >= 1.0)) throw ConfigError("weak_r_norm: r must be >= 1");
  const Eigen::MatrixXcd X = member_matrix(f);
  if (s.exact_hilbert && f.p == 2.0 && r == 2.0) return {op_norm(X), true};
  if (s.candidates.empty()) throw ConfigError("weak_r_norm: sampler has no candidates");
  const Eigen::Index d = X.rows();
  double best = 0.0;
  for (const auto& g : s.candidates) {
    const Eigen::Index len = std::min(d, g.size());
    const Eigen::RowVectorXcd pair = g.head(len).adjoint() * X.topRows(len);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < pair.size(); ++k) acc += std::pow(std::abs(pair(k)), r);
    best = std::max(best, std::pow(acc, 1.0 / r));
  }
  return {best, false};
}

/// ||f||_{A^p_alpha} of a basis expansion; Euclidean at p = 2.
inline double coefficient_ap_norm(const Eigen::VectorXcd& y, const BasisSpec& b, double p, const QuadratureScheme& q = {}) {
  if (p == 2.0) return y.norm();
  if (b.n != 1) throw ConfigError("coefficient_ap_norm: quadrature norms are implemented for n = 1");
  HoloPoly poly = HoloPoly::zero(1, b.D);
  for (std::size_t k = 0; k < b.size(); ++k) poly.coeffs[k] = y(static_cast<Eigen::Index>(k)) / b.norms[k];
  return disc_ap_norm([&](const DiskNode& nd) { return poly.eval_disc(nd.z); }, p, b.alpha, q);
}

/// (sum ||T x_k||^r)^{1/r} / weak_r(x): a lower bound for pi_r of the truncation.
inline SummingEstimate summing_lower_bound(const TruncatedOperator& T, const TestFamily& f, double r,
                                           const DualSampler& s, const QuadratureScheme& q = {}) {
  const WeakNorm weak = weak_r_norm(f, r, s);
  if (!(weak.value > 0.0)) throw NumericError("summing_lower_bound: weak norm of the family is zero");
  std::vector<double> terms;
  terms.reserve(f.members.size());
  for (const auto& x : f.members) terms.push_back(std::pow(coefficient_ap_norm(T.matrix * x, T.basis, f.p, q), r));
  SummingEstimate e;
  e.r = r;
  e.lower = std::pow(pairwise_sum(terms), 1.0 / r) / weak.value;
  e.upper = Flagged::inf();
  e.method = weak.exact ? "exact-hilbert" : "sampled";
  e.D = T.basis.D;
  return e;
}

namespace detail {

/// Integral over xi of g(xi) |1 - z conj(xi)|^(-2) dv(xi) for radial g given on
/// the radial nodes; the circle average of |1 - x e^{it}|^(-2) is 1/(1 - x^2).
inline double radial_kernel_average(const std::vector<RadialNode>& xi, const std::vector<double>& g, const DiskNode& z) {
  const double x2 = std::norm(z.z);
  std::vector<double> terms(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    terms[i] = g[i] == 0.0 ? 0.0 : xi[i].w * g[i] / (z.c + x2 * xi[i].c);
  }
  return pairwise_sum(terms);
}

}  // namespace detail

/// Upper bound ||h||_{L^p(dv)} for pi_p(T_mu) from an order-bounding majorant.
/// Default h(z) = integral of K(xi,xi)^{1/p} |K(z,xi)| dmu(xi), for which the
/// pointwise estimate gives constant 1.  With `averaged`, dmu is replaced by
/// mu-hat_delta dv (rotation invariant measures).
inline SummingEstimate order_bounded_upper(const MeasureSpec& mu, double p, double delta, const QuadratureScheme& q = {},
                                           bool averaged = false) {
  if (!(p >= 1.0)) throw ConfigError("order_bounded_upper: p must be >= 1");
  validate(mu);
  if (measure_dim(mu) != 1) throw ConfigError("order_bounded_upper: disc measures only");
  SummingEstimate e;
  e.r = p;
  e.method = averaged ? "order-bounded-averaged" : "order-bounded";
  const double kexp = 2.0 / p;  // K(xi,xi)^{1/p} = (1-|xi|^2)^(-2/p)

  if (const auto* a = std::get_if<AtomicMeasure>(&mu); a && !averaged) {
    bool any = false;
    double far = 0.0;
    for (std::size_t k = 0; k < a->points.size(); ++k) {
      if (a->masses[k] > 0.0) any = true;
      far = std::max(far, a->points[k].norm());
    }
    if (!any) {
      e.upper = Flagged::exact(0.0);
      return e;
    }
    auto h = [&](const DiskNode& nd) {
      double s = 0.0;
      for (std::size_t k = 0; k < a->points.size(); ++k) {
        const auto& pt = a->points[k];
        s += a->masses[k] * std::pow(pt.defect(), -kexp) / std::norm(1.0 - nd.z * std::conj(pt.first()));
      }
      return s;
    };
    const int angular = std::max(q.angular, static_cast<int>(std::ceil(8.0 * kPi / (1.0 - far))));
    const auto samples = sample_disc(h, q, is_rotation_invariant(mu), angular);
    e.upper = flagged_root(weighted_power_integral(samples, p, 0.0), p);
    return e;
  }

  if (!is_rotation_invariant(mu)) {
    throw ConfigError("order_bounded_upper: non-radial densities are not supported");
  }
  std::vector<RadialNode> xi;
  std::vector<double> g;
  if (averaged) {
    xi = detail::boundary_radial_nodes(1e-10, 40, 16);
    g.resize(xi.size());
    parallel_for(xi.size(), [&](std::size_t i) {
      g[i] = average_mu(mu, delta, DiscCenter{cplx(xi[i].r, 0.0), xi[i].c}, q) * std::pow(xi[i].c, -kexp);
    });
  } else if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    const double b = rp->t - kexp;
    if (!(b > -1.0)) {
      e.upper = Flagged::inf();
      return e;
    }
    xi = detail::boundary_radial_nodes();
    g.resize(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) g[i] = rp->scale * std::pow(xi[i].c, b);
  } else if (const auto* grid = std::get_if<GridDensityMeasure>(&mu)) {
    xi = detail::grid_radial_nodes(*grid);
    g.resize(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) g[i] = detail::grid_value(*grid, xi[i].r, 0.0) * std::pow(xi[i].c, -kexp);
  } else {
    // Atoms at the origin only: h is the constant total mass.
    const auto& at = std::get<AtomicMeasure>(mu);
    double mass = 0.0;
    for (double m : at.masses) mass += m;
    e.upper = Flagged::exact(mass);
    return e;
  }
  const auto samples = sample_disc([&](const DiskNode& z) { return detail::radial_kernel_average(xi, g, z); }, q, true);
  e.upper = flagged_root(weighted_power_integral(samples, p, 0.0), p);
  return e;
}

/// sqrt(trace) of the embedding Gram matrix: pi_2(J_mu: A^2 -> L^2(mu)) at degree D.
inline double pi2_embedding_exact(const MeasureSpec& mu, const BasisSpec& b) {
  return std::sqrt(std::max(embedding_gram(mu, b).matrix.trace().real(), 0.0));
}

/// (integral of (mu~(w) K(w,w))^{p'/2} dv(w))^{1/p'}, the 2-summing criterion
/// integral for the embedding on A^p, 1 < p <= 2.
inline Flagged lemma31_criterion(const MeasureSpec& mu, double p, const QuadratureScheme& q = {}) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("lemma31_criterion: p must lie in (1, 2]");
  const double pc = conjugate(p);
  const auto samples = sample_berezin(mu, q);
  return flagged_root(weighted_power_integral(samples, 0.5 * pc, pc), pc);
}

struct ProofExponents {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  bool alpha_positive = false;
  bool beta_positive = false;
  bool eta_positive = false;
  bool chain_equal = false;      // n+1+alpha == (n+1+beta)/2
  bool chain_inclusion = false;  // n+1+alpha <= (n+1+beta)/2
};

inline ProofExponents proof_exponents(double p, double r, double N, int n) {
  if (!(p > 1.0) || !(r >= 1.0) || !(N > 0.0) || n < 1) throw ConfigError("proof_exponents: need p > 1, r >= 1, N > 0, n >= 1");
  ProofExponents e;
  e.alpha = N + (n + 1.0) * (1.0 / p - 1.0);
  e.beta = 2.0 * N + (n + 1.0) * (1.0 - 2.0 / p);
  e.eta = N * r - (n + 1.0) * (1.0 - r / p);
  e.alpha_positive = e.alpha > 0.0;
  e.beta_positive = e.beta > 0.0;
  e.eta_positive = e.eta > 0.0;
  const double lhs = n + 1.0 + e.alpha;
  const double rhs = 0.5 * (n + 1.0 + e.beta);
  e.chain_equal = std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs));
  e.chain_inclusion = lhs <= rhs + 1e-12 * std::max(1.0, std::abs(lhs));
  return e;
}

/// omega = mu-hat^{2s/p'} K^{sq/p' - 1}, so that (omega K)^{p'/2} = (mu-hat K^{q/2})^s.
inline double carleson_weight(double muhat, double K, double p, double q) {
  const Flagged s = s_exponent(p, q);
  if (s.infinite) throw ConfigError("carleson_weight: s is infinite at (p, q) = (1, 2)");
  const double pc = conjugate(p);
  if (std::isinf(pc)) return 1.0 / K;
  return std::pow(muhat, 2.0 * s.value / pc) * std::pow(K, s.value * q / pc - 1.0);
}

/// The weight omega dv as a radial grid density on the radii `r`.
inline GridDensityMeasure carleson_weight_measure(const MeasureSpec& mu, double p, double q, double delta,
                                                  const std::vector<double>& r, const QuadratureScheme& qs = {}) {
  if (!is_rotation_invariant(mu)) throw ConfigError("carleson_weight_measure: rotation invariant measures only");
  GridDensityMeasure g;
  g.r = r;
  g.theta = {0.0};
  for (double rr : r) {
    const double c = (1.0 - rr) * (1.0 + rr);
    const double muhat = average_mu(mu, delta, DiscCenter{cplx(rr, 0.0), c}, qs);
    g.values.push_back({carleson_weight(muhat, 1.0 / (c * c), p, q)});
  }
  validate(MeasureSpec{g});
  return g;
}

/// Sign-averaged moments of S = sum_k eps_k b_k.
struct KhinchineReport {
  std::size_t draws = 0;
  double sum_b2 = 0.0;
  double mean_l1 = 0.0;
  double mean_l2 = 0.0;
  double mean_l4 = 0.0;
  double se_l2 = 0.0;
  double ratio_l1 = 0.0;  // mean|S| / (sum|b|^2)^{1/2}
  double ratio_l4 = 0.0;  // (mean|S|^4)^{1/4} / (sum|b|^2)^{1/2}
  static constexpr double l1_lower = 0.70710678118654752;
  static constexpr double l1_upper = 1.0;
  static constexpr double l4_lower = 1.0;
  static constexpr double l4_upper = 1.3160740129524925;  // 3^{1/4}
};

inline KhinchineReport khinchine_check(const std::vector<cplx>& b, std::size_t draws, std::uint64_t seed) {
  if (b.empty() || draws < 2) throw ConfigError("khinchine_check: need coefficients and at least two draws");
  const auto signs = rademacher_signs(b.size(), draws, seed);
  KhinchineReport rep;
  rep.draws = draws;
  for (const auto& v : b) rep.sum_b2 += std::norm(v);
  std::vector<double> l1(draws), l2(draws), l4(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    cplx s{};
    for (std::size_t j = 0; j < b.size(); ++j) s += static_cast<double>(signs[d][j]) * b[j];
    const double a2 = std::norm(s);
    l1[d] = std::sqrt(a2);
    l2[d] = a2;
    l4[d] = a2 * a2;
  }
  const double n = static_cast<double>(draws);
  rep.mean_l1 = pairwise_sum(l1) / n;
  rep.mean_l2 = pairwise_sum(l2) / n;
  rep.mean_l4 = pairwise_sum(l4) / n;
  double var = 0.0;
  for (double v : l2) var += (v - rep.mean_l2) * (v - rep.mean_l2);
  rep.se_l2 = std::sqrt(var / (n - 1.0) / n);
  rep.ratio_l1 = rep.mean_l1 / std::sqrt(rep.sum_b2);
  rep.ratio_l4 = std::pow(rep.mean_l4, 0.25) / std::sqrt(rep.sum_b2);
  return rep;
}

}  // namespace bergman
