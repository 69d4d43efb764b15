#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"

namespace bergman {

struct GaussRule {
  std::vector<double> x;  // nodes in (-1, 1), ascending
  std::vector<double> w;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    const auto lo = static_cast<std::size_t>(i);
    rule.x[hi] = x;
    rule.x[lo] = -x;
    rule.w[hi] = w;
    rule.w[lo] = w;
  }
  if (n % 2 == 1) rule.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule of order n on [-1, 1]; computed once per order.
inline const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  static std::mutex m;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Polar tensor rule over the disc.  Radial panels are geometric in 1 - r
/// from 1 down to 1 - rmax; an optional terminal panel closes [rmax, 1].
struct QuadratureScheme {
  int panels = 24;
  int nodes = 16;
  int angular = 256;
  double rmax = 1.0 - 1e-6;
  bool terminal = true;
  int ball_panels = 8;
  int ball_angular = 128;
  std::size_t budget = 20'000'000;

  void validate() const {
    if (panels < 1 || nodes < 1 || angular < 1 || ball_panels < 1 || ball_angular < 1)
      throw ConfigError("QuadratureScheme: panel and node counts must be positive");
    if (!(rmax > 0.0 && rmax < 1.0)) throw ConfigError("QuadratureScheme: rmax must lie in (0, 1)");
    const std::size_t total = static_cast<std::size_t>(panels + 1) * static_cast<std::size_t>(nodes) *
                              static_cast<std::size_t>(angular);
    if (total > budget) {
      throw ConfigError("QuadratureScheme: node count " + std::to_string(total) + " exceeds budget " +
                        std::to_string(budget));
    }
  }

  /// One boundary refinement: four more panels and a 16x smaller cutoff.
  QuadratureScheme refined() const {
    QuadratureScheme s = *this;
    s.panels = panels + 4;
    s.rmax = 1.0 - (1.0 - rmax) / 16.0;
    return s;
  }

  /// The same rule restricted to [0, rcut] with no terminal panel.
  QuadratureScheme truncated(double rcut) const {
    QuadratureScheme s = *this;
    s.rmax = rcut;
    s.terminal = false;
    return s;
  }

  QuadratureScheme with_nodes(int k) const {
    QuadratureScheme s = *this;
    s.nodes = k;
    return s;
  }
};

/// Radial node: r, s = 1 - r, c = 1 - r^2 and the weight for the measure
/// 2r dr on [0, 1].
struct RadialNode {
  double r;
  double s;
  double c;
  double w;
};

struct AngularNode {
  double theta;
  double w;  // normalized so that the weights sum to 1
};

/// Node of the disc rule: the point z, 1 - |z|^2 and the weight for dv.
struct DiskNode {
  cplx z;
  double c;
  double w;
};

namespace detail {

inline void append_panel(std::vector<RadialNode>& out, const GaussRule& g, double s_lo, double s_hi) {
  const double half = 0.5 * (s_hi - s_lo);
  const double mid = 0.5 * (s_hi + s_lo);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double s = mid + half * g.x[i];
    const double r = 1.0 - s;
    out.push_back({r, s, s * (2.0 - s), g.w[i] * half * 2.0 * r});
  }
}

}  // namespace detail

/// Radial nodes on [0, rmax] (plus [rmax, 1] if terminal), ordered by panel.
inline std::vector<RadialNode> radial_nodes(const QuadratureScheme& q) {
  q.validate();
  const auto& g = gauss_legendre(q.nodes);
  std::vector<RadialNode> out;
  out.reserve(static_cast<std::size_t>((q.panels + 1) * q.nodes));
  const double cutoff = 1.0 - q.rmax;
  double s_hi = 1.0;
  for (int k = 1; k <= q.panels; ++k) {
    const double s_lo = std::pow(cutoff, static_cast<double>(k) / q.panels);
    detail::append_panel(out, g, s_lo, s_hi);
    s_hi = s_lo;
  }
  if (q.terminal) detail::append_panel(out, g, 0.0, cutoff);
  return out;
}

/// Radial nodes on an arbitrary set of breakpoints in r.
inline std::vector<RadialNode> radial_nodes_between(const std::vector<double>& r_breaks, int nodes) {
  const auto& g = gauss_legendre(nodes);
  std::vector<RadialNode> out;
  for (std::size_t k = 0; k + 1 < r_breaks.size(); ++k) {
    if (r_breaks[k + 1] <= r_breaks[k]) continue;
    detail::append_panel(out, g, 1.0 - r_breaks[k + 1], 1.0 - r_breaks[k]);
  }
  return out;
}

inline std::vector<AngularNode> angular_uniform(int m) {
  std::vector<AngularNode> out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] = {2.0 * kPi * j / m, 1.0 / m};
  return out;
}

/// Angular rule graded geometrically around theta0 down to width `eps`,
/// Gauss-Legendre on each panel.
inline std::vector<AngularNode> angular_graded(double theta0, double eps, int nodes) {
  const auto& g = gauss_legendre(nodes);
  std::vector<double> breaks{kPi};
  while (breaks.back() > eps) breaks.push_back(0.5 * breaks.back());
  breaks.push_back(0.0);
  std::vector<AngularNode> out;
  for (int side : {-1, 1}) {
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double hi = breaks[k], lo = breaks[k + 1];
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        out.push_back({theta0 + side * (mid + half * g.x[i]), g.w[i] * half / (2.0 * kPi)});
      }
    }
  }
  return out;
}

/// Angular rule for integrands peaked at `focus`: graded when |focus| is
/// close to the boundary, uniform otherwise.
inline std::vector<AngularNode> angular_rule(const QuadratureScheme& q, std::optional<cplx> focus) {
  if (focus && std::abs(*focus) > 0.5) {
    const double eps = std::max(1e-12, 0.25 * (1.0 - std::abs(*focus)));
    return angular_graded(std::arg(*focus), eps, q.nodes);
  }
  return angular_uniform(q.angular);
}

inline std::vector<DiskNode> disk_nodes(const QuadratureScheme& q, std::optional<cplx> focus = {}) {
  const auto rad = radial_nodes(q);
  const auto ang = angular_rule(q, focus);
  std::vector<DiskNode> out;
  out.reserve(rad.size() * ang.size());
  for (const auto& rn : rad) {
    for (const auto& an : ang) out.push_back({std::polar(rn.r, an.theta), rn.c, rn.w * an.w});
  }
  return out;
}

namespace detail {

template <class F>
auto call_integrand(F& f, const DiskNode& node) {
  if constexpr (std::is_invocable_v<F&, const DiskNode&>) {
    return f(node);
  } else {
    return f(BallPoint(node.z));
  }
}

template <class T>
bool is_finite_value(const T& v) {
  if constexpr (std::is_same_v<T, cplx>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

template <class T>
void check_node(const T& v, const DiskNode& node, const char* where) {
  if (!is_finite_value(v)) {
    throw NumericError(std::string(where) + ": non-finite integrand at node z = (" +
                       format_double(node.z.real()) + ", " + format_double(node.z.imag()) +
                       "), 1-|z|^2 = " + format_double(node.c));
  }
}

}  // namespace detail

/// Sum of w * f(node) over the given nodes with pairwise reduction.
template <class F>
auto integrate_nodes(const std::vector<DiskNode>& nodes, F&& f, const char* where = "integrate_ball") {
  using R = std::decay_t<decltype(detail::call_integrand(f, nodes.front()))>;
  std::vector<R> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const R v = detail::call_integrand(f, nodes[i]);
    detail::check_node(v, nodes[i], where);
    terms[i] = v * nodes[i].w;
  });
  return pairwise_sum(terms);
}

/// Integral of f against the normalized volume dv on the disc.  The
/// integrand takes a DiskNode or a BallPoint.
template <class F>
auto integrate_ball(F&& f, const QuadratureScheme& q = {}, std::optional<cplx> focus = {}) {
  return integrate_nodes(disk_nodes(q, focus), f);
}

/// Integral of a radial function g against 2r dr on [0, 1]; g takes a RadialNode.
template <class G>
double integrate_radial(G&& g, const std::vector<RadialNode>& nodes) {
  std::vector<double> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double v = g(nodes[i]);
    if (!std::isfinite(v)) {
      throw NumericError("integrate_radial: non-finite integrand at r = " + format_double(nodes[i].r) +
                         ", 1-r = " + format_double(nodes[i].s));
    }
    terms[i] = v * nodes[i].w;
  });
  return pairwise_sum(terms);
}

template <class G>
double integrate_radial(G&& g, const QuadratureScheme& q = {}) {
  return integrate_radial(g, radial_nodes(q));
}

/// Radial integral with the two-refinement divergence test.
template <class G>
Flagged integrate_radial_refined(G&& g, const QuadratureScheme& q = {}) {
  const double coarse = integrate_radial(g, q);
  const double fine = integrate_radial(g, q.refined());
  return compare_refinements(coarse, fine);
}

/// Disc integral of a real integrand with the two-refinement divergence test.
template <class F>
Flagged integrate_ball_refined(F&& f, const QuadratureScheme& q = {}, std::optional<cplx> focus = {}) {
  const double coarse = integrate_ball(f, q, focus);
  const double fine = integrate_ball(f, q.refined(), focus);
  return compare_refinements(coarse, fine);
}

/// Centre of a Bergman ball with its defect 1 - |a|^2 carried separately.
struct DiscCenter {
  cplx a;
  double defect;

  static DiscCenter from(const BallPoint& p) {
    if (p.dim() != 1) throw ConfigError("Bergman-ball quadrature is implemented for n = 1");
    return {p.first(), p.defect()};
  }
  static DiscCenter from(const DiskNode& node) { return {node.z, node.c}; }
  static DiscCenter from(cplx a) { return {a, 1.0 - std::norm(a)}; }
};

/// Nodes for integration over B(center, delta), obtained by pulling the
/// Euclidean disc of radius tanh(delta) back through phi_center.  Weights
/// include the real Jacobian (1-|a|^2)^2 / |1 - conj(a) u|^4.
inline std::vector<DiskNode> bergman_ball_nodes(const DiscCenter& center, double delta,
                                                const QuadratureScheme& q = {}) {
  if (!(delta > 0.0)) throw ConfigError("integrate_bergman_ball: delta must be positive");
  const double t = std::tanh(delta);
  const double a_abs = std::abs(center.a);
  const double gap = 1.0 - a_abs * t;
  const int m = std::max(q.ball_angular, static_cast<int>(std::ceil(24.0 / gap)));
  const auto ang = angular_uniform(m);
  const auto& g = gauss_legendre(q.nodes);
  std::vector<DiskNode> out;
  out.reserve(static_cast<std::size_t>(q.ball_panels * q.nodes * m));
  const double da = center.defect;
  for (int k = 0; k < q.ball_panels; ++k) {
    // Panels graded toward the rim |u| = t where the Jacobian varies fastest.
    const double lo = t * (1.0 - std::pow(0.5, k));
    const double hi = k + 1 == q.ball_panels ? t : t * (1.0 - std::pow(0.5, k + 1));
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double r = mid + half * g.x[i];
      const double wr = g.w[i] * half * 2.0 * r;
      for (const auto& an : ang) {
        const cplx u = std::polar(r, an.theta);
        const cplx den = 1.0 - std::conj(center.a) * u;
        const double den2 = std::norm(den);
        const cplx w = (center.a - u) / den;
        const double cw = da * (1.0 - r * r) / den2;
        const double jac = da * da / (den2 * den2);
        out.push_back({w, cw, wr * an.w * jac});
      }
    }
  }
  return out;
}

template <class F>
auto integrate_bergman_ball(F&& f, const DiscCenter& center, double delta, const QuadratureScheme& q = {}) {
  return integrate_nodes(bergman_ball_nodes(center, delta, q), f, "integrate_bergman_ball");
}

template <class F>
auto integrate_bergman_ball(F&& f, const BallPoint& center, double delta, const QuadratureScheme& q = {}) {
  return integrate_bergman_ball(f, DiscCenter::from(center), delta, q);
}

}  // namespace bergman
