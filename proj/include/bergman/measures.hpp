#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

/// Finite sum of point masses.
struct AtomicMeasure {
  std::vector<BallPoint> points;
  std::vector<double> masses;
};

/// scale (1 - |z|^2)^t dv on B_n.
struct RadialPowerMeasure {
  double t = 0.0;
  double scale = 1.0;
  int n = 1;
};

/// Density against dv on the disc, bilinear in (r, theta) on a polar grid
/// and zero outside [r.front(), r.back()].  values[i][j] sits at (r[i], theta[j]);
/// a single theta column means a radial density.
struct GridDensityMeasure {
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<std::vector<double>> values;
};

using MeasureSpec = std::variant<AtomicMeasure, RadialPowerMeasure, GridDensityMeasure>;

inline void validate(const MeasureSpec& mu) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          if (m.points.empty()) throw ConfigError("atomic measure needs at least one atom");
          if (m.points.size() != m.masses.size()) throw ConfigError("atomic measure: points/masses length mismatch");
          for (const auto& p : m.points)
            if (p.dim() != m.points.front().dim()) throw ConfigError("atomic measure: mixed dimensions");
          for (double w : m.masses)
            if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("atomic measure: masses must be finite and >= 0");
        } else if constexpr (std::is_same_v<T, RadialPowerMeasure>) {
          if (!(m.t > -1.0)) throw ConfigError("radial_power measure: t must exceed -1");
          if (!(m.scale > 0.0) || !std::isfinite(m.scale)) throw ConfigError("radial_power measure: scale must be positive");
          if (m.n < 1) throw ConfigError("radial_power measure: n must be >= 1");
        } else {
          if (m.r.size() < 2) throw ConfigError("grid measure: need at least two radii");
          if (m.theta.empty()) throw ConfigError("grid measure: need at least one angle");
          for (std::size_t i = 0; i < m.r.size(); ++i) {
            if (!(m.r[i] >= 0.0 && m.r[i] < 1.0)) throw ConfigError("grid measure: radii must lie in [0, 1)");
            if (i > 0 && !(m.r[i] > m.r[i - 1])) throw ConfigError("grid measure: radii must increase");
          }
          for (std::size_t j = 0; j < m.theta.size(); ++j) {
            if (!(m.theta[j] >= 0.0 && m.theta[j] < 2.0 * kPi)) throw ConfigError("grid measure: angles must lie in [0, 2pi)");
            if (j > 0 && !(m.theta[j] > m.theta[j - 1])) throw ConfigError("grid measure: angles must increase");
          }
          if (m.values.size() != m.r.size()) throw ConfigError("grid measure: values must have one row per radius");
          for (const auto& row : m.values) {
            if (row.size() != m.theta.size()) throw ConfigError("grid measure: values row length must match angles");
            for (double v : row)
              if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("grid measure: values must be finite and >= 0");
          }
        }
      },
      mu);
}

inline int measure_dim(const MeasureSpec& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return a->points.front().dim();
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) return rp->n;
  return 1;
}

inline bool grid_is_radial(const GridDensityMeasure& g) {
  if (g.theta.size() == 1) return true;
  for (const auto& row : g.values)
    for (double v : row)
      if (v != row.front()) return false;
  return true;
}

/// True when the measure is invariant under rotations z -> e^{i t} z.
inline bool is_rotation_invariant(const MeasureSpec& mu) {
  if (std::holds_alternative<RadialPowerMeasure>(mu)) return true;
  if (const auto* g = std::get_if<GridDensityMeasure>(&mu)) return grid_is_radial(*g);
  const auto& a = std::get<AtomicMeasure>(mu);
  for (std::size_t k = 0; k < a.points.size(); ++k)
    if (a.masses[k] > 0.0 && a.points[k].norm2() > 0.0) return false;
  return true;
}

inline std::string measure_label(const MeasureSpec& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    if (a->points.size() == 1) {
      return "atom(|a|=" + format_short(a->points.front().norm()) + ",m=" + format_short(a->masses.front()) + ")";
    }
    return "atomic(" + std::to_string(a->points.size()) + ")";
  }
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    return "radial_power(t=" + format_short(rp->t) + ",scale=" + format_short(rp->scale) + ")";
  }
  const auto& g = std::get<GridDensityMeasure>(mu);
  return "grid(r=[" + format_short(g.r.front()) + "," + format_short(g.r.back()) + "])";
}

namespace detail {

/// Radial profile of a grid row at radius r (theta column j), bilinear.
inline double grid_value(const GridDensityMeasure& g, double r, double theta) {
  if (r < g.r.front() || r > g.r.back()) return 0.0;
  auto it = std::upper_bound(g.r.begin(), g.r.end(), r);
  std::size_t i = it == g.r.end() ? g.r.size() - 2 : static_cast<std::size_t>(it - g.r.begin()) - 1;
  const double u = (r - g.r[i]) / (g.r[i + 1] - g.r[i]);
  auto row_at = [&](std::size_t row) {
    const auto& vals = g.values[row];
    if (g.theta.size() == 1) return vals.front();
    double th = std::fmod(theta, 2.0 * kPi);
    if (th < 0.0) th += 2.0 * kPi;
    const std::size_t m = g.theta.size();
    auto jt = std::upper_bound(g.theta.begin(), g.theta.end(), th);
    std::size_t j1 = jt == g.theta.begin() ? m - 1 : static_cast<std::size_t>(jt - g.theta.begin()) - 1;
    std::size_t j2 = (j1 + 1) % m;
    double a = g.theta[j1], b = g.theta[j2];
    if (b <= a) b += 2.0 * kPi;
    if (th < a) th += 2.0 * kPi;
    const double v = (th - a) / (b - a);
    return (1.0 - v) * vals[j1] + v * vals[j2];
  };
  return (1.0 - u) * row_at(i) + u * row_at(i + 1);
}

/// Radial nodes aligned with the grid radii, each interval split into
/// `sub` panels geometric in 1 - r.
inline std::vector<RadialNode> grid_radial_nodes(const GridDensityMeasure& g, int nodes = 16, int sub = 4) {
  std::vector<double> breaks;
  for (std::size_t i = 0; i + 1 < g.r.size(); ++i) {
    const double s0 = 1.0 - g.r[i], s1 = 1.0 - g.r[i + 1];
    for (int k = 0; k < sub; ++k) breaks.push_back(1.0 - s0 * std::pow(s1 / s0, static_cast<double>(k) / sub));
  }
  breaks.push_back(g.r.back());
  return radial_nodes_between(breaks, nodes);
}

/// Density of an absolutely continuous measure at a disc node.
inline double density_at(const MeasureSpec& mu, const DiskNode& nd) {
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    return rp->scale * (rp->t == 0.0 ? 1.0 : std::pow(nd.c, rp->t));
  }
  const auto& g = std::get<GridDensityMeasure>(mu);
  return grid_value(g, std::abs(nd.z), std::arg(nd.z));
}

/// Angular rule with panels broken at the grid angles, graded towards arg(focus)
/// when the focus is near the boundary.
inline std::vector<AngularNode> grid_angular_nodes(const GridDensityMeasure& g, cplx focus, int nodes) {
  const bool graded = std::abs(focus) > 0.5;
  const double theta0 = graded ? std::arg(focus) : 0.0;
  const double base = graded ? theta0 - kPi : 0.0;
  auto wrap = [&](double a) {
    const double d = std::fmod(a - base, 2.0 * kPi);
    return base + (d < 0.0 ? d + 2.0 * kPi : d);
  };
  std::vector<double> breaks{base, base + 2.0 * kPi};
  if (g.theta.size() > 1)
    for (double a : g.theta) breaks.push_back(wrap(a));
  if (graded) {
    const double eps = std::max(1e-12, 0.25 * (1.0 - std::abs(focus)));
    breaks.push_back(theta0);
    for (double h = 0.5 * kPi; h > eps; h *= 0.5) {
      breaks.push_back(theta0 - h);
      breaks.push_back(theta0 + h);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const auto& gl = gauss_legendre(nodes);
  std::vector<AngularNode> out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    if (hi - lo < 1e-15) continue;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < gl.x.size(); ++i) out.push_back({mid + half * gl.x[i], gl.w[i] * half / (2.0 * kPi)});
  }
  return out;
}

inline std::vector<RadialNode> boundary_radial_nodes(double cutoff = 1e-14, int panels = 48, int nodes = 20) {
  QuadratureScheme q;
  q.panels = panels;
  q.nodes = nodes;
  q.angular = 1;
  q.rmax = 1.0 - cutoff;
  q.terminal = true;
  return radial_nodes(q);
}

}  // namespace detail

/// Berezin transform of the measure, with the weighted kernel of `kp`
/// (alpha = 0 gives the unweighted transform).
inline double berezin(const MeasureSpec& mu, const BallPoint& z, const KernelParams& kp_in = {},
                      const QuadratureScheme& q = {}) {
  KernelParams kp = kp_in;
  kp.n = z.dim();
  kp.validate();
  const double c = kp.c();
  const double defect = z.defect();
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    std::vector<double> terms;
    terms.reserve(a->points.size());
    for (std::size_t k = 0; k < a->points.size(); ++k) {
      const double d2 = std::norm(1.0 - inner(a->points[k], z));
      terms.push_back(a->masses[k] * std::pow(defect, c) * std::pow(d2, -c));
    }
    return pairwise_sum(terms);
  }
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    if (rp->n != z.dim()) throw ConfigError("berezin: dimension mismatch");
    const int n = rp->n;
    const double t = rp->t;
    const double x = z.norm2();
    const double log_mass = log_gamma(n + 1.0) + log_gamma(t + 1.0) - log_gamma(n + t + 1.0);
    if (x <= 0.99 || kp.alpha != 0.0) {
      return rp->scale * std::pow(defect, c) * std::exp(log_mass) * hyp2f1_symmetric(c, n + 1.0 + t, x);
    }
    // Sphere average of |1 - <z,w>|^(-2(n+1)) at |w| = r is (1 + y/n)(1 - y)^(-n-2), y = |z|^2 r^2.
    static const auto nodes = detail::boundary_radial_nodes();
    auto g = [&](const RadialNode& rn) {
      const double y = x * rn.r * rn.r;
      const double one_minus_y = defect + x * rn.c;
      const double jac = n == 1 ? 1.0 : n * std::pow(rn.r, 2 * n - 2);
      return std::pow(rn.c, t) * (1.0 + y / n) * std::pow(one_minus_y, -(n + 2.0)) * jac;
    };
    return rp->scale * std::pow(defect, n + 1.0) * integrate_radial(g, nodes);
  }
  const auto& grid = std::get<GridDensityMeasure>(mu);
  if (z.dim() != 1) throw ConfigError("berezin: grid measures are defined on the disc");
  const double x = z.norm2();
  if (grid_is_radial(grid) && kp.alpha == 0.0) {
    // Circle average of |1 - x e^{i t}|^(-4) is (1 + x^2)/(1 - x^2)^3.
    const auto nodes = detail::grid_radial_nodes(grid);
    auto g = [&](const RadialNode& rn) {
      const double y = x * rn.r * rn.r;
      const double one_minus_y = defect + x * rn.c;
      return detail::grid_value(grid, rn.r, 0.0) * (1.0 + y) / (one_minus_y * one_minus_y * one_minus_y);
    };
    return defect * defect * integrate_radial(g, nodes);
  }
  const auto rad = detail::grid_radial_nodes(grid);
  const auto ang = detail::grid_angular_nodes(grid, z.first(), q.nodes);
  std::vector<DiskNode> nodes;
  nodes.reserve(rad.size() * ang.size());
  for (const auto& rn : rad)
    for (const auto& an : ang) nodes.push_back({std::polar(rn.r, an.theta), rn.c, rn.w * an.w});
  const cplx zc = std::conj(z.first());
  auto f = [&](const DiskNode& nd) {
    return detail::grid_value(grid, std::abs(nd.z), std::arg(nd.z)) * std::pow(std::norm(1.0 - nd.z * zc), -c);
  };
  return std::pow(defect, c) * integrate_nodes(nodes, f, "berezin");
}

/// mu(B(z, delta)) / v(B(z, delta)); the centre is passed with its defect.
inline double average_mu(const MeasureSpec& mu, double delta, const DiscCenter& z, const QuadratureScheme& q = {}) {
  if (!(delta > 0.0)) throw ConfigError("average_mu: delta must be positive");
  const double vol = bergman_ball_volume(std::norm(z.a), z.defect, delta, 1);
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    double mass = 0.0;
    for (std::size_t k = 0; k < a->points.size(); ++k) {
      const auto& p = a->points[k];
      if (detail::disc_distance(z.a, z.defect, p.first(), p.defect()) < delta) mass += a->masses[k];
    }
    return mass / vol;
  }
  const double mass = integrate_bergman_ball([&](const DiskNode& nd) { return detail::density_at(mu, nd); }, z, delta, q);
  return mass / vol;
}

inline double average_mu(const MeasureSpec& mu, double delta, const BallPoint& z, const QuadratureScheme& q = {}) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu); a && z.dim() != 1) {
    double mass = 0.0;
    for (std::size_t k = 0; k < a->points.size(); ++k)
      if (bergman_distance(z, a->points[k]) < delta) mass += a->masses[k];
    return mass / bergman_ball_volume(z, delta);
  }
  if (measure_dim(mu) != 1 || z.dim() != 1) throw ConfigError("average_mu: densities are supported on the disc only");
  return average_mu(mu, delta, DiscCenter::from(z), q);
}

/// Values of a function on a disc rule and on its boundary refinement.
struct SampledFunction {
  std::vector<DiskNode> coarse_nodes;
  std::vector<double> coarse;
  std::vector<DiskNode> fine_nodes;
  std::vector<double> fine;
  bool truncated = false;
};

namespace detail {

inline std::vector<DiskNode> radial_as_disk(const std::vector<RadialNode>& rad) {
  std::vector<DiskNode> out;
  out.reserve(rad.size());
  for (const auto& rn : rad) out.push_back({cplx(rn.r, 0.0), rn.c, rn.w});
  return out;
}

template <class F>
std::vector<double> eval_nodes(const std::vector<DiskNode>& nodes, F& f) {
  std::vector<double> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { out[i] = f(nodes[i]); });
  return out;
}

}  // namespace detail

/// Samples f (taking a DiskNode) on the scheme's nodes and on the refined
/// scheme; a scheme without terminal panel is treated as a truncated region
/// and sampled once.  Radial sampling evaluates f on the positive axis only.
template <class F>
SampledFunction sample_disc(F&& f, const QuadratureScheme& q, bool radial, int angular = 0) {
  SampledFunction s;
  s.truncated = !q.terminal;
  auto build = [&](const QuadratureScheme& qs) {
    if (radial) return detail::radial_as_disk(radial_nodes(qs));
    QuadratureScheme qa = qs;
    if (angular > 0) qa.angular = angular;
    return disk_nodes(qa);
  };
  s.coarse_nodes = build(q);
  s.coarse = detail::eval_nodes(s.coarse_nodes, f);
  if (!s.truncated) {
    s.fine_nodes = build(q.refined());
    s.fine = detail::eval_nodes(s.fine_nodes, f);
  }
  return s;
}

/// Integral of f^p (1 - |z|^2)^(-e) dv with the refinement divergence test.
inline Flagged weighted_power_integral(const SampledFunction& s, double p, double e) {
  auto one = [&](const std::vector<DiskNode>& nodes, const std::vector<double>& vals) {
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double v = vals[i] == 0.0 ? 0.0 : std::pow(vals[i], p) * std::pow(nodes[i].c, -e);
      terms[i] = v * nodes[i].w;
    }
    return pairwise_sum(terms);
  };
  const double coarse = one(s.coarse_nodes, s.coarse);
  if (s.truncated) return std::isfinite(coarse) ? Flagged::exact(coarse) : Flagged::inf(coarse, coarse);
  return compare_refinements(coarse, one(s.fine_nodes, s.fine));
}

/// Grid maximum of f (1 - |z|^2)^(-e), compared across the refinement.
inline Flagged weighted_sup(const SampledFunction& s, double e) {
  auto one = [&](const std::vector<DiskNode>& nodes, const std::vector<double>& vals) {
    double best = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (vals[i] > 0.0) best = std::max(best, vals[i] * std::pow(nodes[i].c, -e));
    return best;
  };
  const double coarse = one(s.coarse_nodes, s.coarse);
  if (s.truncated) return Flagged::exact(coarse);
  return compare_refinements(coarse, one(s.fine_nodes, s.fine));
}

inline Flagged flagged_root(Flagged f, double p) {
  if (f.infinite) return f;
  f.value = std::pow(f.value, 1.0 / p);
  f.coarse = std::pow(f.coarse, 1.0 / p);
  f.refined = std::pow(f.refined, 1.0 / p);
  return f;
}

/// (integral of f^p K(z,z) dv)^(1/p) in the disc, K = (1-|z|^2)^(-2).
inline Flagged lambda_lp_norm(const SampledFunction& s, double p) {
  if (!(p >= 1.0)) throw ConfigError("lambda_lp_norm: p must be >= 1");
  return flagged_root(weighted_power_integral(s, p, 2.0), p);
}

/// Samples the Berezin transform; radial when the measure is rotation invariant.
inline SampledFunction sample_berezin(const MeasureSpec& mu, const QuadratureScheme& q = {}) {
  if (measure_dim(mu) != 1) throw ConfigError("sample_berezin: disc measures only");
  const bool radial = is_rotation_invariant(mu);
  int angular = 0;
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    double far = 0.0;
    for (const auto& p : a->points) far = std::max(far, p.norm());
    angular = std::max(q.angular, static_cast<int>(std::ceil(8.0 * kPi / (1.0 - far))));
  } else if (!radial) {
    throw ConfigError("sample_berezin: non-radial grid densities are not supported on the full grid");
  }
  auto f = [&](const DiskNode& nd) { return berezin(mu, BallPoint(nd.z), {}, q); };
  return sample_disc(f, q, radial, angular);
}

/// Samples the averaged function mu-hat_delta (rotation invariant measures).
inline SampledFunction sample_averaged(const MeasureSpec& mu, double delta, const QuadratureScheme& q = {}) {
  if (!is_rotation_invariant(mu)) {
    throw ConfigError("sample_averaged: only rotation invariant measures are sampled on the grid");
  }
  auto f = [&](const DiskNode& nd) { return average_mu(mu, delta, DiscCenter::from(nd), q); };
  return sample_disc(f, q, true);
}

/// Integral of mu-hat_delta^p (1-|z|^2)^(-e) dv for an atomic measure.  The
/// support is the union of the balls B(a_k, delta); the integral is split
/// over the balls with the covering count as partition of unity.  When
/// `region_radius` is finite, only points with beta(z, 0) <= region_radius count.
inline Flagged atomic_averaged_integral(const AtomicMeasure& a, double delta, double p, double e,
                                        const QuadratureScheme& q = {}, double region_radius = kInf,
                                        bool sup = false) {
  std::vector<detail::DiscSample> atoms;
  std::vector<double> masses;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    if (a.masses[k] <= 0.0) continue;
    if (a.points[k].dim() != 1) throw ConfigError("atomic_averaged_integral: disc measures only");
    const cplx z = a.points[k].first();
    atoms.push_back({z, a.points[k].defect(), std::atanh(std::abs(z))});
    masses.push_back(a.masses[k]);
  }
  std::vector<double> per_ball(atoms.size(), 0.0);
  double best = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (detail::disc_distance(atoms[i].z, atoms[i].defect, atoms[j].z, atoms[j].defect) < 2.0 * delta) near.push_back(i);
    }
    const auto nodes = bergman_ball_nodes({atoms[j].z, atoms[j].defect}, delta, q);
    std::vector<double> terms(nodes.size(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& nd = nodes[k];
      if (std::isfinite(region_radius) && std::atanh(std::abs(nd.z)) > region_radius) continue;
      double mass = 0.0;
      int count = 0;
      for (std::size_t i : near) {
        if (detail::disc_distance(nd.z, nd.c, atoms[i].z, atoms[i].defect) < delta) {
          mass += masses[i];
          ++count;
        }
      }
      if (count == 0) continue;
      const double avg = mass / bergman_ball_volume(std::norm(nd.z), nd.c, delta, 1);
      const double val = std::pow(nd.c, -e);
      if (sup) {
        best = std::max(best, avg * val);
      } else {
        terms[k] = nd.w * std::pow(avg, p) * val / count;
      }
    }
    per_ball[j] = pairwise_sum(terms);
  }
  if (sup) return Flagged::exact(best);
  return Flagged::exact(pairwise_sum(per_ball));
}

/// (sum_k mu-hat_delta(a_k)^p)^(1/p) over the lattice points, delta = lat.delta.
inline double lattice_seq_norm(const MeasureSpec& mu, const Lattice& lat, double p, const QuadratureScheme& q = {}) {
  if (!(p >= 1.0)) throw ConfigError("lattice_seq_norm: p must be >= 1");
  std::vector<double> terms;
  terms.reserve(lat.points.size());
  for (const auto& a : lat.points) terms.push_back(std::pow(average_mu(mu, lat.delta, a, q), p));
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

/// Conjugate exponent p / (p - 1).
inline double conjugate(double p) { return p == 1.0 ? kInf : p / (p - 1.0); }

/// kappa(p, r): 2 for p <= 2; for p >= 2 it is p' on r <= p', r on [p', p], p on r >= p.
inline double kappa_exponent(double p, double r) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("kappa_exponent: p must lie in (1, inf)");
  if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("kappa_exponent: r must be >= 1");
  if (p <= 2.0) return 2.0;
  const double pc = conjugate(p);
  if (r <= pc) return pc;
  if (r <= p) return r;
  return p;
}

/// s(p, q) = 2p / (2p - 2q + pq), infinite at (1, 2).
inline Flagged s_exponent(double p, double q) {
  if (!(p >= 1.0 && p <= 2.0) || !(q >= 1.0 && q <= 2.0)) throw ConfigError("s_exponent: p and q must lie in [1, 2]");
  const double den = 2.0 * p - 2.0 * q + p * q;
  if (std::abs(den) < 1e-15) return Flagged::inf();
  return Flagged::exact(2.0 * p / den);
}

/// ||mu-hat_delta K^{q/2}||_{L^s(dv)}^{1/q} with s = s(p, q); essential sup on
/// the grid when s is infinite.
inline Flagged carleson_snorm(const MeasureSpec& mu, double p, double q, double delta,
                              const QuadratureScheme& qs = {}) {
  const Flagged s = s_exponent(p, q);
  if (!(delta > 0.0)) throw ConfigError("carleson_snorm: delta must be positive");
  if (measure_dim(mu) != 1) throw ConfigError("carleson_snorm: disc measures only");
  Flagged integral;
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    integral = s.infinite ? atomic_averaged_integral(*a, delta, 1.0, q, qs, kInf, true)
                          : atomic_averaged_integral(*a, delta, s.value, q * s.value, qs);
  } else {
    const auto samples = sample_averaged(mu, delta, qs);
    integral = s.infinite ? weighted_sup(samples, q) : weighted_power_integral(samples, s.value, q * s.value);
  }
  if (integral.infinite) return integral;
  return flagged_root(s.infinite ? integral : flagged_root(integral, s.value), q);
}

}  // namespace bergman
