#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"

namespace bergman {

/// delta-lattice in the Bergman metric, generated inside the region
/// beta(z, 0) <= region_radius.
struct Lattice {
  std::vector<BallPoint> points;
  double delta = 0.0;
  double separation = 0.5;
  double region_radius = 0.0;
  int multiplicity = 1;
  int n = 1;
};

namespace detail {

/// Bergman distance in the disc, with 1 - rho^2 taken from the defects.
inline double disc_distance(cplx z, double dz, cplx w, double dw) {
  const double d2 = std::norm(1.0 - z * std::conj(w));
  const double rho = std::sqrt(std::min(std::norm(z - w) / d2, 1.0));
  const double defect = dz * dw / d2;
  if (defect <= 0.0) return kInf;
  return std::log1p(rho) - 0.5 * std::log(defect);
}

struct DiscSample {
  cplx z;
  double defect;  // 1 - |z|^2
  double radius;  // beta(z, 0)
};

inline DiscSample disc_sample_at(double s, double theta) {
  const double t = std::tanh(s);
  const double c = std::cosh(s);
  return {std::polar(t, theta), 1.0 / (c * c), s};
}

/// Rings spaced `h` apart in hyperbolic radius, each carrying points spaced
/// about `h` apart along the ring; the ring circumference at radius s is
/// pi sinh(2s) in the normalized-area metric.
inline std::vector<DiscSample> ring_grid(double radius, double h, double ring_offset,
                                         double angle_shift) {
  std::vector<DiscSample> out;
  if (ring_offset == 0.0) out.push_back({cplx{}, 1.0, 0.0});
  const int rings = std::max(1, static_cast<int>(std::ceil((radius - ring_offset) / h - 1e-12)));
  for (int i = 0; i < rings; ++i) {
    const double s = std::min(radius, ring_offset + (i + (ring_offset == 0.0 ? 1 : 0)) * h);
    if (s <= 0.0) continue;
    const double circumference = kPi * std::sinh(2.0 * s);
    const int m = std::max(3, static_cast<int>(std::ceil(circumference / h)));
    const double shift = std::fmod(angle_shift * (i + 1), 1.0);
    for (int j = 0; j < m; ++j) {
      out.push_back(disc_sample_at(s, 2.0 * kPi * (j + shift) / m));
    }
  }
  return out;
}

struct LatticeIndex {
  std::vector<DiscSample> pts;
  std::vector<std::size_t> order;  // indices sorted by hyperbolic radius

  explicit LatticeIndex(std::vector<DiscSample> p) : pts(std::move(p)) { rebuild(); }

  void rebuild() {
    order.resize(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pts[a].radius < pts[b].radius; });
  }

  /// Calls fn(index, distance) for lattice points with |radius - s.radius| < band.
  template <class Fn>
  void for_band(const DiscSample& s, double band, Fn&& fn) const {
    auto lo = std::lower_bound(order.begin(), order.end(), s.radius - band,
                               [&](std::size_t i, double v) { return pts[i].radius < v; });
    for (auto it = lo; it != order.end() && pts[*it].radius <= s.radius + band; ++it) {
      fn(*it, disc_distance(s.z, s.defect, pts[*it].z, pts[*it].defect));
    }
  }

  double nearest(const DiscSample& s) const {
    double best = kInf;
    for (const auto& p : pts) best = std::min(best, disc_distance(s.z, s.defect, p.z, p.defect));
    return best;
  }
};

inline DiscSample disc_sample_of(cplx z) {
  const double a = std::abs(z);
  return {z, (1.0 - a) * (1.0 + a), std::atanh(a)};
}

/// The bisector {w : beta(w, a) = beta(w, b)} written as
/// k |w|^2 - 2 Re(g w) + k = 0.
struct Bisector {
  double k;
  cplx g;
};

inline Bisector bisector(const DiscSample& a, const DiscSample& b) {
  return {std::norm(a.z) - std::norm(b.z), b.defect * std::conj(a.z) - a.defect * std::conj(b.z)};
}

/// Points where the distance to the nearest lattice point can peak inside the
/// closed disc of hyperbolic radius `region`: Voronoi vertices of triples
/// within `reach` of each other, bisector crossings of the region boundary,
/// and the boundary point opposite each lattice point.
inline std::vector<cplx> coverage_peaks(const std::vector<DiscSample>& pts, double region, double reach) {
  const double T = std::tanh(region);
  std::vector<cplx> out{cplx(T, 0.0)};
  std::vector<std::vector<std::size_t>> near(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (disc_distance(pts[i].z, pts[i].defect, pts[j].z, pts[j].defect) <= reach) near[i].push_back(j);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ai = std::abs(pts[i].z);
    if (ai > 0.0) out.push_back(-T * pts[i].z / ai);
    for (std::size_t u = 0; u < near[i].size(); ++u) {
      const Bisector e1 = bisector(pts[i], pts[near[i][u]]);
      const double gn = std::abs(e1.g);
      if (gn > 0.0) {
        const double cs = e1.k * (1.0 + T * T) / (2.0 * gn * T);
        if (std::abs(cs) <= 1.0) {
          const double base = -std::arg(e1.g), off = std::acos(cs);
          out.push_back(std::polar(T, base + off));
          out.push_back(std::polar(T, base - off));
        }
      }
      for (std::size_t v = u + 1; v < near[i].size(); ++v) {
        const Bisector e2 = bisector(pts[i], pts[near[i][v]]);
        // k2 E1 - k1 E2 is the line Re(d w) = 0, i.e. w = i s conj(d) / |d|
        const cplx d = e2.k * e1.g - e1.k * e2.g;
        const double dn = std::abs(d);
        if (dn < 1e-14) {
          if (e1.k == 0.0 && e2.k == 0.0) out.push_back(cplx{});
          continue;
        }
        const cplx dir = cplx(0.0, 1.0) * std::conj(d) / dn;
        const Bisector& e = std::abs(e1.k) >= std::abs(e2.k) ? e1 : e2;
        const double beta = (e.g * dir).real();
        if (e.k == 0.0) {
          out.push_back(cplx{});
          continue;
        }
        const double disc = beta * beta - e.k * e.k;
        if (disc < 0.0) continue;
        // roots are an inversion pair; take the one inside the disc
        const double root = (beta - std::copysign(std::sqrt(disc), beta)) / e.k;
        if (std::abs(root) < 1.0) out.push_back(root * dir);
      }
    }
  }
  return out;
}

}  // namespace detail

struct LatticeOptions {
  /// Candidates per unit hyperbolic area; 0 selects max(25, 16 / delta^2).
  double candidate_density = 0.0;
};

/// Greedy farthest-point delta-lattice over a stratified candidate grid,
/// certified for covering on an independent denser grid.  Disc only.
inline Lattice generate_lattice(double delta, double region_radius, int n = 1,
                                LatticeOptions opts = {}) {
  if (!(delta > 0.0)) throw ConfigError("generate_lattice: delta must be positive");
  if (!(region_radius > 0.0)) throw ConfigError("generate_lattice: regionRadius must be positive");
  if (n != 1) throw ConfigError("generate_lattice: only n = 1 is supported");

  const double density =
      opts.candidate_density > 0.0 ? opts.candidate_density : std::max(25.0, 16.0 / (delta * delta));
  const double h = 1.0 / std::sqrt(density);
  const double mesh = h / std::sqrt(2.0);
  if (mesh > 0.5 * delta) {
    throw NumericError("generate_lattice: candidate mesh " + format_double(mesh) +
                       " exceeds delta/2 = " + format_double(0.5 * delta) +
                       "; covering cannot be certified");
  }

  const auto cand = detail::ring_grid(region_radius, h, 0.0, 0.0);
  std::vector<double> dist(cand.size(), kInf);
  std::vector<detail::DiscSample> chosen;
  std::size_t next = 0;  // the origin is the first candidate
  while (true) {
    chosen.push_back(cand[next]);
    const auto& c = cand[next];
    double far = -1.0;
    std::size_t far_idx = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      dist[i] = std::min(dist[i], detail::disc_distance(cand[i].z, cand[i].defect, c.z, c.defect));
      if (dist[i] > far) {
        far = dist[i];
        far_idx = i;
      }
    }
    if (far < delta) break;
    next = far_idx;
  }

  detail::LatticeIndex index(std::move(chosen));
  const auto cert = detail::ring_grid(region_radius, 0.5 * h, 0.25 * h, 0.6180339887498949);
  // Promote uncovered certification points, farthest first; each promoted
  // point is at distance >= delta from the lattice, so separation holds.
  while (true) {
    double worst = -1.0;
    std::size_t worst_idx = 0;
    for (std::size_t i = 0; i < cert.size(); ++i) {
      bool covered = false;
      index.for_band(cert[i], delta, [&](std::size_t, double d) { covered = covered || d < delta; });
      if (covered) continue;
      const double d = index.nearest(cert[i]);
      if (d > worst) {
        worst = d;
        worst_idx = i;
      }
    }
    if (worst < 0.0) break;
    index.pts.push_back(cert[worst_idx]);
    index.rebuild();
  }

  // Grid certification can leave holes narrower than its mesh; promote the
  // exact peaks of the nearest-point distance until none is uncovered.
  const double reach = 2.0 * (delta + h);
  while (true) {
    double worst = -1.0;
    cplx worst_z{};
    for (const cplx& z : detail::coverage_peaks(index.pts, region_radius, reach)) {
      if (std::abs(z) >= 1.0) continue;
      const auto s = detail::disc_sample_of(z);
      if (s.radius > region_radius + 1e-12) continue;
      const double d = index.nearest(s);
      if (d >= delta && d > worst) {
        worst = d;
        worst_z = z;
      }
    }
    if (worst < 0.0) break;
    index.pts.push_back(detail::disc_sample_of(worst_z));
    index.rebuild();
  }

  int mult = 1;
  for (const auto& s : cert) {
    int count = 0;
    index.for_band(s, delta, [&](std::size_t, double d) { count += d < delta ? 1 : 0; });
    mult = std::max(mult, count);
  }

  Lattice lat;
  lat.delta = delta;
  lat.region_radius = region_radius;
  lat.multiplicity = mult;
  lat.n = n;
  lat.points.reserve(index.pts.size());
  for (const auto& p : index.pts) lat.points.emplace_back(p.z);
  return lat;
}

/// max over samples of #{k : beta(sample, a_k) < delta}.
inline int covering_multiplicity(const Lattice& lat, const std::vector<BallPoint>& samples) {
  const double tol = 1e-12;
  int best = 0;
  for (const auto& s : samples) {
    const double radius = bergman_distance(s, BallPoint::origin(s.dim()));
    if (radius > lat.region_radius + tol) {
      throw ConfigError("covering_multiplicity: sample at hyperbolic radius " + format_double(radius) +
                        " lies outside the certified region " + format_double(lat.region_radius));
    }
    int count = 0;
    for (const auto& a : lat.points) count += bergman_distance(s, a) < lat.delta ? 1 : 0;
    best = std::max(best, count);
  }
  return best;
}

}  // namespace bergman
