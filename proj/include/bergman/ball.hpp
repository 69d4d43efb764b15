#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bergman/core.hpp"

namespace bergman {

/// Point of the open unit ball B_n in C^n.
class BallPoint {
 public:
  explicit BallPoint(std::vector<cplx> coords) : coords_(std::move(coords)) { validate(); }
  BallPoint(std::initializer_list<cplx> coords) : coords_(coords) { validate(); }
  explicit BallPoint(cplx z) : coords_{z} { validate(); }

  static BallPoint origin(int n) {
    if (n < 1) throw ConfigError("BallPoint: dimension must be >= 1");
    return BallPoint(std::vector<cplx>(static_cast<std::size_t>(n), cplx{}));
  }

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  const std::vector<cplx>& coords() const noexcept { return coords_; }
  cplx operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  cplx first() const noexcept { return coords_.front(); }

  double norm2() const noexcept {
    double s = 0.0;
    for (const auto& c : coords_) s += std::norm(c);
    return s;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }
  /// 1 - |z|^2
  double defect() const noexcept { return 1.0 - norm2(); }

 private:
  void validate() const {
    if (coords_.empty()) throw ConfigError("BallPoint: empty coordinate vector");
    double s = 0.0;
    for (const auto& c : coords_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw ConfigError("BallPoint: non-finite coordinate");
      s += std::norm(c);
    }
    if (!(s < 1.0)) throw ConfigError("BallPoint: |z| >= 1 (norm^2 = " + format_double(s) + ")");
  }

  std::vector<cplx> coords_;
};

inline void require_same_dim(const BallPoint& a, const BallPoint& b, const char* where) {
  if (a.dim() != b.dim()) {
    throw ConfigError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()) + ")");
  }
}

/// <z, w> = sum z_j conj(w_j)
inline cplx inner(const BallPoint& z, const BallPoint& w) {
  require_same_dim(z, w, "inner");
  cplx s{};
  for (int j = 0; j < z.dim(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

/// Involutive automorphism phi_a with phi_a(0) = a and phi_a(a) = 0.
inline BallPoint mobius_map(const BallPoint& a, const BallPoint& z) {
  require_same_dim(a, z, "mobius_map");
  const int n = a.dim();
  const double a2 = a.norm2();
  const cplx za = inner(z, a);
  const cplx denom = 1.0 - za;
  std::vector<cplx> out(static_cast<std::size_t>(n));
  if (a2 == 0.0) {
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = -z[j];
    return BallPoint(std::move(out));
  }
  const double sa = std::sqrt(1.0 - a2);
  for (int j = 0; j < n; ++j) {
    const cplx proj = za / a2 * a[j];
    const cplx perp = z[j] - proj;
    out[static_cast<std::size_t>(j)] = (a[j] - proj - sa * perp) / denom;
  }
  return BallPoint(std::move(out));
}

namespace detail {

/// |phi_z(w)| and 1 - |phi_z(w)|^2, the latter from the automorphism identity.
inline std::pair<double, double> pseudo_hyperbolic(const BallPoint& z, const BallPoint& w) {
  require_same_dim(z, w, "bergman_distance");
  const cplx zw = inner(w, z);
  const double d2 = std::norm(1.0 - zw);
  const double defect = z.defect() * w.defect() / d2;
  double rho2 = 0.0;
  if (z.dim() == 1) {
    rho2 = std::norm(z.first() - w.first()) / d2;
  } else {
    const double z2 = z.norm2();
    if (z2 == 0.0) {
      rho2 = w.norm2();
    } else {
      // |phi_z(w)|^2 = (|z - P_z w|^2 + (1-|z|^2)|Q_z w|^2) / |1-<w,z>|^2
      const double sz = 1.0 - z2;
      double par = 0.0, perp = 0.0;
      for (int j = 0; j < z.dim(); ++j) {
        const cplx proj = zw / z2 * z[j];
        par += std::norm(z[j] - proj);
        perp += std::norm(w[j] - proj);
      }
      rho2 = (par + sz * perp) / d2;
    }
  }
  return {std::sqrt(std::min(rho2, 1.0)), std::max(defect, 0.0)};
}

}  // namespace detail

/// |phi_z(w)|
inline double pseudo_hyperbolic_distance(const BallPoint& z, const BallPoint& w) {
  return detail::pseudo_hyperbolic(z, w).first;
}

/// beta(z, w) = atanh |phi_z(w)|
inline double bergman_distance(const BallPoint& z, const BallPoint& w) {
  const auto [rho, defect] = detail::pseudo_hyperbolic(z, w);
  if (defect <= 0.0) return kInf;
  return std::log1p(rho) - 0.5 * std::log(defect);
}

/// beta(0, z), from |z| alone.
inline double bergman_radius(double abs_z) { return std::atanh(abs_z); }

/// Normalized volume of the Bergman ball B(z, delta) in B_n.
inline double bergman_ball_volume(const BallPoint& z, double delta) {
  if (!(delta > 0.0)) throw ConfigError("bergman_ball_volume: delta must be positive");
  const int n = z.dim();
  const double t = std::tanh(delta);
  const double z2 = z.norm2();
  return std::pow(t, 2 * n) * std::pow(z.defect() / (1.0 - t * t * z2), n + 1);
}

/// Same formula when 1 - |z|^2 is known more accurately than |z|.
inline double bergman_ball_volume(double z2, double defect, double delta, int n = 1) {
  const double t = std::tanh(delta);
  return std::pow(t, 2 * n) * std::pow(defect / (1.0 - t * t * z2), n + 1);
}

}  // namespace bergman
