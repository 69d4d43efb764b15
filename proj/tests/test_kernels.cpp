#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"

using namespace bergman;

namespace {

const KernelParams disc{1, 0.0};

HoloPoly random_poly(int n, int D, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd;
  HoloPoly f = HoloPoly::zero(n, D);
  for (auto& c : f.coeffs) c = cplx(nd(g), nd(g));
  return f;
}

}  // namespace

TEST(Kernels, KernelValuesAndHermitianSymmetry) {
  EXPECT_NEAR(std::abs(kernel_eval(disc, BallPoint::origin(1), BallPoint(cplx(0.3, 0.8))) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(kernel_eval(disc, BallPoint(cplx(0.5, 0)), BallPoint(cplx(0.5, 0))).real(), 16.0 / 9.0, 1e-14);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int k = 0; k < 50; ++k) {
    const BallPoint z({cplx(u(g), u(g)), cplx(u(g), u(g))}), w({cplx(u(g), u(g)), cplx(u(g), u(g))});
    const KernelParams kp{2, 0.5};
    EXPECT_LT(std::abs(kernel_eval(kp, z, w) - std::conj(kernel_eval(kp, w, z))), 1e-12);
  }
}

TEST(Kernels, KernelNormAtOriginIsOne) {
  for (double p : {1.0, 1.5, 2.0, 4.0}) EXPECT_NEAR(kernel_ap_norm(disc, BallPoint::origin(1), p).value, 1.0, 1e-15);
  EXPECT_TRUE(kernel_ap_norm(disc, BallPoint::origin(1), 1.0).borderline);
}

TEST(Kernels, HilbertNormIsKernelDiagonal) {
  EXPECT_NEAR(kernel_ap_norm(disc, BallPoint(cplx(0.6, 0)), 2.0).value, 1.5625, 1e-14);
}

TEST(Kernels, FourthPowerNormMatchesSeriesOracle) {
  // |1 - conj(z) w|^{-8} = sum_k C(k+3,3)^2 |z w|^{2k}, and the disc moment of |w|^{2k} is 1/(k+1)
  const double x = 0.25;
  double s = 0.0, term_x = 1.0;
  for (int k = 0; k < 400; ++k) {
    const double c = (k + 1.0) * (k + 2.0) * (k + 3.0) / 6.0;
    s += c * c * term_x / (k + 1.0);
    term_x *= x;
  }
  EXPECT_NEAR(kernel_ap_norm(disc, BallPoint(cplx(0.5, 0)), 4.0).value, std::pow(s, 0.25), 1e-8);
}

TEST(Kernels, GeneralNormAgreesWithQuadrature) {
  for (double p : {1.0, 1.5, 3.0}) {
    for (double a : {0.3, 0.9}) {
      const BallPoint z(std::polar(a, 0.4));
      const double quad = disc_ap_norm([&](const DiskNode& nd) { return kernel_eval(disc, BallPoint(nd.z), z); }, p,
                                       0.0, {}, z.first());
      EXPECT_NEAR(kernel_ap_norm(disc, z, p).value / quad, 1.0, 1e-9) << p << " " << a;
    }
  }
  // weighted case alpha = 1
  const KernelParams w{1, 1.0};
  const BallPoint z(cplx(0.7, 0));
  const double quad = disc_ap_norm([&](const DiskNode& nd) { return kernel_eval(w, BallPoint(nd.z), z); }, 3.0, 1.0,
                                   {}, z.first());
  EXPECT_NEAR(kernel_ap_norm(w, z, 3.0).value / quad, 1.0, 1e-9);
}

TEST(Kernels, NormalizedKernel) {
  const BallPoint z(cplx(0.4, -0.5));
  EXPECT_NEAR(std::abs(normalized_kernel_eval(disc, BallPoint::origin(1), 3.0, z) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(normalized_kernel_eval(disc, z, 2.0, z).real(), std::sqrt(kernel_diag(disc, z)), 1e-12);
  const double n2 = std::real(integrate_ball([&](const DiskNode& nd) { return std::norm(normalized_kernel_eval(disc, z, 2.0, BallPoint(nd.z))); },
                                   {}, z.first()));
  EXPECT_NEAR(n2, 1.0, 1e-8);
}

TEST(Kernels, ForelliRudinClosedCases) {
  EXPECT_NEAR(forelli_rudin(0.0, 0.0, disc, BallPoint(cplx(0.7, 0))).value, 1.0, 1e-12);
  for (double a : {0.0, 0.5, 0.9}) {
    const BallPoint z(std::polar(a, 1.0));
    EXPECT_NEAR(forelli_rudin(0.0, 4.0, disc, z).value / std::pow(1.0 - a * a, -2.0), 1.0, 1e-6);
  }
  // n = 2, c = 2(n+1): reproducing-kernel identity again
  const KernelParams ball2{2, 0.0};
  const BallPoint z2({cplx(0.3, 0), cplx(0.0, 0.5)});
  EXPECT_NEAR(forelli_rudin(0.0, 6.0, ball2, z2).value / kernel_diag(ball2, z2), 1.0, 1e-10);
  EXPECT_THROW(forelli_rudin(-1.0, 2.0, disc, z2), ConfigError);
}

TEST(Kernels, ForelliRudinGrowthExponent) {
  const std::vector<double> radii{0.9, 0.99, 0.999};
  std::vector<double> x, y;
  for (double r : radii) {
    x.push_back(-std::log(1.0 - r * r));
    y.push_back(std::log(forelli_rudin(1.0, 4.0, disc, BallPoint(cplx(r, 0))).value));
  }
  const double slope = (y[2] - y[1]) / (x[2] - x[1]);
  EXPECT_NEAR(slope, 1.0, 0.05);
}

TEST(Kernels, ApplySConsistencyAndOracle) {
  const BallPoint z(cplx(0.5, 0.2));
  const SValue one = apply_S(0.5, 3.0, [](const DiskNode&) { return 1.0; }, z);
  EXPECT_NEAR(one.value.real(), forelli_rudin(0.5, 3.0, disc, z).value, 1e-9);
  EXPECT_EQ(apply_S(0.0, 2.0, [](const DiskNode&) { return 0.0; }, z).value, cplx{});
  // nested polar oracle: (2/pi) int r dr int dt (1-r^2)^2 |1 - conj(z) r e^{it}|^{-2}
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  const double x = std::abs(z.first());
  auto radial = [&](double r) {
    auto ang = [&](double t) { return 1.0 / std::norm(1.0 - x * r * std::polar(1.0, t)); };
    const double avg = gk.integrate(ang, 0.0, 2.0 * kPi, 15, 1e-15) / (2.0 * kPi);
    return 2.0 * r * (1.0 - r * r) * avg;
  };
  const double oracle = gk.integrate(radial, 0.0, 1.0, 15, 1e-14);
  const SValue s = apply_S(0.0, 2.0, [](const DiskNode& nd) { return nd.c; }, z);
  EXPECT_NEAR(s.value.real(), oracle, 1e-7);
  EXPECT_FALSE(s.divergent);
}

TEST(Kernels, DerivativeKernel) {
  EXPECT_EQ(derivative_kernel(BallPoint(cplx(0.3, 0.1)), BallPoint::origin(1)), cplx{});
  EXPECT_NEAR(derivative_kernel(BallPoint::origin(1), BallPoint(cplx(0.5, 0))).real(), 1.0, 1e-15);
  for (int n : {1, 2}) {
    std::vector<cplx> zc(static_cast<std::size_t>(n), cplx(0.2, -0.1)), wc(static_cast<std::size_t>(n), cplx(0.3, 0.25));
    const BallPoint z(zc), w(wc);
    const KernelParams kp{n, 0.0};
    const double h = 1e-5;
    auto shifted = [&](double d) {
      auto c = zc;
      c[0] += d;
      return kernel_eval(kp, BallPoint(c), w);
    };
    const cplx fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    const cplx L = derivative_kernel(z, w);
    EXPECT_LT(std::abs(fd - L) / std::abs(L), 1e-6);
  }
}

TEST(Kernels, GradedLexOrdering) {
  const auto idx = graded_lex_indices(2, 2);
  const std::vector<MultiIndex> expect{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(idx, expect);
  EXPECT_EQ(graded_lex_indices(1, 5).size(), 6u);
  EXPECT_EQ(graded_lex_indices(3, 4).size(), 35u);
}

TEST(Kernels, FractionalOperators) {
  HoloPoly c = HoloPoly::zero(2, 3);
  c.coeffs[0] = cplx(2.0, -1.0);
  const HoloPoly rc = apply_fractional(FractionalDirection::raise, 1.7, c);
  EXPECT_EQ(rc.coeffs[0], c.coeffs[0]);
  for (int n : {1, 2}) {
    const HoloPoly f = random_poly(n, 20, 8 + n);
    const HoloPoly g = apply_fractional(FractionalDirection::lower, 2.5,
                                        apply_fractional(FractionalDirection::raise, 2.5, f));
    for (std::size_t k = 0; k < f.coeffs.size(); ++k)
      EXPECT_LT(std::abs(g.coeffs[k] - f.coeffs[k]), 1e-12 * std::max(1.0, std::abs(f.coeffs[k])));
  }
  EXPECT_THROW(apply_fractional(FractionalDirection::raise, 0.0, c), ConfigError);
}

TEST(Kernels, RaiseMapsKernelTruncationToHigherKernel) {
  for (int n : {1, 2}) {
    std::vector<cplx> wc(static_cast<std::size_t>(n), cplx(0.3, 0.2));
    const BallPoint w(wc);
    for (double N : {0.5, 3.0}) {
      const HoloPoly g = apply_fractional(FractionalDirection::raise, N, kernel_truncation({n, 0.0}, w, 40));
      // coefficients of (1 - <z,w>)^{-c}: Gamma(c+|m|)/(Gamma(c) m!) conj(w)^m, via tanh-sinh-free recurrence
      const double c = n + 1.0 + N;
      for (std::size_t k = 0; k < g.index.size(); ++k) {
        const auto& m = g.index[k];
        double coef = 1.0;
        int deg = 0;
        cplx mono{1.0, 0.0};
        for (int j = 0; j < n; ++j)
          for (int e = 0; e < m[static_cast<std::size_t>(j)]; ++e) {
            coef *= (c + deg) / (e + 1.0);
            ++deg;
            mono *= std::conj(wc[static_cast<std::size_t>(j)]);
          }
        const cplx expect = coef * mono;
        EXPECT_LT(std::abs(g.coeffs[k] - expect), 1e-10 * std::max(std::abs(expect), 1e-300));
      }
    }
  }
}

TEST(Kernels, PointwiseBoundByNormAndKernelDiagonal) {
  for (double p : {1.0, 2.0, 3.0}) {
    const HoloPoly f = random_poly(1, 8, 21);
    const double norm = disc_ap_norm([&](const DiskNode& nd) { return f.eval_disc(nd.z); }, p);
    for (double r : {0.0, 0.5, 0.9})
      for (int k = 0; k < 8; ++k) {
        const BallPoint z(std::polar(r, 2.0 * kPi * k / 8));
        EXPECT_LE(std::abs(f(z)), (1.0 + 1e-6) * norm * std::pow(kernel_diag(disc, z), 1.0 / p));
      }
  }
}

TEST(Kernels, ReproducingProperty) {
  const HoloPoly f = random_poly(1, 12, 5);
  for (double r : {0.0, 0.6, 0.9}) {
    const BallPoint z(std::polar(r, 0.3));
    auto g = [&](const DiskNode& nd) { return f.eval_disc(nd.z) * kernel_eval(disc, z, BallPoint(nd.z)); };
    EXPECT_LT(std::abs(integrate_ball(g, {}, z.first()) - f(z)), 1e-7 * std::max(1.0, std::abs(f(z))));
  }
}

TEST(Kernels, LatticeSynthesisIsUniformlyBounded) {
  const Lattice lat = generate_lattice(1.0, 1.5);
  std::mt19937_64 g(17);
  std::normal_distribution<double> nd;
  const double p = 2.0;
  QuadratureScheme q;
  q.angular = 128;
  double worst = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<cplx> c(lat.points.size());
    double s = 0.0;
    for (auto& x : c) {
      x = cplx(nd(g), nd(g));
      s += std::pow(std::abs(x), p);
    }
    for (auto& x : c) x /= std::pow(s, 1.0 / p);
    auto f = [&](const DiskNode& node) {
      cplx v{};
      const BallPoint w(node.z);
      for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * normalized_kernel_eval(disc, lat.points[k], p, w);
      return v;
    };
    worst = std::max(worst, disc_ap_norm(f, p, 0.0, q));
  }
  RecordProperty("synthesis_constant", std::to_string(worst));
  EXPECT_LE(worst, 10.0);
}
