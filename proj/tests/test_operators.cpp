#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "bergman/operators.hpp"

using namespace bergman;
using boost::math::quadrature::gauss_kronrod;

namespace {

AtomicMeasure random_atoms(int count, double rmax, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AtomicMeasure a;
  for (int k = 0; k < count; ++k) {
    a.points.emplace_back(std::polar(rmax * std::sqrt(u(g)), 2.0 * kPi * u(g)));
    a.masses.push_back(0.1 + u(g));
  }
  return a;
}

}  // namespace

TEST(Operators, BasisSizesAndNorms) {
  const auto b1 = build_basis(1, 0.0, 10);
  ASSERT_EQ(b1.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(b1.norms[k] * b1.norms[k], 1.0 / (k + 1.0), 1e-14);
  const auto b2 = build_basis(2, 0.0, 3);
  ASSERT_EQ(b2.size(), 10u);
  for (std::size_t k = 0; k < b2.size(); ++k) {
    const auto& m = b2.ordering[k];
    const double ref = std::tgamma(m[0] + 1.0) * std::tgamma(m[1] + 1.0) * 2.0 / std::tgamma(3.0 + m[0] + m[1]);
    EXPECT_NEAR(b2.norms[k] * b2.norms[k], ref, 1e-14);
  }
  // weighted: ||z^k||^2 = Gamma(k+1) Gamma(2+alpha) / Gamma(k+2+alpha)
  const auto bw = build_basis(1, 1.0, 4);
  EXPECT_NEAR(bw.norms[3] * bw.norms[3], 6.0 * 2.0 / 120.0, 1e-14);
  EXPECT_THROW(build_basis(1, 0.0, -1), ConfigError);
  EXPECT_THROW(build_basis(1, -1.0, 2), ConfigError);
}

TEST(Operators, BasisValuesMatchMonomials) {
  const auto b1 = build_basis(1, 0.0, 300);
  const BallPoint z(cplx(0.4, -0.7));
  const auto v = basis_values(b1, z);
  for (int k : {0, 1, 7, 50}) EXPECT_LT(std::abs(v(k) - std::pow(z.first(), k) * std::sqrt(k + 1.0)), 1e-12);
  EXPECT_TRUE(std::isfinite(std::abs(v(300))));
  const auto v0 = basis_values(b1, BallPoint::origin(1));
  EXPECT_EQ(v0(0), cplx(1.0));
  EXPECT_EQ(v0.tail(300).norm(), 0.0);
  const auto b2 = build_basis(2, 0.5, 4);
  const BallPoint w({cplx(0.2, 0.1), cplx(-0.3, 0.4)});
  const auto v2 = basis_values(b2, w);
  for (std::size_t k = 0; k < b2.size(); ++k)
    EXPECT_LT(std::abs(v2(static_cast<Eigen::Index>(k)) - monomial(w, b2.ordering[k]) / b2.norms[k]), 1e-14);
}

TEST(Operators, RadialPowerToeplitzIsDiagonal) {
  const auto T = toeplitz_matrix(RadialPowerMeasure{1.0}, build_basis(1, 0.0, 20));
  for (int i = 0; i <= 20; ++i) {
    EXPECT_NEAR(T.matrix(i, i).real(), 1.0 / (i + 2.0), 1e-14);
    for (int j = 0; j <= 20; ++j)
      if (i != j) EXPECT_EQ(T.matrix(i, j), cplx{});
  }
  const auto I = toeplitz_matrix(RadialPowerMeasure{0.0, 1.0, 2}, build_basis(2, 0.0, 5));
  EXPECT_LT((I.matrix - Eigen::MatrixXcd::Identity(I.matrix.rows(), I.matrix.cols())).norm(), 1e-13);
  EXPECT_THROW(toeplitz_matrix(RadialPowerMeasure{0.0, 1.0, 2}, build_basis(1, 0.0, 3)), ConfigError);
}

TEST(Operators, AtomToeplitzIsRankOne) {
  const cplx a(0.3, 0.5);
  const auto b = build_basis(1, 0.0, 40);
  const auto T = toeplitz_matrix(AtomicMeasure{{BallPoint(a)}, {2.0}}, b);
  const auto e = basis_values(b, BallPoint(a));
  for (int i : {0, 3, 17})
    for (int j : {0, 5, 40}) EXPECT_LT(std::abs(T.matrix(i, j) - 2.0 * e(j) * std::conj(e(i))), 1e-14);
  // HS norm of the truncation: 2 sum_{k<=D} (k+1) x^k
  const double x = std::norm(a);
  double s = 0.0;
  for (int k = 0; k <= 40; ++k) s += (k + 1.0) * std::pow(x, k);
  EXPECT_NEAR(hs_norm(T), 2.0 * s, 1e-12);
  EXPECT_NEAR(op_norm(T), 2.0 * s, 1e-9);
}

TEST(Operators, QuadraticFormIsIntegralOfModulusSquared) {
  const auto mu = random_atoms(12, 0.9, 5);
  const auto b = build_basis(1, 0.0, 30);
  const auto T = toeplitz_matrix(mu, b);
  EXPECT_LT((T.matrix - T.matrix.adjoint()).norm(), 1e-12 * T.matrix.norm());
  std::mt19937_64 g(9);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd c(31);
  for (int k = 0; k <= 30; ++k) c(k) = cplx(nd(g), nd(g));
  double ref = 0.0;
  for (std::size_t k = 0; k < mu.points.size(); ++k) ref += mu.masses[k] * std::norm(basis_values(b, mu.points[k]).cwiseProduct(c).sum());
  EXPECT_NEAR(c.dot(T.matrix * c).real(), ref, 1e-10 * ref);
}

TEST(Operators, AngularGridToeplitzMatchesQuadrature) {
  const double h = kPi / 3.0;
  const GridDensityMeasure g{{0.2, 0.5, 0.9},
                             {0.0, h, 2 * h, 3 * h, 4 * h, 5 * h},
                             {{1, 2, 0, 1, 3, 1}, {0, 1, 1, 2, 0, 4}, {2, 2, 1, 0, 1, 1}}};
  auto dens = [&](double r, double th) {
    const std::size_t i = r < 0.5 ? 0 : 1;
    const double u = (r - g.r[i]) / (g.r[i + 1] - g.r[i]);
    const int j = std::min(5, static_cast<int>(th / h));
    const double v = (th - j * h) / h;
    const int k = (j + 1) % 6;
    auto row = [&](std::size_t s) { return (1 - v) * g.values[s][j] + v * g.values[s][k]; };
    return (1 - u) * row(i) + u * row(i + 1);
  };
  const auto b = build_basis(1, 0.0, 8);
  const auto T = toeplitz_matrix(g, b);
  for (auto [i, j] : {std::pair{0, 0}, std::pair{2, 1}, std::pair{1, 4}, std::pair{7, 8}, std::pair{3, 3}, std::pair{0, 6}}) {
    auto radial = [&](double r) {
      cplx acc{};
      for (int s = 0; s < 6; ++s) {
        auto re = [&](double th) { return dens(r, th) * std::cos((j - i) * th); };
        auto im = [&](double th) { return dens(r, th) * std::sin((j - i) * th); };
        acc += cplx(gauss_kronrod<double, 31>::integrate(re, s * h, (s + 1) * h, 5, 1e-14),
                    gauss_kronrod<double, 31>::integrate(im, s * h, (s + 1) * h, 5, 1e-14));
      }
      return acc * std::pow(r, i + j + 1) / kPi;
    };
    auto part = [&](double lo, double hi, bool imag) {
      return gauss_kronrod<double, 31>::integrate([&](double r) { return imag ? radial(r).imag() : radial(r).real(); }, lo,
                                                  hi, 5, 1e-13);
    };
    const cplx ref = cplx(part(0.2, 0.5, false) + part(0.5, 0.9, false), part(0.2, 0.5, true) + part(0.5, 0.9, true)) /
                     (b.norms[i] * b.norms[j]);
    EXPECT_LT(std::abs(T.matrix(i, j) - ref), 1e-11) << i << "," << j;
  }
  EXPECT_LT((T.matrix - T.matrix.adjoint()).norm(), 1e-13);
}

TEST(Operators, RadialGridToeplitzIsDiagonal) {
  const GridDensityMeasure g{{0.3, 0.6}, {0.0}, {{1.0}, {1.0}}};
  const auto T = toeplitz_matrix(g, build_basis(1, 0.0, 10));
  for (int k = 0; k <= 10; ++k) {
    EXPECT_NEAR(T.matrix(k, k).real(), std::pow(0.6, 2 * k + 2) - std::pow(0.3, 2 * k + 2), 1e-14);
    if (k > 0) EXPECT_EQ(T.matrix(k, 0), cplx{});
  }
}

TEST(Operators, OperatorNormMatchesSvd) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> nd;
  for (auto [rows, cols] : {std::pair{6, 6}, std::pair{9, 4}, std::pair{3, 7}}) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cplx(nd(g), nd(g));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    EXPECT_NEAR(op_norm(m), svd.singularValues()(0), 1e-8 * svd.singularValues()(0));
    EXPECT_NEAR(hs_norm(m), svd.singularValues().norm(), 1e-12);
  }
  EXPECT_EQ(op_norm(Eigen::MatrixXcd::Zero(3, 3)), 0.0);
  Eigen::MatrixXcd k(2, 2);
  k << 1.0, -1.0, 1.0, -1.0;
  EXPECT_NEAR(op_norm(k), 2.0, 1e-9);
}

TEST(Operators, EmbeddingGramSharesEntries) {
  const auto mu = random_atoms(4, 0.7, 1);
  const auto b = build_basis(1, 0.0, 6);
  const auto J = embedding_gram(mu, b);
  EXPECT_EQ(J.kind, OperatorKind::embedding_gram);
  EXPECT_EQ((J.matrix - toeplitz_matrix(mu, b).matrix).norm(), 0.0);
}

TEST(Operators, ApplicationAgreesWithMatrixOnPolynomials) {
  const auto mu = random_atoms(6, 0.5, 8);
  const auto b = build_basis(1, 0.0, 200);
  const auto T = toeplitz_matrix(mu, b);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(201);
  c(0) = 1.0;
  c(2) = cplx(0.0, -2.0);
  c(5) = 0.5;
  auto f = [&](const BallPoint& w) { return basis_values(b, w).cwiseProduct(c).sum(); };
  const Eigen::VectorXcd y = T.matrix * c;
  for (cplx z : {cplx(0.0, 0.0), cplx(0.3, 0.2), cplx(-0.45, 0.1)}) {
    const cplx ref = basis_values(b, BallPoint(z)).cwiseProduct(y).sum();
    EXPECT_LT(std::abs(toeplitz_apply(mu, f, BallPoint(z)) - ref), 1e-12 * std::abs(ref));
  }
}
