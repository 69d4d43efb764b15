#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bergman/lattice.hpp"

using namespace bergman;

namespace {

std::vector<BallPoint> dense_samples(double R, int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rmax = std::tanh(R);
  std::vector<BallPoint> out;
  for (int k = 0; k < count; ++k) out.emplace_back(std::polar(rmax * std::sqrt(u(g)), 2.0 * kPi * u(g)));
  return out;
}

}  // namespace

TEST(Lattice, LargeDeltaGivesTheOrigin) {
  const Lattice lat = generate_lattice(2.0, 1.0);
  ASSERT_EQ(lat.points.size(), 1u);
  EXPECT_EQ(lat.points[0].norm(), 0.0);
  EXPECT_EQ(covering_multiplicity(lat, {BallPoint::origin(1)}), 1);
}

TEST(Lattice, PointsAreDeltaSeparated) {
  const Lattice lat = generate_lattice(0.6, 1.2);
  ASSERT_GT(lat.points.size(), 5u);
  for (std::size_t i = 0; i < lat.points.size(); ++i)
    for (std::size_t j = i + 1; j < lat.points.size(); ++j)
      EXPECT_GE(bergman_distance(lat.points[i], lat.points[j]), 0.6 - 1e-12);
}

TEST(Lattice, HalfBallsAreDisjointAndBallsCover) {
  for (double delta : {0.4, 0.6, 1.0}) {
    const Lattice lat = generate_lattice(delta, 1.5);
    EXPECT_EQ(lat.separation, 0.5);
    for (std::size_t i = 0; i < lat.points.size(); ++i)
      for (std::size_t j = i + 1; j < lat.points.size(); ++j)
        EXPECT_GE(bergman_distance(lat.points[i], lat.points[j]), 2.0 * lat.separation * delta - 1e-12);
    for (const auto& z : dense_samples(1.5, 20000, 9)) {
      double best = kInf;
      for (const auto& a : lat.points) best = std::min(best, bergman_distance(z, a));
      EXPECT_LT(best, lat.delta) << z[0];
    }
  }
}

TEST(Lattice, MultiplicityMatchesBruteForceAndIsBounded) {
  for (double delta : {0.5, 1.0}) {
    const Lattice lat = generate_lattice(delta, 1.5);
    EXPECT_LE(lat.multiplicity, 30);
    const auto samples = dense_samples(1.5, 3000, 11);
    int brute = 0;
    for (const auto& z : samples) {
      int count = 0;
      for (const auto& a : lat.points) count += bergman_distance(z, a) < delta;
      EXPECT_GE(count, 1);
      brute = std::max(brute, count);
    }
    EXPECT_EQ(covering_multiplicity(lat, samples), brute);
  }
}

TEST(Lattice, SamplesOutsideRegionAreRejected) {
  const Lattice lat = generate_lattice(1.0, 1.0);
  EXPECT_THROW(covering_multiplicity(lat, {BallPoint(cplx(0.95, 0.0))}), ConfigError);
}

TEST(Lattice, GenerationIsDeterministic) {
  const Lattice a = generate_lattice(0.7, 1.4), b = generate_lattice(0.7, 1.4);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k][0], b.points[k][0]);
}

TEST(Lattice, CoarseCandidateGridIsRejected) {
  EXPECT_THROW(generate_lattice(0.5, 1.0, 1, LatticeOptions{0.5}), NumericError);
  EXPECT_THROW(generate_lattice(-1.0, 1.0), ConfigError);
  EXPECT_THROW(generate_lattice(1.0, 1.0, 2), ConfigError);
}
