#include <gtest/gtest.h>

#include <cmath>

#include "selfsim/selfsim.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace selfsim;

namespace {

// 2^j atoms, one per level-j box, equal masses.
AtomicMeasure dyadic_uniform(int j) {
  std::vector<double> xs;
  for (int k = 0; k < (1 << j); ++k) xs.push_back((k + 0.5) * std::ldexp(1.0, -j));
  return AtomicMeasure::from_atoms(1, xs, std::vector<double>(xs.size(), 1.0 / static_cast<double>(xs.size())));
}

const double kCantorDim = std::log(2.0) / std::log(3.0);

}  // namespace

TEST(Histogram, HandExamples) {
  const auto d0 = AtomicMeasure::dirac(Point{0.0});
  for (int j : {0, 3, 17}) {
    const auto h = dyadic_histogram(d0, j);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h.boxes[0].key[0], 0);
    EXPECT_EQ(h.boxes[0].mass, 1.0);
  }
  const auto two = AtomicMeasure::from_atoms(1, {0.0, 0.75}, {0.5, 0.5});
  const auto h = dyadic_histogram(two, 1);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.boxes[1].key[0], 1);
  EXPECT_EQ(dyadic_histogram(AtomicMeasure::dirac(Point{1.0}), 4).boxes[0].key[0], 15);
  EXPECT_THROW(dyadic_histogram(AtomicMeasure::dirac(Point{1.5}), 2), InputError);
  EXPECT_THROW(dyadic_histogram(d0, 41), InputError);
}

TEST(Histogram, MatchesBruteForceBinning) {
  const auto mu = natural_measure(fixtures::cantor(), std::pow(3.0, -7));
  std::vector<double> xs;
  for (std::size_t i = 0; i < mu.size(); ++i) xs.push_back(mu.point(i)[0]);
  for (int j = 0; j <= 11; ++j) {
    const auto brute = oracle::histogram_brute(xs, mu.masses(), j);
    const auto h = dyadic_histogram(mu, j);
    ASSERT_EQ(h.size(), brute.size());
    std::size_t i = 0;
    for (const auto& [k, m] : brute) {
      EXPECT_EQ(h.boxes[i].key[0], k);
      EXPECT_NEAR(h.boxes[i].mass, m, 1e-14);
      ++i;
    }
    EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
  }
}

TEST(Histogram, RefinementConsistency) {
  DeterministicRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = fixtures::random_measure(rng, 60, 1 + trial % 3);
    for (int j = 1; j <= 12; ++j) {
      const auto coarse = dyadic_histogram(mu, j - 1);
      const auto merged = coarsen(dyadic_histogram(mu, j));
      ASSERT_EQ(coarse.size(), merged.size());
      for (std::size_t i = 0; i < coarse.size(); ++i) {
        EXPECT_EQ(coarse.boxes[i].key, merged.boxes[i].key);
        EXPECT_NEAR(coarse.boxes[i].mass, merged.boxes[i].mass, 1e-12);
      }
    }
  }
}

TEST(PartitionSum, Basics) {
  const auto h = dyadic_histogram(AtomicMeasure::from_atoms(1, {0.0, 0.75}, {0.5, 0.5}), 1);
  EXPECT_DOUBLE_EQ(partition_sum(h, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(partition_sum(h, 0.0), 2.0);
  EXPECT_NEAR(partition_sum(h, 1.0), 1.0, 1e-12);
}

TEST(Tau, DyadicUniformAndNormalization) {
  const auto mu = dyadic_uniform(10);
  const std::vector<double> q{0.0, 1.0, 2.0};
  const auto tau = tau_estimate(mu, {3, 10}, q);
  for (std::size_t k = 0; k < tau.levels.size(); ++k) {
    EXPECT_NEAR(tau.per_level[0][k], -1.0, 1e-12);
    EXPECT_NEAR(tau.per_level[1][k], 0.0, 1e-12);
    EXPECT_NEAR(tau.per_level[2][k], 1.0, 1e-12);
  }
  EXPECT_NEAR(tau.y[1], 0.0, 1e-12);
  EXPECT_NEAR(tau.y[2], 1.0, 1e-12);
  EXPECT_THROW(tau_estimate(mu, {3, 10}, std::vector<double>{}), InputError);
  EXPECT_THROW(tau_estimate(mu, {5, 5}, q), InputError);
}

TEST(Tau, CantorNaturalMeasure) {
  const auto mu = natural_measure(fixtures::cantor(), std::pow(3.0, -10));
  const auto q = linear_grid(0.0, 1.0, 11);
  const auto tau = tau_estimate(mu, {6, 12}, q);
  for (std::size_t k = 0; k < q.size(); ++k) EXPECT_NEAR(tau.y[k], kCantorDim * (q[k] - 1), 0.05);
  EXPECT_TRUE(tau.notes.empty());
}

TEST(Tau, PerLevelConcaveNondecreasingProperty) {
  DeterministicRng rng(4);
  const auto q = linear_grid(-2.0, 4.0, 25);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mu = fixtures::random_measure(rng, 5 + rng.below(200), 1 + trial % 2);
    const auto tau = tau_estimate(mu, {1, 8}, q);
    for (std::size_t j = 0; j < tau.levels.size(); ++j) {
      for (std::size_t k = 0; k + 1 < q.size(); ++k) EXPECT_LE(tau.per_level[k][j], tau.per_level[k + 1][j] + 1e-9);
      for (std::size_t k = 1; k + 1 < q.size(); ++k) {
        const double second = tau.per_level[k + 1][j] - 2 * tau.per_level[k][j] + tau.per_level[k - 1][j];
        EXPECT_LE(second, 1e-9);
      }
      // T_j(1) = 0, T_j(0) = -log2(N_j)/j.
      const auto h = dyadic_histogram(mu, tau.levels[j]);
      const double t0 = -std::log2(static_cast<double>(h.size())) / tau.levels[j];
      EXPECT_NEAR(tau.per_level[8][j], t0, 1e-12);  // q = 0
      EXPECT_NEAR(tau.per_level[12][j], 0.0, 1e-12);  // q = 1
    }
  }
}

TEST(Legendre, LinearTau) {
  SpectrumCurve line;
  line.x = linear_grid(0.0, 1.0, 11);
  for (double q : line.x) line.y.push_back(kCantorDim * (q - 1));
  const auto at_s = legendre_transform(line, std::vector<double>{kCantorDim});
  EXPECT_NEAR(at_s.y[0], kCantorDim, 1e-12);
  const auto at_0 = legendre_transform(line, std::vector<double>{0.0});
  EXPECT_NEAR(at_0.y[0], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(at_0.aux[0], 1.0);

  SpectrumCurve flat;
  flat.x = line.x;
  flat.y.assign(flat.x.size(), 0.0);
  const auto f = legendre_transform(flat, std::vector<double>{0.0, 0.5, 2.0});
  for (double v : f.y) EXPECT_DOUBLE_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(f.aux[1], 0.0);

  // Grid exactness and concavity on the exact line.
  const auto h = linear_grid(0.0, kCantorDim, 30);
  const auto leg = legendre_transform(line, h);
  for (std::size_t k = 0; k < h.size(); ++k) EXPECT_LE(leg.y[k], h[k] + 1e-12);
  for (std::size_t k = 1; k + 1 < h.size(); ++k) EXPECT_LE(leg.y[k + 1] - 2 * leg.y[k] + leg.y[k - 1], 1e-12);
  EXPECT_THROW(legendre_transform(line, std::vector<double>{}), InputError);
}

TEST(Coarse, Examples) {
  const std::vector<double> bins = linear_grid(0.0, 2.0, 41);
  const auto dirac = coarse_spectrum(AtomicMeasure::dirac(Point{0.3}), {2, 10}, bins, {0.05, 1});
  ASSERT_EQ(dirac.size(), 1u);  // bins are (h - eps, h + eps]
  EXPECT_NEAR(dirac.x[0], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(dirac.y[0], 0.0);
  EXPECT_TRUE(coarse_spectrum(AtomicMeasure::dirac(Point{0.3}), {2, 10}, bins).x.empty());

  const auto uni = coarse_spectrum(dyadic_uniform(10), {4, 10}, bins, {0.02, 2});
  ASSERT_EQ(uni.size(), 1u);
  EXPECT_NEAR(uni.x[0], 1.0, 1e-12);
  EXPECT_NEAR(uni.y[0], 1.0, 1e-12);

  const auto cantor = coarse_spectrum(natural_measure(fixtures::cantor(), std::pow(3.0, -10)), {6, 12},
                                      linear_grid(0.0, 1.5, 31));
  std::size_t best = 0;
  for (std::size_t k = 0; k < cantor.size(); ++k) {
    if (cantor.y[k] > cantor.y[best]) best = k;
  }
  EXPECT_NEAR(cantor.x[best], kCantorDim, 0.1);
  EXPECT_THROW(coarse_spectrum(dyadic_uniform(3), {1, 2}, bins, {0.0, 2}), InputError);
}

TEST(Holder, Examples) {
  const std::vector<double> radii{0.1, 0.01, 0.001};
  const auto dirac = local_holder(AtomicMeasure::dirac(Point{0.4}), Point{0.4}, radii);
  EXPECT_EQ(dirac.slope, 0.0);

  std::vector<double> tri;
  for (int m = 2; m <= 10; ++m) tri.push_back(std::pow(3.0, -m));
  const auto cantor = natural_measure(fixtures::cantor(), std::pow(3.0, -12));
  const auto at0 = local_holder(cantor, Point{0.0}, tri);
  EXPECT_NEAR(at0.slope, kCantorDim, 1e-9);  // masses are exactly 2^-m
  EXPECT_NEAR(at0.min_chord, kCantorDim, 1e-9);

  std::vector<double> dyadic;
  for (int m = 2; m <= 10; ++m) dyadic.push_back(std::exp2(-m));
  const auto leb = natural_measure(fixtures::segment(), std::exp2(-14));
  for (double x : {0.3, 0.5, 0.77}) EXPECT_NEAR(local_holder(leb, Point{x}, dyadic).slope, 1.0, 0.1);

  EXPECT_THROW(local_holder(cantor, Point{0.5}, tri), EstimationError);  // inside the removed middle third
  EXPECT_THROW(local_holder(cantor, Point{0.0}, std::vector<double>{0.1, 0.2}), InputError);
  EXPECT_THROW(local_holder(natural_measure(fixtures::cantor(), 0.2), Point{0.0}, tri), InputError);
}

TEST(LowerDensity, Examples) {
  std::vector<double> dyadic;
  for (int m = 2; m <= 10; ++m) dyadic.push_back(std::exp2(-m));
  const auto leb = natural_measure(fixtures::segment(), std::exp2(-16));
  EXPECT_NEAR(lower_density(leb, Point{0.5}, 1.0, dyadic).value, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(lower_density(AtomicMeasure::dirac(Point{0.2}), Point{0.2}, 0.0, dyadic).value, 1.0);

  std::vector<double> tri;
  for (int m = 2; m <= 10; ++m) tri.push_back(std::pow(3.0, -m));
  const auto cantor = natural_measure(fixtures::cantor(), std::pow(3.0, -12));
  const auto dens = lower_density(cantor, Point{0.0}, kCantorDim, tri);
  EXPECT_NEAR(dens.value, std::pow(2.0, -kCantorDim), 1e-9);
  for (double r : dens.ratios) EXPECT_NEAR(r, dens.value, 1e-9);
}

TEST(VerifyMajholdmu, Examples) {
  const auto c = fixtures::cantor();
  const double s = kCantorDim;
  const int J = 6;
  const double res = std::exp2(-J);
  const auto lambda = natural_measure(c, res);
  const auto rep = verify_majholdmu(lambda, c, 1.0, J, s, 0.1, res);
  EXPECT_TRUE(rep.positive);
  EXPECT_EQ(rep.anchors, cut_set(c, res).size());
  EXPECT_GT(rep.min_ratio, 0.0);

  const auto far = verify_majholdmu(AtomicMeasure::dirac(Point{0.5}), c, 4.0, J, s, 0.1, std::exp2(-24.0));
  EXPECT_FALSE(far.positive);
  EXPECT_FALSE(far.passed);

  EXPECT_THROW(verify_majholdmu(lambda, c, 2.0, J, s, 0.1, res), InputError);
}

TEST(VerifyFormalism, CantorPassesAndTightTolFails) {
  const auto mu = natural_measure(fixtures::cantor(), std::pow(3.0, -10));
  const auto q = linear_grid(0.0, 1.0, 11);
  const auto h = linear_grid(0.1 * kCantorDim, kCantorDim, 10);
  const auto ok = verify_formalism(mu, kCantorDim, q, h, {6, 12}, 0.05);
  EXPECT_TRUE(ok.passed);
  EXPECT_TRUE(ok.concavity_holds);
  EXPECT_EQ(ok.concavity_checks, 7u * 11u);
  const auto tight = verify_formalism(mu, kCantorDim, q, h, {2, 4}, 1e-4);
  EXPECT_FALSE(tight.passed);
}

TEST(VerifyFormalism, ConcavityBoundOnRandomMeasures) {
  DeterministicRng rng(12);
  const std::vector<double> q{0.0, 0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = fixtures::random_measure(rng, 1 + rng.below(300), 1 + trial % 2);
    std::size_t checks = 0;
    EXPECT_TRUE(concavity_violations(mu, {1, 14}, q, &checks).empty());
    EXPECT_EQ(checks, 14u * 5u);
  }
}
