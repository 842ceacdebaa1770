#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "support.hpp"
#include "tomolab/dynamics.hpp"
#include "tomolab/errors.hpp"

using namespace tomolab;

TEST_CASE("analytic correlations") {
  SUBCASE("zero matrix with unit input") {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
    // CombinationMatrix accepts any valid nonnegative symmetric matrix.
    const CorrelationSet c = analytic_correlations(CombinationMatrix(zero, 0.5), 1.0, NodeSet::range(4));
    CHECK(testing::max_abs(c.r0 - Eigen::MatrixXd::Identity(4, 4)) < 1e-15);
    CHECK(testing::max_abs(c.r1) < 1e-15);
    CHECK(c.analytic());
  }
  SUBCASE("matches the truncated power series") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
      const auto inst = testing::random_instance(rng, 5, 30, 2, 6, t % 2 ? WeightRule::Laplacian
                                                                         : WeightRule::Metropolis,
                                                 0.8);
      const int n = inst.g.size();
      const CorrelationSet c = analytic_correlations(inst.a, 0.2, NodeSet::range(n));
      REQUIRE(testing::max_abs(c.r0 - oracle::series_r0(inst.a.entries(), 0.2, 200)) <= 1e-9);
      REQUIRE(testing::max_abs(c.r1 - inst.a.entries() * c.r0) <= 1e-12);
      REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c.r0).eigenvalues().minCoeff() > 0.0);
    }
  }
  SUBCASE("truncation picks the observed block in set order") {
    std::mt19937_64 rng(32);
    const auto inst = testing::random_instance(rng, 15, 15, 4, 4, WeightRule::Metropolis, 0.7);
    const CorrelationSet full = analytic_correlations(inst.a, 0.3, NodeSet::range(15));
    const NodeSet s{2, 9, 11};
    const CorrelationSet part = analytic_correlations(inst.a, 0.3, s);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) {
        CHECK(part.r0(x, y) == doctest::Approx(full.r0(s[x], s[y])).epsilon(1e-14));
        CHECK(part.r1(x, y) == doctest::Approx(full.r1(s[x], s[y])).epsilon(1e-14));
      }
    const CorrelationSet r = restrict_to(full, s);
    CHECK(testing::max_abs(r.r0 - part.r0) < 1e-14);
    CHECK(r.node_index == s);
  }
}

TEST_CASE("simulation with A = 0 and unit input") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 5);
  const CombinationMatrix a(zero, 0.5);
  SimConfig cfg;
  cfg.beta = 1.0;
  cfg.n_max = 100000;
  cfg.seed = 99;
  for (Noise noise : {Noise::Gaussian, Noise::Rademacher, Noise::UniformCentered}) {
    cfg.noise = noise;
    const CorrelationSet c = simulate_and_accumulate(a, cfg, NodeSet::range(5));
    const Eigen::MatrixXd off = c.r0 - Eigen::MatrixXd(c.r0.diagonal().asDiagonal());
    CHECK(testing::max_abs(off) <= 0.05);
    CHECK(testing::max_abs(c.r1) <= 0.05);
    CHECK((c.r0.diagonal().array() - 1.0).abs().maxCoeff() <= 0.05);
    CHECK(testing::max_abs(c.r0 - c.r0.transpose()) == 0.0);
    CHECK(c.sample_count == 100000);
  }
}

TEST_CASE("sample averages follow the stated normalization") {
  // Recompute both averages from the dumped raw samples.
  std::mt19937_64 rng(5);
  const auto inst = testing::random_instance(rng, 12, 12, 3, 3, WeightRule::Metropolis, 0.8);
  const NodeSet s{1, 4, 10};
  for (long n_max : {1L, 2L, 37L}) {
    SimConfig cfg;
    cfg.n_max = n_max;
    cfg.burn_in = 5;
    cfg.seed = 17;
    std::stringstream raw;
    const CorrelationSet c = simulate_and_accumulate(inst.a, cfg, s, &raw);

    std::map<long, Eigen::Vector3d> samples;
    std::string line;
    while (std::getline(raw, line)) {
      long t = 0;
      int node = 0;
      double y = 0;
      char c1 = 0, c2 = 0;
      std::istringstream f(line);
      f >> t >> c1 >> node >> c2 >> y;
      samples[t](static_cast<int>(*s.index_of(node))) = y;
    }
    REQUIRE(samples.size() == static_cast<std::size_t>(n_max + 1));
    Eigen::Matrix3d r0 = Eigen::Matrix3d::Zero(), r1 = Eigen::Matrix3d::Zero();
    for (long t = 0; t <= n_max; ++t) r0 += samples[t] * samples[t].transpose();
    for (long t = 0; t < n_max; ++t) r1 += samples[t + 1] * samples[t].transpose();
    r0 /= double(n_max + 1);
    r1 /= double(n_max);
    CHECK(testing::max_abs(c.r0 - r0) <= 1e-14);
    CHECK(testing::max_abs(c.r1 - r1) <= 1e-14);
    if (n_max == 1) CHECK(testing::max_abs(c.r1 - samples[1] * samples[0].transpose()) <= 1e-15);
  }
}

TEST_CASE("simulation is reproducible and independent of the observed subset") {
  std::mt19937_64 rng(6);
  const auto inst = testing::random_instance(rng, 40, 40, 5, 5, WeightRule::Laplacian, 0.8);
  SimConfig cfg;
  cfg.n_max = 2000;
  cfg.seed = 123;
  const CorrelationSet a1 = simulate_and_accumulate(inst.a, cfg, NodeSet::range(10));
  const CorrelationSet a2 = simulate_and_accumulate(inst.a, cfg, NodeSet::range(10));
  CHECK(a1.r0 == a2.r0);
  CHECK(a1.r1 == a2.r1);
  const CorrelationSet sub = simulate_and_accumulate(inst.a, cfg, NodeSet{2, 7});
  const CorrelationSet restricted = restrict_to(a1, NodeSet{2, 7});
  CHECK(testing::max_abs(sub.r0 - restricted.r0) <= 1e-13);
  CHECK(testing::max_abs(sub.r1 - restricted.r1) <= 1e-13);
  cfg.seed = 124;
  CHECK(simulate_and_accumulate(inst.a, cfg, NodeSet::range(10)).r0 != a1.r0);
}

TEST_CASE("empirical correlations approach the analytic ones") {
  std::mt19937_64 rng(7);
  const auto inst = testing::random_instance(rng, 30, 30, 5, 5, WeightRule::Metropolis, 0.8);
  const NodeSet s = NodeSet::range(5);
  const CorrelationSet exact = analytic_correlations(inst.a, 0.2, s);
  SimConfig cfg;
  cfg.beta = 0.2;
  double prev = 1e9;
  for (long n_max : {1000L, 100000L}) {
    double err = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.seed = seed;
      cfg.n_max = n_max;
      const CorrelationSet c = simulate_and_accumulate(inst.a, cfg, s);
      err += testing::max_abs(c.r0 - exact.r0) / exact.r0.cwiseAbs().maxCoeff();
    }
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev / 5 < 0.05);
}

TEST_CASE("simulation config validation") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  const CombinationMatrix a(zero, 0.5);
  SimConfig cfg;
  cfg.n_max = 0;
  CHECK_THROWS_AS(simulate_and_accumulate(a, cfg, NodeSet{0}), std::invalid_argument);
  cfg.n_max = 10;
  cfg.beta = 0;
  CHECK_THROWS_AS(simulate_and_accumulate(a, cfg, NodeSet{0}), std::invalid_argument);
  cfg.beta = 1;
  CHECK_THROWS_AS(simulate_and_accumulate(a, cfg, NodeSet{0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(restrict_to(analytic_correlations(a, 1.0, NodeSet{0}), NodeSet{1}), std::invalid_argument);
}
