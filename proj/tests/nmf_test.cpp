// Copyright 2026 The mlunmix Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mlunmix/metrics.hpp"
#include "mlunmix/nmf.hpp"
#include "support/oracles.hpp"

namespace mlunmix {
namespace {

struct Instance {
  Matrix x, a, s;
};

// Sizes up to 20x10 for A and 10x30 for S.
Instance random_instance(std::uint64_t seed, double noise = 0.0) {
  Rng rng(seed);
  const Index b = oracle::uniform_size(rng, 2, 20);
  const Index p = oracle::uniform_size(rng, 1, std::min<Index>(b, 10));
  const Index n = oracle::uniform_size(rng, 2, 30);
  Instance in;
  in.a = oracle::uniform_matrix(b, p, rng, 0.05, 1.0);
  in.s = oracle::uniform_matrix(p, n, rng, 0.05, 1.0);
  in.x = in.a * in.s;
  if (noise > 0.0) in.x += oracle::uniform_matrix(b, n, rng, 0.0, noise);
  return in;
}

TEST(AlphaSchedule, Values) {
  EXPECT_DOUBLE_EQ(alpha_schedule(0.1, 25.0, 0), 0.1);
  EXPECT_NEAR(alpha_schedule(0.1, 25.0, 25), 0.0367879441171, 1e-12);
  EXPECT_EQ(alpha_schedule(0.0, 25.0, 7), 0.0);
  for (int t = 0; t < 100; ++t) {
    EXPECT_LT(alpha_schedule(0.1, 25.0, t + 1), alpha_schedule(0.1, 25.0, t));
  }
}

TEST(UpdateSignatures, FixedPoint) {
  const Instance in = random_instance(1);
  const Matrix a1 = update_signatures(in.x, in.a, in.s, 0.0);
  EXPECT_LE((a1 - in.a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UpdateSignatures, ZeroRowStaysZero) {
  Instance in = random_instance(2);
  in.a.row(0).setZero();
  for (double alpha : {0.0, 0.3}) {
    const Matrix a1 = update_signatures(in.x, in.a, in.s, alpha);
    EXPECT_EQ(a1.row(0).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(UpdateSignatures, DoesNotIncreaseCost) {
  Rng rng(3);
  const Matrix a = oracle::uniform_matrix(5, 3, rng);
  const Matrix s = oracle::uniform_matrix(3, 8, rng);
  const Matrix x = a * s + oracle::uniform_matrix(5, 8, rng, 0.0, 0.2);
  const Matrix a_start = oracle::uniform_matrix(5, 3, rng, 0.1, 1.0);
  const Matrix a1 = update_signatures(x, a_start, s, 0.0);
  EXPECT_LE(frobenius_cost(x, a1, s), frobenius_cost(x, a_start, s) + 1e-12);
}

TEST(UpdateSignatures, DimensionMismatch) {
  EXPECT_THROW(update_signatures(Matrix::Ones(3, 4), Matrix::Ones(3, 2),
                                 Matrix::Ones(2, 5), 0.0),
               DimensionError);
}

TEST(UpdateAbundances, FixedPoint) {
  const Instance in = random_instance(4);
  const Matrix s1 = update_abundances(in.x, in.a, in.s, 0.0);
  EXPECT_LE((s1 - in.s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UpdateAbundances, ZeroEntriesRemainZero) {
  Instance in = random_instance(5);
  in.s(0, 0) = 0.0;
  in.s(in.s.rows() - 1, in.s.cols() - 1) = 0.0;
  for (double alpha : {0.0, 0.2}) {
    const Matrix s1 = update_abundances(in.x, in.a, in.s, alpha);
    EXPECT_EQ(s1(0, 0), 0.0);
    EXPECT_EQ(s1(in.s.rows() - 1, in.s.cols() - 1), 0.0);
    const Matrix s2 = update_abundances_augmented(in.x, in.a, in.s, alpha, 25.0);
    EXPECT_EQ(s2(0, 0), 0.0);
  }
}

TEST(UpdateAbundances, PenaltyLowersComposite) {
  // Held at fixed A, the penalized update should lower the composite cost in
  // most trials.
  int lowered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(1000 + seed, 0.1);
    Rng rng(seed);
    const Matrix s0 = oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.1, 1.0);
    const double alpha = 0.05;
    const Matrix s1 = update_abundances(in.x, in.a, s0, alpha);
    if (layer_cost(in.x, in.a, s1, 0.0, alpha) < layer_cost(in.x, in.a, s0, 0.0, alpha)) {
      ++lowered;
    }
  }
  EXPECT_GE(lowered, 90);
}

TEST(UpdateAbundances, AugmentedMatchesMaterialized) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(200 + seed, 0.1);
    for (double delta : {0.0, 1.0, 25.0}) {
      const AugmentedPair aug = fcls_augment(in.x, in.a, delta);
      const Matrix want = update_abundances(aug.x, aug.a, in.s, 0.04);
      const Matrix got = update_abundances_augmented(in.x, in.a, in.s, 0.04, delta);
      EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());
    }
  }
}

TEST(FclsAugment, AppendsConstantRow) {
  Matrix x(1, 2);
  x << 1, 2;
  Matrix a(1, 1);
  a << 3;
  const AugmentedPair aug = fcls_augment(x, a, 25.0);
  Matrix want_x(2, 2);
  want_x << 1, 2, 25, 25;
  Matrix want_a(2, 1);
  want_a << 3, 25;
  EXPECT_EQ(aug.x, want_x);
  EXPECT_EQ(aug.a, want_a);
  const AugmentedPair zero = fcls_augment(x, a, 0.0);
  EXPECT_EQ(zero.x.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(zero.a.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FclsAugment, SumApproachesOneAsDeltaGrows) {
  // Two endmembers, a pixel whose best unconstrained fit sums to 1.6.
  Matrix a(3, 2);
  a << 1.0, 0.2, 0.3, 1.0, 0.5, 0.5;
  Vector s_true(2);
  s_true << 0.9, 0.7;
  const Matrix x = a * s_true;
  double previous_gap = std::numeric_limits<double>::infinity();
  for (double delta : {0.0, 0.5, 1.0, 3.0, 10.0, 30.0}) {
    const AugmentedPair aug = fcls_augment(x, a, delta);
    const auto grid = oracle::grid_nnls2(aug.a, aug.x.col(0), 2.0, 400);
    const Matrix s = fcls_abundances(x, a, delta);
    EXPECT_NEAR(s(0, 0), grid.first, 6e-3);
    EXPECT_NEAR(s(1, 0), grid.second, 6e-3);
    const double gap = std::abs(grid.first + grid.second - 1.0);
    EXPECT_LE(gap, previous_gap + 1e-12);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 0.01);
}

TEST(LayerCost, Values) {
  const Instance in = random_instance(7);
  EXPECT_EQ(layer_cost(in.x, in.a, in.s, 0.0, 0.0), 0.0);
  Matrix a(1, 1), s(1, 1), x(1, 1);
  a << 1;
  s << 4;
  x << 2;
  EXPECT_DOUBLE_EQ(layer_cost(x, a, s, 1.0, 1.0), 5.0);
}

TEST(LayerCost, MatchesScalarLoop) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(300 + seed, 0.3);
    const double want = oracle::layer_cost(in.x, in.a, in.s, 0.07, 0.14);
    EXPECT_NEAR(layer_cost(in.x, in.a, in.s, 0.07, 0.14), want, 1e-12 * want);
  }
}

TEST(CheckStop, Values) {
  EXPECT_TRUE(check_stop(1.00005, 1.0, 1e-4));
  EXPECT_FALSE(check_stop(1.1, 1.0, 1e-4));
  EXPECT_FALSE(check_stop(1.0, 1.0, 0.0));
}

TEST(CheckStop, Symmetric) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform01(), v = u + 2e-4 * rng.uniform01();
    EXPECT_EQ(check_stop(u, v, 1e-4), check_stop(v, u, 1e-4));
  }
}

TEST(RunLayer, FixedPointConverges) {
  const Instance in = random_instance(9);
  LayerConfig cfg;
  cfg.alpha0 = 0.0;
  cfg.delta = 0.0;
  const LayerResult r = run_layer(in.x, in.a, in.s, cfg);
  EXPECT_EQ(r.stop_reason, StopReason::Converged);
  EXPECT_EQ(r.iterations_run, cfg.stop_patience + 1);
  EXPECT_EQ(static_cast<int>(r.cost_trace.size()), r.iterations_run);
  for (double c : r.cost_trace) EXPECT_LT(c, 1e-20);
}

TEST(RunLayer, OutputsNonnegativeAndFinite) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(400 + seed, 0.2);
    Rng rng(seed);
    LayerConfig cfg;
    cfg.t_max = 60;
    const LayerResult r =
        run_layer(in.x, oracle::uniform_matrix(in.a.rows(), in.a.cols(), rng, 0.01, 1.0),
                  oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.01, 1.0), cfg);
    EXPECT_TRUE(r.a.allFinite());
    EXPECT_TRUE(r.s.allFinite());
    EXPECT_GE(r.a.minCoeff(), 0.0);
    EXPECT_GE(r.s.minCoeff(), 0.0);
    EXPECT_EQ(static_cast<int>(r.cost_trace.size()), r.iterations_run);
  }
}

TEST(RunLayer, SeparableToyRecovered) {
  // 2 endmembers in 6 bands; the data contain both pure pixels.
  Matrix a(6, 2);
  a << 0.9, 0.1, 0.8, 0.2, 0.6, 0.3, 0.3, 0.6, 0.2, 0.8, 0.1, 0.9;
  const Index n = 21;
  Matrix s(2, n);
  for (Index j = 0; j < n; ++j) {
    s(0, j) = static_cast<double>(j) / (n - 1);
    s(1, j) = 1.0 - s(0, j);
  }
  const Matrix x = a * s;
  Matrix a0(6, 2);
  a0.col(0) = x.col(n - 1) * 0.9 + x.col(n / 2) * 0.1;
  a0.col(1) = x.col(0) * 0.9 + x.col(n / 2) * 0.1;
  LayerConfig cfg;
  cfg.t_max = 3000;
  cfg.epsilon = 0.0;
  cfg.delta = 1.0;  // on the scale of the data; 25 stalls a uniform start
  const Matrix s0 = Matrix::Constant(2, n, 0.5);
  const LayerResult r = run_layer(x, a0, s0, cfg);
  const EvalReport rep = evaluate(a, s, r.a, r.s);
  for (double v : rep.per_endmember_sad) EXPECT_LT(v, 0.05);
}

TEST(RunLayer, Deterministic) {
  const Instance in = random_instance(10, 0.3);
  Rng rng(1);
  const Matrix a0 = oracle::uniform_matrix(in.a.rows(), in.a.cols(), rng, 0.1, 1.0);
  const Matrix s0 = oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.1, 1.0);
  LayerConfig cfg;
  cfg.t_max = 50;
  const LayerResult r1 = run_layer(in.x, a0, s0, cfg);
  const LayerResult r2 = run_layer(in.x, a0, s0, cfg);
  EXPECT_EQ(r1.a, r2.a);
  EXPECT_EQ(r1.s, r2.s);
  EXPECT_EQ(r1.cost_trace, r2.cost_trace);
}

TEST(RunLayer, DivergenceNamesIteration) {
  Matrix x = Matrix::Constant(3, 4, 1e300);
  LayerConfig cfg;
  cfg.t_max = 10;
  try {
    run_layer(x, Matrix::Constant(3, 2, 1e300), Matrix::Constant(2, 4, 1e300), cfg, 2);
    FAIL() << "expected divergence";
  } catch (const SolverDivergence& e) {
    EXPECT_EQ(e.layer(), 2);
    EXPECT_EQ(e.iteration(), 1);
  }
}

TEST(RunLayer, RejectsBadInput) {
  LayerConfig cfg;
  EXPECT_THROW(run_layer(-Matrix::Ones(2, 2), Matrix::Ones(2, 1), Matrix::Ones(1, 2), cfg),
               DomainError);
  EXPECT_THROW(run_layer(Matrix::Ones(2, 2), Matrix::Ones(2, 1), Matrix::Ones(2, 2), cfg),
               DimensionError);
  cfg.t_max = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

// Property suite over seeded random instances.

TEST(Properties, NonnegativityPreserved) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(5000 + seed, 0.5);
    Rng rng(seed);
    Matrix a = oracle::uniform_matrix(in.a.rows(), in.a.cols(), rng, 0.0, 1.0);
    Matrix s = oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.0, 1.0);
    for (int t = 1; t <= 20; ++t) {
      const double alpha = alpha_schedule(0.1, 25.0, t);
      a = update_signatures(in.x, a, s, alpha);
      s = update_abundances_augmented(in.x, a, s, 2 * alpha, 25.0);
      ASSERT_GE(a.minCoeff(), 0.0) << "seed " << seed << " t " << t;
      ASSERT_GE(s.minCoeff(), 0.0) << "seed " << seed << " t " << t;
    }
  }
}

TEST(Properties, ZeroLocking) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(6000 + seed, 0.5);
    Rng rng(seed);
    Matrix a = oracle::uniform_matrix(in.a.rows(), in.a.cols(), rng, 0.1, 1.0);
    Matrix s = oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.1, 1.0);
    const Index ai = static_cast<Index>(rng.below(static_cast<std::uint64_t>(a.size())));
    const Index si = static_cast<Index>(rng.below(static_cast<std::uint64_t>(s.size())));
    a.data()[ai] = 0.0;
    s.data()[si] = 0.0;
    for (int t = 1; t <= 20; ++t) {
      const double alpha = alpha_schedule(0.1, 25.0, t);
      a = update_signatures(in.x, a, s, alpha);
      s = update_abundances_augmented(in.x, a, s, 2 * alpha, 25.0);
      ASSERT_EQ(a.data()[ai], 0.0) << "seed " << seed;
      ASSERT_EQ(s.data()[si], 0.0) << "seed " << seed;
    }
  }
}

TEST(Properties, FixedPoint) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(7000 + seed);
    const Matrix a1 = update_signatures(in.x, in.a, in.s, 0.0);
    const Matrix s1 = update_abundances(in.x, a1, in.s, 0.0);
    const double da = ((a1 - in.a).array().abs() / in.a.array()).maxCoeff();
    const double ds = ((s1 - in.s).array().abs() / in.s.array()).maxCoeff();
    ASSERT_LT(da, 1e-10) << "seed " << seed;
    ASSERT_LT(ds, 1e-10) << "seed " << seed;
  }
}

TEST(Properties, PlainNmfMonotone) {
  LayerConfig cfg;
  cfg.alpha0 = 0.0;
  cfg.delta = 0.0;
  cfg.t_max = 100;
  cfg.epsilon = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(8000 + seed, 0.5);
    Rng rng(seed);
    const Matrix a0 = oracle::uniform_matrix(in.a.rows(), in.a.cols(), rng, 0.01, 1.0);
    const Matrix s0 = oracle::uniform_matrix(in.s.rows(), in.s.cols(), rng, 0.01, 1.0);
    const LayerResult r = run_layer(in.x, a0, s0, cfg);
    double previous = frobenius_cost(in.x, a0, s0);
    for (std::size_t t = 0; t < r.cost_trace.size(); ++t) {
      ASSERT_LE(r.cost_trace[t], previous + 1e-10 * std::max(1.0, previous))
          << "seed " << seed << " iteration " << t + 1;
      previous = r.cost_trace[t];
    }
  }
}

// Exact NNLS oracle: enumerate every support, keep the feasible stationary
// point with the lowest objective.
Vector nnls_enumerate(const Matrix& g, const Vector& b) {
  const Index p = b.size();
  Vector best = Vector::Zero(p);
  double best_obj = 0.0;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<Index> idx;
    for (Index i = 0; i < p; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const auto k = static_cast<Index>(idx.size());
    Matrix gs(k, k);
    Vector bs(k);
    for (Index i = 0; i < k; ++i) {
      bs(i) = b(idx[i]);
      for (Index j = 0; j < k; ++j) gs(i, j) = g(idx[i], idx[j]);
    }
    const Vector z = gs.fullPivLu().solve(bs);
    if (z.minCoeff() < 0.0) continue;
    Vector s = Vector::Zero(p);
    for (Index i = 0; i < k; ++i) s(idx[i]) = z(i);
    const double obj = 0.5 * s.dot(g * s) - b.dot(s);
    if (obj < best_obj) {
      best_obj = obj;
      best = s;
    }
  }
  return best;
}

TEST(Nnls, MatchesSupportEnumeration) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const Index p = oracle::uniform_size(rng, 1, 6);
    const Index b = oracle::uniform_size(rng, p, 12);
    const Matrix a = oracle::uniform_matrix(b, p, rng, -1.0, 1.0);
    const Vector x = oracle::uniform_matrix(b, 1, rng, -1.0, 1.0).col(0);
    const Matrix g = a.transpose() * a;
    const Vector rhs = a.transpose() * x;
    const Vector got = nnls_gram(g, rhs);
    const Vector want = nnls_enumerate(g, rhs);
    EXPECT_GE(got.minCoeff(), 0.0);
    EXPECT_LE((got - want).norm(), 1e-8 * std::max(1.0, want.norm())) << "seed " << seed;
  }
}

TEST(Fcls, RecoversExactAbundances) {
  Rng rng(77);
  const Matrix a = oracle::uniform_matrix(30, 4, rng, 0.05, 1.0);
  Matrix s = oracle::uniform_matrix(4, 50, rng);
  for (Index j = 0; j < s.cols(); ++j) s.col(j) /= s.col(j).sum();
  s(0, 0) = 0.0;
  s.col(0) /= s.col(0).sum();
  const Matrix got = fcls_abundances(a * s, a, 25.0);
  EXPECT_LE((got - s).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EstimateAbundances, ApproachesExactSolution) {
  Rng rng(78);
  const Matrix a = oracle::uniform_matrix(10, 3, rng, 0.1, 1.0);
  Matrix s = oracle::uniform_matrix(3, 20, rng, 0.1, 1.0);
  for (Index j = 0; j < s.cols(); ++j) s.col(j) /= s.col(j).sum();
  const Matrix x = a * s;
  LayerConfig cfg;
  cfg.delta = 1.0;
  cfg.epsilon = 0.0;
  cfg.t_max = 20000;
  const LayerResult r = estimate_abundances(x, a, Matrix::Constant(3, 20, 1.0 / 3), cfg);
  EXPECT_EQ(r.a, a);
  EXPECT_LE((r.s - s).cwiseAbs().maxCoeff(), 1e-3);
}

}  // namespace
}  // namespace mlunmix
