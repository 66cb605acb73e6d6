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

#include <algorithm>
#include <set>

#include "mlunmix/init.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/synth.hpp"
#include "support/oracles.hpp"

namespace mlunmix {
namespace {

// Columns 0..2 are the vertices of a triangle in 3 bands; the rest are
// strictly interior convex combinations.
Matrix simplex_toy(std::uint64_t seed, Index interior) {
  Matrix v(3, 3);
  v << 1.0, 0.1, 0.2, 0.2, 0.9, 0.1, 0.1, 0.3, 1.0;
  Rng rng(seed);
  Matrix x(3, 3 + interior);
  x.leftCols(3) = v;
  for (Index j = 0; j < interior; ++j) {
    Vector w(3);
    for (Index k = 0; k < 3; ++k) w(k) = 0.05 + rng.uniform01();
    w /= w.sum();
    x.col(3 + j) = v * w;
  }
  // Shuffle so vertices are not simply the first columns.
  for (Index j = x.cols() - 1; j > 0; --j) {
    const auto k = static_cast<Index>(rng.below(static_cast<std::uint64_t>(j + 1)));
    x.col(j).swap(x.col(k));
  }
  return x;
}

bool is_vertex(const Matrix& x, Index col) {
  // A vertex of this toy has one coordinate at its extreme among all columns
  // in the direction of the original triangle corners.
  Matrix v(3, 3);
  v << 1.0, 0.1, 0.2, 0.2, 0.9, 0.1, 0.1, 0.3, 1.0;
  for (Index k = 0; k < 3; ++k) {
    if ((x.col(col) - v.col(k)).norm() < 1e-15) return true;
  }
  return false;
}

TEST(Vca, FindsSimplexVertices) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix x = simplex_toy(seed, 40);
    const InitResult r = vca_endmembers(x, 3, seed);
    ASSERT_EQ(r.selected_pixel_indices.size(), 3u);
    for (Index idx : r.selected_pixel_indices) {
      EXPECT_TRUE(is_vertex(x, idx)) << "seed " << seed << " picked " << idx;
    }
  }
}

TEST(Vca, SingleEndmember) {
  const Matrix x = simplex_toy(1, 10);
  const InitResult r = vca_endmembers(x, 1, 3);
  ASSERT_EQ(r.selected_pixel_indices.size(), 1u);
  EXPECT_EQ(r.a0.col(0), x.col(r.selected_pixel_indices[0]));
  // The chosen pixel is extreme along the principal direction.
  const Vector mean = x.rowwise().mean();
  const Matrix c = x.colwise() - mean;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c * c.transpose());
  const Vector proj = (eig.eigenvectors().rightCols(1).transpose() * c).transpose();
  Index arg = 0;
  proj.cwiseAbs().maxCoeff(&arg);
  EXPECT_EQ(r.selected_pixel_indices[0], arg);
}

TEST(Vca, DeterministicPerSeed) {
  const Matrix x = simplex_toy(2, 50);
  EXPECT_EQ(vca_endmembers(x, 3, 9).selected_pixel_indices,
            vca_endmembers(x, 3, 9).selected_pixel_indices);
}

TEST(Vca, ColumnsAreVerbatimAndDistinct) {
  SceneSpec spec;
  spec.rows = spec.cols = 32;
  spec.seed = 4;
  const GroundTruth gt = make_ground_truth(default_test_library(), spec, 25.0, 5);
  const InitResult r = vca_endmembers(gt.noisy_cube.data(), 6, 1);
  std::set<Index> unique(r.selected_pixel_indices.begin(), r.selected_pixel_indices.end());
  EXPECT_EQ(unique.size(), 6u);
  for (int k = 0; k < 6; ++k) {
    EXPECT_EQ(r.a0.col(k), gt.noisy_cube.data().col(r.selected_pixel_indices[k]));
  }
  EXPECT_EQ(r.s0, Matrix::Constant(6, gt.noisy_cube.pixels(), 1.0 / 6));
  EXPECT_EQ(r.method, InitMode::Vca);
}

TEST(Vca, PurePixelsLowNoise) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.rows = spec.cols = 64;  // enough blocks that every label appears
    spec.block_size = 8;
    spec.filter_size = 3;
    spec.purity_threshold = 1.0;
    spec.seed = seed;
    const GroundTruth gt = make_ground_truth(default_test_library(), spec, 40.0, seed);
    const InitResult r = vca_endmembers(gt.noisy_cube.data(), 6, seed);
    const std::vector<Index> match = match_endmembers(gt.a_true, r.a0);
    std::vector<double> sads;
    for (Index e = 0; e < 6; ++e) sads.push_back(sad(gt.a_true.col(match[e]), r.a0.col(e)));
    EXPECT_LT(rms_sad(sads), 0.1) << "seed " << seed;
  }
}

TEST(Vca, RankErrorListsAchievableRank) {
  Matrix x(4, 10);
  for (Index j = 0; j < 10; ++j) x.col(j) = Vector::Constant(4, 1.0 + j);
  try {
    vca_endmembers(x, 3, 1);
    FAIL() << "expected a rank error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("achievable rank is 1"), std::string::npos);
  }
  EXPECT_THROW(vca_endmembers(Matrix::Ones(3, 2), 3, 1), ConfigError);
  EXPECT_THROW(vca_endmembers(Matrix::Zero(3, 5), 1, 1), DomainError);
}

TEST(RandomInit, RangeAndShape) {
  const InitResult r = random_init(5, 3, 40, 7);
  EXPECT_EQ(r.a0.rows(), 5);
  EXPECT_EQ(r.a0.cols(), 3);
  EXPECT_EQ(r.s0.rows(), 3);
  EXPECT_EQ(r.s0.cols(), 40);
  EXPECT_GT(r.a0.minCoeff(), 0.0);
  EXPECT_LE(r.a0.maxCoeff(), 1.0);
  EXPECT_GT(r.s0.minCoeff(), 0.0);
  EXPECT_LE(r.s0.maxCoeff(), 1.0);
  EXPECT_EQ(r.method, InitMode::Random);
}

TEST(RandomInit, SeedBehaviour) {
  const InitResult a = random_init(4, 2, 8, 1);
  const InitResult b = random_init(4, 2, 8, 1);
  const InitResult c = random_init(4, 2, 8, 2);
  EXPECT_EQ(a.a0, b.a0);
  EXPECT_EQ(a.s0, b.s0);
  EXPECT_NE(a.a0, c.a0);
  EXPECT_NE(a.s0, c.s0);
}

TEST(RandomInit, MeanNearHalf) {
  const InitResult r = random_init(1, 10, 2000, 3);
  const double n = static_cast<double>(r.s0.size());
  const double mean = r.s0.mean();
  // Uniform(0,1] has standard deviation 1/sqrt(12).
  EXPECT_NEAR(mean, 0.5, 3.0 / std::sqrt(12.0 * n));
  EXPECT_THROW(random_init(0, 1, 1, 1), ConfigError);
}

TEST(NumericalRank, Basic) {
  EXPECT_EQ(numerical_rank(Matrix::Zero(3, 3)), 0);
  EXPECT_EQ(numerical_rank(Matrix::Identity(4, 4)), 4);
  EXPECT_EQ(numerical_rank(Matrix::Ones(5, 7)), 1);
}

}  // namespace
}  // namespace mlunmix
