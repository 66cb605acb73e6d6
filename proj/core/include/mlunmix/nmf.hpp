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

// Single-layer sparse NMF with multiplicative updates.
//
// Cost for one layer:
//   0.5 ||X - A S||_F^2 + alpha_A qnorm(A, 1/2) + alpha_S qnorm(S, 1/2)
// with alpha_A annealed as alpha0 * exp(-t / tau) and alpha_S a fixed
// multiple of alpha_A. The sum-to-one constraint on S is enforced softly by
// appending a constant row delta to both X and A before each S update.

#ifndef MLUNMIX_NMF_HPP_
#define MLUNMIX_NMF_HPP_

#include <vector>

#include "mlunmix/types.hpp"

namespace mlunmix {

// Entries are clamped to this value before taking x^(-1/2).
inline constexpr double kPowerFloor = 1e-9;
// Update denominators are clamped to at least this value.
inline constexpr double kDenominatorFloor = 1e-12;

struct LayerConfig {
  double alpha0 = 0.1;
  double tau = 25.0;
  double alpha_s_ratio = 2.0;  // alpha_S = alpha_s_ratio * alpha_A
  double delta = 25.0;         // sum-to-one augmentation weight, 0 disables
  int t_max = 400;
  double epsilon = 1e-4;
  int stop_patience = 10;
  // When false the signature penalty is dropped (alpha_A = 0) while
  // alpha_S still follows the annealed schedule. This is the single-layer
  // L1/2-NMF baseline.
  bool penalize_signatures = true;

  void validate() const;
};

enum class StopReason { MaxIterations, Converged };

const char* to_string(StopReason reason);

struct LayerResult {
  Matrix a;
  Matrix s;
  std::vector<double> cost_trace;  // one entry per iteration run
  int iterations_run = 0;
  StopReason stop_reason = StopReason::MaxIterations;
};

// alpha0 * exp(-t / tau).
double alpha_schedule(double alpha0, double tau, int t);

// A .* (X S^T) ./ (A S S^T + 0.5 alpha_A A^(-1/2)).
Matrix update_signatures(const Matrix& x, const Matrix& a, const Matrix& s,
                         double alpha_a, double floor = kPowerFloor);

// S .* (A^T X) ./ (A^T A S + 0.5 alpha_S S^(-1/2)).
Matrix update_abundances(const Matrix& x, const Matrix& a, const Matrix& s,
                         double alpha_s, double floor = kPowerFloor);

// update_abundances on the delta-augmented pair without materializing it.
// A~^T X~ = A^T X + delta^2 1 1^T and A~^T A~ = A^T A + delta^2 1 1^T.
Matrix update_abundances_augmented(const Matrix& x, const Matrix& a,
                                   const Matrix& s, double alpha_s,
                                   double delta, double floor = kPowerFloor);

struct AugmentedPair {
  Matrix x;
  Matrix a;
};

// Appends a constant row `delta` to X and to A.
AugmentedPair fcls_augment(const Matrix& x, const Matrix& a, double delta);

double layer_cost(const Matrix& x, const Matrix& a, const Matrix& s,
                  double alpha_a, double alpha_s);

// |cost_new - cost_old| < epsilon.
bool check_stop(double cost_new, double cost_old, double epsilon);

// One layer of the multilayer factorization: alternate the signature and
// abundance updates until t_max iterations or until check_stop holds on
// stop_patience consecutive iterations. `layer` only labels divergence
// errors.
LayerResult run_layer(const Matrix& x, Matrix a0, Matrix s0,
                      const LayerConfig& cfg, int layer = 1);

// Abundance estimation for fixed signatures: iterates the augmented
// abundance update with alpha_S = 0 under the same stopping rule. Returns a
// LayerResult whose `a` is the input signatures.
LayerResult estimate_abundances(const Matrix& x, const Matrix& a, Matrix s0,
                                const LayerConfig& cfg);

// Fully constrained least squares: for every pixel, nonnegative least
// squares on the delta-augmented system [A; delta 1] s = [x; delta], solved
// exactly by an active-set method on the normal equations.
Matrix fcls_abundances(const Matrix& x, const Matrix& a, double delta);

// Single-vector NNLS in normal-equation form: min 1/2 s^T G s - b^T s, s >= 0.
// G must be symmetric positive semidefinite.
Vector nnls_gram(const Matrix& g, const Vector& b);

}  // namespace mlunmix

#endif  // MLUNMIX_NMF_HPP_
