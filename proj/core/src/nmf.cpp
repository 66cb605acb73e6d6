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

#include "mlunmix/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <string>

namespace mlunmix {

namespace {

void require_update_shapes(const Matrix& x, const Matrix& a, const Matrix& s) {
  if (a.cols() != s.rows() || x.rows() != a.rows() || x.cols() != s.cols()) {
    throw DimensionError(
        "update shapes disagree: X " + std::to_string(x.rows()) + "x" +
        std::to_string(x.cols()) + ", A " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + ", S " + std::to_string(s.rows()) + "x" +
        std::to_string(s.cols()));
  }
}

// Multiplicative step shared by both factors:
//   factor .* numer ./ max(gram_term + 0.5 alpha factor^(-1/2), floor)
Matrix multiplicative_step(const Matrix& factor, const Matrix& numer,
                           Matrix denom, double alpha, double power_floor) {
  if (alpha != 0.0) {
    denom.array() +=
        0.5 * alpha * factor.array().max(power_floor).rsqrt();
  }
  denom = denom.cwiseMax(kDenominatorFloor);
  return factor.cwiseProduct(numer).cwiseQuotient(denom);
}

}  // namespace

void LayerConfig::validate() const {
  if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) {
    throw ConfigError("alpha0 must be finite and >= 0");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("tau must be finite and > 0");
  }
  if (!(alpha_s_ratio > 0.0) || !std::isfinite(alpha_s_ratio)) {
    throw ConfigError("alpha_s_ratio must be finite and > 0");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("delta must be finite and >= 0");
  }
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (stop_patience < 1) throw ConfigError("stop_patience must be >= 1");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::MaxIterations:
      return "max_iterations";
    case StopReason::Converged:
      return "converged";
  }
  return "unknown";
}

double alpha_schedule(double alpha0, double tau, int t) {
  if (!(tau > 0.0)) throw DomainError("alpha_schedule requires tau > 0");
  return alpha0 * std::exp(-static_cast<double>(t) / tau);
}

Matrix update_signatures(const Matrix& x, const Matrix& a, const Matrix& s,
                         double alpha_a, double floor) {
  require_update_shapes(x, a, s);
  const Matrix sst = s * s.transpose();
  return multiplicative_step(a, x * s.transpose(), a * sst, alpha_a, floor);
}

Matrix update_abundances(const Matrix& x, const Matrix& a, const Matrix& s,
                         double alpha_s, double floor) {
  require_update_shapes(x, a, s);
  const Matrix ata = a.transpose() * a;
  return multiplicative_step(s, a.transpose() * x, ata * s, alpha_s, floor);
}

Matrix update_abundances_augmented(const Matrix& x, const Matrix& a,
                                   const Matrix& s, double alpha_s,
                                   double delta, double floor) {
  require_update_shapes(x, a, s);
  const double d2 = delta * delta;
  Matrix numer = a.transpose() * x;
  numer.array() += d2;
  Matrix ata = a.transpose() * a;
  ata.array() += d2;
  return multiplicative_step(s, numer, ata * s, alpha_s, floor);
}

AugmentedPair fcls_augment(const Matrix& x, const Matrix& a, double delta) {
  AugmentedPair out{Matrix(x.rows() + 1, x.cols()),
                    Matrix(a.rows() + 1, a.cols())};
  out.x.topRows(x.rows()) = x;
  out.x.row(x.rows()).setConstant(delta);
  out.a.topRows(a.rows()) = a;
  out.a.row(a.rows()).setConstant(delta);
  return out;
}

double layer_cost(const Matrix& x, const Matrix& a, const Matrix& s,
                  double alpha_a, double alpha_s) {
  double cost = frobenius_cost(x, a, s);
  if (alpha_a != 0.0) cost += alpha_a * qnorm(a, 0.5);
  if (alpha_s != 0.0) cost += alpha_s * qnorm(s, 0.5);
  return cost;
}

bool check_stop(double cost_new, double cost_old, double epsilon) {
  return std::abs(cost_new - cost_old) < epsilon;
}

LayerResult run_layer(const Matrix& x, Matrix a0, Matrix s0,
                      const LayerConfig& cfg, int layer) {
  cfg.validate();
  require_update_shapes(x, a0, s0);
  require_nonnegative(x, "observation");
  require_nonnegative(a0, "initial signatures");
  require_nonnegative(s0, "initial abundances");

  LayerResult result;
  result.a = std::move(a0);
  result.s = std::move(s0);
  result.cost_trace.reserve(static_cast<std::size_t>(cfg.t_max));

  int calm = 0;
  for (int t = 1; t <= cfg.t_max; ++t) {
    const double schedule = alpha_schedule(cfg.alpha0, cfg.tau, t);
    const double alpha_a = cfg.penalize_signatures ? schedule : 0.0;
    const double alpha_s = cfg.alpha_s_ratio * schedule;

    result.a = update_signatures(x, result.a, result.s, alpha_a);
    if (!result.a.allFinite()) throw SolverDivergence(layer, t);
    // The augmented pair only feeds this S update; X and A stay unaugmented.
    result.s = update_abundances_augmented(x, result.a, result.s, alpha_s,
                                           cfg.delta);
    if (!result.s.allFinite()) throw SolverDivergence(layer, t);

    const double cost = layer_cost(x, result.a, result.s, alpha_a, alpha_s);
    if (!std::isfinite(cost)) throw SolverDivergence(layer, t);
    if (!result.cost_trace.empty() &&
        check_stop(cost, result.cost_trace.back(), cfg.epsilon)) {
      ++calm;
    } else {
      calm = 0;
    }
    result.cost_trace.push_back(cost);
    result.iterations_run = t;
    if (calm >= cfg.stop_patience) {
      result.stop_reason = StopReason::Converged;
      break;
    }
  }
  return result;
}

LayerResult estimate_abundances(const Matrix& x, const Matrix& a, Matrix s0,
                                const LayerConfig& cfg) {
  cfg.validate();
  require_update_shapes(x, a, s0);
  require_nonnegative(x, "observation");
  require_nonnegative(a, "signatures");
  require_nonnegative(s0, "initial abundances");

  LayerResult result;
  result.a = a;
  result.s = std::move(s0);
  int calm = 0;
  for (int t = 1; t <= cfg.t_max; ++t) {
    result.s = update_abundances_augmented(x, a, result.s, 0.0, cfg.delta);
    if (!result.s.allFinite()) throw SolverDivergence(1, t);
    const double cost = frobenius_cost(x, a, result.s);
    if (!result.cost_trace.empty() &&
        check_stop(cost, result.cost_trace.back(), cfg.epsilon)) {
      ++calm;
    } else {
      calm = 0;
    }
    result.cost_trace.push_back(cost);
    result.iterations_run = t;
    if (calm >= cfg.stop_patience) {
      result.stop_reason = StopReason::Converged;
      break;
    }
  }
  return result;
}

namespace {

// Solves G_PP z_P = b_P on the passive index set; other entries are zero.
Vector solve_passive(const Matrix& g, const Vector& b,
                     const std::vector<bool>& passive) {
  std::vector<Index> idx;
  for (Index i = 0; i < static_cast<Index>(passive.size()); ++i) {
    if (passive[i]) idx.push_back(i);
  }
  const auto k = static_cast<Index>(idx.size());
  Matrix gp(k, k);
  Vector bp(k);
  for (Index i = 0; i < k; ++i) {
    bp(i) = b(idx[i]);
    for (Index j = 0; j < k; ++j) gp(i, j) = g(idx[i], idx[j]);
  }
  const Vector zp = gp.ldlt().solve(bp);
  Vector z = Vector::Zero(b.size());
  for (Index i = 0; i < k; ++i) z(idx[i]) = zp(i);
  return z;
}

}  // namespace

Vector nnls_gram(const Matrix& g, const Vector& b) {
  if (g.rows() != g.cols() || g.rows() != b.size()) {
    throw DimensionError("nnls: Gram matrix and right-hand side disagree");
  }
  const Index p = b.size();
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, g.cwiseAbs().maxCoeff()) *
                     static_cast<double>(std::max<Index>(p, 1));
  std::vector<bool> passive(static_cast<std::size_t>(p), false);
  Vector s = Vector::Zero(p);
  Vector w = b;
  const int max_outer = 3 * static_cast<int>(p) + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    Index best = -1;
    double best_w = tol;
    for (Index j = 0; j < p; ++j) {
      if (!passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    Vector z = solve_passive(g, b, passive);
    for (int inner = 0; inner < 3 * p + 10; ++inner) {
      double step = 1.0;
      bool blocked = false;
      for (Index j = 0; j < p; ++j) {
        if (passive[j] && z(j) <= tol) {
          blocked = true;
          const double denom = s(j) - z(j);
          if (denom > 0.0) step = std::min(step, s(j) / denom);
        }
      }
      if (!blocked) break;
      s += step * (z - s);
      for (Index j = 0; j < p; ++j) {
        if (passive[j] && s(j) <= tol) {
          passive[j] = false;
          s(j) = 0.0;
        }
      }
      z = solve_passive(g, b, passive);
    }
    s = z.cwiseMax(0.0);
    w = b - g * s;
  }
  return s;
}

Matrix fcls_abundances(const Matrix& x, const Matrix& a, double delta) {
  if (x.rows() != a.rows()) {
    throw DimensionError("fcls: data has " + std::to_string(x.rows()) +
                         " bands, signatures have " + std::to_string(a.rows()));
  }
  if (!(delta >= 0.0)) throw DomainError("fcls: delta must be >= 0");
  const double d2 = delta * delta;
  const Matrix g = (a.transpose() * a).array() + d2;
  const Matrix rhs = (a.transpose() * x).array() + d2;
  Matrix s(a.cols(), x.cols());
  for (Index n = 0; n < x.cols(); ++n) s.col(n) = nnls_gram(g, rhs.col(n));
  return s;
}

}  // namespace mlunmix
