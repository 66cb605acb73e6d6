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

#include "mlunmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlunmix/mlnmf.hpp"
#include "mlunmix/synth.hpp"

namespace mlunmix {

namespace {

double angle(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  if (u.size() != v.size()) {
    throw DimensionError("angle between vectors of length " +
                         std::to_string(u.size()) + " and " +
                         std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw DomainError("angle undefined for a zero vector");
  }
  // acos of the cosine loses half the digits near zero; this form does not
  // and gives exactly 0 for identical directions.
  const Vector du = u / nu;
  const Vector dv = v / nv;
  return 2.0 * std::atan2((du - dv).norm(), (du + dv).norm());
}

double rms(std::span<const double> values) {
  if (values.empty()) throw DomainError("rms of an empty list");
  std::vector<double> squares(values.size());
  std::transform(values.begin(), values.end(), squares.begin(),
                 [](double v) { return v * v; });
  return std::sqrt(pairwise_sum(squares) / static_cast<double>(values.size()));
}

// A collapsed (all-zero) estimate is scored as the widest possible angle
// between nonnegative vectors instead of aborting the evaluation.
double sad_or_worst(const Eigen::Ref<const Vector>& m,
                    const Eigen::Ref<const Vector>& m_hat) {
  if (m_hat.isZero(0.0)) return std::acos(0.0);
  return angle(m, m_hat);
}

}  // namespace

double sad(const Eigen::Ref<const Vector>& m, const Eigen::Ref<const Vector>& m_hat) {
  return angle(m, m_hat);
}

double aad(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& a_hat) {
  return angle(a, a_hat);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double rms_sad(std::span<const double> sads) { return rms(sads); }
double rms_aad(std::span<const double> aads) { return rms(aads); }

std::vector<Index> solve_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw DimensionError("assignment cost must be square");
  // Potentials formulation, 1-based with a dummy column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> row_to_col(n);
  for (Index j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<Index> match_endmembers(const Matrix& a_true, const Matrix& a_est) {
  if (a_true.rows() != a_est.rows() || a_true.cols() != a_est.cols()) {
    throw DimensionError("true and estimated signatures differ in shape");
  }
  const Index p = a_true.cols();
  Matrix cost(p, p);  // rows: estimated, cols: true
  for (Index e = 0; e < p; ++e)
    for (Index t = 0; t < p; ++t) cost(e, t) = sad_or_worst(a_true.col(t), a_est.col(e));
  return solve_assignment(cost);
}

EvalReport evaluate(const Matrix& a_true, const Matrix& s_true,
                    const Matrix& a_est, const Matrix& s_est) {
  if (s_true.rows() != s_est.rows() || s_true.cols() != s_est.cols()) {
    throw DimensionError("true and estimated abundances differ in shape");
  }
  if (a_true.cols() != s_true.rows()) {
    throw DimensionError("signature and abundance endmember counts differ");
  }
  EvalReport report;
  report.assignment = match_endmembers(a_true, a_est);
  const Index p = a_true.cols();

  Matrix a_perm(a_est.rows(), p);
  Matrix s_perm(p, s_est.cols());
  for (Index e = 0; e < p; ++e) {
    const Index t = report.assignment[static_cast<std::size_t>(e)];
    a_perm.col(t) = a_est.col(e);
    s_perm.row(t) = s_est.row(e);
  }

  report.per_endmember_sad.resize(static_cast<std::size_t>(p));
  for (Index t = 0; t < p; ++t) {
    report.per_endmember_sad[static_cast<std::size_t>(t)] =
        sad_or_worst(a_true.col(t), a_perm.col(t));
  }
  report.rms_sad = rms_sad(report.per_endmember_sad);

  std::vector<double> aads;
  aads.reserve(static_cast<std::size_t>(s_true.cols()));
  for (Index j = 0; j < s_true.cols(); ++j) {
    if (s_perm.col(j).isZero(0.0) || s_true.col(j).isZero(0.0)) {
      ++report.excluded_pixels;
      continue;
    }
    aads.push_back(aad(s_true.col(j), s_perm.col(j)));
  }
  if (aads.empty()) throw DomainError("every abundance column is zero");
  report.rms_aad = rms_aad(aads);
  return report;
}

EvalReport evaluate(const GroundTruth& truth, const UnmixResult& result) {
  return evaluate(truth.a_true, truth.s_true, result.a, result.s);
}

}  // namespace mlunmix
