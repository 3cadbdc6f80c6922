// src/numerics.cpp

// Copyright 2026  The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "xmodal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xmodal/error.hpp"

namespace xmodal {

Vector MeanPool(const Eigen::Ref<const Matrix>& seq) {
  if (seq.rows() < 1 || seq.cols() < 1) {
    Fail(ErrorCode::kShapeError, "mean pool needs a non-empty sequence");
  }
  return seq.colwise().sum().transpose() / static_cast<double>(seq.rows());
}

Cosine CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kShapeError, "cosine similarity of vectors with dims " +
                                     std::to_string(a.size()) + " and " +
                                     std::to_string(b.size()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  const double s = a.dot(b) / (na * nb);
  return {std::clamp(s, -1.0, 1.0), false};
}

double CheckGradient(const std::function<double(const Vector&)>& f,
                     const Vector& x, const Vector& analytic_grad) {
  if (x.size() != analytic_grad.size()) {
    Fail(ErrorCode::kShapeError, "gradient check: size mismatch");
  }
  Vector probe = x;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-4 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      Fail(ErrorCode::kNumericalFailure,
           "non-finite function value at coordinate " + std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = analytic_grad[i];
    const double scale =
        std::max({1.0, std::abs(numeric), std::abs(analytic)});
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  }
  return worst;
}

bool AllFinite(const Eigen::Ref<const Matrix>& m) {
  return m.allFinite();
}

}  // namespace xmodal
