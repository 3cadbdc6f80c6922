// include/xmodal/numerics.hpp

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

#pragma once

#include <functional>

#include <Eigen/Core>

namespace xmodal {

// All arithmetic is done in double precision; files store f32.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Column-wise mean of a T x F sequence (rows are time steps).
Vector MeanPool(const Eigen::Ref<const Matrix>& seq);

struct Cosine {
  double value = 0.0;
  // Set when either input has zero norm; value is then 0.
  bool degenerate = false;
};

Cosine CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b);

/// Central-difference gradient check.  Step per coordinate is
/// 1e-4 * max(1, |x_i|); returns
/// max_i |g_num - g_an| / max(1, |g_num|, |g_an|).
/// Throws NumericalFailure if f is non-finite at any probe.
double CheckGradient(const std::function<double(const Vector&)>& f,
                     const Vector& x, const Vector& analytic_grad);

bool AllFinite(const Eigen::Ref<const Matrix>& m);

}  // namespace xmodal
