// include/xmodal/adapter.hpp

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

#include <cstdint>
#include <span>

#include "xmodal/numerics.hpp"

namespace xmodal {

using ConstRowMap = Eigen::Map<const RowMajorMatrix>;
using RowMap = Eigen::Map<RowMajorMatrix>;
using ConstVecMap = Eigen::Map<const Vector>;
using VecMap = Eigen::Map<Vector>;

struct AdapterDims {
  Eigen::Index input = 0;   // F
  Eigen::Index hidden = 0;  // H
  Eigen::Index output = 0;  // F'

  Eigen::Index ParameterCount() const {
    return hidden * input + hidden + output * hidden + output;
  }
  bool operator==(const AdapterDims&) const = default;
};

inline constexpr Eigen::Index kDefaultHidden = 512;
inline constexpr Eigen::Index kDefaultOutput = 512;

/// Parameters of a two-layer perceptron laid out contiguously as
/// W1 (H x F, row-major), b1 (H), W2 (F' x H, row-major), b2 (F').
/// Shared by Adapter and AdapterGradients.
class ParameterBlock {
 public:
  ParameterBlock() = default;
  explicit ParameterBlock(AdapterDims dims);

  const AdapterDims& dims() const { return dims_; }
  std::span<const double> flat() const {
    return {values_.data(), static_cast<std::size_t>(values_.size())};
  }
  const Vector& vector() const { return values_; }

  ConstRowMap w1() const;
  ConstVecMap b1() const;
  ConstRowMap w2() const;
  ConstVecMap b2() const;

 protected:
  RowMap mutable_w1();
  VecMap mutable_b1();
  RowMap mutable_w2();
  VecMap mutable_b2();

  AdapterDims dims_;
  Vector values_;
};

class AdapterGradients : public ParameterBlock {
 public:
  using ParameterBlock::ParameterBlock;
  using ParameterBlock::mutable_b1;
  using ParameterBlock::mutable_b2;
  using ParameterBlock::mutable_w1;
  using ParameterBlock::mutable_w2;

  std::span<double> mutable_flat() {
    return {values_.data(), static_cast<std::size_t>(values_.size())};
  }
};

/// Intermediate activations for a batch of pooled inputs (one column each).
struct AdapterCache {
  AdapterDims dims;
  std::uint64_t revision = 0;
  Matrix pooled;  // F x N
  Matrix pre;     // H x N, before ReLU
  Matrix hidden;  // H x N, after ReLU
};

class Adapter : public ParameterBlock {
 public:
  Adapter() = default;
  /// All-zero parameters.
  explicit Adapter(AdapterDims dims);

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
  static Adapter Init(AdapterDims dims, std::uint64_t seed);
  static Adapter FromFlat(AdapterDims dims, const Vector& values);

  /// Bumped on every mutable access; caches from older revisions are stale.
  std::uint64_t revision() const { return revision_; }

  std::span<double> mutable_flat();
  void SetParameters(const Vector& values);
  void SetLayer1(const Eigen::Ref<const Matrix>& w1, const Eigen::Ref<const Vector>& b1);
  void SetLayer2(const Eigen::Ref<const Matrix>& w2, const Eigen::Ref<const Vector>& b2);

 private:
  void Touch();

  std::uint64_t revision_ = 0;
};

struct AdapterOutput {
  Vector output;
  AdapterCache cache;
};

struct AdapterBatchOutput {
  Matrix output;  // F' x N
  AdapterCache cache;
};

/// Mean-pools seq (T x F) then applies W2 * ReLU(W1 * x + b1) + b2.
AdapterOutput Forward(const Adapter& adapter, const Eigen::Ref<const Matrix>& seq);

/// Batched form over already-pooled inputs, one column per item.
AdapterBatchOutput ForwardPooled(const Adapter& adapter,
                                 const Eigen::Ref<const Matrix>& pooled);

/// output_grad is dL/d(output), F' x N (or F' for the single-item form).
/// Gradients are summed over the batch columns.
AdapterGradients Backward(const Adapter& adapter, const AdapterCache& cache,
                          const Eigen::Ref<const Matrix>& output_grad);

}  // namespace xmodal
