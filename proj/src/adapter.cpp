// src/adapter.cpp

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

#include "xmodal/adapter.hpp"

#include <cmath>
#include <random>
#include <string>

#include "xmodal/error.hpp"

namespace xmodal {

namespace {

std::string DimsString(const AdapterDims& d) {
  return std::to_string(d.input) + "->" + std::to_string(d.hidden) + "->" +
         std::to_string(d.output);
}

}  // namespace

ParameterBlock::ParameterBlock(AdapterDims dims)
    : dims_(dims), values_(Vector::Zero(dims.ParameterCount())) {
  if (dims.input < 1 || dims.hidden < 1 || dims.output < 1) {
    Fail(ErrorCode::kInvalidConfig, "adapter dims must be positive, got " +
                                        DimsString(dims));
  }
}

ConstRowMap ParameterBlock::w1() const {
  return {values_.data(), dims_.hidden, dims_.input};
}
ConstVecMap ParameterBlock::b1() const {
  return {values_.data() + dims_.hidden * dims_.input, dims_.hidden};
}
ConstRowMap ParameterBlock::w2() const {
  return {values_.data() + dims_.hidden * (dims_.input + 1), dims_.output,
          dims_.hidden};
}
ConstVecMap ParameterBlock::b2() const {
  return {values_.data() + dims_.hidden * (dims_.input + 1) +
              dims_.output * dims_.hidden,
          dims_.output};
}

RowMap ParameterBlock::mutable_w1() {
  return {values_.data(), dims_.hidden, dims_.input};
}
VecMap ParameterBlock::mutable_b1() {
  return {values_.data() + dims_.hidden * dims_.input, dims_.hidden};
}
RowMap ParameterBlock::mutable_w2() {
  return {values_.data() + dims_.hidden * (dims_.input + 1), dims_.output,
          dims_.hidden};
}
VecMap ParameterBlock::mutable_b2() {
  return {values_.data() + dims_.hidden * (dims_.input + 1) +
              dims_.output * dims_.hidden,
          dims_.output};
}

Adapter::Adapter(AdapterDims dims) : ParameterBlock(dims) {}

Adapter Adapter::Init(AdapterDims dims, std::uint64_t seed) {
  Adapter a(dims);
  std::mt19937_64 rng(seed);
  const double lim1 = 1.0 / std::sqrt(static_cast<double>(dims.input));
  const double lim2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  std::uniform_real_distribution<double> u1(-lim1, lim1);
  std::uniform_real_distribution<double> u2(-lim2, lim2);
  auto w1 = a.mutable_w1();
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = u1(rng);
  auto w2 = a.mutable_w2();
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2.data()[i] = u2(rng);
  return a;
}

Adapter Adapter::FromFlat(AdapterDims dims, const Vector& values) {
  Adapter a(dims);
  a.SetParameters(values);
  return a;
}

void Adapter::Touch() { ++revision_; }

std::span<double> Adapter::mutable_flat() {
  Touch();
  return {values_.data(), static_cast<std::size_t>(values_.size())};
}

void Adapter::SetParameters(const Vector& values) {
  if (values.size() != values_.size()) {
    Fail(ErrorCode::kShapeError, "expected " + std::to_string(values_.size()) +
                                     " parameters, got " +
                                     std::to_string(values.size()));
  }
  Touch();
  values_ = values;
}

void Adapter::SetLayer1(const Eigen::Ref<const Matrix>& w1,
                        const Eigen::Ref<const Vector>& b1) {
  if (w1.rows() != dims_.hidden || w1.cols() != dims_.input ||
      b1.size() != dims_.hidden) {
    Fail(ErrorCode::kShapeError, "layer 1 shape mismatch for " + DimsString(dims_));
  }
  Touch();
  mutable_w1() = w1;
  mutable_b1() = b1;
}

void Adapter::SetLayer2(const Eigen::Ref<const Matrix>& w2,
                        const Eigen::Ref<const Vector>& b2) {
  if (w2.rows() != dims_.output || w2.cols() != dims_.hidden ||
      b2.size() != dims_.output) {
    Fail(ErrorCode::kShapeError, "layer 2 shape mismatch for " + DimsString(dims_));
  }
  Touch();
  mutable_w2() = w2;
  mutable_b2() = b2;
}

AdapterOutput Forward(const Adapter& adapter, const Eigen::Ref<const Matrix>& seq) {
  if (seq.cols() != adapter.dims().input) {
    Fail(ErrorCode::kShapeError,
         "sequence has " + std::to_string(seq.cols()) +
             " features, adapter expects " + std::to_string(adapter.dims().input));
  }
  Matrix pooled = MeanPool(seq);
  auto batch = ForwardPooled(adapter, pooled);
  return {batch.output.col(0), std::move(batch.cache)};
}

AdapterBatchOutput ForwardPooled(const Adapter& adapter,
                                 const Eigen::Ref<const Matrix>& pooled) {
  const auto& d = adapter.dims();
  if (pooled.rows() != d.input) {
    Fail(ErrorCode::kShapeError,
         "pooled input has " + std::to_string(pooled.rows()) +
             " features, adapter expects " + std::to_string(d.input));
  }
  AdapterBatchOutput out;
  out.cache.dims = d;
  out.cache.revision = adapter.revision();
  out.cache.pooled = pooled;
  out.cache.pre = adapter.w1() * pooled;
  out.cache.pre.colwise() += adapter.b1();
  out.cache.hidden = out.cache.pre.cwiseMax(0.0);
  out.output = adapter.w2() * out.cache.hidden;
  out.output.colwise() += adapter.b2();
  return out;
}

AdapterGradients Backward(const Adapter& adapter, const AdapterCache& cache,
                          const Eigen::Ref<const Matrix>& output_grad) {
  const auto& d = adapter.dims();
  if (!(cache.dims == d) || cache.revision != adapter.revision() ||
      cache.pooled.rows() != d.input || cache.pre.rows() != d.hidden ||
      cache.hidden.rows() != d.hidden) {
    Fail(ErrorCode::kInvalidCache,
         "cache does not come from a forward pass of this adapter state");
  }
  if (output_grad.rows() != d.output || output_grad.cols() != cache.pooled.cols()) {
    Fail(ErrorCode::kShapeError, "output gradient shape mismatch");
  }
  AdapterGradients g(d);
  g.mutable_w2().noalias() = output_grad * cache.hidden.transpose();
  g.mutable_b2() = output_grad.rowwise().sum();
  // ReLU derivative is 0 at exactly 0.
  Matrix hidden_grad = adapter.w2().transpose() * output_grad;
  hidden_grad = (cache.pre.array() > 0.0).select(hidden_grad, 0.0);
  g.mutable_w1().noalias() = hidden_grad * cache.pooled.transpose();
  g.mutable_b1() = hidden_grad.rowwise().sum();
  return g;
}

}  // namespace xmodal
