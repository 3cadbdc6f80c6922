// tests/unit/test_losses.cpp

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "xmodal/losses.hpp"

using namespace xmodal;

namespace {

BatchEmbeddings RandomBatch(Eigen::Index dim, Eigen::Index b, std::mt19937_64& rng) {
  BatchEmbeddings batch{testutil::RandomMatrix(dim, b, rng), testutil::RandomMatrix(dim, b, rng),
                        {}};
  for (Eigen::Index i = 0; i < b; ++i) batch.labels.push_back("a" + std::to_string(i));
  return batch;
}

// Finite-difference check of the gradient with respect to both matrices.
template <typename LossFn>
double GradientError(const BatchEmbeddings& batch, LossFn loss) {
  const Eigen::Index n = batch.audio.size();
  Vector x(2 * n);
  x << batch.audio.reshaped(), batch.text.reshaped();
  auto f = [&](const Vector& v) {
    BatchEmbeddings b = batch;
    b.audio = v.head(n).reshaped(batch.audio.rows(), batch.audio.cols());
    b.text = v.tail(n).reshaped(batch.text.rows(), batch.text.cols());
    return loss(b).value;
  };
  const LossOutput out = loss(batch);
  Vector analytic(2 * n);
  analytic << out.audio_grad.reshaped(), out.text_grad.reshaped();
  return CheckGradient(f, x, analytic);
}

}  // namespace

TEST_CASE("pair loss examples") {
  CHECK(ContrastivePairLoss(1.0, true) == 0.0);
  CHECK(ContrastivePairLoss(0.25, true) == doctest::Approx(0.75));
  CHECK(ContrastivePairLoss(-0.3, false) == 0.0);
  CHECK(ContrastivePairLoss(0.4, false) == doctest::Approx(0.4));
}

TEST_CASE("contrastive loss matches the enumeration oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index b = 2 + rng() % 6;
    BatchEmbeddings batch = RandomBatch(4, b, rng);
    // Sometimes give two rows the same label.
    if (trial % 3 == 0) batch.labels[1] = batch.labels[0];
    for (PairMining m : {PairMining::kAllPairs, PairMining::kCrossModalOnly}) {
      const double expected =
          oracle::Contrastive(testutil::Columns(batch.audio), testutil::Columns(batch.text),
                              batch.labels, m == PairMining::kAllPairs);
      CHECK(std::abs(ContrastiveLoss(batch, m).value - expected) < 1e-10);
    }
  }
}

TEST_CASE("contrastive loss corner cases") {
  SUBCASE("perfectly separated batch is zero with zero gradients") {
    BatchEmbeddings batch{Matrix::Identity(3, 2), Matrix::Identity(3, 2), {"x", "y"}};
    batch.audio.col(1) *= -1.0;
    batch.text.col(1) *= -1.0;
    // Cross pairs have cosine 0 for orthogonal, which gives zero loss.
    const LossOutput out = ContrastiveLoss(batch, PairMining::kAllPairs);
    CHECK(out.value == 0.0);
    CHECK(out.active_pair_count == 0);
    CHECK(out.audio_grad.isZero(0.0));
    CHECK(out.text_grad.isZero(0.0));
  }
  SUBCASE("empty batch") {
    BatchEmbeddings batch{Matrix(3, 0), Matrix(3, 0), {}};
    CHECK_XMODAL_ERROR(ContrastiveLoss(batch, PairMining::kAllPairs), ErrorCode::kInvalidBatch);
    CHECK_XMODAL_ERROR(NtXentLoss(batch, PairMining::kAllPairs), ErrorCode::kInvalidBatch);
  }
  SUBCASE("shape mismatch") {
    BatchEmbeddings batch{Matrix::Ones(3, 2), Matrix::Ones(4, 2), {"x", "y"}};
    CHECK_THROWS_AS(ContrastiveLoss(batch, PairMining::kAllPairs), Error);
  }
}

TEST_CASE("nt-xent closed forms") {
  SUBCASE("uniform similarities, cross-modal only") {
    // All items identical: every candidate has the same similarity, so each
    // anchor sees a uniform softmax over B candidates.
    BatchEmbeddings batch{Matrix::Ones(3, 2), Matrix::Ones(3, 2), {"x", "y"}};
    CHECK(NtXentLoss(batch, PairMining::kCrossModalOnly).value == doctest::Approx(std::log(2.0)));
    CHECK(NtXentLoss(batch, PairMining::kAllPairs).value == doctest::Approx(std::log(3.0)));
  }
  SUBCASE("B=2 example against the softmax oracle") {
    Matrix a(2, 2), t(2, 2);
    a << 1, 0, 0, 1;
    t << 0.8, 0.1, 0.6, 1.0;
    BatchEmbeddings batch{a, t, {"x", "y"}};
    for (PairMining m : {PairMining::kAllPairs, PairMining::kCrossModalOnly}) {
      const double expected = oracle::NtXent(testutil::Columns(a), testutil::Columns(t), 0.07,
                                             m == PairMining::kAllPairs);
      CHECK(std::abs(NtXentLoss(batch, m, 0.07).value - expected) < 1e-8);
    }
  }
  SUBCASE("invalid temperature") {
    BatchEmbeddings batch{Matrix::Ones(3, 2), Matrix::Ones(3, 2), {"x", "y"}};
    CHECK_XMODAL_ERROR(NtXentLoss(batch, PairMining::kAllPairs, 0.0), ErrorCode::kInvalidConfig);
    CHECK_XMODAL_ERROR(NtXentLoss(batch, PairMining::kAllPairs, -1.0), ErrorCode::kInvalidConfig);
  }
}

TEST_CASE("nt-xent matches the oracle on random batches") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const BatchEmbeddings batch = RandomBatch(5, 2 + rng() % 6, rng);
    const double tau = trial % 2 == 0 ? 0.07 : 0.5;
    for (PairMining m : {PairMining::kAllPairs, PairMining::kCrossModalOnly}) {
      const double expected = oracle::NtXent(testutil::Columns(batch.audio),
                                             testutil::Columns(batch.text), tau,
                                             m == PairMining::kAllPairs);
      CHECK(std::abs(NtXentLoss(batch, m, tau).value - expected) < 1e-8);
      CHECK(NtXentLoss(batch, m, tau).active_pair_count ==
            static_cast<std::size_t>(2 * batch.size()));
    }
  }
}

TEST_CASE("analytic loss gradients match finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    BatchEmbeddings batch = RandomBatch(4, 2 + rng() % 4, rng);
    if (trial % 4 == 1) batch.labels[1] = batch.labels[0];
    for (PairMining m : {PairMining::kAllPairs, PairMining::kCrossModalOnly}) {
      // Use a moderate temperature so finite differences stay well conditioned.
      CHECK(GradientError(batch, [&](const BatchEmbeddings& b) { return NtXentLoss(b, m, 0.5); }) <
            1e-5);
      CHECK(GradientError(batch, [&](const BatchEmbeddings& b) {
              return ContrastiveLoss(b, m);
            }) < 1e-5);
    }
  }
  BatchEmbeddings batch = RandomBatch(4, 3, rng);
  CHECK(GradientError(batch, [](const BatchEmbeddings& b) {
          return NtXentLoss(b, PairMining::kCrossModalOnly, 0.07);
        }) < 1e-4);
}

TEST_CASE("loss invariances") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index b = 2 + rng() % 6;
    const BatchEmbeddings batch = RandomBatch(6, b, rng);

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(b));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    BatchEmbeddings permuted = batch;
    BatchEmbeddings scaled = batch;
    for (Eigen::Index i = 0; i < b; ++i) {
      const Eigen::Index p = perm[static_cast<std::size_t>(i)];
      permuted.audio.col(i) = batch.audio.col(p);
      permuted.text.col(i) = batch.text.col(p);
      permuted.labels[static_cast<std::size_t>(i)] = batch.labels[static_cast<std::size_t>(p)];
      const double c = 0.1 + static_cast<double>(rng() % 100) / 10.0;
      scaled.audio.col(i) *= c;
      scaled.text.col(i) *= 2.0 * c;
    }
    for (PairMining m : {PairMining::kAllPairs, PairMining::kCrossModalOnly}) {
      const double c0 = ContrastiveLoss(batch, m).value;
      CHECK(ContrastiveLoss(permuted, m).value == doctest::Approx(c0).epsilon(1e-12));
      CHECK(ContrastiveLoss(scaled, m).value == doctest::Approx(c0).epsilon(1e-10));
      const double n0 = NtXentLoss(batch, m).value;
      CHECK(NtXentLoss(permuted, m).value == doctest::Approx(n0).epsilon(1e-12));
      CHECK(NtXentLoss(scaled, m).value == doctest::Approx(n0).epsilon(1e-10));
      CHECK(c0 >= 0.0);
      CHECK(n0 >= 0.0);
    }
  }
}

TEST_CASE("zero-norm columns get zero gradient") {
  BatchEmbeddings batch{Matrix::Ones(3, 2), Matrix::Ones(3, 2), {"x", "y"}};
  batch.audio.col(0).setZero();
  const LossOutput out = NtXentLoss(batch, PairMining::kAllPairs, 0.5);
  CHECK(std::isfinite(out.value));
  CHECK(out.audio_grad.col(0).isZero(0.0));
  CHECK(out.text_grad.allFinite());
}

TEST_CASE("mining names") {
  CHECK(PairMiningName(PairMining::kAllPairs) == "all_pairs");
  CHECK(ParsePairMining("cross_modal_only") == PairMining::kCrossModalOnly);
  CHECK_FALSE(ParsePairMining("hard").has_value());
}

TEST_CASE("non-finite inputs are a numerical failure") {
  BatchEmbeddings batch{Matrix::Ones(3, 2), Matrix::Ones(3, 2), {"x", "y"}};
  batch.text(1, 1) = NAN;
  CHECK_XMODAL_ERROR(ContrastiveLoss(batch, PairMining::kAllPairs), ErrorCode::kNumericalFailure);
  batch.text(1, 1) = INFINITY;
  CHECK_XMODAL_ERROR(NtXentLoss(batch, PairMining::kAllPairs), ErrorCode::kNumericalFailure);
}
