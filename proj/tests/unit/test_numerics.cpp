// tests/unit/test_numerics.cpp

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

#include <cmath>
#include <random>

#include "doctest.h"

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "xmodal/error.hpp"
#include "xmodal/numerics.hpp"

using namespace xmodal;

TEST_CASE("mean pool averages rows") {
  Matrix seq(2, 2);
  seq << 1, 3, 3, 5;
  const Vector p = MeanPool(seq);
  CHECK(p[0] == 2.0);
  CHECK(p[1] == 4.0);

  Matrix one(1, 3);
  one << 7, 7, 7;
  CHECK(MeanPool(one) == Vector::Constant(3, 7.0));
}

TEST_CASE("mean pool matches summation oracle on a random 5x3 matrix") {
  std::mt19937_64 rng(11);
  const Matrix seq = testutil::RandomMatrix(5, 3, rng);
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < 5; ++i) rows.push_back({seq(i, 0), seq(i, 1), seq(i, 2)});
  const auto expected = oracle::MeanPool(rows);
  const Vector got = MeanPool(seq);
  for (int j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(expected[j]).epsilon(1e-6));
}

TEST_CASE("mean pool is linear") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testutil::RandomMatrix(4, 6, rng);
    const Matrix b = testutil::RandomMatrix(4, 6, rng);
    const double alpha = 1.7, beta = -0.4;
    const Vector lhs = MeanPool(alpha * a + beta * b);
    const Vector rhs = alpha * MeanPool(a) + beta * MeanPool(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("cosine similarity examples") {
  CHECK(CosineSimilarity(Vector::Unit(2, 0), Vector::Unit(2, 1)).value == 0.0);
  Vector v(2);
  v << 3, 4;
  CHECK(CosineSimilarity(v, v).value == doctest::Approx(1.0).epsilon(1e-15));
  Vector a(2), b(2);
  a << 1, 2;
  b << 2, 1;
  // dot = 4, norms sqrt(5) * sqrt(5) = 5
  CHECK(CosineSimilarity(a, b).value == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("zero vectors give a flagged zero similarity") {
  const Vector z = Vector::Zero(3);
  const Vector x = Vector::Ones(3);
  auto c = CosineSimilarity(z, x);
  CHECK(c.value == 0.0);
  CHECK(c.degenerate);
  c = CosineSimilarity(z, z);
  CHECK(c.value == 0.0);
  CHECK(c.degenerate);
  CHECK_FALSE(CosineSimilarity(x, x).degenerate);
}

TEST_CASE("cosine similarity properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector a = testutil::RandomMatrix(7, 1, rng);
    const Vector b = testutil::RandomMatrix(7, 1, rng);
    const double ab = CosineSimilarity(a, b).value;
    CHECK(ab == CosineSimilarity(b, a).value);
    CHECK(std::abs(ab) <= 1.0 + 1e-12);
    CHECK(std::abs(CosineSimilarity(scale(rng) * a, b).value - ab) < 1e-9);
  }
}

TEST_CASE("cosine similarity rejects mismatched dims") {
  CHECK_THROWS_AS(CosineSimilarity(Vector::Ones(2), Vector::Ones(3)), Error);
}

TEST_CASE("gradient checker") {
  Vector x(2);
  x << 1, -2;
  auto sq = [](const Vector& v) { return v.squaredNorm(); };
  CHECK(CheckGradient(sq, x, 2 * x) < 1e-6);

  auto constant = [](const Vector&) { return 4.2; };
  CHECK(CheckGradient(constant, x, Vector::Zero(2)) == 0.0);

  // A wrong gradient is detected.
  CHECK(CheckGradient(sq, x, 3 * x) > 0.1);

  auto blowup = [](const Vector& v) { return v[0] > 1.0 ? NAN : 0.0; };
  try {
    CheckGradient(blowup, x, Vector::Zero(2));
    FAIL("expected NumericalFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumericalFailure);
  }
}
