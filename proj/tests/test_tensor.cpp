// Copyright 2026 The GTCE Authors
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

#include "gtce/tensor.hpp"

#include <random>

#include <doctest.h>

#include "gtce/error.hpp"

using namespace gtce;

TEST_CASE("tensor text round-trip is exact") {
  std::mt19937_64 rng(3);
  Matrix m(7, 5);
  for (double& v : m.flat()) {
    v = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) *
        std::pow(10.0, static_cast<double>(rng() % 9) - 4.0);
  }
  m(0, 0) = 0.0;
  m(1, 1) = 1.0;
  m(2, 2) = 1e-300;
  const Matrix back = parse_tensor(format_tensor(m));
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK(back == m);
}

TEST_CASE("tensor header carries the shape") {
  Matrix m(2, 3, 0.25);
  const std::string text = format_tensor(m);
  CHECK(text.rfind("GTCE-TENSOR 1 2 3\n", 0) == 0);
}

TEST_CASE("tensor parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_tensor("BOGUS 1 2 2\n1 2\n3 4\n"), InputError);
  CHECK_THROWS_AS(parse_tensor("GTCE-TENSOR 2 1 1\n0\n"), InputError);
  CHECK_THROWS_AS(parse_tensor("GTCE-TENSOR 1 2 2\n1 2\n"), InputError);
  CHECK_THROWS_AS(parse_tensor("GTCE-TENSOR 1 1 2\n1 x\n"), InputError);
  CHECK_THROWS_AS(parse_tensor("GTCE-TENSOR 1 1 2\n1 2 3\n"), InputError);
}
