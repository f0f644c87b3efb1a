// Copyright 2026 The mfcal Authors. All Rights Reserved.
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

#include <random>

#include "helpers.hpp"
#include "mfcal/error.hpp"
#include "mfcal/grid.hpp"
#include "mfcal/parallel.hpp"
#include "mfcal/verify/oracles.hpp"

using namespace mfcal;

TEST_CASE("field rejects empty or mismatched shapes") {
  CHECK_THROWS_AS(Field(0, 3, 1), Error);
  CHECK_THROWS_AS(Field(2, 2, 1, std::vector<double>(3)), Error);
  const Field f(2, 3, 4);
  CHECK(f.size() == 24);
  CHECK(f.index(1, 2, 3) == 23);
}

TEST_CASE("integral image corners") {
  CHECK(integral_image(Field(1, 1, 1, 5.0)).at(1, 1, 0) == 5.0);

  const SummedAreaTable zero = integral_image(Field(4, 4, 1, 0.0));
  for (std::size_t i = 0; i <= 4; ++i) {
    for (std::size_t j = 0; j <= 4; ++j) CHECK(zero.at(i, j, 0) == 0.0);
  }

  const SummedAreaTable sat = integral_image(Field(2, 2, 1, {1, 2, 3, 4}));
  CHECK(sat.at(2, 2, 0) == 10.0);
  CHECK(sat.at(0, 2, 0) == 0.0);
  CHECK(sat.at(2, 0, 0) == 0.0);
}

TEST_CASE("integral image is monotone for nonnegative fields") {
  std::mt19937_64 rng(1);
  const Field f = test::random_field(rng, 7, 5, 2);
  const SummedAreaTable sat = integral_image(f);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 1; i <= 7; ++i) {
      for (std::size_t j = 1; j <= 5; ++j) {
        CHECK(sat.at(i, j, c) >= sat.at(i - 1, j, c));
        CHECK(sat.at(i, j, c) >= sat.at(i, j - 1, c));
      }
    }
  }
}

TEST_CASE("window anchoring") {
  CHECK(window_reach(1).before == 0);
  CHECK(window_reach(1).after == 0);
  CHECK(window_reach(3).before == 1);
  CHECK(window_reach(3).after == 1);
  CHECK(window_reach(2).before == 1);
  CHECK(window_reach(2).after == 0);
  CHECK(window_reach(4).before == 2);
  CHECK(window_reach(4).after == 1);
  CHECK(adjoint_reach(4).before == 1);
  CHECK(adjoint_reach(4).after == 2);
  const Extent e = clipped_extent(0, window_reach(4), 10);
  CHECK(e.lo == 0);
  CHECK(e.hi == 2);
}

TEST_CASE("window sum examples") {
  const Field uniform(9, 9, 1, 3.0);
  CHECK(window_sum(integral_image(uniform), 3)(4, 4, 0) == 27.0);
  CHECK(window_sum(integral_image(uniform), 4)(4, 4, 0) == 48.0);

  std::mt19937_64 rng(2);
  const Field f = test::random_field(rng, 6, 7, 3);
  CHECK(verify::max_abs_diff(window_sum(integral_image(f), 1), f) < 1e-13);
  const Field ints = test::integer_field(rng, 6, 7, 3);
  CHECK(window_sum(integral_image(ints), 1) == ints);

  // Side 2 anchored at (1, 1) covers rows/cols [0, 2).
  const Field small(2, 2, 1, {1, 2, 3, 4});
  CHECK(window_sum(integral_image(small), 2)(1, 1, 0) == 10.0);

  // A window wider than the field covers everything.
  const Field wide = window_sum(integral_image(small), 9);
  for (double v : wide.values()) CHECK(v == 10.0);
}

TEST_CASE("window sum equals the brute-force loop exactly on integer data") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = test::integer_field(rng, 3 + trial, 11 - trial / 2, 1 + trial % 3);
    const SummedAreaTable sat = integral_image(f);
    for (std::size_t side : {1, 2, 3, 4, 5, 8}) {
      CHECK(window_sum(sat, side) == verify::brute_window_sum(f, side));
    }
  }
}

TEST_CASE("window sum is linear and monotone in the side") {
  std::mt19937_64 rng(4);
  const Field f = test::random_field(rng, 12, 10, 2);
  const Field g = test::random_field(rng, 12, 10, 2);
  Field mix(12, 10, 2);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = 2.5 * f.values()[i] - 0.5 * g.values()[i];
  for (std::size_t side : {2, 3, 4}) {
    const Field a = window_sum(integral_image(f), side);
    const Field b = window_sum(integral_image(g), side);
    const Field m = window_sum(integral_image(mix), side);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m.values()[i] == doctest::Approx(2.5 * a.values()[i] - 0.5 * b.values()[i]).epsilon(1e-12));
    }
  }
  const Field s2 = window_sum(integral_image(f), 2);
  const Field s3 = window_sum(integral_image(f), 3);
  const Field s4 = window_sum(integral_image(f), 4);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(s3.values()[i] >= s2.values()[i]);
    CHECK(s4.values()[i] >= s3.values()[i]);
  }
}

TEST_CASE("window sums do not depend on the worker count") {
  std::mt19937_64 rng(5);
  const Field f = test::random_field(rng, 33, 17, 3);
  set_thread_count(1);
  const Field one = window_sum(integral_image(f), 4);
  set_thread_count(3);
  const Field three = window_sum(integral_image(f), 4);
  set_thread_count(0);
  CHECK(one == three);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  set_thread_count(4);
  std::vector<int> hits(103, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(0);
}
