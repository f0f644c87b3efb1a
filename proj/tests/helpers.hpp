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

#pragma once

#include <random>

#include "doctest.h"
#include "mfcal/field.hpp"

namespace mfcal::test {

inline Field random_field(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c,
                          double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(h, w, c);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

inline Field integer_field(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c,
                           int hi = 9) {
  std::uniform_int_distribution<int> dist(0, hi);
  Field f(h, w, c);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

}  // namespace mfcal::test
