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

#include "mfcal/grid.hpp"

#include <algorithm>

#include "mfcal/error.hpp"
#include "mfcal/parallel.hpp"

namespace mfcal {

SummedAreaTable::SummedAreaTable(std::size_t height, std::size_t width,
                                 std::size_t channels)
    : height_(height), width_(width), channels_(channels),
      table_((height + 1) * (width + 1) * channels, 0.0) {}

SummedAreaTable integral_image(const Field& field) {
  const std::size_t H = field.height();
  const std::size_t W = field.width();
  const std::size_t C = field.channels();
  SummedAreaTable sat(H, W, C);
  // Channels are independent; each one is accumulated row by row in a
  // fixed order so the table does not depend on the worker count.
  parallel_for(C, [&](std::size_t c) {
    for (std::size_t h = 0; h < H; ++h) {
      double row_sum = 0.0;
      for (std::size_t w = 0; w < W; ++w) {
        row_sum += field(h, w, c);
        sat.at(h + 1, w + 1, c) = sat.at(h, w + 1, c) + row_sum;
      }
    }
  });
  return sat;
}

WindowReach window_reach(std::size_t side) {
  if (side == 0) throw_invalid("window side must be >= 1");
  if (side % 2 == 1) return {side / 2, side / 2};
  return {side / 2, side / 2 - 1};
}

WindowReach adjoint_reach(std::size_t side) {
  const WindowReach forward = window_reach(side);
  return {forward.after, forward.before};
}

Extent clipped_extent(std::size_t pos, WindowReach reach, std::size_t n) {
  const std::size_t lo = pos >= reach.before ? pos - reach.before : 0;
  const std::size_t hi = std::min(n, pos + reach.after + 1);
  return {lo, hi};
}

Field window_sum(const SummedAreaTable& sat, WindowReach reach) {
  const std::size_t H = sat.height();
  const std::size_t W = sat.width();
  const std::size_t C = sat.channels();
  Field out(H, W, C);
  parallel_for(H, [&](std::size_t h) {
    const Extent rows = clipped_extent(h, reach, H);
    for (std::size_t w = 0; w < W; ++w) {
      const Extent cols = clipped_extent(w, reach, W);
      for (std::size_t c = 0; c < C; ++c) {
        out(h, w, c) = sat.rect_sum(rows.lo, rows.hi, cols.lo, cols.hi, c);
      }
    }
  });
  return out;
}

Field window_sum(const SummedAreaTable& sat, std::size_t side) {
  return window_sum(sat, window_reach(side));
}

}  // namespace mfcal
