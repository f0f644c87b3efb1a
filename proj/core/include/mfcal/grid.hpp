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

#include <cstddef>
#include <vector>

#include "mfcal/field.hpp"

namespace mfcal {

/// Per-channel (H+1) x (W+1) cumulative sums with a zero first row and
/// column. Layout matches Field: ((i * (W+1)) + j) * C + c.
class SummedAreaTable {
 public:
  SummedAreaTable() = default;
  SummedAreaTable(std::size_t height, std::size_t width, std::size_t channels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }

  double at(std::size_t i, std::size_t j, std::size_t c) const noexcept {
    return table_[(i * (width_ + 1) + j) * channels_ + c];
  }
  double& at(std::size_t i, std::size_t j, std::size_t c) noexcept {
    return table_[(i * (width_ + 1) + j) * channels_ + c];
  }

  /// Sum over rows [r0, r1) and columns [c0, c1) of channel ch.
  double rect_sum(std::size_t r0, std::size_t r1, std::size_t c0,
                  std::size_t c1, std::size_t ch) const noexcept {
    return at(r1, c1, ch) - at(r0, c1, ch) - at(r1, c0, ch) + at(r0, c0, ch);
  }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> table_;
};

SummedAreaTable integral_image(const Field& field);

/// Half-open index range [lo, hi) along one axis.
struct Extent {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// Window reach around a pixel: rows/cols [p - before, p + after] inclusive.
struct WindowReach {
  std::size_t before = 0;
  std::size_t after = 0;
};

/// Anchoring rule for a side-s window. Odd s is centered; even s covers
/// [p - s/2, p + s/2), one extra cell toward the top/left.
WindowReach window_reach(std::size_t side);

/// Reach of the transposed window: the set of anchors whose window
/// contains a given pixel.
WindowReach adjoint_reach(std::size_t side);

/// [pos - reach.before, pos + reach.after] clipped to [0, n).
Extent clipped_extent(std::size_t pos, WindowReach reach, std::size_t n);

/// Sum over each side x side window intersected with the image domain.
Field window_sum(const SummedAreaTable& sat, std::size_t side);

/// Same as window_sum but with an explicit reach on both axes.
Field window_sum(const SummedAreaTable& sat, WindowReach reach);

}  // namespace mfcal
