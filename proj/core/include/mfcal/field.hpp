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
#include <span>
#include <vector>

namespace mfcal {

/// Dense H x W x C grid of 64-bit reals, row-major with channels innermost:
/// value (h, w, c) lives at ((h * W) + w) * C + c.
///
/// A Field carries feature maps, measures (nonnegative fields), Hölder
/// exponent maps and binary masks alike.
class Field {
 public:
  Field() = default;
  Field(std::size_t height, std::size_t width, std::size_t channels,
        double fill = 0.0);
  Field(std::size_t height, std::size_t width, std::size_t channels,
        std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::size_t h, std::size_t w, std::size_t c) const noexcept {
    return (h * width_ + w) * channels_ + c;
  }

  double& operator()(std::size_t h, std::size_t w, std::size_t c) noexcept {
    return data_[index(h, w, c)];
  }
  double operator()(std::size_t h, std::size_t w, std::size_t c) const noexcept {
    return data_[index(h, w, c)];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Field& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  /// Copies one channel out as a contiguous H x W x 1 field.
  Field channel(std::size_t c) const;

  /// Sum of all values in row-major order.
  double sum() const noexcept;

  bool all_finite() const noexcept;
  bool all_nonnegative() const noexcept;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

/// Hölder exponent maps share the Field layout.
using AlphaMap = Field;

/// Throws kInvalidArgument unless the two fields have identical shapes.
void require_same_shape(const Field& a, const Field& b, const char* what);

}  // namespace mfcal
