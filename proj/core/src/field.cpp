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

#include "mfcal/field.hpp"

#include <cmath>
#include <string>

#include "mfcal/error.hpp"

namespace mfcal {

Field::Field(std::size_t height, std::size_t width, std::size_t channels,
             double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height == 0 || width == 0 || channels == 0) {
    throw_invalid("field dimensions must be positive");
  }
  data_.assign(height * width * channels, fill);
}

Field::Field(std::size_t height, std::size_t width, std::size_t channels,
             std::vector<double> values)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(values)) {
  if (height == 0 || width == 0 || channels == 0) {
    throw_invalid("field dimensions must be positive");
  }
  if (data_.size() != height * width * channels) {
    throw_invalid("field payload has " + std::to_string(data_.size()) +
                  " values, expected " +
                  std::to_string(height * width * channels));
  }
}

Field Field::channel(std::size_t c) const {
  Field out(height_, width_, 1);
  for (std::size_t p = 0; p < pixels(); ++p) {
    out.data_[p] = data_[p * channels_ + c];
  }
  return out;
}

double Field::sum() const noexcept {
  double total = 0.0;
  for (double v : data_) total += v;
  return total;
}

bool Field::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Field::all_nonnegative() const noexcept {
  for (double v : data_) {
    if (!(v >= 0.0)) return false;
  }
  return true;
}

void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (!a.same_shape(b)) {
    throw_invalid(std::string(what) + ": shape mismatch (" +
                  std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                  "x" + std::to_string(a.channels()) + " vs " +
                  std::to_string(b.height()) + "x" + std::to_string(b.width()) +
                  "x" + std::to_string(b.channels()) + ")");
  }
}

const char* to_string(FormatIssue issue) noexcept {
  switch (issue) {
    case FormatIssue::kBadMagic: return "bad-magic";
    case FormatIssue::kBadHeader: return "bad-header";
    case FormatIssue::kTruncated: return "truncated";
    case FormatIssue::kBadMaxval: return "bad-maxval";
    case FormatIssue::kUnsupportedVersion: return "unsupported-version";
    case FormatIssue::kUnsupportedDtype: return "unsupported-dtype";
    case FormatIssue::kBadDims: return "bad-dims";
    case FormatIssue::kDimensionOverflow: return "dimension-overflow";
    case FormatIssue::kBadCsv: return "bad-csv";
  }
  return "unknown";
}

}  // namespace mfcal
