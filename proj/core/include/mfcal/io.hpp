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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfcal/analysis.hpp"
#include "mfcal/attention.hpp"
#include "mfcal/field.hpp"
#include "mfcal/spectrum_curve.hpp"

namespace mfcal {

using Bytes = std::vector<std::uint8_t>;

// Files. Failures raise ErrorKind::kIo with the path in the message.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Binary PGM (P5) --------------------------------------------------------

/// Single-channel field with values pixel / maxval.
Field read_pgm(const Bytes& bytes);

/// Quantizes a single-channel field in [0, 1] to round(v * maxval).
Bytes write_pgm(const Field& field, std::uint32_t maxval = 255);

// Field container --------------------------------------------------------
//
//   "MFR1" | version u8 = 1 | dtype u8 | ndims u8 | dims u32 LE x ndims | payload LE

inline constexpr std::uint8_t kContainerVersion = 1;

enum class FieldDtype : std::uint8_t {
  kFloat32 = 0,
  kFloat64 = 1,
};

struct ContainerOptions {
  FieldDtype dtype = FieldDtype::kFloat64;
  /// Must be set to write float32, which rounds every value.
  bool allow_lossy = false;
};

/// Writes H x W x C with ndims = 3.
Bytes write_field(const Field& field, ContainerOptions options = {});

/// Accepts ndims 2 (C = 1) or 3, or 4 with a leading batch dimension of 1.
Field read_field(const Bytes& bytes);

/// Writes B x H x W x C with ndims = 4. All fields share one shape.
Bytes write_field_batch(const std::vector<Field>& batch, ContainerOptions options = {});

/// Any ndims; 2 and 3 yield a batch of one.
std::vector<Field> read_field_batch(const Bytes& bytes);

// CSV --------------------------------------------------------------------

/// %.17g, the shortest width that round-trips every double.
std::string format_double(double value);

/// "alpha,f" header, one row per sample, LF endings.
std::string write_spectrum_csv(const SpectrumCurve& curve);

/// Inverse of write_spectrum_csv. Samples are kept in file order.
SpectrumCurve parse_spectrum_csv(std::string_view text);

/// Generic numeric table with a header row.
std::string write_table_csv(const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows);

// JSON records (fixed key order) -----------------------------------------

std::string threshold_record(const ThresholdReport& report, bool centered);
std::string channel_means_record(std::string_view key, const std::vector<double>& values);
std::string gates_record(std::string_view method, const std::vector<std::vector<double>>& gates);

/// Parameter bundle for the recalibration operators. Absent entries are
/// filled by the caller.
struct AttentionParams {
  std::optional<BottleneckMlp> mlp;
  std::optional<SpatialProjection> spatial;
  std::optional<SrmParams> srm;
  std::optional<NormState> norm;
  std::optional<MultiParams> multi;
  std::vector<FrequencyPair> frequencies;
};

AttentionParams parse_attention_params(std::string_view json);
std::string attention_params_json(const AttentionParams& params);

}  // namespace mfcal
