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

#include "mfcal/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "json.hpp"
#include "mfcal/error.hpp"

namespace mfcal {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void throw_format(FormatIssue issue, const std::string& what) {
  throw FormatError(issue, what);
}

[[noreturn]] void throw_io(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorKind::kIo, what + ": " + path.string());
}

// PGM header tokenizer: whitespace and '#' comments may appear between tokens.
class PgmHeader {
 public:
  explicit PgmHeader(const Bytes& bytes) : bytes_(bytes) {}

  std::uint64_t number(const char* what) {
    skip_separators();
    if (pos_ >= bytes_.size()) throw_format(FormatIssue::kTruncated, std::string("PGM header ends before ") + what);
    if (!is_digit(bytes_[pos_])) throw_format(FormatIssue::kBadHeader, std::string("PGM header: expected ") + what);
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw_format(FormatIssue::kDimensionOverflow, std::string("PGM header: ") + what + " too large");
      }
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size()) throw_format(FormatIssue::kTruncated, "PGM header ends before raster");
    if (!is_space(bytes_[pos_])) throw_format(FormatIssue::kBadHeader, "PGM header: expected whitespace after maxval");
    return pos_ + 1;
  }

  void set(std::size_t pos) { pos_ = pos; }

 private:
  static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const Bytes& in, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

void put_value(Bytes& out, double v, FieldDtype dtype) {
  if (dtype == FieldDtype::kFloat64) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  } else {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    put_u32(out, bits);
  }
}

std::size_t dtype_size(FieldDtype dtype) { return dtype == FieldDtype::kFloat64 ? 8 : 4; }

Bytes encode(const std::vector<std::uint32_t>& dims, const std::vector<const Field*>& fields,
             ContainerOptions options) {
  if (options.dtype != FieldDtype::kFloat64 && options.dtype != FieldDtype::kFloat32) {
    throw_invalid("unsupported container dtype");
  }
  if (options.dtype == FieldDtype::kFloat32 && !options.allow_lossy) {
    throw_invalid("float32 output rounds values; request it explicitly");
  }
  Bytes out = {'M', 'F', 'R', '1', kContainerVersion, static_cast<std::uint8_t>(options.dtype),
               static_cast<std::uint8_t>(dims.size())};
  for (std::uint32_t d : dims) put_u32(out, d);
  std::size_t total = 0;
  for (const Field* f : fields) total += f->size();
  out.reserve(out.size() + total * dtype_size(options.dtype));
  for (const Field* f : fields) {
    for (double v : f->values()) put_value(out, v, options.dtype);
  }
  return out;
}

std::uint32_t checked_dim(std::size_t d) {
  if (d > std::numeric_limits<std::uint32_t>::max()) {
    throw_invalid("field dimension does not fit the container");
  }
  return static_cast<std::uint32_t>(d);
}

struct Decoded {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};

Decoded decode(const Bytes& bytes) {
  if (bytes.size() < 4) throw_format(FormatIssue::kTruncated, "container shorter than its magic");
  if (!(bytes[0] == 'M' && bytes[1] == 'F' && bytes[2] == 'R' && bytes[3] == '1')) {
    throw_format(FormatIssue::kBadMagic, "not a field container (bad magic)");
  }
  if (bytes.size() < 7) throw_format(FormatIssue::kTruncated, "container header truncated");
  if (bytes[4] != kContainerVersion) {
    throw_format(FormatIssue::kUnsupportedVersion,
                 "unsupported container version " + std::to_string(bytes[4]));
  }
  if (bytes[5] > 1) {
    throw_format(FormatIssue::kUnsupportedDtype, "unsupported container dtype " + std::to_string(bytes[5]));
  }
  const auto dtype = static_cast<FieldDtype>(bytes[5]);
  const std::size_t ndims = bytes[6];
  if (ndims < 2 || ndims > 4) {
    throw_format(FormatIssue::kBadDims, "container ndims must be 2, 3 or 4, got " + std::to_string(ndims));
  }
  const std::size_t header = 7 + 4 * ndims;
  if (bytes.size() < header) throw_format(FormatIssue::kTruncated, "container dims truncated");

  Decoded out;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    const auto d = static_cast<std::uint32_t>(get_le(bytes, 7 + 4 * i, 4));
    if (d == 0) throw_format(FormatIssue::kBadDims, "container has an empty dimension");
    out.dims.push_back(d);
    if (__builtin_mul_overflow(count, std::uint64_t{d}, &count)) {
      throw_format(FormatIssue::kDimensionOverflow, "container element count overflows");
    }
  }
  const std::uint64_t width = dtype_size(dtype);
  std::uint64_t payload = 0;
  if (__builtin_mul_overflow(count, width, &payload) ||
      payload > std::numeric_limits<std::size_t>::max() - header) {
    throw_format(FormatIssue::kDimensionOverflow, "container payload size overflows");
  }
  if (bytes.size() < header + payload) throw_format(FormatIssue::kTruncated, "container payload truncated");
  if (bytes.size() > header + payload) throw_format(FormatIssue::kBadHeader, "trailing bytes after container payload");

  out.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t pos = header + i * width;
    if (dtype == FieldDtype::kFloat64) {
      out.values[i] = std::bit_cast<double>(get_le(bytes, pos, 8));
    } else {
      out.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes, pos, 4)));
    }
  }
  return out;
}

std::vector<double> json_vector(const Json& j, const char* key) {
  if (!j.contains(key)) throw_invalid(std::string("parameters: missing key ") + key);
  return j.at(key).get<std::vector<double>>();
}

Json norm_json(const NormState& n) {
  Json j;
  const char* mode = n.mode == NormMode::kAccumulate ? "accumulate"
                     : n.mode == NormMode::kFrozen   ? "frozen"
                                                     : "per_instance";
  j["mode"] = mode;
  j["gamma"] = n.gamma;
  j["beta"] = n.beta;
  j["running_mean"] = n.running_mean;
  j["running_var"] = n.running_var;
  j["momentum"] = n.momentum;
  j["variance_floor"] = n.variance_floor;
  return j;
}

NormState norm_from_json(const Json& j) {
  NormState n;
  n.gamma = json_vector(j, "gamma");
  n.beta = json_vector(j, "beta");
  const std::size_t C = n.gamma.size();
  n.running_mean = j.contains("running_mean") ? json_vector(j, "running_mean") : std::vector<double>(C, 0.0);
  n.running_var = j.contains("running_var") ? json_vector(j, "running_var") : std::vector<double>(C, 1.0);
  const std::string mode = j.value("mode", "frozen");
  if (mode == "accumulate") {
    n.mode = NormMode::kAccumulate;
  } else if (mode == "frozen") {
    n.mode = NormMode::kFrozen;
  } else if (mode == "per_instance") {
    n.mode = NormMode::kPerInstance;
  } else {
    throw_invalid("parameters: unknown normalization mode " + mode);
  }
  n.momentum = j.value("momentum", 0.1);
  n.variance_floor = j.value("variance_floor", kNormVarianceFloor);
  n.validate(C);
  return n;
}

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io(path, "cannot open file for reading");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw_io(path, "read failed");
  return bytes;
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io(path, "cannot open file for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_io(path, "write failed");
}

std::string read_text(const std::filesystem::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, Bytes(text.begin(), text.end()));
}

Field read_pgm(const Bytes& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw_format(FormatIssue::kBadMagic, "not a binary PGM (expected P5)");
  }
  PgmHeader header(bytes);
  header.set(2);
  const std::uint64_t width = header.number("width");
  const std::uint64_t height = header.number("height");
  const std::uint64_t maxval = header.number("maxval");
  if (maxval == 0 || maxval > 65535) {
    throw_format(FormatIssue::kBadMaxval, "PGM maxval must be in [1, 65535], got " + std::to_string(maxval));
  }
  if (width == 0 || height == 0) throw_format(FormatIssue::kBadDims, "PGM has an empty dimension");
  const std::size_t start = header.raster_start();
  const std::size_t depth = maxval < 256 ? 1 : 2;
  const std::uint64_t needed = width * height * depth;
  if (bytes.size() - start < needed) throw_format(FormatIssue::kTruncated, "PGM raster truncated");

  Field out(height, width, 1);
  auto v = out.values();
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t pos = start + i * depth;
    const std::uint32_t sample = depth == 1 ? bytes[pos] : (std::uint32_t{bytes[pos]} << 8) | bytes[pos + 1];
    if (sample > maxval) throw_format(FormatIssue::kBadMaxval, "PGM sample exceeds maxval");
    v[i] = static_cast<double>(sample) / scale;
  }
  return out;
}

Bytes write_pgm(const Field& field, std::uint32_t maxval) {
  if (field.channels() != 1) throw_invalid("PGM output needs a single-channel field");
  if (maxval == 0 || maxval > 65535) throw_invalid("PGM maxval must be in [1, 65535]");
  const std::string header = "P5\n" + std::to_string(field.width()) + " " +
                             std::to_string(field.height()) + "\n" + std::to_string(maxval) + "\n";
  Bytes out(header.begin(), header.end());
  for (double v : field.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw_invalid("PGM output needs values in [0, 1]");
    const auto s = static_cast<std::uint32_t>(std::lround(v * maxval));
    if (maxval > 255) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xFF));
  }
  return out;
}

Bytes write_field(const Field& field, ContainerOptions options) {
  if (field.empty()) throw_invalid("cannot serialize an empty field");
  return encode({checked_dim(field.height()), checked_dim(field.width()), checked_dim(field.channels())},
                {&field}, options);
}

Bytes write_field_batch(const std::vector<Field>& batch, ContainerOptions options) {
  if (batch.empty()) throw_invalid("cannot serialize an empty batch");
  std::vector<const Field*> ptrs;
  for (const Field& f : batch) {
    require_same_shape(batch.front(), f, "write_field_batch");
    ptrs.push_back(&f);
  }
  const Field& f = batch.front();
  return encode({checked_dim(batch.size()), checked_dim(f.height()), checked_dim(f.width()),
                 checked_dim(f.channels())},
                ptrs, options);
}

std::vector<Field> read_field_batch(const Bytes& bytes) {
  Decoded d = decode(bytes);
  std::size_t B = 1;
  std::size_t H = 0;
  std::size_t W = 0;
  std::size_t C = 1;
  if (d.dims.size() == 2) {
    H = d.dims[0];
    W = d.dims[1];
  } else if (d.dims.size() == 3) {
    H = d.dims[0];
    W = d.dims[1];
    C = d.dims[2];
  } else {
    B = d.dims[0];
    H = d.dims[1];
    W = d.dims[2];
    C = d.dims[3];
  }
  const std::size_t per = H * W * C;
  std::vector<Field> out;
  out.reserve(B);
  for (std::size_t b = 0; b < B; ++b) {
    out.emplace_back(H, W, C, std::vector<double>(d.values.begin() + b * per, d.values.begin() + (b + 1) * per));
  }
  return out;
}

Field read_field(const Bytes& bytes) {
  std::vector<Field> batch = read_field_batch(bytes);
  if (batch.size() != 1) {
    throw_format(FormatIssue::kBadDims, "expected a single field, container holds a batch of " +
                                            std::to_string(batch.size()));
  }
  return std::move(batch.front());
}

std::string format_double(double value) {
  char buf[40];
  if (value == 0.0) value = 0.0;  // no "-0" in text output
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string write_spectrum_csv(const SpectrumCurve& curve) {
  std::string out = "alpha,f\n";
  for (const SpectrumPoint& p : curve.samples) {
    out += format_double(p.alpha);
    out += ',';
    out += format_double(p.f);
    out += '\n';
  }
  return out;
}

SpectrumCurve parse_spectrum_csv(std::string_view text) {
  auto next_line = [&text]() -> std::optional<std::string_view> {
    if (text.empty()) return std::nullopt;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  const auto header = next_line();
  if (!header || *header != "alpha,f") throw_format(FormatIssue::kBadCsv, "spectrum CSV must start with 'alpha,f'");

  auto parse = [](std::string_view s, std::size_t row) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw_format(FormatIssue::kBadCsv, "spectrum CSV: bad number on row " + std::to_string(row));
    }
    return v;
  };
  SpectrumCurve curve;
  std::size_t row = 1;
  while (const auto line = next_line()) {
    ++row;
    if (line->empty()) continue;
    const std::size_t comma = line->find(',');
    if (comma == std::string_view::npos || line->find(',', comma + 1) != std::string_view::npos) {
      throw_format(FormatIssue::kBadCsv, "spectrum CSV: expected two columns on row " + std::to_string(row));
    }
    curve.samples.push_back({parse(line->substr(0, comma), row), parse(line->substr(comma + 1), row)});
  }
  return curve;
}

std::string write_table_csv(const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw_invalid("table row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string threshold_record(const ThresholdReport& report, bool centered) {
  Json j;
  j["delta"] = report.delta;
  j["k"] = report.k;
  j["singular_values"] = report.singular_values;
  j["energy"] = report.energy;
  j["centered"] = centered;
  return j.dump(2) + "\n";
}

std::string channel_means_record(std::string_view key, const std::vector<double>& values) {
  Json j;
  j[std::string(key)] = values;
  return j.dump(2) + "\n";
}

std::string gates_record(std::string_view method, const std::vector<std::vector<double>>& gates) {
  Json j;
  j["method"] = std::string(method);
  j["gates"] = gates;
  return j.dump(2) + "\n";
}

AttentionParams parse_attention_params(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_format(FormatIssue::kBadHeader, std::string("parameters are not valid JSON: ") + e.what());
  }
  AttentionParams p;
  try {
    if (j.contains("mlp")) {
      const Json& m = j["mlp"];
      BottleneckMlp mlp;
      mlp.channels = m.at("channels").get<std::size_t>();
      mlp.hidden = m.at("hidden").get<std::size_t>();
      mlp.use_bias = m.value("use_bias", true);
      mlp.w1 = json_vector(m, "w1");
      mlp.w2 = json_vector(m, "w2");
      mlp.b1 = m.contains("b1") ? json_vector(m, "b1") : std::vector<double>(mlp.hidden, 0.0);
      mlp.b2 = m.contains("b2") ? json_vector(m, "b2") : std::vector<double>(mlp.channels, 0.0);
      mlp.validate();
      p.mlp = std::move(mlp);
    }
    if (j.contains("spatial")) {
      p.spatial = SpatialProjection{json_vector(j["spatial"], "weights"), j["spatial"].value("bias", 0.0)};
    }
    if (j.contains("srm")) {
      const Json& s = j["srm"];
      p.srm = SrmParams{json_vector(s, "w_mean"), json_vector(s, "w_std"), norm_from_json(s.at("norm"))};
    }
    if (j.contains("norm")) p.norm = norm_from_json(j["norm"]);
    if (j.contains("multi")) {
      const Json& m = j["multi"];
      MultiParams mp;
      mp.centers = json_vector(m, "centers");
      mp.sharpness = json_vector(m, "sharpness");
      mp.level_norm = norm_from_json(m.at("norm"));
      mp.validate();
      p.multi = std::move(mp);
    }
    if (j.contains("frequencies")) {
      for (const Json& f : j["frequencies"]) {
        p.frequencies.push_back({f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw_format(FormatIssue::kBadHeader, std::string("malformed parameters: ") + e.what());
  }
  return p;
}

std::string attention_params_json(const AttentionParams& p) {
  Json j = Json::object();
  if (p.mlp) {
    Json m;
    m["channels"] = p.mlp->channels;
    m["hidden"] = p.mlp->hidden;
    m["use_bias"] = p.mlp->use_bias;
    m["w1"] = p.mlp->w1;
    m["b1"] = p.mlp->b1;
    m["w2"] = p.mlp->w2;
    m["b2"] = p.mlp->b2;
    j["mlp"] = std::move(m);
  }
  if (p.spatial) j["spatial"] = Json{{"weights", p.spatial->weights}, {"bias", p.spatial->bias}};
  if (p.srm) {
    j["srm"] = Json{{"w_mean", p.srm->w_mean}, {"w_std", p.srm->w_std}, {"norm", norm_json(p.srm->norm)}};
  }
  if (p.norm) j["norm"] = norm_json(*p.norm);
  if (p.multi) {
    j["multi"] = Json{{"centers", p.multi->centers},
                      {"sharpness", p.multi->sharpness},
                      {"norm", norm_json(p.multi->level_norm)}};
  }
  if (!p.frequencies.empty()) {
    Json f = Json::array();
    for (const FrequencyPair& fp : p.frequencies) f.push_back(Json::array({fp.i, fp.j}));
    j["frequencies"] = std::move(f);
  }
  return j.dump(2) + "\n";
}

}  // namespace mfcal
