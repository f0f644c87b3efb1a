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


#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfcal/analysis.hpp"
#include "mfcal/attention.hpp"
#include "mfcal/cascade.hpp"
#include "mfcal/error.hpp"
#include "mfcal/holder.hpp"
#include "mfcal/io.hpp"
#include "mfcal/parallel.hpp"
#include "mfcal/spectrum.hpp"
#include "mfcal/verify/acceptance.hpp"

namespace mfcal::cli {
namespace {

using Json = nlohmann::ordered_json;

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw_invalid(std::string(flag) + " is required");
}

std::vector<Field> load_batch(const std::string& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 4 && bytes[0] == 'M' && bytes[1] == 'F' && bytes[2] == 'R' && bytes[3] == '1') {
    return read_field_batch(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return {read_pgm(bytes)};
  throw FormatError(FormatIssue::kBadMagic, "input is neither a field container nor a binary PGM: " + path);
}

Field load_single(const std::string& path) {
  std::vector<Field> batch = load_batch(path);
  if (batch.size() != 1) {
    throw_invalid("expected a single field, got a batch of " + std::to_string(batch.size()) + ": " + path);
  }
  return std::move(batch.front());
}

void store_batch(const std::string& path, const std::vector<Field>& batch) {
  write_file(path, batch.size() == 1 ? write_field(batch.front()) : write_field_batch(batch));
}

// JSON text goes to `path`, or to stdout when it is empty.
void emit_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    write_text(path, text);
  }
}

CascadeDims to_dims(int dims) {
  if (dims == 1) return CascadeDims::kOne;
  if (dims == 2) return CascadeDims::kTwoProduct;
  throw_invalid("--dims must be 1 or 2");
}

void check_open_unit(double p, const char* flag) {
  if (!(p > 0.0 && p < 1.0)) throw_invalid(std::string(flag) + " must lie in (0, 1)");
}

// Binomial specs go through the closed-form generators; other weight vectors
// use the m-ary construction, squared into a product measure in 2-D.
Field make_measure(const CascadeSpec& spec) {
  if (spec.arity() == 2) {
    return spec.dims == CascadeDims::kOne ? generate_binomial(spec) : generate_product_2d(spec);
  }
  const Field line = generate_cascade(spec);
  if (spec.dims == CascadeDims::kOne) return line;
  const std::size_t n = line.width();
  Field out(n, n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j, 0) = line.values()[i] * line.values()[j];
  }
  return out;
}

NormMode norm_mode(const std::string& name, NormMode fallback) {
  if (name == "auto") return fallback;
  if (name == "frozen") return NormMode::kFrozen;
  if (name == "batch") return NormMode::kPerInstance;
  if (name == "accumulate") return NormMode::kAccumulate;
  throw_invalid("--norm must be one of auto, frozen, batch, accumulate");
}

}  // namespace

int run_cascade(const RunConfig& c) {
  require_path(c.output, "--output");
  CascadeSpec spec;
  if (c.weights.empty()) {
    check_open_unit(c.p, "--p");
    spec = CascadeSpec::binomial(c.p, c.depth, to_dims(c.dims));
  } else {
    spec.weights = c.weights;
    spec.depth = c.depth;
    spec.dims = to_dims(c.dims);
  }
  spec.seed = c.seed;
  spec.validate();
  write_file(c.output, write_field(make_measure(spec)));

  if (c.spectrum) {
    if (spec.arity() != 2) throw_invalid("--spectrum needs a binomial cascade");
    std::string path = c.spectrum_output;
    if (path.empty()) path = std::filesystem::path(c.output).replace_extension(".csv").string();
    write_text(path, write_spectrum_csv(analytic_spectrum(spec.weights[0], c.spectrum_points, spec.dims)));
  }
  return 0;
}

int run_holder(const RunConfig& c) {
  require_path(c.input, "--input");
  const ScaleSet scales(c.scales);
  const std::vector<Field> batch = load_batch(c.input);
  std::vector<Field> maps;
  maps.reserve(batch.size());
  for (const Field& f : batch) maps.push_back(holder_map(f, scales, c.epsilon));
  if (!c.output.empty()) store_batch(c.output, maps);

  const std::size_t border = scales.largest() / 2;
  Json record;
  record["scales"] = c.scales;
  record["epsilon"] = c.epsilon;
  record["border"] = border;
  if (maps.size() == 1) {
    record["mean_alpha"] = mean_alpha(maps[0]);
    record["mean_alpha_interior"] = mean_alpha_interior(maps[0], border);
  } else {
    Json all = Json::array();
    Json interior = Json::array();
    for (const Field& m : maps) {
      all.push_back(mean_alpha(m));
      interior.push_back(mean_alpha_interior(m, border));
    }
    record["mean_alpha"] = std::move(all);
    record["mean_alpha_interior"] = std::move(interior);
  }
  emit_text(c.means_output, record.dump(2));
  return 0;
}

int run_spectrum(const RunConfig& c) {
  require_path(c.output, "--output");
  const bool from_input = !c.input.empty();
  const CascadeDims dims = to_dims(c.dims);
  const int k_min = c.k_min > 0 ? c.k_min : (dims == CascadeDims::kOne ? 8 : 6);
  const int k_max = c.k_max > 0 ? c.k_max : (dims == CascadeDims::kOne ? 12 : 10);
  if (k_max < k_min) throw_invalid("--kmax must be >= --kmin");
  if (!from_input) check_open_unit(c.p, "--p");

  if (c.method == "clt") {
    const int k = c.clt_k > 0 ? c.clt_k : k_max;
    Field measure = from_input ? load_single(c.input)
                               : make_measure(CascadeSpec::binomial(c.p, k, dims));
    const double support = c.support_dim > 0.0 ? c.support_dim
                           : (from_input || dims == CascadeDims::kTwoProduct) ? 2.0
                                                                              : 1.0;
    const AlphaMap alpha = holder_map(measure, ScaleSet(c.scales), c.epsilon);
    write_text(c.output, write_spectrum_csv(clt_spectrum(alpha, k, support)));
    return 0;
  }

  const DepthSeries series =
      from_input ? dyadic_pyramid(load_single(c.input), k_max - k_min + 1)
                 : cascade_series(CascadeSpec::binomial(c.p, k_min, dims), k_min, k_max);

  if (c.method == "histogram") {
    HistogramOptions options;
    options.bins = c.bins;
    options.log_mass_bandwidth = c.bandwidth;
    write_text(c.output, write_spectrum_csv(histogram_spectrum(series, options)));
    return 0;
  }
  if (c.method == "moments") {
    const MomentsSpectrum m = moments_spectrum(series, q_grid(c.q_min, c.q_max, c.q_step));
    write_text(c.output, write_spectrum_csv(m.curve));
    if (!c.tau_output.empty()) {
      const PartitionFunction& pf = m.partition;
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < pf.q_values.size(); ++i) {
        rows.push_back({pf.q_values[i], pf.tau[i], pf.alpha[i], pf.f[i],
                        static_cast<double>(pf.one_sided[i])});
      }
      write_text(c.tau_output, write_table_csv({"q", "tau", "alpha", "f", "one_sided"}, rows));
    }
    return 0;
  }
  throw_invalid("unknown spectrum method: " + c.method);
}

int run_recalibrate(const RunConfig& c) {
  require_path(c.input, "--input");
  require_path(c.output, "--output");
  const std::vector<Field> batch = load_batch(c.input);
  const std::size_t C = batch.front().channels();

  AttentionParams params;
  if (!c.params.empty()) params = parse_attention_params(read_text(c.params));
  std::mt19937_64 rng(c.seed);
  auto mlp = [&]() {
    if (params.mlp) return *params.mlp;
    BottleneckMlp m = BottleneckMlp::glorot(C, c.reduction, rng);
    m.use_bias = !c.strict_paper;
    return m;
  };

  std::vector<std::vector<double>> gates;
  std::vector<Field> outputs;
  const std::string& method = c.method;

  if (method == "cse" || method == "scse" || method == "srm" || method == "fca") {
    const BottleneckMlp shared = method == "srm" ? BottleneckMlp{} : mlp();
    SpatialProjection spatial;
    if (method == "scse") {
      if (params.spatial) {
        spatial = *params.spatial;
      } else {
        std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(C)));
        spatial.weights.resize(C);
        for (double& w : spatial.weights) w = gauss(rng);
      }
    }
    SrmParams srm;
    if (method == "srm") {
      if (params.srm) {
        srm = *params.srm;
      } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        srm.w_mean.resize(C);
        srm.w_std.resize(C);
        for (double& w : srm.w_mean) w = gauss(rng);
        for (double& w : srm.w_std) w = gauss(rng);
        srm.norm = NormState::identity(C, norm_mode(c.norm, NormMode::kFrozen));
      }
    }
    std::vector<FrequencyPair> freqs = params.frequencies;
    if (method == "fca" && freqs.empty()) {
      freqs = lowest_frequencies(c.frequencies, batch.front().height(), batch.front().width());
    }
    for (const Field& f : batch) {
      if (method == "cse") {
        ChannelRecalibration r = se_forward(f, shared, f);
        gates.push_back(std::move(r.gates));
        outputs.push_back(std::move(r.output));
      } else if (method == "scse") {
        ScseOutput r = scse_forward(f, shared, spatial);
        gates.push_back(std::move(r.channel_gates));
        outputs.push_back(std::move(r.output));
      } else if (method == "srm") {
        ChannelRecalibration r = srm_forward(f, srm);
        gates.push_back(std::move(r.gates));
        outputs.push_back(std::move(r.output));
      } else {
        ChannelRecalibration r = fca_forward(f, shared, freqs);
        gates.push_back(std::move(r.gates));
        outputs.push_back(std::move(r.output));
      }
    }
  } else if (method == "mono") {
    MonoParams mono{mlp(), params.norm ? *params.norm
                                       : NormState::identity(C, norm_mode(c.norm, NormMode::kFrozen))};
    MonoOutput r = mono_forward(batch, mono, HolderConfig{ScaleSet(c.scales), c.epsilon});
    for (const MlpTrace& t : r.trace) gates.push_back(t.gates);
    outputs = std::move(r.output);
  } else if (method == "multi") {
    std::vector<AlphaMap> alpha;
    alpha.reserve(batch.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Field& f : batch) {
      alpha.push_back(holder_map(f, ScaleSet(c.scales), c.epsilon));
      for (double a : alpha.back().values()) {
        if (std::isfinite(a)) {
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
      }
    }
    if (!(lo <= hi)) throw_numerical("exponent map has no finite values");
    if (hi - lo < 1e-6) {
      lo -= 0.5;
      hi += 0.5;
    }
    const MultiParams multi = params.multi ? *params.multi
                                           : MultiParams::spanning(c.levels, lo, hi,
                                                                   norm_mode(c.norm, NormMode::kPerInstance));
    MultiOutput r = multi_forward(batch, alpha, multi);
    for (const Field& g : r.gate) {
      std::vector<double> mean(g.channels(), 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) mean[i % g.channels()] += g.values()[i];
      for (double& m : mean) m /= static_cast<double>(g.pixels());
      gates.push_back(std::move(mean));
    }
    outputs = std::move(r.output);
  } else {
    throw_invalid("unknown recalibration method: " + method);
  }

  store_batch(c.output, outputs);
  if (!c.gates_output.empty()) write_text(c.gates_output, gates_record(method, gates));
  return 0;
}

int run_excite(const RunConfig& c) {
  if (!(c.delta > 0.0 && c.delta <= 1.0)) throw_invalid("--delta must lie in (0, 1]");
  const bool have_input = !c.input.empty();
  if (have_input == !c.singular_values.empty()) {
    throw_invalid("give exactly one of --input and --singular-values");
  }
  bool centered = false;
  Matrix a;
  if (have_input) {
    const Json j = Json::parse(read_text(c.input));
    const Json& rows = j.contains("gates") ? j.at("gates") : j;
    if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
      throw FormatError(FormatIssue::kBadHeader, "gates record must hold a list of gate vectors: " + c.input);
    }
    const std::size_t n = rows.size();
    const std::size_t C = rows.front().size();
    Matrix e(n, C);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != C) {
        throw FormatError(FormatIssue::kBadHeader, "gate vectors differ in length: " + c.input);
      }
      for (std::size_t k = 0; k < C; ++k) e(i, k) = rows[i][k].get<double>();
    }
    centered = !c.uncentered && !c.strict_paper;
    a = excitation_covariance(e, centered);
  } else {
    std::mt19937_64 rng(c.seed);
    a = with_spectrum(c.singular_values, rng);
  }
  emit_text(c.output, threshold_record(excitation_threshold(a, c.delta), centered));
  return 0;
}

int run_selftest(const RunConfig& c) {
  verify::AcceptanceOptions options;
  options.strict_paper = c.strict_paper;
  options.alternate_threads = c.alternate_threads;
  for (const std::string& kv : c.golden) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw_invalid("--golden expects key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::exception&) {
      throw_invalid("--golden value is not a number: " + kv);
    }
    if (!options.golden.set(key, value)) throw_invalid("unknown golden key: " + key);
  }

  const verify::AcceptanceReport report = verify::run_acceptance(options);
  if (c.json) {
    Json out;
    out["passed"] = report.passed();
    Json list = Json::array();
    for (const verify::CriterionResult& r : report.criteria) {
      list.push_back(Json{{"id", r.id},
                          {"name", r.name},
                          {"passed", r.passed},
                          {"mode", r.mode},
                          {"seconds", r.seconds},
                          {"time_limit", r.time_limit},
                          {"detail", r.detail}});
    }
    out["criteria"] = std::move(list);
    std::cout << out.dump(2) << '\n';
  } else {
    for (const verify::CriterionResult& r : report.criteria) std::cout << verify::format_result(r) << '\n';
  }
  if (!c.artifacts.empty()) {
    std::filesystem::create_directories(c.artifacts);
    for (const auto& [name, bytes] : report.artifacts) {
      write_file(std::filesystem::path(c.artifacts) / name, bytes);
    }
  }
  return report.passed() ? 0 : 1;
}

int run_bench(const RunConfig& c) {
  if (c.reps < 1) throw_invalid("--reps must be >= 1");
  if (c.reps < 5) std::cerr << "warning: fewer than 5 repetitions; timings are noisy\n";
  const ScaleSet scales(c.scales);
  std::vector<std::vector<double>> rows;
  for (std::size_t channels : c.channels) {
    if (channels == 0) throw_invalid("--channels entries must be positive");
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Field field(c.size, c.size, channels);
    for (double& v : field.values()) v = dist(rng);

    std::vector<double> ms;
    ms.reserve(static_cast<std::size_t>(c.reps));
    for (int r = 0; r < c.reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const AlphaMap alpha = holder_map(field, scales, c.epsilon);
      const auto t1 = std::chrono::steady_clock::now();
      if (alpha.empty()) throw_numerical("empty exponent map");
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(ms.size() - 1);
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return i + 1 < ms.size() ? ms[i] * (1.0 - frac) + ms[i + 1] * frac : ms[i];
    };
    rows.push_back({static_cast<double>(channels), quantile(0.5), quantile(0.75) - quantile(0.25),
                    static_cast<double>(c.reps)});
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] > rows[i - 1][0] && rows[i][1] < rows[i - 1][1]) {
      std::cerr << "warning: median time is not monotone in channel count\n";
      break;
    }
  }
  emit_text(c.output, write_table_csv({"channels", "median_ms", "iqr_ms", "reps"}, rows));
  return 0;
}

}  // namespace mfcal::cli
