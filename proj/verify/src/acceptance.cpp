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

#include "mfcal/verify/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "mfcal/analysis.hpp"
#include "mfcal/attention.hpp"
#include "mfcal/cascade.hpp"
#include "mfcal/error.hpp"
#include "mfcal/holder.hpp"
#include "mfcal/parallel.hpp"
#include "mfcal/spectrum.hpp"
#include "mfcal/verify/gradcheck.hpp"
#include "mfcal/verify/oracles.hpp"

namespace mfcal::verify {
namespace {

constexpr double kP = 2.0 / 3.0;

using Rng = std::mt19937_64;

std::string fmt(const char* format, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

std::string fmt(const char* format, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// Criterion body: returns true on success and writes a short detail line.
using Check = std::function<bool(std::string&)>;

CriterionResult run(int id, const char* name, double limit, const std::string& mode, const Check& check) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.time_limit = limit;
  r.mode = mode;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.passed = check(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit > 0.0 && r.seconds > limit) {
    r.passed = false;
    r.detail += fmt(" [over the %.0f s limit]", limit);
  }
  return r;
}

Field random_field(Rng& rng, std::size_t h, std::size_t w, std::size_t c, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(h, w, c);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

void randomize(std::vector<double>& v, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& x : v) x = dist(rng);
}

BottleneckMlp random_mlp(Rng& rng, std::size_t channels, bool strict) {
  BottleneckMlp mlp = BottleneckMlp::glorot(channels, 2, rng);
  mlp.use_bias = !strict;
  randomize(mlp.b1, rng, -0.5, 0.5);
  randomize(mlp.b2, rng, -0.5, 0.5);
  return mlp;
}

// 1. Cascade exactness ---------------------------------------------------------

bool cascade_exactness(std::string& detail) {
  double worst = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const Field built = generate_binomial(CascadeSpec::binomial(kP, k));
    const Field oracle = bitcount_binomial(kP, k);
    worst = std::max(worst, max_abs_diff(built, oracle));

    // Classify every cell by its exponent and count the classes.
    std::vector<std::uint64_t> counts(k + 1, 0);
    const double lp = std::log2(kP);
    const double lq = std::log2(1.0 - kP);
    for (double mu : built.values()) {
      const double n0 = (std::log2(mu) - k * lq) / (lp - lq);
      const long r = std::lround(n0);
      if (r < 0 || r > k || std::abs(n0 - static_cast<double>(r)) > 1e-6) {
        detail = "cell exponent off the binomial lattice at depth " + std::to_string(k);
        return false;
      }
      ++counts[r];
    }
    for (int n0 = 0; n0 <= k; ++n0) {
      if (counts[n0] != binomial_coefficient(k, n0)) {
        detail = "exponent class " + std::to_string(n0) + " at depth " + std::to_string(k) + " holds " +
                 std::to_string(counts[n0]) + " cells";
        return false;
      }
    }
  }
  detail = fmt("max |cell - bit-count oracle| = %.3g over depths 1..12; class counts equal C(k, n0)", worst);
  return worst <= 1e-12;
}

// 2. Monofractal limit ------------------------------------------------------------

bool monofractal_limit(const Golden& golden, std::string& detail) {
  const Field constant(128, 128, 1, 0.37);
  const ScaleSet scales = ScaleSet::defaults();
  const AlphaMap alpha = holder_map(constant, scales, 0.0);
  const std::size_t border = scales.largest() / 2;
  double worst = 0.0;
  for (std::size_t h = border; h + border < 128; ++h) {
    for (std::size_t w = border; w + border < 128; ++w) {
      worst = std::max(worst, std::abs(alpha(h, w, 0) - golden.monofractal_alpha));
    }
  }
  const double mean = mean_alpha_interior(alpha, border)[0];
  detail = fmt("max interior |alpha - 2| = %.3g, interior mean %.12f", worst, mean);
  return worst <= 1e-9 && std::abs(mean - golden.monofractal_alpha) <= 1e-9;
}

// 3. Multifractal oracle ----------------------------------------------------------

bool multifractal_oracle(const Golden& golden, std::string& detail) {
  const CascadeSpec spec = CascadeSpec::binomial(kP, 10, CascadeDims::kTwoProduct);
  const ScaleSet scales = ScaleSet::defaults();
  const AlphaMap alpha = holder_map(generate_product_2d(spec), scales, 0.0);
  const double mean = mean_alpha_interior(alpha, scales.largest() / 2)[0];

  const DepthSeries series =
      cascade_series(CascadeSpec::binomial(kP, 6, CascadeDims::kTwoProduct), 6, 10);
  const SpectrumPoint peak = histogram_spectrum(series).peak();
  detail = fmt("interior mean alpha %.6f (oracle %.7f); ", mean, golden.product_alpha) +
           fmt("histogram peak at alpha %.4f, f %.4f", peak.alpha, peak.f);
  return std::abs(mean - golden.product_alpha) <= 0.05 && std::abs(peak.f - golden.support_dim) <= 0.1 &&
         std::abs(peak.alpha - golden.product_alpha) <= 0.1;
}

// 4. Moments method -----------------------------------------------------------------

bool moments_method(const Golden& golden, std::string& detail) {
  const DepthSeries series = cascade_series(CascadeSpec::binomial(kP, 8), 8, 12);
  const std::vector<double> q = q_grid(-5.0, 5.0, 0.25);
  const MomentsSpectrum m = moments_spectrum(series, q);
  double worst = 0.0;
  double tau1 = INFINITY;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double oracle = -std::log2(std::pow(kP, q[i]) + std::pow(1.0 - kP, q[i])) + golden.tau_offset;
    worst = std::max(worst, std::abs(m.partition.tau[i] - oracle));
    if (q[i] == 1.0) tau1 = m.partition.tau[i];
  }
  const double excess = m.curve.max_excess_over_alpha();
  detail = fmt("max |tau - oracle| = %.3g, tau(1) = %.3g, ", worst, tau1) +
           fmt("max f - alpha = %.3g", excess);
  return worst <= 0.02 && std::abs(tau1) <= 1e-9 && excess <= 1e-6;
}

// 5. Box dimension ------------------------------------------------------------------

bool box_dimension_check(const Golden& golden, std::string& detail) {
  const ScaleSet scales({2, 4, 8});
  const Field full(64, 64, 1, 1.0);
  Field point(64, 64, 1, 0.0);
  point(17, 40, 0) = 1.0;
  Field line(64, 64, 1, 0.0);
  for (std::size_t w = 0; w < 64; ++w) line(21, w, 0) = 1.0;
  const double d_full = box_dimension(full, scales);
  const double d_point = box_dimension(point, scales);
  const double d_line = box_dimension(line, scales);
  std::ostringstream s;
  s.precision(12);
  s << "full " << d_full << ", point " << d_point << ", line " << d_line;
  detail = s.str();
  return std::abs(d_full - golden.box_full) <= 1e-9 && std::abs(d_point - golden.box_point) <= 1e-9 &&
         std::abs(d_line - golden.box_line) <= 0.05;
}

// 6. Recalibration contracts ------------------------------------------------------------

bool recalibration_contracts(const Golden& golden, bool strict, std::string& detail) {
  Rng rng(2024);
  double worst = 0.0;
  double member_err = 0.0;
  bool dct_exact = true;
  for (int trial = 0; trial < 4; ++trial) {
    const Field x = random_field(rng, 8, 8, 8, 0.0, 2.0);
    const BottleneckMlp mlp = random_mlp(rng, 8, strict);

    worst = std::max(worst, max_abs_diff(se_forward(x, mlp, x).output, brute_se(x, mlp, x)));

    SpatialProjection spatial{std::vector<double>(8), 0.0};
    randomize(spatial.weights, rng, -1.0, 1.0);
    spatial.bias = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    worst = std::max(worst, max_abs_diff(scse_forward(x, mlp, spatial).output, brute_scse(x, mlp, spatial)));

    SrmParams srm{std::vector<double>(8), std::vector<double>(8), NormState::identity(8, NormMode::kFrozen)};
    randomize(srm.w_mean, rng, -1.0, 1.0);
    randomize(srm.w_std, rng, -1.0, 1.0);
    randomize(srm.norm.gamma, rng, 0.5, 1.5);
    randomize(srm.norm.beta, rng, -0.5, 0.5);
    randomize(srm.norm.running_mean, rng, -0.5, 0.5);
    randomize(srm.norm.running_var, rng, 0.5, 2.0);
    worst = std::max(worst, max_abs_diff(srm_forward(x, srm).output, brute_srm(x, srm)));

    for (std::size_t groups : {std::size_t{8}, std::size_t{4}}) {
      const std::vector<FrequencyPair> freqs = lowest_frequencies(groups, 8, 8);
      worst = std::max(worst, max_abs_diff(fca_forward(x, mlp, freqs).output, brute_fca(x, mlp, freqs)));
    }

    MonoParams mono{mlp, NormState::identity(8)};
    randomize(mono.norm.gamma, rng, 0.5, 1.5);
    randomize(mono.norm.beta, rng, -0.5, 0.5);
    const std::vector<Field> batch = {x, random_field(rng, 8, 8, 8, 0.0, 2.0)};
    const MonoOutput mono_out = mono_forward(batch, mono, HolderConfig{});
    const std::vector<Field> mono_ref = brute_mono(batch, mono, {2, 3, 4}, kDefaultEpsilon);
    for (std::size_t b = 0; b < batch.size(); ++b) worst = std::max(worst, max_abs_diff(mono_out.output[b], mono_ref[b]));

    MultiParams multi = MultiParams::spanning(5, -1.5, 1.5);
    randomize(multi.sharpness, rng, 0.5, 2.0);
    randomize(multi.level_norm.gamma, rng, 0.5, 1.5);
    randomize(multi.level_norm.beta, rng, -0.5, 0.5);
    const std::vector<Field> alpha = {random_field(rng, 8, 8, 8, -2.0, 2.0), random_field(rng, 8, 8, 8, -2.0, 2.0)};
    const MultiOutput multi_out = multi_forward(batch, alpha, multi);
    const std::vector<Field> multi_ref = brute_multi(batch, alpha, multi);
    for (std::size_t b = 0; b < batch.size(); ++b) worst = std::max(worst, max_abs_diff(multi_out.output[b], multi_ref[b]));

    for (const Field& a : alpha) {
      const std::vector<Field> p = multi_membership(a, multi);
      for (std::size_t i = 0; i < a.size(); ++i) {
        double total = 0.0;
        for (const Field& pq : p) total += pq.values()[i];
        member_err = std::max(member_err, std::abs(total - golden.membership_total));
      }
    }

    // Integer fixture: the (0,0) squeeze and H * W * GAP are both exact.
    Field ints(8, 8, 8);
    std::uniform_int_distribution<int> pixel(0, 255);
    for (double& v : ints.values()) v = pixel(rng);
    const std::vector<FrequencyPair> dc = {{0, 0}};
    const std::vector<double> squeeze = dct_squeeze(ints, dc);
    const std::vector<double> mean = gap(ints);
    for (std::size_t c = 0; c < 8; ++c) dct_exact = dct_exact && squeeze[c] == 64.0 * mean[c];
  }
  detail = fmt("max |forward - reference| = %.3g, max |sum membership - 1| = %.3g", worst, member_err) +
           (dct_exact ? ", DCT (0,0) squeeze exact" : ", DCT (0,0) squeeze NOT exact");
  return worst <= 1e-9 && member_err <= 1e-12 && dct_exact;
}

// 7. Gradient checks -----------------------------------------------------------------

bool gradient_checks(bool strict, std::string& detail) {
  GradCheckOptions opt;
  opt.use_bias = !strict;
  const GradCheckReport mono = check_mono_gradients(opt);
  const GradCheckReport multi = check_multi_gradients(opt);
  std::ostringstream s;
  s << "mono " << mono.checked << " probes (" << mono.excluded << " near kinks skipped), max rel err "
    << mono.max_relative_error << "; multi " << multi.checked << " probes (" << multi.excluded
    << " skipped), max rel err " << multi.max_relative_error;
  if (mono.failures) s << "; worst mono " << mono.worst;
  if (multi.failures) s << "; worst multi " << multi.worst;
  detail = s.str();
  return mono.passed(opt.probes) && multi.passed(opt.probes);
}

// 8. Excitation threshold -------------------------------------------------------------

bool excitation_threshold_check(const Golden& golden, std::string& detail) {
  Rng rng(99);
  const std::vector<double> spectrum = {10.0, 3.0, 1.0};
  const Matrix a = with_spectrum(spectrum, rng);
  const std::size_t k = linear_excitation_threshold(a, 0.95);

  const std::vector<double> rank_one = {5.0, 0.0, 0.0, 0.0};
  const Matrix r1 = with_spectrum(rank_one, rng);
  bool rank_one_ok = true;
  for (double delta : {0.1, 0.5, 0.95, 1.0}) rank_one_ok = rank_one_ok && linear_excitation_threshold(r1, delta) == 1;

  const std::vector<double> rank_three = {4.0, 2.0, 1.0, 0.0, 0.0};
  const std::size_t full = linear_excitation_threshold(with_spectrum(rank_three, rng), 1.0);

  const std::vector<double> wide = {9.0, 4.0, 2.5, 1.0, 0.5, 0.1};
  const Matrix base = with_spectrum(wide, rng);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix q = random_orthogonal(base.rows(), rng);
    const Matrix conj = q * base * q.transpose();
    // The product is symmetric up to rounding; symmetrize before analysis.
    Matrix sym = conj;
    for (std::size_t i = 0; i < sym.rows(); ++i) {
      for (std::size_t j = i + 1; j < sym.cols(); ++j) {
        sym(i, j) = sym(j, i) = 0.5 * (conj(i, j) + conj(j, i));
      }
    }
    for (double delta : {0.5, 0.8, 0.9, 0.95, 0.99, 1.0}) {
      if (linear_excitation_threshold(sym, delta) != linear_excitation_threshold(base, delta)) ++mismatches;
    }
  }
  detail = "k(0.95) = " + std::to_string(k) + ", rank-1 " + (rank_one_ok ? "ok" : "FAILED") +
           ", k(1) on rank 3 = " + std::to_string(full) + ", conjugation mismatches " + std::to_string(mismatches);
  return static_cast<double>(k) == golden.threshold_k && rank_one_ok && full == 3 && mismatches == 0;
}

// 10. I/O ---------------------------------------------------------------------------------

template <typename Fn>
bool raises(FormatIssue issue, Fn&& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.issue() == issue;
  } catch (...) {
    return false;
  }
  return false;
}

bool bits_equal(const Field& a, const Field& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.values()[i]) != std::bit_cast<std::uint64_t>(b.values()[i])) return false;
  }
  return true;
}

bool io_roundtrips(std::string& detail) {
  Rng rng(5150);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  std::uniform_int_distribution<std::uint64_t> any_bits;
  std::size_t container_fail = 0;
  std::size_t pgm_fail = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Field f(dim(rng), dim(rng), std::uniform_int_distribution<std::size_t>(1, 4)(rng));
    for (double& v : f.values()) {
      // Arbitrary finite bit patterns, including subnormals and -0.
      double x;
      do {
        x = std::bit_cast<double>(any_bits(rng));
      } while (!std::isfinite(x));
      v = x;
    }
    const Bytes bytes = write_field(f);
    const Field back = read_field(bytes);
    if (!bits_equal(f, back) || write_field(back) != bytes) ++container_fail;
    const std::vector<Field> batch = {f, back};
    const std::vector<Field> batch_back = read_field_batch(write_field_batch(batch));
    if (batch_back.size() != 2 || !bits_equal(batch_back[1], f)) ++container_fail;

    const std::uint32_t maxvals[] = {1, 255, 256, 1023, 65535};
    const std::uint32_t maxval = maxvals[trial % 5];
    const std::size_t w = dim(rng) + 3;
    const std::size_t h = dim(rng);
    std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
    Bytes pgm(header.begin(), header.end());
    std::uniform_int_distribution<std::uint32_t> sample(0, maxval);
    for (std::size_t i = 0; i < w * h; ++i) {
      const std::uint32_t s = sample(rng);
      if (maxval > 255) pgm.push_back(static_cast<std::uint8_t>(s >> 8));
      pgm.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
    const Field img = read_pgm(pgm);
    if (write_pgm(img, maxval) != pgm || !bits_equal(read_pgm(write_pgm(img, maxval)), img)) ++pgm_fail;
  }

  const Bytes good = write_field(Field(2, 3, 1, 0.5));
  auto patched = [&](std::size_t pos, std::uint8_t value) {
    Bytes b = good;
    b[pos] = value;
    return b;
  };
  Bytes overflow = {'M', 'F', 'R', '1', 1, 1, 4};
  for (int i = 0; i < 16; ++i) overflow.push_back(0xFF);
  Bytes truncated = good;
  truncated.resize(truncated.size() - 3);
  Bytes zero_dim = patched(7, 0);
  for (int i = 8; i < 11; ++i) zero_dim[i] = 0;
  const std::string pgm_ok = "P5\n# comment\n2 1\n255\n";
  Bytes pgm_short(pgm_ok.begin(), pgm_ok.end());
  pgm_short.push_back(7);
  const std::string zero_max = "P5 1 1 0\n";
  const std::string bad_magic = "P6 1 1 255\n";

  int classes = 0;
  classes += raises(FormatIssue::kBadMagic, [&] { read_field(patched(0, 'X')); });
  classes += raises(FormatIssue::kUnsupportedVersion, [&] { read_field(patched(4, 2)); });
  classes += raises(FormatIssue::kUnsupportedDtype, [&] { read_field(patched(5, 9)); });
  classes += raises(FormatIssue::kBadDims, [&] { read_field(patched(6, 5)); });
  classes += raises(FormatIssue::kBadDims, [&] { read_field(zero_dim); });
  classes += raises(FormatIssue::kDimensionOverflow, [&] { read_field(overflow); });
  classes += raises(FormatIssue::kTruncated, [&] { read_field(truncated); });
  classes += raises(FormatIssue::kBadMagic, [&] { read_pgm(Bytes(bad_magic.begin(), bad_magic.end())); });
  classes += raises(FormatIssue::kBadMaxval, [&] { read_pgm(Bytes(zero_max.begin(), zero_max.end())); });
  classes += raises(FormatIssue::kTruncated, [&] { read_pgm(pgm_short); });
  constexpr int kClasses = 10;

  detail = "50 fixtures: container failures " + std::to_string(container_fail) + ", PGM failures " +
           std::to_string(pgm_fail) + "; malformed inputs classified " + std::to_string(classes) + "/" +
           std::to_string(kClasses);
  return container_fail == 0 && pgm_fail == 0 && classes == kClasses;
}

}  // namespace

Golden Golden::defaults() {
  Golden g;
  g.product_alpha = -std::log2(kP * (1.0 - kP));
  return g;
}

std::vector<std::string> Golden::keys() {
  return {"monofractal_alpha", "product_alpha", "support_dim", "tau_offset", "box_full",
          "box_point",         "box_line",      "membership_total", "threshold_k"};
}

bool Golden::set(const std::string& key, double value) {
  double* slot = key == "monofractal_alpha"  ? &monofractal_alpha
                 : key == "product_alpha"    ? &product_alpha
                 : key == "support_dim"      ? &support_dim
                 : key == "tau_offset"       ? &tau_offset
                 : key == "box_full"         ? &box_full
                 : key == "box_point"        ? &box_point
                 : key == "box_line"         ? &box_line
                 : key == "membership_total" ? &membership_total
                 : key == "threshold_k"      ? &threshold_k
                                             : nullptr;
  if (slot == nullptr) return false;
  *slot = value;
  return true;
}

bool AcceptanceReport::passed() const noexcept {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& r) { return r.passed; });
}

std::map<std::string, Bytes> build_artifacts(const AcceptanceOptions& options) {
  const bool strict = options.strict_paper;
  std::map<std::string, Bytes> out;
  auto text = [](const std::string& s) { return Bytes(s.begin(), s.end()); };

  out["cascade_1d_k12.mfr"] = write_field(generate_binomial(CascadeSpec::binomial(kP, 12)));

  const CascadeSpec product = CascadeSpec::binomial(kP, 8, CascadeDims::kTwoProduct);
  const Field measure = generate_product_2d(product);
  const AlphaMap alpha = holder_map(measure, ScaleSet::defaults(), 0.0);
  out["holder_product_k8.mfr"] = write_field(alpha);
  out["clt_product_k8.csv"] = text(write_spectrum_csv(clt_spectrum(alpha, 8, 2.0)));

  const DepthSeries series2d = cascade_series(CascadeSpec::binomial(kP, 6, CascadeDims::kTwoProduct), 6, 10);
  out["histogram_product.csv"] = text(write_spectrum_csv(histogram_spectrum(series2d)));

  const MomentsSpectrum moments =
      moments_spectrum(cascade_series(CascadeSpec::binomial(kP, 8), 8, 12), q_grid(-5.0, 5.0, 0.25));
  out["moments_1d.csv"] = text(write_spectrum_csv(moments.curve));
  std::vector<std::vector<double>> rows;
  const PartitionFunction& pf = moments.partition;
  for (std::size_t i = 0; i < pf.q_values.size(); ++i) {
    rows.push_back({pf.q_values[i], pf.tau[i], pf.alpha[i], pf.f[i], static_cast<double>(pf.one_sided[i])});
  }
  out["tau_1d.csv"] = text(write_table_csv({"q", "tau", "alpha", "f", "one_sided"}, rows));

  const ScaleSet boxes({2, 4, 8});
  Field support(64, 64, 1, 0.0);
  for (std::size_t i = 0; i < 64; ++i) support(i, i, 0) = 1.0;
  out["box_dimension.csv"] =
      text(write_table_csv({"full", "diagonal"}, {{box_dimension(Field(64, 64, 1, 1.0), boxes), box_dimension(support, boxes)}}));

  // Recalibration on a fixed batch; gates of 32 instances feed the
  // excitation analysis.
  Rng rng(31337);
  std::vector<Field> batch;
  for (int b = 0; b < 32; ++b) batch.push_back(random_field(rng, 16, 16, 8, 0.0, 1.0));
  MonoParams mono{random_mlp(rng, 8, strict), NormState::identity(8)};
  const MonoOutput mono_out = mono_forward(batch, mono, HolderConfig{});
  out["mono_output.mfr"] = write_field_batch(mono_out.output);
  std::vector<std::vector<double>> gates;
  for (const MlpTrace& t : mono_out.trace) gates.push_back(t.gates);
  out["mono_gates.json"] = text(gates_record("mono", gates));

  const std::vector<Field> normalized = normalize_batch_with(mono_out.alpha, NormState::identity(8));
  MultiParams multi = MultiParams::spanning(16, -2.0, 2.0);
  const MultiOutput multi_out = multi_forward(batch, normalized, multi);
  out["multi_output.mfr"] = write_field_batch(multi_out.output);

  Matrix e(gates.size(), 8);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    for (std::size_t c = 0; c < 8; ++c) e(i, c) = gates[i][c];
  }
  const bool centered = !strict;
  out["excitation_threshold.json"] =
      text(threshold_record(excitation_threshold(excitation_covariance(e, centered), 0.95), centered));

  Field image = generate_product_2d(CascadeSpec::binomial(kP, 5, CascadeDims::kTwoProduct));
  double top = 0.0;
  for (double v : image.values()) top = std::max(top, v);
  for (double& v : image.values()) v /= top;
  out["product_k5.pgm"] = write_pgm(image, 65535);
  return out;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
  const Golden& g = options.golden;
  const bool strict = options.strict_paper;
  const std::string mode = strict ? "strict-paper" : "default";
  AcceptanceReport report;
  auto& c = report.criteria;
  c.push_back(run(1, "cascade exactness", 1.0, mode, cascade_exactness));
  c.push_back(run(2, "monofractal limit", 1.0, mode, [&](std::string& d) { return monofractal_limit(g, d); }));
  c.push_back(run(3, "multifractal oracle", 30.0, mode, [&](std::string& d) { return multifractal_oracle(g, d); }));
  c.push_back(run(4, "moments method", 30.0, mode, [&](std::string& d) { return moments_method(g, d); }));
  c.push_back(run(5, "box dimension", 1.0, mode, [&](std::string& d) { return box_dimension_check(g, d); }));
  c.push_back(run(6, "recalibration contracts", 5.0, mode,
                  [&](std::string& d) { return recalibration_contracts(g, strict, d); }));
  c.push_back(run(7, "gradient checks", 60.0, mode, [&](std::string& d) { return gradient_checks(strict, d); }));
  c.push_back(run(8, "excitation threshold", 5.0, mode,
                  [&](std::string& d) { return excitation_threshold_check(g, d); }));
  c.push_back(run(9, "determinism", 0.0, mode, [&](std::string& d) {
    const std::size_t current = thread_count();
    const std::size_t other = options.alternate_threads != 0 ? options.alternate_threads : (current == 1 ? 4 : 1);
    report.artifacts = build_artifacts(options);
    set_thread_count(other);
    std::map<std::string, Bytes> second;
    try {
      second = build_artifacts(options);
    } catch (...) {
      set_thread_count(current);
      throw;
    }
    set_thread_count(current);
    std::size_t differing = 0;
    for (const auto& [name, bytes] : report.artifacts) {
      const auto it = second.find(name);
      if (it == second.end() || it->second != bytes) ++differing;
    }
    d = std::to_string(report.artifacts.size()) + " artifacts compared at " + std::to_string(current) + " and " +
        std::to_string(other) + " workers, " + std::to_string(differing) + " differ";
    return differing == 0 && second.size() == report.artifacts.size();
  }));
  c.push_back(run(10, "io round-trips", 0.0, mode, io_roundtrips));
  return report;
}

std::string format_result(const CriterionResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "[%s] %2d %s (%.3f s, %s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.mode.c_str());
  return head + r.detail;
}

}  // namespace mfcal::verify
