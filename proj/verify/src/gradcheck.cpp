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

#include "mfcal/verify/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mfcal/attention.hpp"

namespace mfcal::verify {
namespace {

constexpr std::size_t kH = 2;
constexpr std::size_t kW = 2;
constexpr std::size_t kC = 4;
constexpr std::size_t kBatch = 2;
constexpr std::size_t kProbesPerFixture = 20;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<Field> random_batch(Rng& rng, double lo, double hi) {
  std::vector<Field> batch;
  for (std::size_t b = 0; b < kBatch; ++b) {
    Field f(kH, kW, kC);
    for (double& v : f.values()) v = uniform(rng, lo, hi);
    batch.push_back(std::move(f));
  }
  return batch;
}

double weighted_sum(const std::vector<Field>& out, const std::vector<Field>& upstream) {
  double s = 0.0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    for (std::size_t i = 0; i < out[b].size(); ++i) s += out[b].values()[i] * upstream[b].values()[i];
  }
  return s;
}

// A scalar slot of the problem: where to perturb and where to read the
// analytic derivative.
struct Slot {
  std::string name;
  double* value;
  double analytic;
};

void record(GradCheckReport& report, const GradCheckOptions& opt, const Slot& slot, double numeric) {
  const double denom = std::max({std::abs(slot.analytic), std::abs(numeric), opt.scale_floor});
  const double rel = std::abs(slot.analytic - numeric) / denom;
  ++report.checked;
  if (!(rel < opt.tolerance)) ++report.failures;
  if (!(rel <= report.max_relative_error)) {
    report.max_relative_error = rel;
    report.worst = slot.name + ": analytic " + std::to_string(slot.analytic) + ", numeric " +
                   std::to_string(numeric);
  }
}

// Runs the probes of one fixture. `loss` evaluates the objective and
// reports whether every ReLU input stays clear of the kink.
void probe_fixture(GradCheckReport& report, const GradCheckOptions& opt, Rng& rng,
                   std::vector<std::vector<Slot>>& groups, std::size_t count,
                   const std::function<double(bool&)>& loss) {
  bool clear = true;
  loss(clear);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<Slot>& group = groups[std::uniform_int_distribution<std::size_t>(0, groups.size() - 1)(rng)];
    Slot& slot = group[std::uniform_int_distribution<std::size_t>(0, group.size() - 1)(rng)];
    if (!clear) {
      ++report.excluded;
      continue;
    }
    const double saved = *slot.value;
    bool clear_plus = true;
    bool clear_minus = true;
    *slot.value = saved + opt.step;
    const double plus = loss(clear_plus);
    *slot.value = saved - opt.step;
    const double minus = loss(clear_minus);
    *slot.value = saved;
    if (!clear_plus || !clear_minus) {
      ++report.excluded;
      continue;
    }
    record(report, opt, slot, (plus - minus) / (2.0 * opt.step));
  }
}

std::vector<Slot> slots(const std::string& name, std::vector<double>& values,
                        const std::vector<double>& grads) {
  std::vector<Slot> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({name + "[" + std::to_string(i) + "]", &values[i], grads[i]});
  }
  return out;
}

std::vector<Slot> field_slots(const std::string& name, std::vector<Field>& fields,
                              const std::vector<Field>& grads) {
  std::vector<Slot> out;
  for (std::size_t b = 0; b < fields.size(); ++b) {
    for (std::size_t i = 0; i < fields[b].size(); ++i) {
      out.push_back({name + "[" + std::to_string(b) + "][" + std::to_string(i) + "]",
                     &fields[b].values()[i], grads[b].values()[i]});
    }
  }
  return out;
}

NormState random_norm(Rng& rng, std::size_t n, bool frozen) {
  NormState s = NormState::identity(n, frozen ? NormMode::kFrozen : NormMode::kPerInstance);
  for (std::size_t i = 0; i < n; ++i) {
    s.gamma[i] = uniform(rng, 0.5, 1.5);
    s.beta[i] = uniform(rng, -0.5, 0.5);
    s.running_mean[i] = uniform(rng, -0.2, 0.4);
    s.running_var[i] = uniform(rng, 0.05, 0.5);
  }
  return s;
}

}  // namespace

GradCheckReport check_mono_gradients(const GradCheckOptions& opt) {
  GradCheckReport report;
  Rng rng(opt.seed);
  const HolderConfig holder;
  for (std::size_t fixture = 0; report.checked < opt.probes && fixture < 200; ++fixture) {
    std::vector<Field> x = random_batch(rng, 0.2, 1.5);
    std::vector<Field> up = random_batch(rng, -1.0, 1.0);
    MonoParams params;
    params.mlp = BottleneckMlp::glorot(kC, 2, rng);
    params.mlp.use_bias = opt.use_bias;
    if (opt.use_bias) {
      for (double& b : params.mlp.b1) b = uniform(rng, -0.3, 0.3);
      for (double& b : params.mlp.b2) b = uniform(rng, -0.3, 0.3);
    }
    params.norm = random_norm(rng, kC, fixture % 2 == 1);
    if (fixture % 2 == 1) {
      // Frozen statistics near the actual exponent range.
      for (double& m : params.norm.running_mean) m += 2.0;
    }

    const MonoGradients g = mono_backward(x, params, holder, up);
    std::vector<std::vector<Slot>> groups = {
        slots("w1", params.mlp.w1, g.mlp.w1), slots("w2", params.mlp.w2, g.mlp.w2),
        slots("gamma", params.norm.gamma, g.gamma), slots("beta", params.norm.beta, g.beta),
        field_slots("stack", x, g.stack)};
    if (opt.use_bias) {
      groups.push_back(slots("b1", params.mlp.b1, g.mlp.b1));
      groups.push_back(slots("b2", params.mlp.b2, g.mlp.b2));
    }
    const std::size_t count = std::min(kProbesPerFixture, opt.probes - report.checked);
    probe_fixture(report, opt, rng, groups, count, [&](bool& clear) {
      const MonoOutput out = mono_forward(x, params, holder);
      for (const MlpTrace& t : out.trace) {
        for (double z : t.pre_hidden) clear = clear && std::abs(z) > opt.kink_margin;
      }
      return weighted_sum(out.output, up);
    });
  }
  return report;
}

GradCheckReport check_multi_gradients(const GradCheckOptions& opt) {
  constexpr std::size_t kLevels = 4;
  GradCheckReport report;
  Rng rng(opt.seed + 1);
  for (std::size_t fixture = 0; report.checked < opt.probes && fixture < 200; ++fixture) {
    std::vector<Field> x = random_batch(rng, 0.0, 1.0);
    std::vector<Field> alpha = random_batch(rng, -1.5, 1.5);
    std::vector<Field> up = random_batch(rng, -1.0, 1.0);
    const bool frozen = fixture % 2 == 1;
    MultiParams params = MultiParams::spanning(kLevels, -1.2, 1.2);
    for (double& c : params.centers) c += uniform(rng, -0.2, 0.2);
    for (double& s : params.sharpness) s = uniform(rng, 0.5, 2.0);
    params.level_norm = random_norm(rng, kLevels, frozen);
    if (frozen) {
      for (double& m : params.level_norm.running_mean) m = uniform(rng, 0.1, 0.4);
      for (double& v : params.level_norm.running_var) v = uniform(rng, 0.02, 0.1);
    }

    const MultiGradients g = multi_backward(x, alpha, params, up);
    std::vector<std::vector<Slot>> groups = {
        slots("centers", params.centers, g.centers),
        slots("sharpness", params.sharpness, g.sharpness),
        slots("gamma", params.level_norm.gamma, g.gamma),
        slots("beta", params.level_norm.beta, g.beta),
        field_slots("stack", x, g.stack),
        field_slots("alpha", alpha, g.alpha)};
    const std::size_t count = std::min(kProbesPerFixture, opt.probes - report.checked);
    probe_fixture(report, opt, rng, groups, count, [&](bool& clear) {
      const MultiOutput out = multi_forward(x, alpha, params);
      for (const auto& per_level : out.normalized) {
        for (const Field& z : per_level) {
          for (double v : z.values()) clear = clear && std::abs(v) > opt.kink_margin;
        }
      }
      return weighted_sum(out.output, up);
    });
  }
  return report;
}

}  // namespace mfcal::verify
