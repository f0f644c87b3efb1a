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

#include "mfcal/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfcal::verify {

Field brute_window_sum(const Field& field, std::size_t side) {
  const long H = static_cast<long>(field.height());
  const long W = static_cast<long>(field.width());
  const long before = static_cast<long>(side / 2);
  const long after = static_cast<long>(side) - 1 - before;
  Field out(field.height(), field.width(), field.channels());
  for (long h = 0; h < H; ++h) {
    for (long w = 0; w < W; ++w) {
      for (std::size_t c = 0; c < field.channels(); ++c) {
        double s = 0.0;
        for (long y = std::max(0L, h - before); y <= std::min(H - 1, h + after); ++y) {
          for (long x = std::max(0L, w - before); x <= std::min(W - 1, w + after); ++x) {
            s += field(y, x, c);
          }
        }
        out(h, w, c) = s;
      }
    }
  }
  return out;
}

int zero_bits(std::uint64_t i, int depth) {
  int zeros = 0;
  for (int b = 0; b < depth; ++b) zeros += ((i >> b) & 1U) == 0 ? 1 : 0;
  return zeros;
}

Field bitcount_binomial(double p, int depth) {
  const std::size_t n = std::size_t{1} << depth;
  Field out(1, n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int n0 = zero_bits(i, depth);
    out(0, i, 0) = std::pow(p, n0) * std::pow(1.0 - p, depth - n0);
  }
  return out;
}

std::uint64_t binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

Field brute_holder_map(const Field& field, const std::vector<std::size_t>& sides, double eps) {
  std::vector<Field> sums;
  for (std::size_t s : sides) sums.push_back(brute_window_sum(field, s));
  const std::size_t r = sides.size();
  double xbar = 0.0;
  for (std::size_t s : sides) xbar += std::log(static_cast<double>(s));
  xbar /= static_cast<double>(r);
  Field out(field.height(), field.width(), field.channels());
  for (std::size_t i = 0; i < field.size(); ++i) {
    double ybar = 0.0;
    for (std::size_t k = 0; k < r; ++k) ybar += std::log(sums[k].values()[i] + eps);
    ybar /= static_cast<double>(r);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double dx = std::log(static_cast<double>(sides[k])) - xbar;
      sxy += dx * (std::log(sums[k].values()[i] + eps) - ybar);
      sxx += dx * dx;
    }
    out.values()[i] = sxy / sxx;
  }
  return out;
}

std::vector<double> brute_gap(const Field& stack) {
  std::vector<double> out(stack.channels(), 0.0);
  for (std::size_t c = 0; c < stack.channels(); ++c) {
    for (std::size_t h = 0; h < stack.height(); ++h) {
      for (std::size_t w = 0; w < stack.width(); ++w) out[c] += stack(h, w, c);
    }
    out[c] /= static_cast<double>(stack.pixels());
  }
  return out;
}

std::vector<double> brute_gsp(const Field& stack) {
  const std::vector<double> m = brute_gap(stack);
  std::vector<double> out(stack.channels(), 0.0);
  for (std::size_t c = 0; c < stack.channels(); ++c) {
    for (std::size_t h = 0; h < stack.height(); ++h) {
      for (std::size_t w = 0; w < stack.width(); ++w) {
        out[c] += (stack(h, w, c) - m[c]) * (stack(h, w, c) - m[c]);
      }
    }
    out[c] = std::sqrt(out[c] / static_cast<double>(stack.pixels()));
  }
  return out;
}

std::vector<double> brute_mlp_gates(const BottleneckMlp& mlp, const std::vector<double>& s) {
  std::vector<double> hidden(mlp.hidden);
  for (std::size_t j = 0; j < mlp.hidden; ++j) {
    double z = 0.0;
    for (std::size_t c = 0; c < mlp.channels; ++c) z += mlp.w1[j * mlp.channels + c] * s[c];
    if (mlp.use_bias) z += mlp.b1[j];
    hidden[j] = std::max(0.0, z);
  }
  std::vector<double> gates(mlp.channels);
  for (std::size_t c = 0; c < mlp.channels; ++c) {
    double z = 0.0;
    for (std::size_t j = 0; j < mlp.hidden; ++j) z += mlp.w2[c * mlp.hidden + j] * hidden[j];
    if (mlp.use_bias) z += mlp.b2[c];
    gates[c] = 1.0 / (1.0 + std::exp(-z));
  }
  return gates;
}

namespace {

Field times_gates(const Field& stack, const std::vector<double>& g) {
  Field out = stack;
  for (std::size_t h = 0; h < stack.height(); ++h) {
    for (std::size_t w = 0; w < stack.width(); ++w) {
      for (std::size_t c = 0; c < stack.channels(); ++c) out(h, w, c) = stack(h, w, c) * g[c];
    }
  }
  return out;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Field brute_se(const Field& stack, const BottleneckMlp& mlp, const Field& source) {
  return times_gates(stack, brute_mlp_gates(mlp, brute_gap(source)));
}

Field brute_scse(const Field& stack, const BottleneckMlp& mlp, const SpatialProjection& spatial) {
  const Field channel = brute_se(stack, mlp, stack);
  Field out = stack;
  for (std::size_t h = 0; h < stack.height(); ++h) {
    for (std::size_t w = 0; w < stack.width(); ++w) {
      double z = spatial.bias;
      for (std::size_t c = 0; c < stack.channels(); ++c) z += spatial.weights[c] * stack(h, w, c);
      const double s = logistic(z);
      for (std::size_t c = 0; c < stack.channels(); ++c) {
        out(h, w, c) = std::max(channel(h, w, c), stack(h, w, c) * s);
      }
    }
  }
  return out;
}

Field brute_srm(const Field& stack, const SrmParams& p) {
  const std::vector<double> m = brute_gap(stack);
  const std::vector<double> s = brute_gsp(stack);
  std::vector<double> g(stack.channels());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double t = p.w_mean[c] * m[c] + p.w_std[c] * s[c];
    const double n = p.norm.gamma[c] * (t - p.norm.running_mean[c]) /
                         std::sqrt(p.norm.running_var[c] + p.norm.variance_floor) +
                     p.norm.beta[c];
    g[c] = logistic(n);
  }
  return times_gates(stack, g);
}

Field brute_fca(const Field& stack, const BottleneckMlp& mlp, const std::vector<FrequencyPair>& freqs) {
  const double pi = 3.14159265358979323846;
  const std::size_t H = stack.height();
  const std::size_t W = stack.width();
  const std::size_t per = stack.channels() / freqs.size();
  std::vector<double> squeeze(stack.channels(), 0.0);
  for (std::size_t c = 0; c < stack.channels(); ++c) {
    const FrequencyPair f = freqs[c / per];
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        squeeze[c] += stack(h, w, c) * std::cos(pi * f.i * (h + 0.5) / H) * std::cos(pi * f.j * (w + 0.5) / W);
      }
    }
  }
  return times_gates(stack, brute_mlp_gates(mlp, squeeze));
}

std::vector<Field> brute_normalize(const std::vector<Field>& batch, const NormState& state) {
  const std::size_t C = batch.front().channels();
  std::vector<double> mean(C, 0.0);
  std::vector<double> var(C, 0.0);
  if (state.mode == NormMode::kFrozen) {
    mean = state.running_mean;
    var = state.running_var;
  } else {
    double n = 0.0;
    for (const Field& f : batch) n += static_cast<double>(f.pixels());
    for (std::size_t c = 0; c < C; ++c) {
      for (const Field& f : batch) {
        for (std::size_t h = 0; h < f.height(); ++h) {
          for (std::size_t w = 0; w < f.width(); ++w) mean[c] += f(h, w, c);
        }
      }
      mean[c] /= n;
      for (const Field& f : batch) {
        for (std::size_t h = 0; h < f.height(); ++h) {
          for (std::size_t w = 0; w < f.width(); ++w) var[c] += (f(h, w, c) - mean[c]) * (f(h, w, c) - mean[c]);
        }
      }
      var[c] /= n;
    }
  }
  std::vector<Field> out = batch;
  for (Field& f : out) {
    for (std::size_t h = 0; h < f.height(); ++h) {
      for (std::size_t w = 0; w < f.width(); ++w) {
        for (std::size_t c = 0; c < C; ++c) {
          f(h, w, c) = state.gamma[c] * (f(h, w, c) - mean[c]) / std::sqrt(var[c] + state.variance_floor) +
                       state.beta[c];
        }
      }
    }
  }
  return out;
}

std::vector<Field> brute_mono(const std::vector<Field>& batch, const MonoParams& params,
                              const std::vector<std::size_t>& sides, double eps) {
  std::vector<Field> alpha;
  for (const Field& x : batch) alpha.push_back(brute_holder_map(x, sides, eps));
  const std::vector<Field> normalized = brute_normalize(alpha, params.norm);
  std::vector<Field> out;
  for (std::size_t b = 0; b < batch.size(); ++b) out.push_back(brute_se(batch[b], params.mlp, normalized[b]));
  return out;
}

std::vector<Field> brute_membership(const Field& alpha, const MultiParams& params) {
  const std::size_t Q = params.centers.size();
  std::vector<Field> out(Q, Field(alpha.height(), alpha.width(), alpha.channels()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double denom = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      const double d = alpha.values()[i] - params.centers[q];
      denom += std::exp(-params.sharpness[q] * d * d);
    }
    for (std::size_t q = 0; q < Q; ++q) {
      const double d = alpha.values()[i] - params.centers[q];
      out[q].values()[i] = std::exp(-params.sharpness[q] * d * d) / denom;
    }
  }
  return out;
}

std::vector<Field> brute_multi(const std::vector<Field>& stack, const std::vector<Field>& alpha,
                               const MultiParams& params) {
  const std::size_t Q = params.centers.size();
  const std::size_t B = stack.size();
  std::vector<std::vector<Field>> member;
  for (const Field& a : alpha) member.push_back(brute_membership(a, params));
  std::vector<Field> out = stack;
  std::vector<Field> acc(B, Field(stack.front().height(), stack.front().width(), stack.front().channels()));
  for (std::size_t q = 0; q < Q; ++q) {
    double mean = params.level_norm.running_mean[q];
    double var = params.level_norm.running_var[q];
    if (params.level_norm.mode != NormMode::kFrozen) {
      double n = 0.0;
      mean = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        for (double v : member[b][q].values()) {
          mean += v;
          n += 1.0;
        }
      }
      mean /= n;
      var = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        for (double v : member[b][q].values()) var += (v - mean) * (v - mean);
      }
      var /= n;
    }
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < acc[b].size(); ++i) {
        const double z = params.level_norm.gamma[q] * (member[b][q].values()[i] - mean) /
                             std::sqrt(var + params.level_norm.variance_floor) +
                         params.level_norm.beta[q];
        acc[b].values()[i] += std::max(0.0, z);
      }
    }
  }
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < out[b].size(); ++i) out[b].values()[i] += logistic(acc[b].values()[i]);
  }
  return out;
}

double max_abs_diff(const Field& a, const Field& b) {
  if (!a.same_shape(b)) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a.values()[i] - b.values()[i]);
    if (!(d <= worst)) worst = d;
  }
  return worst;
}

}  // namespace mfcal::verify
