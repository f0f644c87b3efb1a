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


#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "mfcal/error.hpp"
#include "mfcal/parallel.hpp"

namespace {

using mfcal::cli::RunConfig;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

int exit_code(const mfcal::Error& e) {
  switch (e.kind()) {
    case mfcal::ErrorKind::kInvalidArgument:
      return kExitUsage;
    case mfcal::ErrorKind::kIo:
    case mfcal::ErrorKind::kFormat:
      return kExitIo;
    case mfcal::ErrorKind::kNumerical:
      return kExitNumerical;
  }
  return 1;
}

const std::vector<std::string> kSubcommands = {"cascade",  "holder",   "spectrum", "recalibrate",
                                               "excite",   "selftest", "bench"};

// Pulls `--config path` or `--config=path` out of the arguments before the
// subcommand. Returns an empty string when absent.
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    for (const std::string& s : kSubcommands) {
      if (a == s) return {};
    }
    if (a == "--config" && i + 1 < args.size()) return args[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void add_scales(CLI::App* app, RunConfig& c) {
  app->add_option("--scales", c.scales, "Window sides, ascending")->delimiter(',')->capture_default_str();
  app->add_option("--epsilon", c.epsilon, "Offset added to box masses before the log")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);

  CLI::App app{"Multifractal measures, exponent maps, spectra and recalibration blocks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mfcal 0.1.0");

  RunConfig c;
  std::size_t threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "Worker count cap")->envname("MFCAL_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "key=value file; flags override its values");
  app.add_flag("--strict-paper-mode", c.strict_paper, "MLPs without biases; uncentered covariance");

  auto* cascade = app.add_subcommand("cascade", "Generate a deterministic cascade measure");
  cascade->add_option("--p", c.p, "Binomial weight in (0, 1)")->capture_default_str();
  cascade->add_option("--depth", c.depth, "Subdivision depth")->capture_default_str();
  cascade->add_option("--dims", c.dims, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
  cascade->add_option("--weights", c.weights, "Explicit weights summing to 1")->delimiter(',');
  cascade->add_option("--output", c.output, "Field container path");
  cascade->add_flag("--spectrum", c.spectrum, "Also write the analytic spectrum CSV");
  cascade->add_option("--csv", c.spectrum_output, "Spectrum CSV path (default: output with .csv)");
  cascade->add_option("--points", c.spectrum_points, "Analytic spectrum samples")->capture_default_str();
  cascade->add_option("--seed", c.seed, "Seed")->capture_default_str();

  auto* holder = app.add_subcommand("holder", "Compute the local Holder exponent map");
  holder->add_option("--input", c.input, "Field container or binary PGM");
  holder->add_option("--output", c.output, "Exponent map container");
  add_scales(holder, c);
  holder->add_option("--means", c.means_output, "Per-channel mean JSON path (default: stdout)");
  holder->add_option("--seed", c.seed, "Seed");

  auto* spectrum = app.add_subcommand("spectrum", "Estimate a multifractal spectrum");
  spectrum->add_option("--method", c.method, "histogram, moments or clt")
      ->required()
      ->check(CLI::IsMember({"histogram", "moments", "clt"}));
  spectrum->add_option("--input", c.input, "Finest-level measure; coarser levels are pooled from it");
  spectrum->add_option("--p", c.p, "Cascade weight when no input is given")->capture_default_str();
  spectrum->add_option("--dims", c.dims, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
  spectrum->add_option("--kmin", c.k_min, "Shallowest depth (default 8, or 6 in 2-D)");
  spectrum->add_option("--kmax", c.k_max, "Deepest depth (default 12, or 10 in 2-D)");
  spectrum->add_option("--bins", c.bins, "Histogram bins")->capture_default_str();
  spectrum->add_option("--bandwidth", c.bandwidth, "Log-mass kernel bandwidth (0 = automatic)");
  spectrum->add_option("--q-min", c.q_min, "Lowest moment order")->capture_default_str();
  spectrum->add_option("--q-max", c.q_max, "Highest moment order")->capture_default_str();
  spectrum->add_option("--q-step", c.q_step, "Moment order step")->capture_default_str();
  spectrum->add_option("--tau-output", c.tau_output, "q,tau,alpha,f,one_sided table (moments)");
  spectrum->add_option("--k", c.clt_k, "Depth used by the clt method (default --kmax)");
  spectrum->add_option("--support-dim", c.support_dim, "Support dimension for clt (default from --dims)");
  add_scales(spectrum, c);
  spectrum->add_option("--output", c.output, "Spectrum CSV path");
  spectrum->add_option("--seed", c.seed, "Seed");

  auto* recal = app.add_subcommand("recalibrate", "Run a channel recalibration block");
  recal->add_option("--method", c.method, "cse, scse, srm, fca, mono or multi")
      ->required()
      ->check(CLI::IsMember({"cse", "scse", "srm", "fca", "mono", "multi"}));
  recal->add_option("--input", c.input, "Feature stack container");
  recal->add_option("--output", c.output, "Recalibrated stack container");
  recal->add_option("--gates", c.gates_output, "Gates JSON path");
  recal->add_option("--params", c.params, "Parameter JSON (default: random from --seed)");
  recal->add_option("--reduction", c.reduction, "MLP reduction ratio")->check(CLI::PositiveNumber)->capture_default_str();
  recal->add_option("--Q", c.levels, "Level sets for multi")->check(CLI::PositiveNumber)->capture_default_str();
  recal->add_option("--frequencies", c.frequencies, "DCT frequencies for fca")->check(CLI::PositiveNumber)->capture_default_str();
  recal->add_option("--norm", c.norm, "auto, frozen, batch or accumulate")
      ->check(CLI::IsMember({"auto", "frozen", "batch", "accumulate"}))
      ->capture_default_str();
  add_scales(recal, c);
  recal->add_option("--seed", c.seed, "Seed")->capture_default_str();

  auto* excite = app.add_subcommand("excite", "Excitation threshold of a gate covariance");
  excite->add_option("--input", c.input, "Gates JSON from recalibrate");
  excite->add_option("--singular-values", c.singular_values, "Build a fixture with this spectrum")->delimiter(',');
  excite->add_option("--delta", c.delta, "Energy fraction in (0, 1]")->capture_default_str();
  bool centered = true;
  excite->add_flag("--centered,!--uncentered", centered, "Center the covariance (default)");
  excite->add_option("--output", c.output, "JSON path (default: stdout)");
  excite->add_option("--seed", c.seed, "Seed for the fixture rotation")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_flag("--json", c.json, "Machine-readable results");
  selftest->add_option("--golden", c.golden, "Override a reference value (key=value)")->take_all();
  selftest->add_option("--artifacts", c.artifacts, "Directory for the produced artifacts");
  selftest->add_option("--alternate-threads", c.alternate_threads, "Second worker count for determinism");

  auto* bench = app.add_subcommand("bench", "Time the exponent map on wide stacks");
  bench->add_option("--reps", c.reps, "Repetitions per width")->capture_default_str();
  bench->add_option("--channels", c.channels, "Channel widths")->delimiter(',')->capture_default_str();
  bench->add_option("--size", c.size, "Height and width")->check(CLI::PositiveNumber)->capture_default_str();
  add_scales(bench, c);
  bench->add_option("--output", c.output, "CSV path (default: stdout)");
  bench->add_option("--seed", c.seed, "Seed")->capture_default_str();

  try {
    const std::string config = find_config(args);
    if (!config.empty()) {
      args = mfcal::cli::apply_config_file(args, config, kSubcommands, {"threads"}, {"strict-paper-mode"});
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const mfcal::Error& e) {
    std::cerr << "mfcal: " << e.what() << '\n';
    return exit_code(e);
  }

  try {
    if (threads > 0) mfcal::set_thread_count(threads);
    c.uncentered = !centered;
    if (*cascade) return mfcal::cli::run_cascade(c);
    if (*holder) return mfcal::cli::run_holder(c);
    if (*spectrum) return mfcal::cli::run_spectrum(c);
    if (*recal) return mfcal::cli::run_recalibrate(c);
    if (*excite) return mfcal::cli::run_excite(c);
    if (*selftest) return mfcal::cli::run_selftest(c);
    if (*bench) return mfcal::cli::run_bench(c);
  } catch (const mfcal::Error& e) {
    std::cerr << "mfcal: " << e.what() << '\n';
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "mfcal: malformed JSON: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "mfcal: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
