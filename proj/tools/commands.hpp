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

#include <cstdint>
#include <string>
#include <vector>

namespace mfcal::cli {

/// Every flag of every subcommand; each subcommand reads the fields it owns.
struct RunConfig {
  std::string input;
  std::string output;
  bool strict_paper = false;
  std::uint64_t seed = 1;

  // cascade
  double p = 2.0 / 3.0;
  int depth = 10;
  int dims = 1;
  std::vector<double> weights;
  bool spectrum = false;
  std::string spectrum_output;
  int spectrum_points = 101;

  // holder
  std::vector<std::size_t> scales = {2, 3, 4};
  double epsilon = 1e-6;
  std::string means_output;

  // spectrum
  std::string method;
  int k_min = 0;
  int k_max = 0;
  int bins = 32;
  double bandwidth = 0.0;
  double q_min = -5.0;
  double q_max = 5.0;
  double q_step = 0.25;
  std::string tau_output;
  int clt_k = 0;
  double support_dim = 0.0;

  // recalibrate
  std::string params;
  std::string gates_output;
  std::size_t reduction = 2;
  std::size_t levels = 16;
  std::size_t frequencies = 16;
  std::string norm = "auto";

  // excite
  double delta = 0.95;
  std::vector<double> singular_values;
  bool uncentered = false;

  // selftest
  bool json = false;
  std::vector<std::string> golden;
  std::string artifacts;
  std::size_t alternate_threads = 0;

  // bench
  int reps = 30;
  std::size_t size = 224;
  std::vector<std::size_t> channels = {32, 64, 128};
};

int run_cascade(const RunConfig& c);
int run_holder(const RunConfig& c);
int run_spectrum(const RunConfig& c);
int run_recalibrate(const RunConfig& c);
int run_excite(const RunConfig& c);
int run_selftest(const RunConfig& c);
int run_bench(const RunConfig& c);

/// Inserts `--key value` pairs from a key=value file into argv. Pairs whose
/// flag already appears on the command line are skipped, so flags win.
/// Keys naming global options go before the subcommand, others after it.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args,
                                           const std::string& path,
                                           const std::vector<std::string>& subcommands,
                                           const std::vector<std::string>& global_keys,
                                           const std::vector<std::string>& global_flags);

}  // namespace mfcal::cli
