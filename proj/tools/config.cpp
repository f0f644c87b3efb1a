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


#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "commands.hpp"
#include "mfcal/error.hpp"
#include "mfcal/io.hpp"

namespace mfcal::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// True when `--key` or `--key=...` already appears in args.
bool mentioned(const std::vector<std::string>& args, const std::string& flag) {
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> apply_config_file(const std::vector<std::string>& args,
                                           const std::string& path,
                                           const std::vector<std::string>& subcommands,
                                           const std::vector<std::string>& global_keys,
                                           const std::vector<std::string>& global_flags) {
  const std::string text = read_text(path);
  std::vector<std::string> global_extra;
  std::vector<std::string> local_extra;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw_invalid("config line " + std::to_string(line_no) + ": expected key=value: " + path);
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw_invalid("config line " + std::to_string(line_no) + ": empty key: " + path);
    if (key == "config") throw_invalid("config files cannot include other config files");
    const std::string flag = "--" + key;
    if (mentioned(args, flag)) continue;

    std::vector<std::string>& dest =
        contains(global_keys, key) || contains(global_flags, key) ? global_extra : local_extra;
    if (contains(global_flags, key)) {
      if (value == "true" || value == "1" || value.empty()) dest.push_back(flag);
      continue;
    }
    dest.push_back(flag + "=" + value);
  }

  std::vector<std::string> out;
  out.reserve(args.size() + global_extra.size() + local_extra.size());
  out.push_back(args.front());
  out.insert(out.end(), global_extra.begin(), global_extra.end());
  bool placed = false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    out.push_back(args[i]);
    if (!placed && contains(subcommands, args[i])) {
      out.insert(out.end(), local_extra.begin(), local_extra.end());
      placed = true;
    }
  }
  // Without a subcommand there is nowhere valid for local keys; leaving them
  // at the end lets the parser report them.
  if (!placed) out.insert(out.end(), local_extra.begin(), local_extra.end());
  return out;
}

}  // namespace mfcal::cli
