// Copyright 2026 The rabiest Authors
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
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rabiest::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kSingular = 2, kVerificationFailed = 3 };

/// Runs one command line (args excludes the program name). `env_seed` is the
/// value of RABIEST_SEED, if set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_seed = std::nullopt);

/// 17 significant digits, shortest exponent form; `inf`, `-inf`, `nan` for non-finite values.
std::string format_number(double v);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` lines; `#` starts a comment; blank lines ignored.
/// Unknown or repeated keys and malformed lines throw ConfigError naming the line.
std::map<std::string, std::string> parse_config(std::istream& in, const std::set<std::string>& allowed);

double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::uint64_t parse_seed(std::string_view text, std::string_view what);

}  // namespace rabiest::cli
