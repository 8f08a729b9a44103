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


#include <charconv>
#include <cmath>
#include <sstream>

#include "rabiest_cli/cli.hpp"

namespace rabiest::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_whole(std::string_view text, std::string_view what, const char* kind) {
  const std::string_view s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    std::ostringstream os;
    os << what << ": expected " << kind << ", got '" << text << "'";
    throw ConfigError(os.str());
  }
  return value;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  const double v = parse_whole<double>(text, what, "a number");
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + ": value must be finite");
  return v;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  return parse_whole<std::int64_t>(text, what, "an integer");
}

std::uint64_t parse_seed(std::string_view text, std::string_view what) {
  return parse_whole<std::uint64_t>(text, what, "a non-negative 64-bit integer");
}

std::map<std::string, std::string> parse_config(std::istream& in, const std::set<std::string>& allowed) {
  std::map<std::string, std::string> values;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    std::ostringstream where;
    where << "config line " << number;
    if (eq == std::string_view::npos) throw ConfigError(where.str() + ": expected 'key = value'");
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ConfigError(where.str() + ": expected 'key = value'");
    if (!allowed.contains(key)) throw ConfigError(where.str() + ": unknown key '" + key + "'");
    if (!values.emplace(key, value).second) throw ConfigError(where.str() + ": duplicate key '" + key + "'");
  }
  return values;
}

}  // namespace rabiest::cli
