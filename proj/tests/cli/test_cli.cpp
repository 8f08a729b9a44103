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


#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rabiest_cli/cli.hpp"

using rabiest::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args, std::optional<std::string> env_seed = std::nullopt) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err, std::move(env_seed));
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> out;
  for (const std::string& l : lines(text)) {
    if (!l.empty() && l[0] != '#') out.push_back(l);
  }
  return out;
}

std::string value_of(const std::string& text, const std::string& key) {
  for (const std::string& l : lines(text)) {
    if (l.rfind(key + ",", 0) == 0) return l.substr(key.size() + 1);
  }
  return {};
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("rabiest_cli_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmallAdapt =
    "# small run\n"
    "omega1_true = 0.3\n"
    "omega2_true = 0.7\n"
    "time = 5\n"
    "shots_per_round = 30\n"
    "rounds = 3\n"
    "initial_guess_1 = 0.5\n"
    "initial_guess_2 = 0.5\n"
    "box_lo = -2\n"
    "box_hi = 2\n"
    "grid_points = 11\n"
    "segments = 50\n";

}  // namespace

TEST_SUITE("qfim command") {
  TEST_CASE("optimal probe") {
    const Outcome o = invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "optimal"});
    CHECK(o.code == 0);
    CHECK(std::stod(value_of(o.out, "trace_inverse")) == doctest::Approx(0.09463).epsilon(1e-4));
    CHECK(value_of(o.out, "singular") == "false");
    CHECK(std::stod(value_of(o.out, "commutation_residual")) < 1e-10);
    const auto rows = data_rows(o.out);
    REQUIRE(rows.size() >= 2);
    CHECK(split(rows[0]).size() == 2);
    CHECK(split(rows[0])[1] == split(rows[1])[0]);
  }

  TEST_CASE("singular time exits 2 after reporting the flag") {
    const Outcome o = invoke({"qfim", "--omega1", "3", "--omega2", "4", "--time", "2.5132741"});
    CHECK(o.code == 2);
    CHECK(value_of(o.out, "singular") == "true");
    CHECK(value_of(o.out, "trace_inverse").empty());
    CHECK_FALSE(o.err.empty());
  }

  TEST_CASE("basis and file probes") {
    CHECK(invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "basis:1"}).code == 0);
    TempDir dir;
    const std::string f = dir.write("probe.txt", "0 0\n1 0\n0 0\n");
    const Outcome a = invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "file:" + f});
    const Outcome b = invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "basis:1"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "basis:3"}).code == 1);
    CHECK(invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "file:" + dir.file("none")})
              .code == 1);
    CHECK(invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "5", "--probe", "bogus"}).code == 1);
  }

  TEST_CASE("invalid flags exit 1 with usage") {
    const Outcome o = invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7"});
    CHECK(o.code == 1);
    CHECK(o.err.find("--time") != std::string::npos);
    CHECK(invoke({"qfim", "--omega1", "x", "--omega2", "0.7", "--time", "5"}).code == 1);
    CHECK(invoke({"qfim", "--omega1", "0.3", "--omega2", "0.7", "--time", "-1"}).code == 1);
    CHECK(invoke({"nonsense"}).code == 1);
    CHECK(invoke({}).code == 1);
  }
}

TEST_SUITE("compare command") {
  TEST_CASE("default grid") {
    const Outcome o = invoke({"compare"});
    CHECK(o.code == 0);
    const auto rows = data_rows(o.out);
    REQUIRE(rows.size() == 401);
    CHECK(rows[0] == "omega_plus_t,joint_bound,separate_bound");
    // Row 100 of 400 on (0, 2 pi] is pi / 2.
    const auto quarter = split(rows[100]);
    CHECK(std::stod(quarter[0]) == doctest::Approx(std::numbers::pi / 2));
    CHECK(std::abs(std::stod(quarter[1]) - 0.0045264) < 1e-7);
    CHECK(std::abs(std::stod(quarter[2]) - 0.0081057) < 1e-7);
    CHECK(split(rows.back())[1] == "inf");
    CHECK(o.err.find("crossover_phase = 3.4285") != std::string::npos);
    CHECK(o.err.find("budget") != std::string::npos);
  }

  TEST_CASE("regimes either side of the crossover") {
    const auto rows = data_rows(invoke({"compare"}).out);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const auto f = split(rows[i]);
      const double x = std::stod(f[0]);
      if (x > 2 * std::numbers::pi - 0.1) continue;
      if (x < 3.4285 - 1e-3) CHECK(std::stod(f[1]) < std::stod(f[2]));
      if (x > 3.4285 + 1e-3) CHECK(std::stod(f[1]) > std::stod(f[2]));
    }
  }

  TEST_CASE("output file receives the CSV") {
    TempDir dir;
    const std::string path = dir.file("cmp.csv");
    const Outcome o = invoke({"compare", "--steps", "4", "--output", path});
    CHECK(o.code == 0);
    CHECK(data_rows(read_file(path)).size() == 5);
    CHECK(o.out.find("crossover_phase") != std::string::npos);
  }

  TEST_CASE("invalid ranges") {
    CHECK(invoke({"compare", "--steps", "0"}).code == 1);
    CHECK(invoke({"compare", "--omega-plus", "0"}).code == 1);
    CHECK(invoke({"compare", "--xmax", "-1"}).code == 1);
    CHECK(invoke({"compare", "--m", "0"}).code == 1);
  }
}

TEST_SUITE("robustness command") {
  TEST_CASE("values and shape") {
    const Outcome o = invoke({"robustness"});
    CHECK(o.code == 0);
    const auto rows = data_rows(o.out);
    CHECK(rows[0] == "delta_omega_plus,inverse_total_variance");
    CHECK(std::stod(split(rows[1])[1]) == doctest::Approx(25.0).epsilon(1e-12));
    double prev = INFINITY;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto f = split(rows[i]);
      if (std::stod(f[0]) >= std::numbers::pi / 5) break;
      CHECK(std::stod(f[1]) <= prev);
      prev = std::stod(f[1]);
    }
  }

  TEST_CASE("explicit offsets") {
    const Outcome o = invoke({"robustness", "--offsets", "0,0.3"});
    const auto rows = data_rows(o.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(std::stod(split(rows[2])[1]) - 22.62) < 0.005);
    CHECK(invoke({"robustness", "--offsets", "-0.1"}).code == 1);
    CHECK(invoke({"robustness", "--time", "0"}).code == 1);
  }
}

TEST_SUITE("adapt command") {
  TEST_CASE("identical runs are byte-identical") {
    TempDir dir;
    const std::string cfg = dir.write("a.cfg", std::string(kSmallAdapt) + "seed = 4\n");
    const Outcome a = invoke({"adapt", "--config", cfg});
    const Outcome b = invoke({"adapt", "--config", cfg});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = data_rows(a.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "step,omega1_hat,omega2_hat,norm_inv_variance,seed");
    CHECK(split(rows[1])[0] == "1");
    CHECK(split(rows[3])[4] == "4");
    CHECK(a.err.find("# omega1_true = 0.29999999999999999") != std::string::npos);
  }

  TEST_CASE("zero rounds give a header-only CSV") {
    TempDir dir;
    std::string text = kSmallAdapt;
    text.replace(text.find("rounds = 3"), 10, "rounds = 0");
    const Outcome o = invoke({"adapt", "--config", dir.write("z.cfg", text)});
    CHECK(o.code == 0);
    CHECK(data_rows(o.out) == std::vector<std::string>{"step,omega1_hat,omega2_hat,norm_inv_variance,seed"});
  }

  TEST_CASE("seed precedence: flag, config, environment, default") {
    TempDir dir;
    const std::string with_seed = dir.write("s.cfg", std::string(kSmallAdapt) + "seed = 4\n");
    const std::string without = dir.write("n.cfg", kSmallAdapt);
    auto seed_of = [](const Outcome& o) { return split(data_rows(o.out).at(1))[4]; };
    CHECK(seed_of(invoke({"adapt", "--config", with_seed, "--seed", "9"}, "7")) == "9");
    CHECK(seed_of(invoke({"adapt", "--config", with_seed}, "7")) == "4");
    CHECK(seed_of(invoke({"adapt", "--config", without}, "7")) == "7");
    CHECK(seed_of(invoke({"adapt", "--config", without})) == "1");
    CHECK(invoke({"adapt", "--config", without}, "abc").code == 1);
  }

  TEST_CASE("several seeds are concatenated in seed order") {
    TempDir dir;
    const std::string cfg = dir.write("m.cfg", kSmallAdapt);
    const Outcome one = invoke({"adapt", "--config", cfg, "--seeds", "3", "--workers", "1"});
    const Outcome two = invoke({"adapt", "--config", cfg, "--seeds", "3", "--workers", "2"});
    CHECK(one.out == two.out);
    const auto rows = data_rows(one.out);
    REQUIRE(rows.size() == 10);
    CHECK(split(rows[1])[4] == "1");
    CHECK(split(rows[9])[4] == "3");
  }

  TEST_CASE("malformed configuration exits 1") {
    TempDir dir;
    CHECK(invoke({"adapt", "--config", dir.write("u.cfg", std::string(kSmallAdapt) + "colour = red\n")}).code == 1);
    CHECK(invoke({"adapt", "--config", dir.write("d.cfg", std::string(kSmallAdapt) + "time = 6\n")}).code == 1);
    CHECK(invoke({"adapt", "--config", dir.write("g.cfg", std::string(kSmallAdapt) + "just words\n")}).code == 1);
    CHECK(invoke({"adapt", "--config", dir.write("v.cfg", std::string(kSmallAdapt) + "seed = -1\n")}).code == 1);
    CHECK(invoke({"adapt", "--config", dir.write("b.cfg", std::string(kSmallAdapt) + "seed_count = 0\n")}).code == 1);
    CHECK(invoke({"adapt", "--config", dir.file("missing.cfg")}).code == 1);
    CHECK(invoke({"adapt"}).code == 1);
  }

  TEST_CASE("shipped configurations parse") {
    for (const char* name : {"adapt_guess_00.cfg", "adapt_guess_05.cfg", "adapt_guess_11.cfg", "adapt_guess_063_039.cfg"}) {
      std::ifstream in(std::string(RABIEST_SOURCE_DIR) + "/configs/" + name);
      REQUIRE(in.good());
      std::set<std::string> allowed{"omega1_true", "omega2_true", "time", "shots_per_round", "rounds",
                                    "initial_guess_1", "initial_guess_2", "seed", "box_lo", "box_hi",
                                    "grid_points", "segments"};
      CHECK(rabiest::cli::parse_config(in, allowed).size() == 12);
    }
  }
}

TEST_SUITE("multilevel command") {
  TEST_CASE("l = 3") {
    const Outcome o = invoke({"multilevel", "--levels", "3", "--time", "5", "--m", "1"});
    CHECK(o.code == 0);
    CHECK(std::stod(value_of(o.out, "joint_bound")) == doctest::Approx(0.04));
    CHECK(std::stod(value_of(o.out, "separate_bound")) == doctest::Approx(0.12));
    CHECK(value_of(o.out, "ratio") == "3");
    CHECK(std::stod(value_of(o.out, "qfim_offdiagonal_max")) < 1e-10);
  }

  TEST_CASE("l = 1 and invalid input") {
    CHECK(value_of(invoke({"multilevel", "--levels", "1", "--time", "5", "--m", "1"}).out, "ratio") == "1");
    CHECK(invoke({"multilevel", "--levels", "0", "--time", "5", "--m", "1"}).code == 1);
  }
}

TEST_SUITE("verify command") {
  TEST_CASE("quick run passes within ten seconds") {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = invoke({"verify", "--quick"});
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
    CHECK(o.code == 0);
    CHECK(o.out.find("FAIL") == std::string::npos);
    CHECK(o.out.find("PASS closed_form_vs_fd") != std::string::npos);
  }
}

TEST_SUITE("helpers") {
  TEST_CASE("format_number") {
    using rabiest::cli::format_number;
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(25.0) == "25");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  }

  TEST_CASE("parse_config") {
    using rabiest::cli::ConfigError;
    using rabiest::cli::parse_config;
    const std::set<std::string> allowed{"a", "b"};
    std::istringstream ok("# comment\n\n a = 1 # trailing\nb=two words\n");
    const auto m = parse_config(ok, allowed);
    CHECK(m.at("a") == "1");
    CHECK(m.at("b") == "two words");
    std::istringstream unknown("c = 1\n");
    CHECK_THROWS_AS(parse_config(unknown, allowed), ConfigError);
    std::istringstream dup("a = 1\na = 2\n");
    try {
      parse_config(dup, allowed);
      FAIL("duplicate accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream empty_value("a =\n");
    CHECK_THROWS_AS(parse_config(empty_value, allowed), ConfigError);
  }

  TEST_CASE("strict numeric parsing") {
    using namespace rabiest::cli;
    CHECK(parse_double("2.5", "x") == 2.5);
    CHECK_THROWS(parse_double("2.5x", "x"));
    CHECK_THROWS(parse_double("", "x"));
    CHECK(parse_int("42", "n") == 42);
    CHECK_THROWS(parse_int("4.2", "n"));
    CHECK(parse_seed("18446744073709551615", "s") == 18446744073709551615ULL);
    CHECK_THROWS(parse_seed("-3", "s"));
  }
}
