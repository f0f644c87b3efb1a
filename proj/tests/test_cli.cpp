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


#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "json.hpp"
#include "mfcal/cascade.hpp"
#include "mfcal/io.hpp"

namespace fs = std::filesystem;
using mfcal::Field;
using Json = nlohmann::json;

namespace {

// Fresh scratch directory per test case.
class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("mfcal_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run mfcal_run(const Scratch& s, const std::string& args, const std::string& env = "") {
  const std::string out = s / "stdout.txt";
  const std::string err = s / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" MFCAL_CLI_PATH "' " + args + " >'" + out +
                          "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = mfcal::read_text(out);
  r.err = mfcal::read_text(err);
  return r;
}

std::string stack_fixture(const Scratch& s, std::size_t batch, std::size_t channels, std::uint64_t seed,
                          const std::string& name = "stack.mfr") {
  std::mt19937_64 rng(seed);
  std::vector<Field> fields;
  for (std::size_t b = 0; b < batch; ++b) fields.push_back(mfcal::test::random_field(rng, 8, 8, channels, 0.1, 1.0));
  const std::string path = s / name;
  mfcal::write_file(path, mfcal::write_field_batch(fields));
  return path;
}

}  // namespace

TEST_CASE("cascade writes equal cells for p = 1/2") {
  Scratch s;
  const Run r = mfcal_run(s, "cascade --p 0.5 --depth 3 --dims 1 --output " + s / "c.mfr");
  REQUIRE(r.code == 0);
  const Field f = mfcal::read_field(mfcal::read_file(s / "c.mfr"));
  CHECK(f.size() == 8);
  for (double v : f.values()) CHECK(v == 0.125);
}

TEST_CASE("cascade rejects p outside the open interval") {
  Scratch s;
  CHECK(mfcal_run(s, "cascade --p 1.0 --depth 3 --output " + s / "c.mfr").code == 2);
  CHECK(mfcal_run(s, "cascade --p 0 --depth 3 --output " + s / "c.mfr").code == 2);
  CHECK_FALSE(fs::exists(s / "c.mfr"));
}

TEST_CASE("cascade --spectrum writes the analytic curve with its f = 2 row") {
  Scratch s;
  const Run r = mfcal_run(s, "cascade --p 0.6667 --depth 10 --dims 2 --spectrum --output " + s / "p.mfr");
  REQUIRE(r.code == 0);
  const Field f = mfcal::read_field(mfcal::read_file(s / "p.mfr"));
  CHECK(f.height() == 1024);
  CHECK(f.width() == 1024);
  const mfcal::SpectrumCurve curve = mfcal::parse_spectrum_csv(mfcal::read_text(s / "p.csv"));
  CHECK(curve.size() == 101);
  CHECK(curve.max_sample().f == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("holder on a uniform field gives interior exponent 2") {
  Scratch s;
  mfcal::write_file(s / "u.mfr", mfcal::write_field(Field(16, 16, 2, 0.25)));
  const Run r = mfcal_run(s, "holder --epsilon 0 --input " + s / "u.mfr" + " --output " + s / "a.mfr");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  for (double m : j["mean_alpha_interior"]) CHECK(m == doctest::Approx(2.0).epsilon(1e-9));
  const Field a = mfcal::read_field(mfcal::read_file(s / "a.mfr"));
  CHECK(a.channels() == 2);
}

TEST_CASE("holder on the product cascade lands near the analytic exponent") {
  Scratch s;
  REQUIRE(mfcal_run(s, "cascade --p 0.6666666666666666 --depth 10 --dims 2 --output " + s / "p.mfr").code == 0);
  const Run r = mfcal_run(s, "holder --epsilon 0 --input " + s / "p.mfr" + " --means " + s / "m.json");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(mfcal::read_text(s / "m.json"));
  CHECK(std::abs(j["mean_alpha_interior"][0].get<double>() - 2.1699250) < 0.05);
}

TEST_CASE("holder reports missing input with its path") {
  Scratch s;
  const Run r = mfcal_run(s, "holder --input " + s / "missing.mfr");
  CHECK(r.code == 3);
  CHECK(r.err.find("missing.mfr") != std::string::npos);
}

TEST_CASE("malformed input is an I/O class failure") {
  Scratch s;
  mfcal::write_text(s / "bad.mfr", "MFR1 not really");
  CHECK(mfcal_run(s, "holder --input " + s / "bad.mfr").code == 3);
  mfcal::write_text(s / "junk.bin", "hello");
  CHECK(mfcal_run(s, "holder --input " + s / "junk.bin").code == 3);
}

TEST_CASE("holder reads binary PGM input") {
  Scratch s;
  mfcal::write_file(s / "u.pgm", mfcal::write_pgm(Field(12, 12, 1, 1.0)));
  const Run r = mfcal_run(s, "holder --epsilon 0 --input " + s / "u.pgm");
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["mean_alpha_interior"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("spectrum methods") {
  Scratch s;
  SUBCASE("moments has tau(1) near zero and tracks the analytic tau") {
    const Run r = mfcal_run(s, "spectrum --method moments --p 0.6667 --output " + s / "m.csv" +
                                   " --tau-output " + s / "t.csv");
    REQUIRE(r.code == 0);
    const std::string table = mfcal::read_text(s / "t.csv");
    std::size_t pos = table.find('\n') + 1;
    bool saw_one = false;
    while (pos < table.size()) {
      const std::size_t end = table.find('\n', pos);
      const std::string line = table.substr(pos, end - pos);
      pos = end + 1;
      const double q = std::stod(line);
      const double tau = std::stod(line.substr(line.find(',') + 1));
      CHECK(std::abs(tau - mfcal::analytic_tau(0.6667, q)) < 0.02);
      if (q == 1.0) {
        saw_one = true;
        CHECK(std::abs(tau) < 1e-9);
      }
    }
    CHECK(saw_one);
  }
  SUBCASE("histogram and clt write curves") {
    CHECK(mfcal_run(s, "spectrum --method histogram --dims 2 --output " + s / "h.csv").code == 0);
    CHECK_FALSE(mfcal::parse_spectrum_csv(mfcal::read_text(s / "h.csv")).empty());
    CHECK(mfcal_run(s, "spectrum --method clt --dims 2 --k 8 --epsilon 0 --output " + s / "c.csv").code == 0);
    const mfcal::SpectrumCurve clt = mfcal::parse_spectrum_csv(mfcal::read_text(s / "c.csv"));
    CHECK(clt.size() == 65);
    for (const mfcal::SpectrumPoint& pt : clt.samples) {
      CHECK(pt.f >= 0.0);
      CHECK(pt.f <= std::max(pt.alpha, 0.0));
    }
  }
  SUBCASE("unknown method is a usage error") {
    CHECK(mfcal_run(s, "spectrum --method wavelet --output " + s / "x.csv").code == 2);
  }
}

TEST_CASE("mono with zeroed second layer halves the input") {
  Scratch s;
  const std::string input = stack_fixture(s, 2, 4, 3);
  mfcal::write_text(s / "params.json",
                    R"({"mlp": {"channels": 4, "hidden": 2, "w1": [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9],
                                "w2": [0, 0, 0, 0, 0, 0, 0, 0]}})");
  const Run r = mfcal_run(s, "recalibrate --method mono --input " + input + " --params " + s / "params.json" +
                                 " --output " + s / "out.mfr");
  REQUIRE(r.code == 0);
  const std::vector<Field> in = mfcal::read_field_batch(mfcal::read_file(input));
  const std::vector<Field> out = mfcal::read_field_batch(mfcal::read_file(s / "out.mfr"));
  REQUIRE(out.size() == in.size());
  for (std::size_t b = 0; b < in.size(); ++b) {
    for (std::size_t i = 0; i < in[b].size(); ++i) CHECK(out[b].values()[i] == in[b].values()[i] / 2);
  }
}

TEST_CASE("multi with a single level set adds one half") {
  Scratch s;
  const std::string input = stack_fixture(s, 3, 4, 5);
  const Run r = mfcal_run(s, "recalibrate --method multi --Q 1 --input " + input + " --output " + s / "out.mfr");
  REQUIRE(r.code == 0);
  const std::vector<Field> in = mfcal::read_field_batch(mfcal::read_file(input));
  const std::vector<Field> out = mfcal::read_field_batch(mfcal::read_file(s / "out.mfr"));
  for (std::size_t b = 0; b < in.size(); ++b) {
    for (std::size_t i = 0; i < in[b].size(); ++i) CHECK(out[b].values()[i] == in[b].values()[i] + 0.5);
  }
}

TEST_CASE("every recalibration method writes gates inside (0, 1)") {
  Scratch s;
  const std::string input = stack_fixture(s, 3, 8, 11);
  for (const char* method : {"cse", "scse", "srm", "fca", "mono", "multi"}) {
    CAPTURE(method);
    const Run r = mfcal_run(s, std::string("recalibrate --method ") + method + " --frequencies 4 --input " +
                                   input + " --output " + s / "out.mfr" + " --gates " + s / "g.json");
    REQUIRE(r.code == 0);
    const Json j = Json::parse(mfcal::read_text(s / "g.json"));
    CHECK(j["method"] == method);
    REQUIRE(j["gates"].size() == 3);
    for (const Json& row : j["gates"]) {
      CHECK(row.size() == 8);
      for (double g : row) {
        CHECK(g > 0.0);
        CHECK(g < 1.0);
      }
    }
  }
  CHECK(mfcal_run(s, "recalibrate --method gather --input " + input + " --output " + s / "o.mfr").code == 2);
}

TEST_CASE("excite on a constructed spectrum") {
  Scratch s;
  Run r = mfcal_run(s, "excite --singular-values 10,3,1 --delta 0.95");
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["k"] == 2);
  CHECK(j["singular_values"].size() == 3);
  r = mfcal_run(s, "excite --singular-values 10,3,1 --delta 1");
  CHECK(Json::parse(r.out)["k"] == 3);
  CHECK(mfcal_run(s, "excite --singular-values 10,3,1 --delta 0").code == 2);
  CHECK(mfcal_run(s, "excite --singular-values 10,3,1 --delta 1.5").code == 2);
}

TEST_CASE("excite consumes a gates record") {
  Scratch s;
  const std::string input = stack_fixture(s, 6, 8, 13);
  REQUIRE(mfcal_run(s, "recalibrate --method cse --seed 2 --input " + input + " --output " + s / "o.mfr" +
                           " --gates " + s / "g.json").code == 0);
  const Json gates = Json::parse(mfcal::read_text(s / "g.json"))["gates"];
  REQUIRE(gates[0] != gates[1]);
  Run r = mfcal_run(s, "excite --input " + s / "g.json" + " --delta 0.9 --output " + s / "e.json");
  REQUIRE(r.code == 0);
  Json j = Json::parse(mfcal::read_text(s / "e.json"));
  CHECK(j["centered"] == true);
  CHECK(j["k"].get<int>() >= 1);
  CHECK(j["k"].get<int>() <= 8);
  r = mfcal_run(s, "--strict-paper-mode excite --input " + s / "g.json");
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["centered"] == false);
}

TEST_CASE("config file values yield to flags") {
  Scratch s;
  mfcal::write_text(s / "run.cfg", "# defaults\np = 0.5\ndepth = 2\nthreads = 2\n");
  REQUIRE(mfcal_run(s, "--config " + s / "run.cfg" + " cascade --depth 3 --output " + s / "c.mfr").code == 0);
  const Field f = mfcal::read_field(mfcal::read_file(s / "c.mfr"));
  CHECK(f.size() == 8);
  CHECK(f.values()[0] == 0.125);

  mfcal::write_text(s / "bad.cfg", "colour = blue\n");
  CHECK(mfcal_run(s, "--config " + s / "bad.cfg" + " cascade --output " + s / "c.mfr").code == 2);
  CHECK(mfcal_run(s, "--config " + s / "absent.cfg" + " cascade --output " + s / "c.mfr").code == 3);
}

TEST_CASE("outputs do not depend on the worker count") {
  Scratch s;
  REQUIRE(mfcal_run(s, "--threads 1 cascade --p 0.7 --depth 8 --dims 2 --output " + s / "p.mfr").code == 0);
  REQUIRE(mfcal_run(s, "--threads 1 holder --input " + s / "p.mfr" + " --output " + s / "a1.mfr").code == 0);
  REQUIRE(mfcal_run(s, "holder --input " + s / "p.mfr" + " --output " + s / "a3.mfr", "MFCAL_THREADS=3").code == 0);
  CHECK(mfcal::read_file(s / "a1.mfr") == mfcal::read_file(s / "a3.mfr"));

  const std::string input = stack_fixture(s, 2, 8, 17);
  REQUIRE(mfcal_run(s, "--threads 1 recalibrate --method multi --seed 4 --input " + input + " --output " +
                           s / "m1.mfr").code == 0);
  REQUIRE(mfcal_run(s, "--threads 3 recalibrate --method multi --seed 4 --input " + input + " --output " +
                           s / "m3.mfr").code == 0);
  CHECK(mfcal::read_file(s / "m1.mfr") == mfcal::read_file(s / "m3.mfr"));

  REQUIRE(mfcal_run(s, "--threads 1 selftest --artifacts " + s / "art1").code == 0);
  REQUIRE(mfcal_run(s, "--threads 3 selftest --artifacts " + s / "art3").code == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(s / "art1")) {
    const std::string name = entry.path().filename().string();
    CAPTURE(name);
    CHECK(mfcal::read_file(entry.path()) == mfcal::read_file(s / "art3" + "/" + name));
    ++compared;
  }
  CHECK(compared == 12);
}

TEST_CASE("selftest passes and reports injected faults") {
  Scratch s;
  Run r = mfcal_run(s, "selftest");
  CHECK(r.code == 0);
  CHECK(r.out.find("[FAIL]") == std::string::npos);

  r = mfcal_run(s, "selftest --golden threshold_k=3");
  CHECK(r.code != 0);
  CHECK(r.out.find("[FAIL]  8 excitation threshold") != std::string::npos);

  r = mfcal_run(s, "--strict-paper-mode selftest --json");
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["criteria"].size() == 10);
  for (const Json& c : j["criteria"]) CHECK(c["mode"] == "strict-paper");

  CHECK(mfcal_run(s, "selftest --golden bogus=1").code == 2);
}

TEST_CASE("bench prints one row per width and warns on few repetitions") {
  Scratch s;
  const Run r = mfcal_run(s, "bench --reps 3 --channels 1,2 --size 16");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(r.out.rfind("channels,median_ms,iqr_ms,reps\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  CHECK(lines == 3);
}

TEST_CASE("help exits cleanly") {
  Scratch s;
  CHECK(mfcal_run(s, "--help").code == 0);
  CHECK(mfcal_run(s, "").code == 2);
}
