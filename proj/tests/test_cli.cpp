// Copyright 2026 The mp2q Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mp2q/circuit.hpp"
#include "mp2q/hfdata.hpp"
#include "mp2q/mp2.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(MP2Q_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& rel) { return std::string(MP2Q_DATA_DIR) + "/" + rel; }
std::string config(const std::string& name) { return std::string(MP2Q_DATA_DIR) + "/../configs/" + name; }

fs::path temp_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("mp2q_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, OracleHelium) {
  const auto r = cli("oracle --hf-data " + data("hf/helium_aug-cc-pvdz.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("e2_total").get<double>(), -0.0269625, 1e-6);
  EXPECT_NEAR(j.at("per_block").at("I").get<double>(), 0.0025817, 1e-6);
  EXPECT_NEAR(j.at("per_block").at("III").get<double>(), 0.0034791, 1e-6);
  EXPECT_NEAR(j.at("per_block").at("IV").get<double>(), 0.017423, 1e-6);
}

TEST(Cli, OracleZeroAndRandomFixture) {
  auto r = cli("oracle --hf-data " + data("hf/toy_zero_eri.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("e2_total").get<double>(), 0.0);

  // Random fixture written to disk; the CLI must agree with the library.
  mp2q::HartreeFockData d;
  d.n_orbitals = 4;
  d.n_occupied = 2;
  d.orbital_energies = {-1.1, -0.6, 0.4, 0.9};
  d.mo_coefficients = Eigen::MatrixXd::Identity(4, 4);
  d.eri_mo = mp2q::Tensor4(4);
  unsigned s = 7;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int e = 0; e < 4; ++e) {
          if (d.eri_mo(a, b, c, e) != 0.0) continue;
          s = s * 1103515245u + 12345u;
          const double v = static_cast<double>(s % 1000) / 2000.0;
          d.eri_mo(a, b, c, e) = d.eri_mo(c, e, a, b) = d.eri_mo(b, a, e, c) = d.eri_mo(e, c, b, a) = v;
        }
  const auto dir = temp_dir("oracle");
  std::ofstream(dir / "rand.json") << mp2q::hf_to_json(d, true).dump();
  r = cli("oracle --hf-data " + (dir / "rand.json").string() + " --formula spin-orbital");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("e2_total").get<double>(),
              mp2q::mp2_energy(d, mp2q::Mp2Formula::SpinOrbital).e2_total, 1e-14);
}

TEST(Cli, ValidationExitCodes) {
  EXPECT_EQ(cli("oracle --hf-data /nonexistent.json").code, 2);
  EXPECT_EQ(cli("oracle --hf-data " + data("hf/toy_zero_eri.json") + " --formula mp3").code, 2);
  EXPECT_NE(cli("no-such-command").code, 0);
  EXPECT_NE(cli("").code, 0);
}

TEST(Cli, PipelineWritesArtifactsAndReplays) {
  const auto dir = temp_dir("pipe");
  const auto r = cli("pipeline --config " + config("helium_sampled.json") +
                     " --parts IV --shots 3000 --seed 5 --out-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("IV"), std::string::npos);
  for (const char* f : {"sweep.csv", "fit.json", "manifest.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
  EXPECT_TRUE(fit.at("partial").get<bool>());
  EXPECT_EQ(fit.at("parts").size(), 1u);
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "part,step,lambda,lambda_sq,outcome,count,shots,zeta,zeta_signal");
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("command").get<std::string>(), "pipeline");
  EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), 5u);

  const auto replay_dir = dir / "replay";
  const auto rep = cli("replay --manifest " + (dir / "manifest.json").string() + " --out-dir " + replay_dir.string());
  EXPECT_EQ(rep.code, 0) << rep.out;
  EXPECT_NE(rep.out.find("identical"), std::string::npos);
  EXPECT_EQ(slurp(dir / "sweep.csv"), slurp(replay_dir / "sweep.csv"));

  // A recorded output hash that no longer matches: exit code 3.
  auto tampered = manifest;
  for (auto& o : tampered.at("outputs"))
    if (o.at("path").get<std::string>().find("sweep.csv") != std::string::npos) o["sha256"] = std::string(64, '0');
  std::ofstream(dir / "tampered.json") << tampered.dump();
  const auto bad = cli("replay --manifest " + (dir / "tampered.json").string());
  EXPECT_EQ(bad.code, 3) << bad.out;
  EXPECT_NE(bad.out.find("DIFFERS"), std::string::npos);
}

TEST(Cli, PipelineExactHelium) {
  const auto dir = temp_dir("exact");
  const auto r = cli("pipeline --config " + config("helium_exact.json") + " --out-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
  EXPECT_FALSE(fit.at("partial").get<bool>());
  EXPECT_LT(std::abs(fit.at("relative_error").get<double>()), 0.02);
}

TEST(Cli, LowerReportsViolationsWithExitTwo) {
  const auto dir = temp_dir("lower");
  mp2q::Circuit c(3);
  c.add(mp2q::Gate::cnot(0, 2));
  std::ofstream(dir / "c.json") << mp2q::to_json(c).dump();
  // A path-3 map with the data on every qubit leaves no route for CNOT(0,2).
  const auto r = cli("lower --circuit " + (dir / "c.json").string() + " --coupling path-3 --layout 0,1,2");
  EXPECT_EQ(r.code, 2) << r.out;
  // Placing the pair on an edge gives a clean report.
  mp2q::Circuit two(2);
  two.add(mp2q::Gate::cnot(0, 1));
  std::ofstream(dir / "two.json") << mp2q::to_json(two).dump();
  const auto ok = cli("lower --circuit " + (dir / "two.json").string() + " --coupling path-3 --layout 1,2 --out " +
                      (dir / "r.json").string());
  ASSERT_EQ(ok.code, 0) << ok.out;
  const auto rep = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_TRUE(rep.at("violations").empty());
}

TEST(Cli, BuildLowerAndPackThree) {
  const auto dir = temp_dir("pack");
  auto r = cli("build --hf-data " + data("hf/helium_aug-cc-pvdz.json") + " --part IV --circuit ue --out " +
               (dir / "ue.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  r = cli("lower --circuit " + (dir / "ue.json").string() +
          " --coupling h-shape-7 --pack 3 --pack-onto ibm-27-heavy-hex --pack-alt h-shape-9 --out " +
          (dir / "low.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rep = nlohmann::json::parse(slurp(dir / "low.json"));
  EXPECT_TRUE(rep.at("violations").empty());
  EXPECT_EQ(rep.at("pack").at("found").get<int>(), 3);
  std::set<int> used;
  for (const auto& e : rep.at("pack").at("embeddings"))
    for (int q : e.at("qubits")) EXPECT_TRUE(used.insert(q).second);
}

TEST(Cli, SimulateAndCorrectSampled) {
  const auto dir = temp_dir("corr");
  auto r = cli("simulate-ue --hf-data " + data("hf/helium_aug-cc-pvdz.json") + " --part IV --out-all " +
               (dir / "all.csv").string() + " --out-lite " + (dir / "lite.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  r = cli("correct --all " + (dir / "all.csv").string() + " --lite " + (dir / "lite.csv").string() + " --out " +
          (dir / "c.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(dir / "c.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "input,raw_ratio,factor,corrected,theory,abs_deviation");
  int rows = 0;
  while (std::getline(in, line)) {
    const double dev = std::stod(line.substr(line.rfind(',') + 1));
    // 100000 shots per input: deviations are shot noise only.
    EXPECT_LT(dev, 0.01) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 16);
}
