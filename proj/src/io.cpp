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

#include "mp2q/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "mp2q/error.hpp"

namespace mp2q {

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep, bool header) {
  if (header) os << kSweepCsvHeader << '\n';
  const int nq = sweep.register_qubits + 1;
  for (const auto& row : sweep.rows) {
    const std::string prefix = sweep.part + ',' + std::to_string(row.step) + ',' +
                               format_double(row.lambda) + ',' + format_double(row.lambda_sq) + ',';
    const std::string suffix = ',' + std::to_string(sweep.shots) + ',' + format_double(row.zeta) + ',' +
                               format_double(row.zeta_signal) + '\n';
    if (row.counts) {
      for (const auto& [o, c] : row.counts->counts)
        os << prefix << to_bitstring(o, nq) << ',' << c << suffix;
    } else {
      for (std::size_t o = 0; o < row.probabilities.size(); ++o)
        os << prefix << to_bitstring(o, nq) << ',' << format_double(row.probabilities[o]) << suffix;
    }
  }
}

nlohmann::json fit_to_json(const PartOutcome& p) {
  const auto& b = p.selection.best;
  nlohmann::json j;
  j["part"] = p.sweep.part;
  j["start_step"] = b.start_step;
  j["total_steps"] = b.total_steps;
  j["slope"] = b.slope;
  j["intercept"] = b.intercept;
  j["lse"] = b.lse;
  j["plateau_ratio"] = b.plateau_ratio;
  j["all_windows_rejected"] = p.selection.all_rejected;
  j["c_e"] = p.sweep.c_e;
  j["lambda_step"] = p.settings.lambda_step;
  j["base_state"] = p.sweep.base_state;
  j["sign"] = p.sign;
  j["epsilon_part_hartree"] = p.epsilon;
  j["oracle_epsilon_part_hartree"] = p.oracle_epsilon;
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : p.selection.candidates)
    cands.push_back({{"start_step", c.start_step}, {"slope", c.slope}, {"lse", c.lse},
                     {"plateau_ratio", c.plateau_ratio}, {"rejected", c.rejected}});
  j["candidates"] = cands;
  return j;
}

nlohmann::json pipeline_to_json(const PipelineOutcome& o) {
  nlohmann::json j;
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : o.parts) {
    auto pj = fit_to_json(p);
    pj["e2_hartree"] = o.e2;
    parts.push_back(pj);
  }
  j["parts"] = parts;
  j["e2_hartree"] = o.e2;
  j["oracle_e2_hartree"] = o.oracle_e2;
  j["relative_error"] = o.relative_error();
  j["partial"] = o.partial;
  return j;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("bad " + what + " \"" + s + "\"");
}

}  // namespace

CountsFile read_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto head = split_csv(line);
  if (head.size() < 3 || head[0] != "input" || head[1] != "outcome" || head[2] != "count")
    throw ValidationError(path + ": header must start with input,outcome,count");
  const bool has_theory = head.size() > 3 && head[3] == "theory";
  std::map<std::uint64_t, CountsTable> tables;
  CountsFile out;
  int width = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() < 3) throw ValidationError(where + ": expected input,outcome,count");
    const auto input = parse_uint(f[0], "input at " + where);
    const std::string& bits = f[1];
    if (bits.empty() || bits.find_first_not_of("01") != std::string::npos)
      throw ValidationError(where + ": outcome must be a bit string");
    if (width < 0) width = static_cast<int>(bits.size());
    if (static_cast<int>(bits.size()) != width) throw ValidationError(where + ": outcome width changes");
    const auto outcome = std::stoull(bits, nullptr, 2);
    const auto count = parse_uint(f[2], "count at " + where);
    auto& t = tables[input];
    t.n_qubits = width;
    t.counts[outcome] += count;
    t.shots += count;
    if (has_theory && f.size() > 3 && !f[3].empty()) {
      try {
        out.theory[input] = std::stod(f[3]);
      } catch (const std::exception&) {
        throw ValidationError(where + ": bad theory value");
      }
    }
  }
  if (tables.empty()) throw ValidationError(path + ": no rows");
  const std::uint64_t n = tables.rbegin()->first + 1;
  for (std::uint64_t x = 0; x < n; ++x) {
    auto it = tables.find(x);
    if (it == tables.end()) throw ValidationError(path + ": missing input " + std::to_string(x));
    out.tables.push_back(it->second);
  }
  return out;
}

void write_counts_csv(std::ostream& os, const std::vector<CountsTable>& tables,
                      const std::vector<double>* theory) {
  os << "input,outcome,count" << (theory ? ",theory" : "") << '\n';
  for (std::size_t x = 0; x < tables.size(); ++x)
    for (const auto& [o, c] : tables[x].counts) {
      os << x << ',' << to_bitstring(o, tables[x].n_qubits) << ',' << c;
      if (theory) os << ',' << format_double((*theory)[x]);
      os << '\n';
    }
}

void write_corrections_csv(std::ostream& os, const std::vector<DenominatorEstimate>& rows,
                           const std::map<std::uint64_t, double>& theory) {
  os << "input,raw_ratio,factor,corrected,theory,abs_deviation\n";
  for (const auto& r : rows) {
    os << r.input << ',' << format_double(r.raw_ratio) << ',' << format_double(r.factor) << ','
       << format_double(r.corrected) << ',';
    if (auto it = theory.find(r.input); it != theory.end())
      os << format_double(it->second) << ',' << format_double(std::abs(r.corrected - it->second));
    else
      os << ',';
    os << '\n';
  }
}

FileDigest digest_of(const std::string& path) { return {path, sha256_file(path)}; }

nlohmann::json manifest_to_json(const RunManifest& m) {
  auto files = [](const std::vector<FileDigest>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  return {{"command", m.command},   {"config", m.config_path}, {"seed", m.seed},
          {"tool_version", m.tool_version}, {"args", m.args},
          {"inputs", files(m.inputs)}, {"outputs", files(m.outputs)}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_path = j.value("config", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.tool_version = j.value("tool_version", "");
    m.args = j.value("args", std::vector<std::string>{});
    for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
    for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace mp2q
