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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mp2q/estimate.hpp"
#include "mp2q/statevec.hpp"

namespace mp2q {

// 17 significant digits, round-trips every double.
std::string format_double(double v);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

// Sweep CSV header.
inline constexpr const char* kSweepCsvHeader =
    "part,step,lambda,lambda_sq,outcome,count,shots,zeta,zeta_signal";

// One row per (step, outcome). Outcomes are Q+1 bit strings, q' leftmost.
// Exact mode lists every outcome with its probability in `count` and shots 0;
// sampled mode lists observed outcomes only.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep, bool header = true);

nlohmann::json fit_to_json(const PartOutcome& part);
nlohmann::json pipeline_to_json(const PipelineOutcome& outcome);

// Readout count tables per register input. Columns input,outcome,count and an
// optional theory column holding C_e/|D_x| for that input.
struct CountsFile {
  std::vector<CountsTable> tables;          // indexed by input
  std::map<std::uint64_t, double> theory;  // per input, when supplied
};
CountsFile read_counts_csv(const std::string& path);
void write_counts_csv(std::ostream& os, const std::vector<CountsTable>& tables,
                      const std::vector<double>* theory = nullptr);

void write_corrections_csv(std::ostream& os, const std::vector<DenominatorEstimate>& rows,
                           const std::map<std::uint64_t, double>& theory);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> args;  // argv after the program name
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
FileDigest digest_of(const std::string& path);

}  // namespace mp2q
