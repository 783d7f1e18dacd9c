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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mp2q/builders.hpp"
#include "mp2q/hfdata.hpp"
#include "mp2q/statevec.hpp"

namespace mp2q {

enum class SweepMode { Exact, Sampled };

// marginal: Pr[q'=1]. signal: Pr[q'=1 and register != y]; drops the
// base-state branch, whose depletion otherwise cancels the lambda^2 signal.
enum class Readout { Signal, Marginal };

SweepMode parse_mode(const std::string& s);
Readout parse_readout(const std::string& s);
std::string mode_name(SweepMode m);
std::string readout_name(Readout r);

// Settings of one part's sweep. Step k sits at lambda = k * lambda_step.
struct PartSweep {
  std::string label;
  double lambda_step = 0.0;
  int n_points = 0;
  int total_steps = 0;  // regression window length
  SweepMode mode = SweepMode::Exact;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  std::optional<double> c_e;  // default_c_e when unset
  std::optional<std::uint64_t> base_state;
};

struct SweepRow {
  int step = 0;
  double lambda = 0.0;
  double lambda_sq = 0.0;
  double zeta = 0.0;
  double zeta_signal = 0.0;
  std::vector<double> probabilities;  // exact mode, over all Q+1 qubits
  std::optional<CountsTable> counts;  // sampled mode
};

struct SweepResult {
  std::string part;
  int register_qubits = 0;
  std::uint64_t base_state = 0;
  double c_e = 0.0;
  SweepMode mode = SweepMode::Exact;
  std::uint64_t shots = 0;
  std::vector<SweepRow> rows;

  double zeta(std::size_t row, Readout r) const;
  // Probability (or frequency) of register outcome x, summed over q'.
  double register_frequency(std::size_t row, std::uint64_t x) const;
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double lse = 0.0;
  int start_step = 0;
  int total_steps = 0;
  // Initial slope (first half of the window, at least three points) times
  // the window's lambda^2 span, over the observed zeta rise. Saturation
  // pushes it above 1.
  double plateau_ratio = 1.0;
  bool rejected = false;
};

inline constexpr double kPlateauLimit = 1.25;

// Ordinary least squares of y on x.
RegressionFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

RegressionFit fit_zeta(const SweepResult& sweep, int start_step, int total_steps,
                       Readout readout = Readout::Signal);

struct StartSelection {
  RegressionFit best;
  std::vector<RegressionFit> candidates;
  bool all_rejected = false;
};

// Every start step 0..n_points-total_steps; minimum LSE wins, plateau
// rejected windows are skipped unless nothing else is left. LSE values
// within a relative 1e-9 count as ties and the smaller start step wins.
StartSelection select_start_step(const SweepResult& sweep, int total_steps,
                                 Readout readout = Readout::Signal);
StartSelection select_start_step(const std::vector<double>& lambda_sq,
                                 const std::vector<double>& zeta, int total_steps);

SweepResult run_sweep(const EriBlock& blk, const PartSweep& settings, int threads = 0);

struct EriSlope {
  std::uint64_t outcome = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double lse = 0.0;
  double gamma_abs = 0.0;       // sqrt(max(slope, 0))
  double relative_lse = 0.0;    // lse / total sum of squares
  bool flagged = false;
};

inline constexpr double kEriRelativeLseLimit = 1e-2;

// Per register outcome, least squares of its frequency on lambda^2.
std::vector<EriSlope> estimate_eri_slopes(const SweepResult& sweep, int start_step, int total_steps);

struct DenominatorEstimate {
  std::uint64_t input = 0;
  double raw_ratio = 0.0;   // p_{x+N} / (p_x + p_{x+N})
  double factor = 1.0;      // the bracketed mean
  double corrected = 0.0;   // raw_ratio / factor, estimates C_e/|D_x|
};

// counts_all[x] and counts_lite[x] are the readout tables for register
// input x over Q+1 qubits (q' is the top bit, so output x+N has q'=1,
// N = 2^Q). The bracket averages inputs 1..N-1.
std::vector<DenominatorEstimate> correct_denominators(const std::vector<CountsTable>& counts_all,
                                                      const std::vector<CountsTable>& counts_lite);

struct PartEstimate {
  std::string label;
  double slope = 0.0;
  double c_e = 1.0;
  double sign = -1.0;
  double multiplicity = 1.0;
  double epsilon() const { return slope / c_e; }
};

// -1 when every non-padding denominator is negative, +1 when all positive.
double block_sign(const EriBlock& blk);

// sum of sign * multiplicity * slope / C_e.
double assemble_energy(const std::vector<PartEstimate>& parts);
// Needs I, III and IV; II is mirrored from III unless supplied.
double assemble_helium(const std::map<std::string, PartEstimate>& parts);

// ---------------------------------------------------------------------------
// End-to-end runs driven by a JSON config.

struct PipelineConfig {
  std::string hf_data;
  std::string scheme = "helium";  // or "chunked"
  int scheme_group_size = 4;
  std::vector<std::string> parts{"I", "III", "IV"};
  std::map<std::string, double> lambda_step;  // empty: derive from lambda_budget
  double lambda_budget = 1e-3;                // lambda_max^2 * max gamma^2 for auto steps
  std::map<std::string, int> total_steps;
  std::map<std::string, int> sweep_steps;
  int default_total_steps = 10;
  int default_extra_starts = 5;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 1;
  SweepMode mode = SweepMode::Exact;
  std::map<std::string, double> c_e;  // empty: auto
  Readout readout = Readout::Signal;
  int threads = 0;
};

PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& c);

struct PartOutcome {
  SweepResult sweep;
  StartSelection selection;
  PartSweep settings;
  double epsilon = 0.0;         // slope / C_e
  double oracle_epsilon = 0.0;  // block_energy
  double sign = -1.0;
};

struct PipelineOutcome {
  std::vector<PartOutcome> parts;
  double e2 = 0.0;
  double oracle_e2 = 0.0;
  bool partial = false;  // true when the requested parts do not cover the energy
  double relative_error() const { return oracle_e2 == 0.0 ? 0.0 : (e2 - oracle_e2) / std::abs(oracle_e2); }
};

// lambda step that puts lambda_max^2 * max gamma^2 at `budget` after
// n_points - 1 steps.
double auto_lambda_step(const EriBlock& blk, double budget, int n_points);

PartSweep part_settings(const PipelineConfig& cfg, const EriBlock& blk);
PipelineOutcome run_pipeline(const PipelineConfig& cfg, const HartreeFockData& data);

// Stable per-part seed, independent of which other parts run.
std::uint64_t part_seed(std::uint64_t base_seed, const std::string& label);

// Worker count: `requested` if positive, else MP2Q_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace mp2q
