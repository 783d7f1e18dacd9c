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

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mp2q/builders.hpp"
#include "mp2q/coupling.hpp"
#include "mp2q/error.hpp"
#include "mp2q/estimate.hpp"
#include "mp2q/hfdata.hpp"
#include "mp2q/io.hpp"
#include "mp2q/lowering.hpp"
#include "mp2q/mp2.hpp"
#include "mp2q/rng.hpp"
#include "mp2q/statevec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mp2q;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 2;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

CouplingMap coupling_arg(const std::string& s) {
  if (fs::exists(s) && fs::is_regular_file(s)) return CouplingMap::load(s);
  return CouplingMap::named(s);
}

const EriBlock& find_block(const std::vector<EriBlock>& blocks, const std::string& label) {
  for (const auto& b : blocks)
    if (b.label == label) return b;
  std::string known;
  for (const auto& b : blocks) known += (known.empty() ? "" : ", ") + b.label;
  throw ValidationError("unknown part \"" + label + "\" (known: " + known + ")");
}

PartitionScheme scheme_for(const HartreeFockData& d, const std::string& name) {
  if (name == "helium") return helium_scheme();
  if (name.rfind("chunked:", 0) == 0) return chunked_scheme(d, 0, 0, std::stoi(name.substr(8)));
  throw ValidationError("scheme must be \"helium\" or \"chunked:<size>\"");
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string hf_data;
  std::string formula = "closed-shell";
  std::string scheme = "auto";
};

int cmd_oracle(const OracleArgs& a) {
  const HartreeFockData d = load_hf(a.hf_data);
  const Mp2Formula f = parse_formula(a.formula);
  std::string scheme = a.scheme;
  if (scheme == "auto") scheme = (d.n_orbitals == 9 && d.n_occupied == 1) ? "helium" : "none";
  const Mp2Result r = scheme == "none" ? mp2_energy(d, f) : mp2_energy(d, f, scheme_for(d, scheme));
  json j;
  j["formula"] = formula_name(r.formula);
  j["e2_total"] = r.e2_total;
  j["per_block"] = r.per_block;
  if (scheme != "none") j["scheme"] = scheme;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PipelineArgs {
  std::string config;
  std::string hf_data;
  std::string parts;
  std::string mode;
  std::string readout;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string out_dir = "out";
  int threads = 0;
};

std::vector<std::string> canonical_pipeline_args(const PipelineArgs& a) {
  std::vector<std::string> v{"pipeline", "--config", absolute(a.config)};
  if (!a.hf_data.empty()) v.insert(v.end(), {"--hf-data", absolute(a.hf_data)});
  if (!a.parts.empty()) v.insert(v.end(), {"--parts", a.parts});
  if (!a.mode.empty()) v.insert(v.end(), {"--mode", a.mode});
  if (!a.readout.empty()) v.insert(v.end(), {"--readout", a.readout});
  if (a.seed) v.insert(v.end(), {"--seed", std::to_string(*a.seed)});
  if (a.shots) v.insert(v.end(), {"--shots", std::to_string(*a.shots)});
  return v;
}

int cmd_pipeline(const PipelineArgs& a) {
  PipelineConfig cfg = load_config(a.config);
  if (!a.hf_data.empty()) cfg.hf_data = a.hf_data;
  if (!a.parts.empty()) cfg.parts = split_list(a.parts);
  if (!a.mode.empty()) cfg.mode = parse_mode(a.mode);
  if (!a.readout.empty()) cfg.readout = parse_readout(a.readout);
  if (a.seed) cfg.seed = *a.seed;
  if (a.shots) cfg.shots = *a.shots;
  if (a.threads > 0) cfg.threads = a.threads;
  if (cfg.parts.empty()) throw ValidationError("no parts requested");
  if (cfg.mode == SweepMode::Sampled && cfg.shots == 0) throw ValidationError("shots must be positive");

  const HartreeFockData data = load_hf(cfg.hf_data);
  const PipelineOutcome out = run_pipeline(cfg, data);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  std::ostringstream csv;
  csv << kSweepCsvHeader << '\n';
  for (const auto& p : out.parts) write_sweep_csv(csv, p.sweep, false);
  write_text(dir / "sweep.csv", csv.str());
  json fit = pipeline_to_json(out);
  fit["config"] = config_to_json(cfg);
  fit["config"].erase("hf_data");
  write_text(dir / "fit.json", fit.dump(2) + "\n");

  RunManifest m;
  m.command = "pipeline";
  m.config_path = absolute(a.config);
  m.seed = cfg.seed;
  m.tool_version = MP2Q_VERSION;
  m.args = canonical_pipeline_args(a);
  m.inputs = {digest_of(absolute(a.config)), digest_of(absolute(cfg.hf_data))};
  m.outputs = {digest_of((dir / "sweep.csv").string()), digest_of((dir / "fit.json").string())};
  write_text(dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");

  for (const auto& p : out.parts)
    std::cout << "part " << p.sweep.part << ": start_step " << p.selection.best.start_step << " slope "
              << format_double(p.selection.best.slope) << " epsilon " << format_double(p.epsilon)
              << " (oracle " << format_double(p.oracle_epsilon) << ")"
              << (p.selection.all_rejected ? " [every window hit the plateau guard]" : "") << '\n';
  std::cout << "E2 " << format_double(out.e2) << " Hartree" << (out.partial ? " (partial sum)" : "") << '\n';
  std::cout << "oracle " << format_double(out.oracle_e2) << " Hartree\n";
  std::cout << "relative error " << format_double(out.relative_error()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BuildArgs {
  std::string hf_data;
  std::string scheme = "helium";
  std::string part;
  std::string circuit = "ue";
  double lambda = 0.0;
  std::string out;
};

int cmd_build(const BuildArgs& a) {
  const HartreeFockData d = load_hf(a.hf_data);
  const auto blocks = partition(d, scheme_for(d, a.scheme));
  const EriBlock& blk = find_block(blocks, a.part);
  const AngleTable angles = solve_angles(blk, UeVariant::Sqrt, default_c_e(blk));
  Circuit c;
  if (a.circuit == "ue") c = build_ue(angles);
  else if (a.circuit == "uint") c = build_uint(blk, a.lambda, default_base_state(blk));
  else if (a.circuit == "uint-exact") c = build_uint_exact(blk);
  else if (a.circuit == "pipeline") c = build_pipeline(PipelineSpec{blk, a.lambda, std::nullopt}, angles);
  else throw ValidationError("circuit must be ue, uint, uint-exact or pipeline");
  const std::string text = to_json(c).dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else write_text(a.out, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LowerArgs {
  std::string circuit;
  std::string coupling;
  std::string layout;
  std::string pack_onto;
  std::vector<std::string> pack_alt;
  int pack = 0;
  std::string out;
};

// Native gates are kept as given (after layout); runs of other gates are
// lowered together.
Circuit lower_mixed(const Circuit& in, const CouplingMap& cm, const std::vector<int>& layout) {
  Circuit out(cm.n_qubits());
  Circuit run(in.n_qubits());
  auto flush = [&] {
    if (run.empty()) return;
    out.append(lower(run, cm, layout));
    run = Circuit(in.n_qubits());
  };
  for (const Gate& g : in.gates()) {
    if (g.is_native()) {
      flush();
      Circuit one(in.n_qubits());
      one.add(g);
      out.append(one.remapped(layout, cm.n_qubits()));
    } else {
      run.add(g);
    }
  }
  flush();
  return out;
}

// Touched qubits, relabelled 0..n-1 in ascending order, with CNOT edges.
CouplingMap interaction_graph(const Circuit& c, std::vector<int>& vertices) {
  std::set<int> used;
  for (const Gate& g : c.gates())
    for (int q : g.qubits()) used.insert(q);
  vertices.assign(used.begin(), used.end());
  std::map<int, int> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
  std::set<std::pair<int, int>> edges;
  for (const Gate& g : c.gates()) {
    const auto q = g.qubits();
    if (q.size() == 2) edges.insert(std::minmax(index[q[0]], index[q[1]]));
  }
  return CouplingMap("interaction", static_cast<int>(vertices.size()), {edges.begin(), edges.end()});
}

int cmd_lower(const LowerArgs& a) {
  const Circuit in = circuit_from_json(read_json(a.circuit));
  const CouplingMap cm = coupling_arg(a.coupling);
  std::vector<int> layout;
  if (a.layout.empty()) {
    layout = identity_layout(in.n_qubits());
  } else {
    for (const auto& s : split_list(a.layout)) layout.push_back(std::stoi(s));
  }
  if (static_cast<int>(layout.size()) != in.n_qubits())
    throw ValidationError("layout has " + std::to_string(layout.size()) + " entries, circuit has " +
                          std::to_string(in.n_qubits()) + " qubits");
  const Circuit lowered = lower_mixed(in, cm, layout);
  const auto violations = validate_connectivity(lowered, cm);

  json report;
  report["coupling"] = cm.name();
  report["layout"] = layout;
  report["circuit"] = to_json(lowered);
  report["cnot_count"] = lowered.count_if([](const Gate& g) { return g.is_cnot(); });
  json vj = json::array();
  for (const auto& v : violations) vj.push_back({{"gate_index", v.gate_index}, {"qubits", {v.a, v.b}}});
  report["violations"] = vj;
  if (a.pack > 0) {
    const CouplingMap host = a.pack_onto.empty() ? cm : coupling_arg(a.pack_onto);
    // Shape 0 is the lowered circuit's own interaction graph; each
    // alternative map contributes the graph of the circuit lowered onto it.
    std::vector<CouplingMap> shapes;
    std::vector<std::vector<int>> vertices(1);
    std::vector<std::string> names{cm.name()};
    shapes.push_back(interaction_graph(lowered, vertices[0]));
    for (const auto& alt_name : a.pack_alt) {
      const CouplingMap alt = coupling_arg(alt_name);
      const Circuit alt_lowered = lower_mixed(in, alt, layout);
      if (!validate_connectivity(alt_lowered, alt).empty())
        throw ValidationError("circuit does not lower cleanly onto alternative " + alt.name());
      vertices.emplace_back();
      shapes.push_back(interaction_graph(alt_lowered, vertices.back()));
      names.push_back(alt.name());
    }
    const auto emb = find_parallel_embeddings(host, shapes, a.pack);
    json ej = json::array();
    for (const auto& e : emb) {
      json m = json::object();
      const auto& vs = vertices[static_cast<std::size_t>(e.shape)];
      for (std::size_t v = 0; v < e.map.size(); ++v) m[std::to_string(vs[v])] = e.map[v];
      ej.push_back({{"shape", names[static_cast<std::size_t>(e.shape)]}, {"qubits", m}});
    }
    report["pack"] = {{"host", host.name()}, {"requested", a.pack}, {"found", emb.size()},
                      {"embeddings", ej}};
  }
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else write_text(a.out, text);

  for (const auto& v : violations)
    std::fprintf(stderr, "violation: gate %zu acts on non-adjacent qubits %d and %d\n", v.gate_index,
                 v.a, v.b);
  if (a.pack > 0 && report["pack"]["found"].get<int>() < a.pack)
    std::fprintf(stderr, "pack: only %d of %d disjoint embeddings found\n",
                 report["pack"]["found"].get<int>(), a.pack);
  return violations.empty() ? kExitOk : kExitViolations;
}

// ---------------------------------------------------------------------------

struct CorrectArgs {
  std::string all;
  std::string lite;
  std::string out;
};

int cmd_correct(const CorrectArgs& a) {
  const CountsFile all = read_counts_csv(a.all);
  const CountsFile lite = read_counts_csv(a.lite);
  const auto rows = correct_denominators(all.tables, lite.tables);
  auto theory = all.theory;
  for (const auto& [k, v] : lite.theory) theory.emplace(k, v);
  std::ostringstream os;
  write_corrections_csv(os, rows, theory);
  if (a.out.empty()) std::cout << os.str();
  else write_text(a.out, os.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string hf_data;
  std::string scheme = "helium";
  std::string part;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 1;
  std::string out_all;
  std::string out_lite;
};

// Noiseless U_E readout tables, one per basis input, for both circuit forms.
int cmd_simulate_ue(const SimulateArgs& a) {
  const HartreeFockData d = load_hf(a.hf_data);
  const auto blocks = partition(d, scheme_for(d, a.scheme));
  const EriBlock& blk = find_block(blocks, a.part);
  const double c_e = default_c_e(blk);
  const AngleTable angles = solve_angles(blk, UeVariant::Sqrt, c_e);
  const int q = blk.n_qubits();
  const Circuit full = build_ue(angles);
  std::vector<CountsTable> all, lite;
  std::vector<double> theory;
  for (std::uint64_t x = 0; x < blk.size(); ++x) {
    const auto seed_all = derive_seed(a.seed, 2 * x);
    const auto seed_lite = derive_seed(a.seed, 2 * x + 1);
    all.push_back(sample_counts(apply_circuit(StateVector::basis(q + 1, x), full), a.shots, seed_all));
    lite.push_back(sample_counts(apply_circuit(StateVector::basis(q + 1, x), build_ue_lite(angles, x)),
                                 a.shots, seed_lite));
    theory.push_back(blk.is_padding(x) ? 0.0 : c_e / std::abs(blk.denominators[x]));
  }
  std::ostringstream oa, ol;
  write_counts_csv(oa, all, &theory);
  write_counts_csv(ol, lite, &theory);
  write_text(a.out_all, oa.str());
  write_text(a.out_lite, ol.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

int dispatch(std::vector<std::string> args);

struct ReplayArgs {
  std::string manifest;
  std::string out_dir;
};

int cmd_replay(const ReplayArgs& a) {
  const RunManifest m = manifest_from_json(read_json(a.manifest));
  if (m.command != "pipeline") throw ValidationError("replay supports pipeline manifests only");
  for (const auto& f : m.inputs) {
    if (!fs::exists(f.path)) throw ValidationError("input " + f.path + " is missing");
    if (sha256_file(f.path) != f.sha256) throw ValidationError("input " + f.path + " has changed");
  }
  const fs::path dir = a.out_dir.empty() ? fs::temp_directory_path() / ("mp2q-replay-" + std::to_string(::getpid()))
                                         : fs::path(a.out_dir);
  std::vector<std::string> args = m.args;
  args.insert(args.end(), {"--out-dir", dir.string()});
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  int rc;
  try {
    rc = dispatch(args);
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  if (rc != kExitOk) return rc;
  bool same = true;
  for (const auto& f : m.outputs) {
    const fs::path fresh = dir / fs::path(f.path).filename();
    const std::string h = sha256_file(fresh.string());
    const bool ok = h == f.sha256;
    same = same && ok;
    std::printf("%s %s\n", ok ? "identical" : "DIFFERS  ", fs::path(f.path).filename().string().c_str());
  }
  if (a.out_dir.empty()) fs::remove_all(dir);
  return same ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------

int dispatch(std::vector<std::string> args) {
  CLI::App app{"mp2q: quantum-circuit estimation of MP2 correlation energies"};
  app.set_version_flag("--version", std::string(MP2Q_VERSION));
  app.require_subcommand(1);

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "classical MP2 energy by direct summation");
  oracle->add_option("--hf-data", oa.hf_data, "Hartree-Fock data JSON")->required();
  oracle->add_option("--formula", oa.formula, "helium-ground | closed-shell | spin-orbital");
  oracle->add_option("--scheme", oa.scheme, "auto | none | helium | chunked:<size>");

  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "sweep, fit and assemble the energy");
  pipeline->add_option("--config", pa.config, "sweep config JSON")->required();
  pipeline->add_option("--hf-data", pa.hf_data, "override the config's hf_data");
  pipeline->add_option("--parts", pa.parts, "comma-separated part labels");
  pipeline->add_option("--mode", pa.mode, "exact | sampled");
  pipeline->add_option("--readout", pa.readout, "signal | marginal");
  pipeline->add_option("--seed", pa.seed, "base seed");
  pipeline->add_option("--shots", pa.shots, "shots per lambda point");
  pipeline->add_option("--out-dir", pa.out_dir, "output directory");
  pipeline->add_option("--threads", pa.threads, "worker threads (default MP2Q_THREADS or all cores)");

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "emit a circuit for one part as JSON");
  build->add_option("--hf-data", ba.hf_data, "Hartree-Fock data JSON")->required();
  build->add_option("--part", ba.part, "part label")->required();
  build->add_option("--scheme", ba.scheme, "helium | chunked:<size>");
  build->add_option("--circuit", ba.circuit, "ue | uint | uint-exact | pipeline");
  build->add_option("--lambda", ba.lambda, "lambda for uint and pipeline");
  build->add_option("--out", ba.out, "output file (default stdout)");

  LowerArgs la;
  auto* lowerc = app.add_subcommand("lower", "lower a circuit onto a coupling map");
  lowerc->add_option("--circuit", la.circuit, "circuit JSON")->required();
  lowerc->add_option("--coupling", la.coupling, "coupling map name or JSON file")->required();
  lowerc->add_option("--layout", la.layout, "comma-separated physical qubit per logical qubit");
  lowerc->add_option("--pack", la.pack, "find K disjoint embeddings of the lowered circuit");
  lowerc->add_option("--pack-onto", la.pack_onto, "host map for --pack (default --coupling)");
  lowerc->add_option("--pack-alt", la.pack_alt, "alternative layout map(s) usable by --pack");
  lowerc->add_option("--out", la.out, "output file (default stdout)");

  CorrectArgs ca;
  auto* correct = app.add_subcommand("correct", "readout-error corrected denominators");
  correct->add_option("--all", ca.all, "counts CSV of the full circuit")->required();
  correct->add_option("--lite", ca.lite, "counts CSV of the lite circuits")->required();
  correct->add_option("--out", ca.out, "output CSV (default stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate-ue", "noiseless all/lite U_E count tables");
  simulate->add_option("--hf-data", sa.hf_data, "Hartree-Fock data JSON")->required();
  simulate->add_option("--part", sa.part, "part label")->required();
  simulate->add_option("--scheme", sa.scheme, "helium | chunked:<size>");
  simulate->add_option("--shots", sa.shots, "shots per input");
  simulate->add_option("--seed", sa.seed, "base seed");
  simulate->add_option("--out-all", sa.out_all, "counts CSV for the full circuit")->required();
  simulate->add_option("--out-lite", sa.out_lite, "counts CSV for the lite circuits")->required();

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "rerun a manifest and compare outputs byte for byte");
  replay->add_option("--manifest", ra.manifest, "manifest.json")->required();
  replay->add_option("--out-dir", ra.out_dir, "keep the replayed outputs here");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  if (*oracle) return cmd_oracle(oa);
  if (*pipeline) return cmd_pipeline(pa);
  if (*build) return cmd_build(ba);
  if (*lowerc) return cmd_lower(la);
  if (*correct) return cmd_correct(ca);
  if (*simulate) return cmd_simulate_ue(sa);
  if (*replay) return cmd_replay(ra);
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
}
