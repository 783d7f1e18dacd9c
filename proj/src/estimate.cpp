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

#include "mp2q/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "mp2q/error.hpp"
#include "mp2q/mp2.hpp"
#include "mp2q/rng.hpp"

namespace mp2q {

namespace {

constexpr double kTieTolerance = 1e-9;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void read_per_part(const nlohmann::json& j, const char* key, std::map<std::string, T>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "auto") return;
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = it.value().get<T>();
  } else {
    out["*"] = v.get<T>();
  }
}

template <class T>
std::optional<T> lookup(const std::map<std::string, T>& m, const std::string& label) {
  if (auto it = m.find(label); it != m.end()) return it->second;
  if (auto it = m.find("*"); it != m.end()) return it->second;
  return std::nullopt;
}

}  // namespace

SweepMode parse_mode(const std::string& s) {
  if (s == "exact" || s == "exact-probabilities") return SweepMode::Exact;
  if (s == "sampled") return SweepMode::Sampled;
  throw ValidationError("mode must be \"exact\" or \"sampled\", got \"" + s + "\"");
}

Readout parse_readout(const std::string& s) {
  if (s == "signal") return Readout::Signal;
  if (s == "marginal") return Readout::Marginal;
  throw ValidationError("readout must be \"signal\" or \"marginal\", got \"" + s + "\"");
}

std::string mode_name(SweepMode m) { return m == SweepMode::Exact ? "exact" : "sampled"; }
std::string readout_name(Readout r) { return r == Readout::Signal ? "signal" : "marginal"; }

double SweepResult::zeta(std::size_t row, Readout r) const {
  return r == Readout::Signal ? rows[row].zeta_signal : rows[row].zeta;
}

double SweepResult::register_frequency(std::size_t row, std::uint64_t x) const {
  const std::uint64_t top = std::uint64_t{1} << register_qubits;
  const auto& r = rows[row];
  if (r.counts) return r.counts->frequency(x) + r.counts->frequency(x | top);
  return r.probabilities[x] + r.probabilities[x | top];
}

RegressionFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("least squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw NumericalError("degenerate regression window: all lambda^2 equal");
  RegressionFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.lse += r * r;
  }
  return f;
}

namespace {

RegressionFit fit_window(const std::vector<double>& xs, const std::vector<double>& ys, int start,
                         int len) {
  if (start < 0 || len < 3 || static_cast<std::size_t>(start + len) > xs.size())
    throw ValidationError("regression window [" + std::to_string(start) + ", " +
                          std::to_string(start + len) + ") needs >= 3 points inside the sweep of " +
                          std::to_string(xs.size()));
  const std::vector<double> x(xs.begin() + start, xs.begin() + start + len);
  const std::vector<double> y(ys.begin() + start, ys.begin() + start + len);
  RegressionFit f = least_squares(x, y);
  f.start_step = start;
  f.total_steps = len;
  const std::size_t half = std::max<std::size_t>(3, (x.size() + 1) / 2);
  const RegressionFit head = least_squares(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half)),
                                           std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(half)));
  const double predicted = head.slope * (x.back() - x.front());
  const double observed = y.back() - y.front();
  if (observed > 0) f.plateau_ratio = predicted / observed;
  else f.plateau_ratio = predicted <= 0 ? 1.0 : std::numeric_limits<double>::infinity();
  f.rejected = f.plateau_ratio > kPlateauLimit;
  return f;
}

}  // namespace

RegressionFit fit_zeta(const SweepResult& sweep, int start_step, int total_steps, Readout readout) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    x.push_back(sweep.rows[i].lambda_sq);
    y.push_back(sweep.zeta(i, readout));
  }
  return fit_window(x, y, start_step, total_steps);
}

StartSelection select_start_step(const std::vector<double>& lambda_sq,
                                 const std::vector<double>& zeta, int total_steps) {
  const int n = static_cast<int>(lambda_sq.size());
  if (total_steps > n) throw ValidationError("sweep shorter than one regression window");
  StartSelection sel;
  for (int s = 0; s + total_steps <= n; ++s) sel.candidates.push_back(fit_window(lambda_sq, zeta, s, total_steps));
  double scale = 0;
  for (const auto& f : sel.candidates) scale = std::max(scale, f.lse);
  auto pick = [&](bool skip_rejected) -> const RegressionFit* {
    const RegressionFit* best = nullptr;
    for (const auto& f : sel.candidates) {
      if (skip_rejected && f.rejected) continue;
      if (!best || f.lse < best->lse - kTieTolerance * scale) best = &f;
    }
    return best;
  };
  const RegressionFit* best = pick(true);
  if (!best) {
    sel.all_rejected = true;
    best = pick(false);
  }
  sel.best = *best;
  return sel;
}

StartSelection select_start_step(const SweepResult& sweep, int total_steps, Readout readout) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    x.push_back(sweep.rows[i].lambda_sq);
    y.push_back(sweep.zeta(i, readout));
  }
  return select_start_step(x, y, total_steps);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MP2Q_THREADS"); env && *env) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t part_seed(std::uint64_t base_seed, const std::string& label) {
  return derive_seed(base_seed, fnv1a(label));
}

SweepResult run_sweep(const EriBlock& blk, const PartSweep& st, int threads) {
  if (st.n_points < 1) throw ValidationError("sweep needs at least one lambda point");
  if (!(st.lambda_step >= 0) || !std::isfinite(st.lambda_step))
    throw ValidationError("lambda step must be finite and >= 0");
  if (st.mode == SweepMode::Sampled && st.shots == 0) throw ValidationError("shots must be positive");
  SweepResult res;
  res.part = st.label;
  res.register_qubits = blk.n_qubits();
  res.base_state = st.base_state.value_or(default_base_state(blk));
  res.c_e = st.c_e.value_or(default_c_e(blk));
  res.mode = st.mode;
  res.shots = st.mode == SweepMode::Sampled ? st.shots : 0;
  const AngleTable angles = solve_angles(blk, UeVariant::Sqrt, res.c_e);
  res.rows.resize(static_cast<std::size_t>(st.n_points));

  const int q = blk.n_qubits();
  const std::uint64_t top = std::uint64_t{1} << q;
  auto work = [&](std::size_t k) {
    SweepRow& row = res.rows[k];
    row.step = static_cast<int>(k);
    row.lambda = static_cast<double>(k) * st.lambda_step;
    row.lambda_sq = row.lambda * row.lambda;
    const Circuit c = build_pipeline(PipelineSpec{blk, row.lambda, res.base_state}, angles);
    const auto probs = probabilities(apply_circuit(StateVector(q + 1), c));
    if (st.mode == SweepMode::Exact) {
      row.probabilities = probs;
      for (std::uint64_t x = 0; x < top; ++x) {
        row.zeta += probs[x | top];
        if (x != res.base_state) row.zeta_signal += probs[x | top];
      }
    } else {
      row.counts = sample_counts(probs, q + 1, st.shots, derive_seed(st.seed, k));
      for (std::uint64_t x = 0; x < top; ++x) {
        row.zeta += row.counts->frequency(x | top);
        if (x != res.base_state) row.zeta_signal += row.counts->frequency(x | top);
      }
    }
  };
  const int nt = std::min(resolve_threads(threads), st.n_points);
  if (nt <= 1) {
    for (std::size_t k = 0; k < res.rows.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < res.rows.size();) {
          try {
            work(k);
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return res;
}

std::vector<EriSlope> estimate_eri_slopes(const SweepResult& sweep, int start_step, int total_steps) {
  std::vector<double> xs;
  for (const auto& r : sweep.rows) xs.push_back(r.lambda_sq);
  std::vector<EriSlope> out;
  const std::uint64_t n = std::uint64_t{1} << sweep.register_qubits;
  for (std::uint64_t x = 0; x < n; ++x) {
    std::vector<double> ys;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) ys.push_back(sweep.register_frequency(i, x));
    const RegressionFit f = fit_window(xs, ys, start_step, total_steps);
    EriSlope e;
    e.outcome = x;
    e.slope = f.slope;
    e.intercept = f.intercept;
    e.lse = f.lse;
    e.gamma_abs = std::sqrt(std::max(f.slope, 0.0));
    double mean = 0, sst = 0;
    for (int i = start_step; i < start_step + total_steps; ++i) mean += ys[static_cast<std::size_t>(i)];
    mean /= total_steps;
    for (int i = start_step; i < start_step + total_steps; ++i)
      sst += (ys[static_cast<std::size_t>(i)] - mean) * (ys[static_cast<std::size_t>(i)] - mean);
    e.relative_lse = sst > 0 ? f.lse / sst : 0.0;
    e.flagged = e.relative_lse > kEriRelativeLseLimit;
    out.push_back(e);
  }
  return out;
}

std::vector<DenominatorEstimate> correct_denominators(const std::vector<CountsTable>& all,
                                                      const std::vector<CountsTable>& lite) {
  const std::size_t n = all.size();
  if (n < 2 || (n & (n - 1)) != 0)
    throw ValidationError("counts must cover 2^Q register inputs, got " + std::to_string(n));
  if (lite.size() != n) throw ValidationError("lite and all tables cover different input sets");
  for (std::size_t x = 0; x < n; ++x)
    for (const auto* t : {&all[x], &lite[x]})
      if (t->shots == 0) throw NumericalError("zero total counts for input " + std::to_string(x));
  auto f = [](const CountsTable& t, std::uint64_t o) { return t.frequency(o); };
  double bracket = 0;
  for (std::size_t m = 1; m < n; ++m) {
    const double den = f(lite[m], m) + f(lite[m], m + n);
    if (!(den > 0)) throw NumericalError("zero lite counts on outputs n, n+N for input " + std::to_string(m));
    bracket += (f(lite[m], m) + f(all[m], m + n)) / den;
  }
  bracket /= static_cast<double>(n - 1);
  if (!(bracket > 0)) throw NumericalError("correction factor is zero");
  std::vector<DenominatorEstimate> out;
  for (std::size_t x = 0; x < n; ++x) {
    const double den = f(all[x], x) + f(all[x], x + n);
    if (!(den > 0)) throw NumericalError("zero counts on outputs x, x+N for input " + std::to_string(x));
    DenominatorEstimate d;
    d.input = x;
    d.raw_ratio = f(all[x], x + n) / den;
    d.factor = bracket;
    d.corrected = d.raw_ratio / bracket;
    out.push_back(d);
  }
  return out;
}

double block_sign(const EriBlock& blk) {
  bool neg = false, pos = false;
  for (std::size_t x = 0; x < blk.size(); ++x) {
    if (blk.is_padding(x)) continue;
    (blk.denominators[x] < 0 ? neg : pos) = true;
  }
  if (neg && pos) throw ValidationError("block " + blk.label + " mixes denominator signs");
  return pos ? 1.0 : -1.0;
}

double assemble_energy(const std::vector<PartEstimate>& parts) {
  double e = 0;
  for (const auto& p : parts) {
    if (!(p.c_e > 0)) throw ValidationError("part " + p.label + " has non-positive C_e");
    e += p.sign * p.multiplicity * p.epsilon();
  }
  return e;
}

double assemble_helium(const std::map<std::string, PartEstimate>& parts) {
  for (const char* need : {"I", "III", "IV"})
    if (!parts.count(need)) throw ValidationError(std::string("missing part ") + need);
  std::vector<PartEstimate> v{parts.at("I"), parts.at("III"), parts.at("IV")};
  if (parts.count("II")) v.push_back(parts.at("II"));
  else v[1].multiplicity = 2;
  for (auto& p : v) p.sign = -1.0;
  return assemble_energy(v);
}

PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  PipelineConfig c;
  try {
    c.hf_data = j.at("hf_data").get<std::string>();
    if (!c.hf_data.empty() && std::filesystem::path(c.hf_data).is_relative())
      c.hf_data = (std::filesystem::path(base_dir) / c.hf_data).lexically_normal().string();
    if (j.contains("scheme")) {
      const auto& s = j.at("scheme");
      if (s.is_string()) {
        c.scheme = s.get<std::string>();
      } else {
        c.scheme = "chunked";
        c.scheme_group_size = s.value("group_size", 4);
      }
      if (c.scheme != "helium" && c.scheme != "chunked")
        throw ValidationError("scheme must be \"helium\" or {\"group_size\": n}");
    }
    if (j.contains("parts")) c.parts = j.at("parts").get<std::vector<std::string>>();
    read_per_part(j, "lambda_step", c.lambda_step);
    c.lambda_budget = j.value("lambda_budget", c.lambda_budget);
    if (j.contains("total_steps") && j.at("total_steps").is_number()) {
      c.default_total_steps = j.at("total_steps").get<int>();
    } else {
      read_per_part(j, "total_steps", c.total_steps);
    }
    read_per_part(j, "sweep_steps", c.sweep_steps);
    c.default_extra_starts = j.value("extra_start_steps", c.default_extra_starts);
    c.shots = j.value("shots", c.shots);
    c.seed = j.value("seed", c.seed);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    read_per_part(j, "c_e", c.c_e);
    if (j.contains("readout")) c.readout = parse_readout(j.at("readout").get<std::string>());
    c.threads = j.value("threads", 0);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("sweep config: ") + ex.what());
  }
  if (c.parts.empty()) throw ValidationError("sweep config lists no parts");
  if (!(c.lambda_budget > 0)) throw ValidationError("lambda_budget must be positive");
  if (c.default_total_steps < 3) throw ValidationError("total_steps must be >= 3");
  for (const auto& [k, v] : c.total_steps)
    if (v < 3) throw ValidationError("total_steps for " + k + " must be >= 3");
  for (const auto& [k, v] : c.lambda_step)
    if (!(v >= 0)) throw ValidationError("lambda_step for " + k + " must be >= 0");
  if (c.mode == SweepMode::Sampled && c.shots == 0) throw ValidationError("shots must be positive");
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["hf_data"] = c.hf_data;
  if (c.scheme == "helium") j["scheme"] = "helium";
  else j["scheme"] = {{"group_size", c.scheme_group_size}};
  j["parts"] = c.parts;
  auto per_part = [](const auto& m) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : m) o[k] = v;
    return o;
  };
  j["lambda_step"] = c.lambda_step.empty() ? nlohmann::json("auto") : per_part(c.lambda_step);
  j["lambda_budget"] = c.lambda_budget;
  if (c.total_steps.empty()) j["total_steps"] = c.default_total_steps;
  else j["total_steps"] = per_part(c.total_steps);
  if (!c.sweep_steps.empty()) j["sweep_steps"] = per_part(c.sweep_steps);
  j["extra_start_steps"] = c.default_extra_starts;
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["mode"] = mode_name(c.mode);
  j["c_e"] = c.c_e.empty() ? nlohmann::json("auto") : per_part(c.c_e);
  j["readout"] = readout_name(c.readout);
  return j;
}

double auto_lambda_step(const EriBlock& blk, double budget, int n_points) {
  double gmax = 0;
  for (double g : blk.gamma) gmax = std::max(gmax, std::abs(g));
  if (gmax == 0.0) throw ValidationError("block " + blk.label + " has no nonzero gamma");
  if (n_points < 2) return 0.0;
  return std::sqrt(budget) / gmax / (n_points - 1);
}

PartSweep part_settings(const PipelineConfig& cfg, const EriBlock& blk) {
  PartSweep s;
  s.label = blk.label;
  s.total_steps = lookup(cfg.total_steps, blk.label).value_or(cfg.default_total_steps);
  s.n_points = lookup(cfg.sweep_steps, blk.label).value_or(s.total_steps + cfg.default_extra_starts);
  if (s.n_points < s.total_steps)
    throw ValidationError("part " + blk.label + ": sweep_steps shorter than total_steps");
  s.lambda_step = lookup(cfg.lambda_step, blk.label)
                      .value_or(auto_lambda_step(blk, cfg.lambda_budget, s.n_points));
  s.mode = cfg.mode;
  s.shots = cfg.shots;
  s.seed = part_seed(cfg.seed, blk.label);
  s.c_e = lookup(cfg.c_e, blk.label);
  return s;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg, const HartreeFockData& data) {
  const bool helium = cfg.scheme == "helium";
  const PartitionScheme scheme =
      helium ? helium_scheme() : chunked_scheme(data, 0, 0, cfg.scheme_group_size);
  if (helium && data.n_orbitals != 9)
    throw ValidationError("helium scheme expects 9 orbitals, data has " + std::to_string(data.n_orbitals));
  const auto blocks = partition(data, scheme);
  auto find = [&](const std::string& label) -> const EriBlock& {
    for (const auto& b : blocks)
      if (b.label == label) return b;
    throw ValidationError("unknown part \"" + label + "\"");
  };
  std::set<std::string> seen;
  PipelineOutcome out;
  for (const auto& label : cfg.parts) {
    if (!seen.insert(label).second) throw ValidationError("part " + label + " requested twice");
    const EriBlock& blk = find(label);
    PartOutcome po;
    po.settings = part_settings(cfg, blk);
    try {
      po.sweep = run_sweep(blk, po.settings, cfg.threads);
      po.selection = select_start_step(po.sweep, po.settings.total_steps, cfg.readout);
    } catch (const NumericalError& e) {
      throw NumericalError("part " + label + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("part " + label + ": " + e.what());
    }
    po.epsilon = po.selection.best.slope / po.sweep.c_e;
    po.oracle_epsilon = block_energy(blk);
    po.sign = block_sign(blk);
    out.parts.push_back(std::move(po));
  }
  std::map<std::string, PartEstimate> est;
  for (const auto& p : out.parts)
    est[p.sweep.part] = PartEstimate{p.sweep.part, p.selection.best.slope, p.sweep.c_e, p.sign, 1.0};
  if (helium && seen.count("I") && seen.count("III") && seen.count("IV")) {
    out.e2 = assemble_helium(est);
    out.oracle_e2 = mp2_energy(data, Mp2Formula::HeliumGround).e2_total;
  } else {
    std::vector<PartEstimate> v;
    for (const auto& [k, p] : est) v.push_back(p);
    out.e2 = assemble_energy(v);
    for (const auto& p : out.parts) out.oracle_e2 += p.sign * p.oracle_epsilon;
    out.partial = helium || seen.size() != blocks.size();
  }
  return out;
}

}  // namespace mp2q
