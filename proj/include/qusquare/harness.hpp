//   Copyright 2026 The QuSquare Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qusquare/clifford_bench.hpp"
#include "qusquare/ghz.hpp"
#include "qusquare/qnn.hpp"
#include "qusquare/stabilizer.hpp"
#include "qusquare/statevector.hpp"
#include "qusquare/tfim.hpp"

namespace qusquare {

using json = nlohmann::json;

inline constexpr const char* SUITE_VERSION = "1.0.0";

// ---- circuits ------------------------------------------------------------

// One gate as text: "Rz(0.5) 3", "CX 0 1", "X 2 | 4=0 5=1".
inline std::string gate_to_string(const Gate& g) {
  std::string s = gate_name(g.kind);
  if (!g.params.empty()) {
    s += '(';
    for (std::size_t i = 0; i < g.params.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", g.params[i]);
      if (i) s += ',';
      s += buf;
    }
    s += ')';
  }
  for (auto t : g.targets) s += ' ' + std::to_string(t);
  if (!g.controls.empty()) {
    s += " |";
    for (auto& c : g.controls) s += ' ' + std::to_string(c.qubit) + (c.bit ? "=1" : "=0");
  }
  return s;
}

inline Gate gate_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  in >> head;
  Gate g;
  const auto lp = head.find('(');
  g.kind = gate_kind_from_name(head.substr(0, lp));
  if (lp != std::string::npos) {
    if (head.back() != ')') throw std::invalid_argument("bad gate '" + text + "'");
    std::stringstream ps(head.substr(lp + 1, head.size() - lp - 2));
    std::string tok;
    while (std::getline(ps, tok, ',')) g.params.push_back(std::stod(tok));
  }
  std::string tok;
  bool ctl = false;
  while (in >> tok) {
    if (tok == "|") {
      ctl = true;
      continue;
    }
    if (!ctl) {
      g.targets.push_back(unsigned(std::stoul(tok)));
    } else {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad control in '" + text + "'");
      g.controls.push_back({unsigned(std::stoul(tok.substr(0, eq))), tok.substr(eq + 1) == "1"});
    }
  }
  return g;
}

inline json circuit_to_json(const Circuit& c) {
  json moments = json::array();
  for (auto& m : c.moments()) {
    json mj = json::array();
    for (auto& g : m) mj.push_back(gate_to_string(g));
    moments.push_back(std::move(mj));
  }
  return {{"qubits", c.qubit_count()}, {"moments", std::move(moments)}, {"layer_marks", c.layer_marks()}};
}

inline Circuit circuit_from_json(const json& j) {
  Circuit c(j.at("qubits").get<std::size_t>());
  const auto marks = j.value("layer_marks", std::vector<std::size_t>{});
  const auto& ms = j.at("moments");
  std::size_t mi = 0;
  for (std::size_t p = 0;; ++p) {
    while (mi < marks.size() && marks[mi] == p) {
      c.mark_layer();
      ++mi;
    }
    if (p == ms.size()) break;
    std::vector<Gate> gs;
    for (auto& g : ms[p]) gs.push_back(gate_from_string(g.get<std::string>()));
    c.append_moment(std::move(gs));
  }
  return c;
}

inline std::vector<unsigned> qubit_range(std::size_t n) {
  std::vector<unsigned> q(n);
  for (unsigned i = 0; i < n; ++i) q[i] = i;
  return q;
}

// ---- config ------------------------------------------------------------

struct MkAnalysis {
  double mu = 0.2;
  std::size_t k_max = 5;
  std::vector<std::size_t> weights{1, 2, 3};
  std::size_t trials = 500;
};

struct BiasAnalysis {
  std::size_t d = 10;
  std::vector<double> eps_grid{0.005, 0.01, 0.02, 0.05, 0.1};
};

struct DatasetSpec {
  std::string generator = "sphere";
  std::size_t n = 300;
  std::uint64_t seed = 1;
  std::string file;  // overrides the generator when set
};

struct QNNSuiteConfig {
  QNNTrainConfig train;
  std::size_t n_max = 2;
  std::vector<DatasetSpec> datasets{DatasetSpec{}};
};

struct SuiteConfig {
  std::string benchmark;
  std::string backend;
  NoiseModel noise;
  std::size_t shots_per_trajectory = 1;
  std::uint64_t seed = 0;
  std::string out;
  CliffordRBConfig clifford;
  std::optional<MkAnalysis> mk;
  std::optional<BiasAnalysis> bias;
  GHZConfig ghz;
  TFIMConfig tfim;
  QNNSuiteConfig qnn;
};

namespace detail {

// Strict object reader: every key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
    if (!j_.is_object()) throw ConfigError("'" + ctx_ + "' must be a JSON object");
  }
  bool has(const char* k) const { return j_.contains(k); }
  const json& raw(const char* k) {
    used_.insert(k);
    return j_.at(k);
  }
  void num(const char* k, double& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_number()) throw ConfigError(where(k) + " must be a number");
    out = v.get<double>();
  }
  void uint(const char* k, std::size_t& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_number_unsigned()) throw ConfigError(where(k) + " must be a non-negative integer");
    out = v.get<std::size_t>();
  }
  void u64(const char* k, std::uint64_t& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_number_unsigned()) throw ConfigError(where(k) + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void integer(const char* k, int& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(where(k) + " must be an integer");
    out = v.get<int>();
  }
  void boolean(const char* k, bool& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_boolean()) throw ConfigError(where(k) + " must be true or false");
    out = v.get<bool>();
  }
  void str(const char* k, std::string& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_string()) throw ConfigError(where(k) + " must be a string");
    out = v.get<std::string>();
  }
  void uints(const char* k, std::vector<std::size_t>& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_array()) throw ConfigError(where(k) + " must be an array");
    out.clear();
    for (auto& e : v) {
      if (!e.is_number_unsigned()) throw ConfigError(where(k) + " must hold non-negative integers");
      out.push_back(e.get<std::size_t>());
    }
  }
  void nums(const char* k, std::vector<double>& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_array()) throw ConfigError(where(k) + " must be an array");
    out.clear();
    for (auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(k) + " must hold numbers");
      out.push_back(e.get<double>());
    }
  }
  void finish() const {
    for (auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError("unknown key " + where(k.c_str()));
  }
  std::string where(const char* k) const { return "'" + ctx_ + "." + k + "'"; }

 private:
  const json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

inline void rule(bool ok, const std::string& rule_text, const std::string& detail) {
  if (!ok) throw ConfigError("rule violated: " + rule_text + " (" + detail + ")");
}

inline std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

inline NoiseModel parse_noise(const json& j) {
  NoiseModel nm;
  Fields f(j, "noise");
  f.num("p1", nm.p1);
  f.num("p2", nm.p2);
  f.num("global_depolarizing", nm.global_depolarizing);
  f.boolean("global_per_layer", nm.global_per_layer);
  f.num("readout_flip", nm.readout_flip);
  f.nums("readout_per_qubit", nm.readout_per_qubit);
  if (f.has("paulis")) {
    const auto& arr = f.raw("paulis");
    if (!arr.is_array()) throw ConfigError("'noise.paulis' must be an array");
    for (auto& e : arr) {
      Fields pf(e, "noise.paulis[]");
      std::string p;
      double w = 0;
      pf.str("pauli", p);
      pf.num("p", w);
      pf.finish();
      try {
        nm.paulis.push_back({PauliString::parse(p), w});
      } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("'noise.paulis[]': ") + err.what());
      }
    }
  }
  f.finish();
  try {
    nm.validate(nm.paulis.empty() ? 1 : nm.paulis.front().pauli.size());
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("noise: ") + err.what());
  }
  return nm;
}

inline void parse_clifford(const json& j, SuiteConfig& s) {
  auto& c = s.clifford;
  Fields f(j, "clifford");
  f.uint("N", c.N);
  f.uints("depths", c.depths);
  f.uints("circuits", c.circuits);
  f.uint("shots", c.shots);
  f.num("fail_threshold", c.fail_threshold);
  f.num("slack", c.slack);
  f.num("mu_tolerance", c.mu_tolerance);
  if (f.has("mu_initial")) {
    double m = 1.0;
    f.num("mu_initial", m);
    c.mu_initial = m;
  }
  f.boolean("record_sources", c.record_sources);
  if (f.has("mk")) {
    MkAnalysis mk;
    Fields g(f.raw("mk"), "clifford.mk");
    g.num("mu", mk.mu);
    g.uint("k_max", mk.k_max);
    mk.weights.clear();
    for (std::size_t w = 1; w <= std::min<std::size_t>(3, c.N); ++w) mk.weights.push_back(w);
    g.uints("weights", mk.weights);
    g.uint("trials", mk.trials);
    g.finish();
    if (!(mk.mu > 0.0 && mk.mu <= 1.0)) throw ConfigError("'clifford.mk.mu' must lie in (0, 1]");
    if (mk.k_max < 1 || mk.trials < 1) throw ConfigError("'clifford.mk' needs k_max >= 1 and trials >= 1");
    if (c.N > 32) throw ConfigError("'clifford.mk' supports at most 32 qubits");
    for (auto w : mk.weights)
      if (w < 1 || w > 3 || w > c.N) throw ConfigError("'clifford.mk.weights' entries must lie in [1, min(3, N)]");
    s.mk = mk;
  }
  if (f.has("bias")) {
    BiasAnalysis b;
    Fields g(f.raw("bias"), "clifford.bias");
    g.uint("d", b.d);
    g.nums("eps_grid", b.eps_grid);
    g.finish();
    if (b.d < 2) throw ConfigError("'clifford.bias.d' must be at least 2");
    for (double e : b.eps_grid)
      if (!(e >= 0.0 && e < 1.0)) throw ConfigError("'clifford.bias.eps_grid' entries must lie in [0, 1)");
    s.bias = b;
  }
  f.finish();
  rule(c.depths.size() >= 2, "M ≥ 2", "M = " + std::to_string(c.depths.size()));
  if (!c.depths.empty()) {
    const auto lo = *std::min_element(c.depths.begin(), c.depths.end());
    const auto hi = *std::max_element(c.depths.begin(), c.depths.end());
    rule(hi >= lo + 3, "m_M − m_1 ≥ 3", "m_M - m_1 = " + std::to_string(long(hi) - long(lo)));
  }
  for (std::size_t i = 0; i < c.circuits.size(); ++i)
    rule(double(c.circuits[i]) * double(c.shots) >= 1e5, "n_i · l ≥ 10^5",
         "n_" + std::to_string(i + 1) + " * l = " + fmt(double(c.circuits[i]) * double(c.shots)));
  c.validate();
}

inline void parse_ghz(const json& j, SuiteConfig& s) {
  auto& c = s.ghz;
  Fields f(j, "ghz");
  f.num("eps", c.eps);
  f.num("delta", c.delta);
  f.uint("n_limit", c.n_limit);
  if (f.has("topology")) {
    std::string t;
    f.str("topology", t);
    c.topology = topology_from_name(t);
  }
  f.finish();
  rule(c.delta <= 0.1, "δ ≤ 0.1", "delta = " + fmt(c.delta));
  rule(c.eps <= 0.05, "ε ≤ 0.05", "eps = " + fmt(c.eps));
  c.validate();
}

inline void parse_tfim(const json& j, SuiteConfig& s) {
  auto& c = s.tfim;
  Fields f(j, "tfim");
  f.uint("L", c.L);
  f.num("eps", c.eps);
  f.num("delta", c.delta);
  f.num("eps0_threshold", c.eps0_threshold);
  f.num("eps0_min", c.eps0_min);
  f.integer("eps0_steps", c.eps0_steps);
  f.num("s", c.s);
  f.num("t_start", c.t_start);
  f.num("t_limit", c.t_limit);
  f.integer("max_degree", c.max_degree);
  f.finish();
  rule(c.L >= 3, "L ≥ 3", "L = " + std::to_string(c.L));
  rule(c.delta <= 0.1, "δ ≤ 0.1", "delta = " + fmt(c.delta));
  rule(c.eps <= 0.01, "ε ≤ 0.01", "eps = " + fmt(c.eps));
  rule(c.eps0_threshold <= 7e-5, "ε₀ ≤ 7·10^-5", "eps0_threshold = " + fmt(c.eps0_threshold));
  rule(c.s <= 0.01, "s ≤ 0.01", "s = " + fmt(c.s));
  rule(c.t_start > 0.0, "t > 0", "t_start = " + fmt(c.t_start));
  c.validate();
}

inline void parse_qnn(const json& j, SuiteConfig& s) {
  auto& q = s.qnn;
  auto& c = q.train;
  Fields f(j, "qnn");
  f.uint("Lay", c.Lay);
  f.num("eta", c.eta);
  f.uint("epochs", c.epochs);
  f.num("grad_tol", c.grad_tol);
  f.uint("restarts", c.restarts);
  f.num("eps", c.eps);
  f.num("delta", c.delta);
  f.uint("n_max", q.n_max);
  if (f.has("phi_rule")) {
    std::string r;
    f.str("phi_rule", r);
    if (r == "four-term")
      c.phi_rule = PhiShiftRule::FourTerm;
    else if (r == "two-term")
      c.phi_rule = PhiShiftRule::TwoTerm;
    else
      throw ConfigError("'qnn.phi_rule' must be \"four-term\" or \"two-term\"");
  }
  if (f.has("datasets")) {
    const auto& arr = f.raw("datasets");
    if (!arr.is_array() || arr.empty()) throw ConfigError("'qnn.datasets' must be a non-empty array");
    q.datasets.clear();
    for (auto& e : arr) {
      DatasetSpec d;
      Fields g(e, "qnn.datasets[]");
      g.str("generator", d.generator);
      g.uint("n", d.n);
      g.u64("seed", d.seed);
      g.str("file", d.file);
      g.finish();
      if (d.file.empty()) {
        dataset_from_name(d.generator);
        if (d.n < 20) throw ConfigError("'qnn.datasets[].n' must be at least 20");
      }
      q.datasets.push_back(d);
    }
  }
  f.finish();
  rule(c.delta <= 0.1, "δ ≤ 0.1", "delta = " + fmt(c.delta));
  rule(c.eps <= 0.05, "ε ≤ 0.05", "eps = " + fmt(c.eps));
  if (q.n_max < 1) throw ConfigError("'qnn.n_max' must be at least 1");
  c.validate();
}

}  // namespace detail

// Parses and validates a suite configuration. Rule violations throw
// ConfigError naming the rule.
inline SuiteConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  SuiteConfig s;
  detail::Fields f(j, "config");
  f.str("benchmark", s.benchmark);
  if (s.benchmark != "clifford" && s.benchmark != "ghz" && s.benchmark != "tfim" && s.benchmark != "qnn")
    throw ConfigError("'config.benchmark' must be one of clifford, ghz, tfim, qnn");
  s.backend = s.benchmark == "clifford" || s.benchmark == "ghz" ? "stabilizer" : "statevector";
  f.str("backend", s.backend);
  if (s.backend != "stabilizer" && s.backend != "statevector")
    throw ConfigError("'config.backend' must be stabilizer or statevector");
  if ((s.benchmark == "tfim" || s.benchmark == "qnn") && s.backend != "statevector")
    throw ConfigError("rule violated: " + s.benchmark + " requires the statevector backend");
  if (s.benchmark == "clifford" && s.backend != "stabilizer")
    throw ConfigError("rule violated: clifford requires the stabilizer backend");
  if (f.has("noise")) s.noise = detail::parse_noise(f.raw("noise"));
  f.uint("shots_per_trajectory", s.shots_per_trajectory);
  if (s.shots_per_trajectory < 1) throw ConfigError("'config.shots_per_trajectory' must be at least 1");
  f.u64("seed", s.seed);
  f.str("out", s.out);
  const json empty = json::object();
  const json& block = f.has(s.benchmark.c_str()) ? f.raw(s.benchmark.c_str()) : empty;
  if (s.benchmark == "clifford") detail::parse_clifford(block, s);
  if (s.benchmark == "ghz") detail::parse_ghz(block, s);
  if (s.benchmark == "tfim") detail::parse_tfim(block, s);
  if (s.benchmark == "qnn") detail::parse_qnn(block, s);
  f.finish();
  return s;
}

inline json noise_to_json(const NoiseModel& nm) {
  json paulis = json::array();
  for (auto& w : nm.paulis) paulis.push_back({{"pauli", w.pauli.str()}, {"p", w.prob}});
  return {{"p1", nm.p1},
          {"p2", nm.p2},
          {"paulis", paulis},
          {"global_depolarizing", nm.global_depolarizing},
          {"global_per_layer", nm.global_per_layer},
          {"readout_flip", nm.readout_flip},
          {"readout_per_qubit", nm.readout_per_qubit}};
}

// Every parameter, defaults included.
inline json config_to_json(const SuiteConfig& s) {
  json j;
  if (s.benchmark == "clifford") {
    const auto& c = s.clifford;
    j = {{"N", c.N},
         {"depths", c.depths},
         {"circuits", c.circuits},
         {"shots", c.shots},
         {"fail_threshold", c.fail_threshold},
         {"slack", c.slack},
         {"mu_tolerance", c.mu_tolerance},
         {"mu_initial", c.mu_initial.value_or(1.0)},
         {"record_sources", c.record_sources},
         {"transpilation", c.transpilation}};
    if (s.mk) j["mk"] = {{"mu", s.mk->mu}, {"k_max", s.mk->k_max}, {"weights", s.mk->weights}, {"trials", s.mk->trials}};
    if (s.bias) j["bias"] = {{"d", s.bias->d}, {"eps_grid", s.bias->eps_grid}};
  } else if (s.benchmark == "ghz") {
    j = {{"eps", s.ghz.eps}, {"delta", s.ghz.delta}, {"topology", topology_name(s.ghz.topology)},
         {"n_limit", s.ghz.n_limit}, {"ell", dfe_sample_count(s.ghz.eps, s.ghz.delta)}};
  } else if (s.benchmark == "tfim") {
    const auto& c = s.tfim;
    j = {{"L", c.L},
         {"eps", c.eps},
         {"delta", c.delta},
         {"g", tfim_coupling(c.L)},
         {"J", tfim_coupling(c.L)},
         {"alpha", tfim_alpha()},
         {"eps0_threshold", c.eps0_threshold},
         {"eps0_min", c.eps0_min},
         {"eps0_steps", c.eps0_steps},
         {"s", c.s},
         {"t_start", c.t_start},
         {"t_limit", c.t_limit},
         {"max_degree", c.max_degree},
         {"q_A", 1},
         {"q_B", 1},
         {"q_m", ancilla_count(2 * c.L)},
         {"post_selected_shots", hoeffding_shots(c.eps, c.delta)}};
  } else {
    const auto& c = s.qnn.train;
    json ds = json::array();
    for (auto& d : s.qnn.datasets)
      ds.push_back(d.file.empty() ? json{{"generator", d.generator}, {"n", d.n}, {"seed", d.seed}}
                                  : json{{"file", d.file}});
    j = {{"Lay", c.Lay},
         {"eta", c.eta},
         {"epochs", c.epochs},
         {"grad_tol", c.grad_tol},
         {"restarts", c.restarts},
         {"eps", c.eps},
         {"delta", c.delta},
         {"shots", hoeffding_shots(c.eps, c.delta)},
         {"phi_rule", c.phi_rule == PhiShiftRule::FourTerm ? "four-term" : "two-term"},
         {"n_max", s.qnn.n_max},
         {"datasets", ds}};
  }
  return j;
}

// ---- datasets ------------------------------------------------------------

inline json dataset_to_json(const LabeledDataset& d) {
  json samples = json::array();
  for (auto& s : d.samples) samples.push_back({{"x", s.x}, {"y", s.y}});
  return {{"generator", d.generator}, {"seed", d.seed}, {"samples", samples}};
}

inline LabeledDataset dataset_from_json(const json& j) {
  LabeledDataset d;
  try {
    d.generator = j.at("generator").get<std::string>();
    d.seed = j.at("seed").get<std::uint64_t>();
    for (auto& s : j.at("samples")) {
      Sample x;
      x.x = s.at("x").get<Features>();
      x.y = s.at("y").get<int>();
      if (x.y != 1 && x.y != -1) throw ConfigError("dataset labels must be +1 or -1");
      for (double v : x.x)
        if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("dataset features must lie in [-1, 1]");
      d.samples.push_back(x);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed dataset file: ") + e.what());
  }
  return d;
}

// ---- running ------------------------------------------------------------

inline std::unique_ptr<Backend> make_backend(const SuiteConfig& s) {
  if (s.backend == "stabilizer") return std::make_unique<StabilizerBackend>(s.noise);
  return std::make_unique<StatevectorBackend>(s.noise, s.shots_per_trajectory);
}

inline std::uint64_t benchmark_code(const std::string& b) {
  if (b == "clifford") return 1;
  if (b == "ghz") return 2;
  if (b == "tfim") return 3;
  return 4;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline json fit_to_json(const DecayFit& f) {
  return {{"A", f.A},         {"p_rc", f.p_rc},           {"slope", f.slope},
          {"p_rc_stderr", f.p_rc_stderr}, {"clamped", f.clamped}, {"failed", f.failed},
          {"used", f.used},   {"dropped", f.dropped},     {"residuals", f.residuals}};
}

inline void run_clifford(const SuiteConfig& s, const Backend& be, Rng& rng, json& rep) {
  const auto& c = s.clifford;
  Rng r0 = rng.fork(0);
  const auto m = search_mu(c, be, r0);
  rep["metric"] = {{"N", m.N}, {"mu_max", m.mu_max}, {"r_mu", m.r_mu}, {"diagnostic", m.diagnostic}};
  json trace = json::array(), circuits = json::array();
  for (std::size_t i = 0; i < m.trace.size(); ++i) {
    const auto& it = m.trace[i];
    json pts = json::array();
    for (auto& p : it.data.points)
      pts.push_back({{"depth", p.m}, {"f", p.f}, {"stderr", p.stderr_f}, {"alphas", p.alphas}});
    trace.push_back({{"mu", it.mu}, {"r", it.r}, {"step", mu_step_name(it.step)}, {"fit", fit_to_json(it.fit)},
                     {"points", pts}});
    std::size_t idx = 0;
    for (auto& inst : it.data.instances) {
      json rec = {{"iteration", i},       {"depth", inst.m},          {"index", idx++},
                  {"pauli", inst.pauli.str()}, {"observable", inst.observable.str()}, {"starts", inst.starts},
                  {"qubits", qubit_range(c.N)}};
      if (c.record_sources) {
        json src = json::array();
        for (auto& u : inst.sources) src.push_back(circuit_to_json(u));
        rec["random_unitaries"] = std::move(src);
        rec["circuit"] = circuit_to_json(inst.circuit);
      }
      circuits.push_back(std::move(rec));
    }
  }
  rep["trace"] = std::move(trace);
  rep["circuits"] = std::move(circuits);
  rep["qubits"] = qubit_range(c.N);
  rep["strategies"] = {
      {"mu_initial", c.mu_initial ? "configured value" : "mu = 1"},
      {"mu_update",
       "bisection on (0, 1]: accept when r <= threshold and either mu = 1 or threshold - r <= slack; a first "
       "passing mu below 1 jumps to mu = 1, otherwise the bracket is halved until it is narrower than "
       "mu_tolerance, returning the largest passing mu"},
      {"mu_fraction_circuits",
       "each layer is an independently drawn uniform N-qubit Clifford compiled to H, S and CX by symplectic "
       "Gaussian elimination and packed into moments; the layer keeps floor(mu * depth) consecutive moments "
       "starting at a uniformly drawn offset"},
      {"fit", "weighted least squares of log f_i against depth over depths with f_i > 0"}};
  if (s.mk) {
    json curves = json::array();
    Rng rm = rng.fork(1);
    for (auto w : s.mk->weights)
      for (std::size_t k = 1; k <= s.mk->k_max; ++k) {
        Rng r = rm.fork(w).fork(k);
        const auto e = estimate_Mk(c.N, s.mk->mu, k, w, s.mk->trials, r);
        curves.push_back({{"weight", w}, {"k", k}, {"M_k", e.value}, {"Q", e.q}, {"P", e.p}, {"trials", e.trials}});
      }
    rep["mk_analysis"] = {{"mu", s.mk->mu}, {"points", curves}};
  }
  if (s.bias) {
    json pts = json::array();
    for (auto& b : predicted_bias_curve(s.bias->eps_grid, s.bias->d))
      pts.push_back({{"eps", b.eps}, {"eps_tilde", b.eps_tilde}});
    rep["bias_curve"] = {{"d", s.bias->d}, {"points", pts}};
  }
}

inline void run_ghz_suite(const SuiteConfig& s, const Backend& be, Rng& rng, json& rep) {
  Rng r = rng.fork(0);
  const auto res = search_max_n(s.ghz, be, r);
  rep["metric"] = {{"N_max", res.N_max}, {"diagnostic", res.diagnostic}};
  json trace = json::array(), circuits = json::array();
  std::size_t nmax = 2;
  for (auto& rec : res.records) {
    trace.push_back({{"N", rec.N}, {"ell", rec.ell}, {"Y", rec.Y}, {"pass", rec.pass}});
    json paulis = json::array();
    for (auto& p : rec.paulis) paulis.push_back(p.str());
    circuits.push_back({{"N", rec.N},
                        {"qubits", qubit_range(rec.N)},
                        {"circuit", circuit_to_json(ghz_circuit(rec.N, s.ghz.topology))},
                        {"measured_paulis", paulis},
                        {"measurement", "per Pauli one shot after an H (X) or Rx(pi/2) (Y) basis-change layer"}});
    nmax = std::max(nmax, rec.N);
  }
  rep["trace"] = std::move(trace);
  rep["circuits"] = std::move(circuits);
  rep["qubits"] = qubit_range(nmax);
  rep["circuit_description"] =
      s.ghz.topology == GHZTopology::LinearChain
          ? "H on qubit 0 followed by the chain CX(i, i+1), depth N"
          : "H on qubit 0 followed by fan-out rounds: round r applies CX(i, i + 2^r) for every reached qubit i, "
            "depth ceil(log2 N) + 1";
  rep["strategies"] = {{"N_update", "doubling from N = 2 until a failure or n_limit, then bisection between the "
                                    "last pass and the first failure"},
                       {"pauli_sampling", "uniform over the 2^N - 1 non-identity stabilizers, ell draws"}};
}

inline void run_tfim_suite(const SuiteConfig& s, const Backend& be, Rng& rng, json& rep) {
  const auto& c = s.tfim;
  Rng r = rng.fork(0);
  const auto res = search_tmax(c, be, r);
  json eps = json::array();
  for (auto& [t, e] : res.eps_min) eps.push_back({{"t", t}, {"eps_t_min", e ? json(*e) : json(nullptr)}});
  rep["metric"] = {{"L", c.L}, {"t_max", res.t_max}, {"eps_t_min", eps}, {"diagnostic", res.diagnostic}};
  json trace = json::array(), circuits = json::array();
  const auto lay = tfim_layout(c.L);
  std::set<std::pair<double, double>> seen;
  for (auto& rec : res.records) {
    trace.push_back({{"t", rec.t},
                     {"eps0", rec.eps0},
                     {"degree", rec.degree},
                     {"mu_i", rec.mu_i},
                     {"mu", rec.mu},
                     {"Mz_analytical", rec.mz},
                     {"interval", {rec.lo, rec.hi}},
                     {"pass", rec.pass},
                     {"accepted_shots", rec.accepted},
                     {"raw_shots", rec.raw},
                     {"acceptance_rate", rec.acceptance_rate},
                     {"error", rec.error}});
    if (!seen.insert({rec.t, rec.eps0}).second || (rec.degree == 0 && rec.t > 0.0)) continue;
    try {
      const auto q = assemble_qsp(c.L, rec.t, rec.eps0, c.max_degree);
      circuits.push_back({{"t", rec.t},
                          {"eps0", rec.eps0},
                          {"degree", q.degree},
                          {"phases_cos", q.psi_cos},
                          {"phases_sin", q.psi_sin},
                          {"qubits", qubit_range(lay.total())},
                          {"circuit", circuit_to_json(q.circuit)}});
    } catch (const std::exception&) {
    }
  }
  rep["trace"] = std::move(trace);
  rep["circuits"] = std::move(circuits);
  rep["qubits"] = qubit_range(lay.total());
  rep["layout"] = {{"system", qubit_range(c.L)}, {"ancillas", lay.ancillas()}, {"q_A", lay.qA}, {"q_B", lay.qB}};
  rep["block_encoding"] = {
      {"method",
       "linear combination of unitaries: Prep rotates the ancilla register to sum_i sqrt(1/2L)|i> with a tree of "
       "multi-controlled Ry gates, Select applies the i-th Pauli term (Z_j, then X_j X_j+1 with periodic wrap) "
       "controlled on the ancilla index, followed by Prep^dagger; the top-left block is H / alpha with "
       "alpha = 2/e"},
      {"circuit", circuit_to_json(block_encoding(c.L))}};
  rep["projector"] = {
      {"method",
       "X on q_A controlled on all ancillas being 0, Rz(2 phi) on q_A, the same controlled X again; this "
       "applies exp(i phi (2 Pi - I)) on the q_A = 0 branch and the conjugate phase on q_A = 1. Each QSP "
       "branch is additionally controlled on q_B"},
      {"circuit_phi_0.5", circuit_to_json(projector_phase_circuit(0.5, lay.ancillas(), lay.qA, lay.total() - 1))}};
  rep["strategies"] = {
      {"t_update",
       "times on the grid j * s: start at t_start, double while feasible (halve while infeasible) up to t_limit, "
       "then bisect between the last feasible and first infeasible grid point"},
      {"eps0_update",
       "run at the threshold eps0; if it passes, run at eps0_min, otherwise report no eps_t_min; then geometric "
       "bisection between them for eps0_steps runs, returning the smallest passing value"},
      {"eps0_initial", "the threshold 7e-5 (or the configured eps0_threshold)"},
      {"post_selection", "q_B = 1, q_A = 0, ancillas = 0; shots drawn in fixed batches until the quota of "
                         "post-selected shots is met, capped at 20 * quota / ((1 - eps0)^2 / 4) raw shots"}};
}

inline void run_qnn_suite(const SuiteConfig& s, const Backend& be, Rng& rng, json& rep) {
  const auto& q = s.qnn;
  std::vector<QNNSplit> splits;
  json dsj = json::array();
  for (std::size_t k = 0; k < q.datasets.size(); ++k) {
    const auto& spec = q.datasets[k];
    LabeledDataset d;
    if (!spec.file.empty()) {
      std::ifstream in(spec.file);
      if (!in) throw std::runtime_error("cannot read dataset file '" + spec.file + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      json j;
      try {
        j = json::parse(buf.str());
      } catch (const json::parse_error& e) {
        throw ConfigError("dataset file '" + spec.file + "' is not valid JSON: " + e.what());
      }
      d = dataset_from_json(j);
    } else {
      d = generate_dataset(dataset_from_name(spec.generator), spec.n, spec.seed);
    }
    Rng sr = rng.fork(100 + k);
    splits.push_back(split_dataset(d, sr));
    dsj.push_back({{"generator", d.generator},
                   {"seed", d.seed},
                   {"file", spec.file},
                   {"samples", d.samples.size()},
                   {"train", splits.back().train.samples.size()},
                   {"test", splits.back().test.samples.size()}});
  }
  const SampledEstimator est(be, q.train.eps, q.train.delta);
  Rng r = rng.fork(0);
  const auto m = run_benchmark(splits, q.n_max, q.train, est, r);
  json per_n = json::array(), params = json::array(), circuits = json::array();
  for (std::size_t n = 0; n < q.n_max; ++n) {
    per_n.push_back({{"N", n + 1}, {"mean", m.mean[n]}, {"std", m.stddev[n]}, {"accuracy", m.acc[n]},
                     {"train_cost", m.train_cost[n]}});
    for (std::size_t k = 0; k < splits.size(); ++k) {
      const auto& p = m.params[n][k];
      params.push_back({{"N", n + 1}, {"dataset", k}, {"theta", p.theta}, {"phi", p.phi}});
      circuits.push_back({{"N", n + 1},
                          {"dataset", k},
                          {"qubits", qubit_range(n + 1)},
                          {"x", splits[k].test.samples.front().x},
                          {"circuit", circuit_to_json(build_qnn_circuit(p, splits[k].test.samples.front().x))}});
    }
  }
  rep["metric"] = {{"Lay", m.Lay}, {"per_N", per_n}};
  rep["parameters_optimal"] = std::move(params);
  rep["datasets"] = std::move(dsj);
  rep["circuits"] = std::move(circuits);
  rep["trace"] = json::array();
  for (std::size_t n = 0; n < q.n_max; ++n) rep["trace"].push_back({{"N", n + 1}, {"train_cost", m.train_cost[n]}});
  rep["qubits"] = qubit_range(q.n_max);
  rep["strategies"] = {
      {"initialization", "N = 1: uniform in [-pi, pi] per angle, best of the restarts by final training cost; "
                         "N > 1: inherited optimum with zero angles on the new qubit and the new controlled link"},
      {"epochs", "at most `epochs` gradient steps, stopping early when the gradient max-norm drops below grad_tol"},
      {"learning_rate", "constant eta"},
      {"gradient", "parameter shift: +-pi/2 for single-qubit rotations, four-term rule (shifts pi/2 and 3pi/2) "
                   "for controlled rotations unless phi_rule = two-term"},
      {"estimator", "sampled: ceil((2/eps^2) ln(2/delta)) shots per circuit on qubit 0, used for training and "
                    "testing"},
      {"split", "stratified 70/30 per dataset"}};
}

}  // namespace detail

// Runs the configured benchmark. Every random draw derives from
// (seed, benchmark) through forked streams, so the report is independent of
// the worker count.
inline json run_suite(const SuiteConfig& s) {
  const auto be = make_backend(s);
  json rep;
  rep["suite_version"] = SUITE_VERSION;
  rep["timestamp"] = utc_timestamp();
  rep["benchmark"] = s.benchmark;
  rep["seed"] = s.seed;
  rep["backend"] = {{"id", s.backend},
                    {"kind", "simulator"},
                    {"description", s.backend == "stabilizer"
                                        ? "bit-packed stabilizer tableau simulator with Pauli-frame noise"
                                        : "dense statevector simulator with Pauli-trajectory noise"},
                    {"shots_per_trajectory", s.shots_per_trajectory}};
  rep["calibration"] = noise_to_json(s.noise);
  rep["compilation"] = {
      {"gate_set", {"H", "S", "Sdg", "X", "Y", "Z", "CX", "CZ", "SWAP", "Rx", "Ry", "Rz", "U"}},
      {"multi_controlled_gates", "applied directly by the simulator, no decomposition"},
      {"qubit_mapping", "logical qubit i runs on simulator qubit i"},
      {"optimization", "none; circuits are executed exactly as recorded"}};
  rep["parameters"] = config_to_json(s);
  Rng root = Rng::stream(s.seed, {benchmark_code(s.benchmark)});
  if (s.benchmark == "clifford") detail::run_clifford(s, *be, root, rep);
  if (s.benchmark == "ghz") detail::run_ghz_suite(s, *be, root, rep);
  if (s.benchmark == "tfim") detail::run_tfim_suite(s, *be, root, rep);
  if (s.benchmark == "qnn") detail::run_qnn_suite(s, *be, root, rep);
  return rep;
}

// Missing or mistyped fields; empty when the report is complete.
inline std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> errs;
  if (!r.is_object()) return {"report is not a JSON object"};
  auto need = [&](const json& j, const std::string& path, const char* key, json::value_t type) {
    if (!j.is_object() || !j.contains(key)) {
      errs.push_back("missing " + path + key);
      return false;
    }
    const auto t = j.at(key).type();
    const bool num = type == json::value_t::number_float;
    const bool ok = num ? j.at(key).is_number() : (type == json::value_t::number_unsigned ? j.at(key).is_number_unsigned() : t == type);
    if (!ok) errs.push_back(path + key + " has the wrong type");
    return ok;
  };
  using V = json::value_t;
  need(r, "", "suite_version", V::string);
  need(r, "", "timestamp", V::string);
  need(r, "", "seed", V::number_unsigned);
  if (need(r, "", "backend", V::object)) {
    need(r["backend"], "backend.", "id", V::string);
    need(r["backend"], "backend.", "description", V::string);
  }
  need(r, "", "calibration", V::object);
  need(r, "", "compilation", V::object);
  need(r, "", "parameters", V::object);
  need(r, "", "strategies", V::object);
  need(r, "", "qubits", V::array);
  need(r, "", "metric", V::object);
  need(r, "", "trace", V::array);
  if (need(r, "", "circuits", V::array))
    for (std::size_t i = 0; i < r["circuits"].size(); ++i) {
      const auto& c = r["circuits"][i];
      const std::string p = "circuits[" + std::to_string(i) + "].";
      need(c, p, "qubits", V::array);
      if (c.contains("circuit")) {
        try {
          circuit_from_json(c["circuit"]);
        } catch (const std::exception& e) {
          errs.push_back(p + "circuit does not parse: " + e.what());
        }
      }
    }
  if (!need(r, "", "benchmark", V::string) || !errs.empty()) return errs;
  const std::string b = r["benchmark"];
  const auto& m = r["metric"];
  if (b == "clifford") {
    need(m, "metric.", "N", V::number_unsigned);
    need(m, "metric.", "mu_max", V::number_float);
    need(m, "metric.", "r_mu", V::number_float);
    need(r["strategies"], "strategies.", "mu_update", V::string);
    need(r["strategies"], "strategies.", "mu_fraction_circuits", V::string);
    for (auto& it : r["trace"])
      if (need(it, "trace[].", "points", V::array))
        for (auto& p : it["points"]) {
          need(p, "trace[].points[].", "depth", V::number_unsigned);
          need(p, "trace[].points[].", "f", V::number_float);
        }
    if (r["parameters"].value("record_sources", false))
      for (auto& c : r["circuits"]) {
        need(c, "circuits[].", "random_unitaries", V::array);
        need(c, "circuits[].", "circuit", V::object);
      }
  } else if (b == "ghz") {
    need(m, "metric.", "N_max", V::number_unsigned);
    need(r, "", "circuit_description", V::string);
    need(r["strategies"], "strategies.", "N_update", V::string);
    for (auto& t : r["trace"]) need(t, "trace[].", "Y", V::number_float);
    for (auto& c : r["circuits"]) need(c, "circuits[].", "circuit", V::object);
  } else if (b == "tfim") {
    need(m, "metric.", "t_max", V::number_float);
    need(m, "metric.", "eps_t_min", V::array);
    need(r["strategies"], "strategies.", "t_update", V::string);
    need(r["strategies"], "strategies.", "eps0_update", V::string);
    need(r, "", "block_encoding", V::object);
    need(r, "", "projector", V::object);
    for (auto& t : r["trace"]) {
      need(t, "trace[].", "mu_i", V::array);
      need(t, "trace[].", "mu", V::number_float);
      need(t, "trace[].", "eps0", V::number_float);
    }
  } else if (b == "qnn") {
    if (need(m, "metric.", "per_N", V::array))
      for (auto& n : m["per_N"]) {
        need(n, "metric.per_N[].", "accuracy", V::array);
        need(n, "metric.per_N[].", "mean", V::number_float);
        need(n, "metric.per_N[].", "std", V::number_float);
      }
    need(r, "", "parameters_optimal", V::array);
    need(r["strategies"], "strategies.", "initialization", V::string);
    need(r["strategies"], "strategies.", "learning_rate", V::string);
    need(r["strategies"], "strategies.", "epochs", V::string);
  } else {
    errs.push_back("unknown benchmark '" + b + "'");
  }
  return errs;
}

// Drops the timestamp so two runs can be compared.
inline json strip_timestamp(json r) {
  r.erase("timestamp");
  return r;
}

inline std::vector<std::string> plot_kinds(const std::string& benchmark) {
  if (benchmark == "clifford") return {"decay", "mk", "bias"};
  if (benchmark == "ghz") return {"fidelity"};
  if (benchmark == "tfim") return {"tfim", "runs"};
  if (benchmark == "qnn") return {"accuracy", "summary"};
  return {};
}

// CSV rows behind the standard plots; an empty kind picks the first one for
// the report's benchmark.
inline std::string export_plot_data(const json& r, std::string kind = "") {
  const std::string b = r.at("benchmark");
  const auto kinds = plot_kinds(b);
  if (kind.empty()) kind = kinds.at(0);
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw std::invalid_argument("plot kind '" + kind + "' does not apply to a " + b + " report");
  std::ostringstream o;
  o.precision(17);
  if (kind == "decay") {
    o << "mu,depth,f_mean,f_stderr\n";
    for (auto& it : r.at("trace"))
      for (auto& p : it.at("points"))
        o << it.at("mu").get<double>() << ',' << p.at("depth").get<std::size_t>() << ',' << p.at("f").get<double>()
          << ',' << p.at("stderr").get<double>() << '\n';
  } else if (kind == "mk") {
    if (!r.contains("mk_analysis")) throw std::invalid_argument("report has no M_k analysis");
    o << "k,weight,M_k\n";
    for (auto& p : r["mk_analysis"].at("points"))
      o << p.at("k").get<std::size_t>() << ',' << p.at("weight").get<std::size_t>() << ','
        << p.at("M_k").get<double>() << '\n';
  } else if (kind == "bias") {
    if (!r.contains("bias_curve")) throw std::invalid_argument("report has no bias curve");
    o << "eps,eps_tilde\n";
    for (auto& p : r["bias_curve"].at("points")) o << p.at("eps").get<double>() << ',' << p.at("eps_tilde").get<double>() << '\n';
  } else if (kind == "fidelity") {
    o << "N,ell,Y,pass\n";
    for (auto& t : r.at("trace"))
      o << t.at("N").get<std::size_t>() << ',' << t.at("ell").get<std::size_t>() << ',' << t.at("Y").get<double>()
        << ',' << (t.at("pass").get<bool>() ? 1 : 0) << '\n';
  } else if (kind == "tfim") {
    // mu at eps_t_min, or at the threshold run when no eps0 passed
    o << "t,eps_t_min,mu,Mz_analytical\n";
    for (auto& e : r.at("metric").at("eps_t_min")) {
      const double t = e.at("t");
      const bool has = !e.at("eps_t_min").is_null();
      const json* pick = nullptr;
      for (auto& run : r.at("trace")) {
        if (run.at("t").get<double>() != t) continue;
        if (!pick) pick = &run;
        if (has && run.at("eps0").get<double>() == e.at("eps_t_min").get<double>()) pick = &run;
      }
      o << t << ',';
      if (has)
        o << e.at("eps_t_min").get<double>();
      else
        o << "nan";
      o << ',';
      if (pick) o << pick->at("mu").get<double>() << ',' << pick->at("Mz_analytical").get<double>();
      o << '\n';
    }
  } else if (kind == "runs") {
    o << "t,eps0,degree,mu,Mz_analytical,pass\n";
    for (auto& t : r.at("trace"))
      o << t.at("t").get<double>() << ',' << t.at("eps0").get<double>() << ',' << t.at("degree").get<int>() << ','
        << t.at("mu").get<double>() << ',' << t.at("Mz_analytical").get<double>() << ','
        << (t.at("pass").get<bool>() ? 1 : 0) << '\n';
  } else if (kind == "accuracy") {
    o << "N,dataset,accuracy\n";
    for (auto& n : r.at("metric").at("per_N")) {
      std::size_t k = 0;
      for (auto& a : n.at("accuracy")) o << n.at("N").get<std::size_t>() << ',' << k++ << ',' << a.get<double>() << '\n';
    }
  } else {
    o << "N,mean,std\n";
    for (auto& n : r.at("metric").at("per_N"))
      o << n.at("N").get<std::size_t>() << ',' << n.at("mean").get<double>() << ',' << n.at("std").get<double>()
        << '\n';
  }
  return o.str();
}

}  // namespace qusquare
