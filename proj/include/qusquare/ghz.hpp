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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "qusquare/backend.hpp"
#include "qusquare/stabilizer.hpp"

namespace qusquare {

enum class GHZTopology { LinearChain, FanoutTree };

inline const char* topology_name(GHZTopology t) {
  return t == GHZTopology::LinearChain ? "linear-chain" : "fanout-tree";
}

inline GHZTopology topology_from_name(const std::string& s) {
  if (s == "linear-chain") return GHZTopology::LinearChain;
  if (s == "fanout-tree") return GHZTopology::FanoutTree;
  throw ConfigError("unknown GHZ topology '" + s + "'");
}

struct GHZConfig {
  double eps = 0.05;
  double delta = 0.1;
  GHZTopology topology = GHZTopology::FanoutTree;
  std::size_t n_limit = 12;

  void validate() const {
    if (!(eps > 0.0 && eps <= 0.05)) throw ConfigError("eps must lie in (0, 0.05]");
    if (!(delta > 0.0 && delta <= 0.1)) throw ConfigError("delta must lie in (0, 0.1]");
    if (n_limit < 2) throw ConfigError("n_limit must be at least 2");
  }
};

inline Circuit ghz_circuit(std::size_t n, GHZTopology topo) {
  if (n < 2) throw std::invalid_argument("GHZ state needs n >= 2");
  Circuit c(n);
  c.append(gates::h(0));
  if (topo == GHZTopology::LinearChain) {
    for (unsigned q = 0; q + 1 < n; ++q) c.append(gates::cx(q, q + 1));
  } else {
    for (std::size_t span = 1; span < n; span *= 2)
      for (std::size_t i = 0; i < span && i + span < n; ++i) c.append(gates::cx(unsigned(i), unsigned(i + span)));
  }
  return c;
}

inline std::size_t dfe_sample_count(double eps, double delta) {
  return std::size_t(std::ceil(8.0 * std::log(4.0 / delta) / (eps * eps)));
}

// Uniform draws from the non-identity stabilizers G Z^m G^dagger of the GHZ
// state prepared by `prep`.
inline std::vector<PauliString> sample_dfe_paulis(const Circuit& prep, std::size_t count, Rng& rng) {
  const std::size_t n = prep.qubit_count();
  std::vector<PauliString> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PauliString m(n);
    do {
      for (std::size_t q = 0; q < n; ++q) m.set_z(q, rng.below(2));
    } while (m.is_identity_up_to_sign());
    out.push_back(conjugate_pauli(prep, m));
  }
  return out;
}

inline std::vector<PauliString> sample_dfe_paulis(std::size_t n, double eps, double delta, GHZTopology topo,
                                                  Rng& rng) {
  return sample_dfe_paulis(ghz_circuit(n, topo), dfe_sample_count(eps, delta), rng);
}

// One shot per Pauli in its own basis; returns the mean eigenvalue.
inline double dfe_estimate(const Circuit& state, const std::vector<PauliString>& paulis, const Backend& backend,
                           Rng& rng) {
  if (paulis.empty()) throw std::invalid_argument("no Paulis to measure");
  std::vector<int> a(paulis.size());
  const Rng base = rng.fork(0xdfe);
  rng();
  parallel_for(paulis.size(), [&](std::size_t i) {
    Rng r = base.fork(i);
    const Circuit c = concat(state, basis_change_layer(paulis[i]));
    a[i] = backend.measure_pauli(c, diagonalized(paulis[i]), 1, r)[0];
  });
  double s = 0;
  for (int v : a) s += v;
  return s / double(a.size());
}

struct GHZRecord {
  std::size_t N = 0;
  std::size_t ell = 0;
  double Y = 0.0;
  bool pass = false;
  std::vector<PauliString> paulis;  // measured stabilizers, in order
};

struct GHZResult {
  std::vector<GHZRecord> records;  // in evaluation order
  std::size_t N_max = 0;
  std::string diagnostic;
};

inline bool ghz_pass(double y, double eps) { return y - eps > 0.5; }

inline GHZRecord run_ghz(std::size_t n, const GHZConfig& cfg, const Backend& backend, Rng& rng) {
  GHZRecord rec;
  rec.N = n;
  rec.ell = dfe_sample_count(cfg.eps, cfg.delta);
  const Circuit prep = ghz_circuit(n, cfg.topology);
  Rng r = rng.fork(n);
  rec.paulis = sample_dfe_paulis(prep, rec.ell, r);
  rec.Y = dfe_estimate(prep, rec.paulis, backend, r);
  rec.pass = ghz_pass(rec.Y, cfg.eps);
  return rec;
}

// Doubling from N = 2 until a failure or n_limit, then bisection between the
// last pass and the first failure.
inline GHZResult search_max_n(const GHZConfig& cfg, const Backend& backend, Rng& rng) {
  cfg.validate();
  GHZResult out;
  std::map<std::size_t, bool> seen;
  auto eval = [&](std::size_t n) {
    auto it = seen.find(n);
    if (it != seen.end()) return it->second;
    out.records.push_back(run_ghz(n, cfg, backend, rng));
    return seen[n] = out.records.back().pass;
  };
  std::size_t good = 0, bad = 0;
  for (std::size_t n = 2;; n *= 2) {
    n = std::min(n, cfg.n_limit);
    if (eval(n)) {
      good = n;
      if (n == cfg.n_limit) break;
    } else {
      bad = n;
      break;
    }
  }
  if (good == 0) {
    out.N_max = 0;
    out.diagnostic = "N = 2 already fails Y - eps > 1/2";
    return out;
  }
  if (bad != 0) {
    while (bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (eval(mid))
        good = mid;
      else
        bad = mid;
    }
  } else {
    out.diagnostic = "search stopped at n_limit";
  }
  out.N_max = good;
  return out;
}

}  // namespace qusquare
