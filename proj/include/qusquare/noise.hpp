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

#include <stdexcept>
#include <vector>

#include "qusquare/circuit.hpp"

namespace qusquare {

struct WeightedPauli {
  PauliString pauli;
  double prob = 0.0;
};

// Stochastic Pauli noise, attached after moments (never inside one).
//  p1      depolarizing rate applied to every qubit after every moment
//  p2      depolarizing rate on the full support of each multi-qubit gate
//  paulis  explicit distribution over N-qubit Paulis after every moment
//  global_depolarizing  probability that a uniformly random N-qubit Pauli
//          (identity included) is applied; after every moment, or only at the
//          circuit's layer marks when global_per_layer is set
//  readout_flip  bit-flip probability at measurement (per_qubit overrides)
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<WeightedPauli> paulis;
  double global_depolarizing = 0.0;
  bool global_per_layer = false;
  double readout_flip = 0.0;
  std::vector<double> readout_per_qubit;

  static NoiseModel noiseless() { return {}; }

  double readout(std::size_t q) const { return q < readout_per_qubit.size() ? readout_per_qubit[q] : readout_flip; }

  bool has_gate_noise() const {
    return p1 > 0.0 || p2 > 0.0 || !paulis.empty() || global_depolarizing > 0.0;
  }
  bool has_readout_noise() const {
    if (readout_flip > 0.0) return true;
    for (double r : readout_per_qubit)
      if (r > 0.0) return true;
    return false;
  }
  bool is_noiseless() const { return !has_gate_noise() && !has_readout_noise(); }

  void validate(std::size_t n) const {
    auto prob = [](double p, const char* what) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    };
    prob(p1, "p1");
    prob(p2, "p2");
    prob(global_depolarizing, "global_depolarizing");
    prob(readout_flip, "readout_flip");
    for (double r : readout_per_qubit) prob(r, "readout flip");
    double total = 0.0;
    for (auto& w : paulis) {
      prob(w.prob, "Pauli weight");
      if (w.pauli.size() != n) throw std::invalid_argument("noise Pauli has wrong qubit count");
      total += w.prob;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("explicit Pauli weights sum above 1");
  }
};

// One stochastic error location.
struct ErrorSite {
  enum Kind { Depolarizing, Explicit, Global } kind;
  std::vector<unsigned> qubits;  // Depolarizing only
  double prob = 0.0;
};

// Calls fn(position, site) for every error location, where position p means
// "after the first p moments". Positions are visited in increasing order.
template <class Fn>
void for_each_error_site(const NoiseModel& nm, const Circuit& c, Fn&& fn) {
  const std::size_t n = c.qubit_count();
  const auto& marks = c.layer_marks();
  std::size_t mi = 0;
  for (std::size_t p = 0; p <= c.depth(); ++p) {
    if (p > 0) {
      const auto& m = c.moment(p - 1);
      if (nm.p1 > 0.0)
        for (unsigned q = 0; q < n; ++q) fn(p, ErrorSite{ErrorSite::Depolarizing, {q}, nm.p1});
      if (nm.p2 > 0.0)
        for (auto& g : m) {
          auto qs = g.qubits();
          if (qs.size() >= 2) fn(p, ErrorSite{ErrorSite::Depolarizing, std::move(qs), nm.p2});
        }
      if (!nm.paulis.empty()) fn(p, ErrorSite{ErrorSite::Explicit, {}, 0.0});
      if (nm.global_depolarizing > 0.0 && !nm.global_per_layer)
        fn(p, ErrorSite{ErrorSite::Global, {}, nm.global_depolarizing});
    }
    while (mi < marks.size() && marks[mi] == p) {
      if (nm.global_depolarizing > 0.0 && nm.global_per_layer)
        fn(p, ErrorSite{ErrorSite::Global, {}, nm.global_depolarizing});
      ++mi;
    }
  }
}

// Probability that the error drawn at `site` anticommutes with `obs`.
inline double anticommute_probability(const NoiseModel& nm, const ErrorSite& site, const PauliString& obs) {
  switch (site.kind) {
    case ErrorSite::Depolarizing: {
      if (!obs.acts_on_any(site.qubits)) return 0.0;
      const double dim = std::ldexp(1.0, int(2 * site.qubits.size()));
      return site.prob * (dim / 2.0) / (dim - 1.0);
    }
    case ErrorSite::Explicit: {
      double q = 0.0;
      for (auto& w : nm.paulis)
        if (!w.pauli.commutes(obs)) q += w.prob;
      return q;
    }
    case ErrorSite::Global:
      return obs.is_identity_up_to_sign() ? 0.0 : site.prob / 2.0;
  }
  return 0.0;
}

// Draws a concrete error for `site`; returns false when the identity is drawn.
inline bool sample_error(const NoiseModel& nm, const ErrorSite& site, std::size_t n, Rng& rng, PauliString& out) {
  out = PauliString(n);
  switch (site.kind) {
    case ErrorSite::Depolarizing: {
      if (!rng.bernoulli(site.prob)) return false;
      const std::uint64_t dim = std::uint64_t(1) << (2 * site.qubits.size());
      const std::uint64_t v = 1 + rng.below(dim - 1);
      for (std::size_t i = 0; i < site.qubits.size(); ++i) {
        out.set_x(site.qubits[i], (v >> (2 * i)) & 1u);
        out.set_z(site.qubits[i], (v >> (2 * i + 1)) & 1u);
      }
      return true;
    }
    case ErrorSite::Explicit: {
      double u = rng.uniform();
      for (auto& w : nm.paulis) {
        if (u < w.prob) {
          out = w.pauli;
          out.set_negative(false);
          return !out.is_identity_up_to_sign();
        }
        u -= w.prob;
      }
      return false;
    }
    case ErrorSite::Global: {
      if (!rng.bernoulli(site.prob)) return false;
      for (std::size_t q = 0; q < n; ++q) {
        out.set_x(q, rng() & 1u);
        out.set_z(q, rng() & 1u);
      }
      return !out.is_identity_up_to_sign();
    }
  }
  return false;
}

}  // namespace qusquare
