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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qusquare/common.hpp"
#include "qusquare/pauli.hpp"

namespace qusquare {

enum class GateKind { H, S, Sdg, X, Y, Z, CX, CZ, SWAP, Rx, Ry, Rz, U };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::CX: return "CX";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::Rx: return "Rx";
    case GateKind::Ry: return "Ry";
    case GateKind::Rz: return "Rz";
    case GateKind::U: return "U";
  }
  return "?";
}

inline GateKind gate_kind_from_name(const std::string& s) {
  static const GateKind all[] = {GateKind::H,  GateKind::S,  GateKind::Sdg, GateKind::X,   GateKind::Y,
                                 GateKind::Z,  GateKind::CX, GateKind::CZ,  GateKind::SWAP, GateKind::Rx,
                                 GateKind::Ry, GateKind::Rz, GateKind::U};
  for (auto k : all)
    if (s == gate_name(k)) return k;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

inline std::size_t target_arity(GateKind k) {
  return (k == GateKind::CX || k == GateKind::CZ || k == GateKind::SWAP) ? 2 : 1;
}

inline std::size_t param_arity(GateKind k) {
  switch (k) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: return 1;
    case GateKind::U: return 3;
    default: return 0;
  }
}

struct Control {
  unsigned qubit;
  bool bit;
  bool operator==(const Control&) const = default;
};

// U(a, b, c) is the matrix Rz(a) Ry(b) Rz(c). CX/CZ list (control, target) in
// `targets`; extra `controls` turn any gate into a multi-controlled variant.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<unsigned> targets;
  std::vector<double> params;
  std::vector<Control> controls;

  bool operator==(const Gate&) const = default;

  std::vector<unsigned> qubits() const {
    std::vector<unsigned> q = targets;
    for (auto& c : controls) q.push_back(c.qubit);
    return q;
  }

  void validate(std::size_t n) const {
    if (targets.size() != target_arity(kind))
      throw std::invalid_argument(std::string("wrong target count for ") + gate_name(kind));
    if (params.size() != param_arity(kind))
      throw std::invalid_argument(std::string("wrong parameter count for ") + gate_name(kind));
    auto q = qubits();
    for (auto v : q)
      if (v >= n) throw std::out_of_range("gate qubit index out of range");
    std::sort(q.begin(), q.end());
    if (std::adjacent_find(q.begin(), q.end()) != q.end())
      throw std::invalid_argument("gate targets and controls overlap");
  }
};

namespace gates {
inline Gate make(GateKind k, std::vector<unsigned> t, std::vector<double> p = {}) {
  return Gate{k, std::move(t), std::move(p), {}};
}
inline Gate h(unsigned q) { return make(GateKind::H, {q}); }
inline Gate s(unsigned q) { return make(GateKind::S, {q}); }
inline Gate sdg(unsigned q) { return make(GateKind::Sdg, {q}); }
inline Gate x(unsigned q) { return make(GateKind::X, {q}); }
inline Gate y(unsigned q) { return make(GateKind::Y, {q}); }
inline Gate z(unsigned q) { return make(GateKind::Z, {q}); }
inline Gate cx(unsigned c, unsigned t) { return make(GateKind::CX, {c, t}); }
inline Gate cz(unsigned a, unsigned b) { return make(GateKind::CZ, {a, b}); }
inline Gate swap(unsigned a, unsigned b) { return make(GateKind::SWAP, {a, b}); }
inline Gate rx(unsigned q, double a) { return make(GateKind::Rx, {q}, {a}); }
inline Gate ry(unsigned q, double a) { return make(GateKind::Ry, {q}, {a}); }
inline Gate rz(unsigned q, double a) { return make(GateKind::Rz, {q}, {a}); }
inline Gate u(unsigned q, double a, double b, double c) { return make(GateKind::U, {q}, {a, b, c}); }
inline Gate controlled(Gate g, std::vector<Control> ctrl) {
  for (auto& c : ctrl) g.controls.push_back(c);
  return g;
}
}  // namespace gates

inline Gate inverse(const Gate& g) {
  Gate r = g;
  switch (g.kind) {
    case GateKind::S: r.kind = GateKind::Sdg; break;
    case GateKind::Sdg: r.kind = GateKind::S; break;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: r.params[0] = -g.params[0]; break;
    case GateKind::U: r.params = {-g.params[2], -g.params[1], -g.params[0]}; break;
    default: break;
  }
  return r;
}

// Ordered moments of gates acting on disjoint qubits. Gates appended with
// append() are packed as early as possible, but never before the most recent
// barrier.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n) : n_(n), frontier_(n, 0) {
    if (n == 0) throw std::invalid_argument("circuit needs at least one qubit");
  }

  std::size_t qubit_count() const { return n_; }
  std::size_t depth() const { return moments_.size(); }
  const std::vector<std::vector<Gate>>& moments() const { return moments_; }
  const std::vector<Gate>& moment(std::size_t i) const { return moments_[i]; }

  // Positions p (after the first p moments) that close a logical layer.
  const std::vector<std::size_t>& layer_marks() const { return marks_; }
  void mark_layer() { marks_.push_back(moments_.size()); }

  Circuit& append(const Gate& g) {
    g.validate(n_);
    std::size_t slot = floor_;
    for (auto q : g.qubits()) slot = std::max(slot, frontier_[q]);
    if (slot == moments_.size()) moments_.emplace_back();
    moments_[slot].push_back(g);
    for (auto q : g.qubits()) frontier_[q] = slot + 1;
    return *this;
  }

  // Appends g as a new moment of its own, regardless of packing.
  Circuit& append_moment(std::vector<Gate> gs) {
    std::vector<int> used(n_, 0);
    for (auto& g : gs) {
      g.validate(n_);
      for (auto q : g.qubits()) {
        if (used[q]++) throw std::invalid_argument("gates within a moment must act on disjoint qubits");
      }
    }
    moments_.push_back(std::move(gs));
    barrier();
    return *this;
  }

  void barrier() {
    floor_ = moments_.size();
    std::fill(frontier_.begin(), frontier_.end(), floor_);
  }

  std::size_t gate_count() const {
    std::size_t c = 0;
    for (auto& m : moments_) c += m.size();
    return c;
  }

  bool operator==(const Circuit& o) const {
    return n_ == o.n_ && moments_ == o.moments_ && marks_ == o.marks_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Gate>> moments_;
  std::vector<std::size_t> marks_;
  std::vector<std::size_t> frontier_;
  std::size_t floor_ = 0;
};

inline std::size_t depth(const Circuit& c) { return c.depth(); }

// Copies moments [from, to) of src onto out, carrying the layer marks that
// fall inside the window (a mark exactly at `from` belongs to the moments
// before it, unless from is 0).
inline void copy_moments(Circuit& out, const Circuit& src, std::size_t from, std::size_t to) {
  const auto& marks = src.layer_marks();
  std::size_t mi = 0;
  while (mi < marks.size() && (marks[mi] < from || (from > 0 && marks[mi] == from))) ++mi;
  for (std::size_t p = from;; ++p) {
    while (mi < marks.size() && marks[mi] == p) {
      out.mark_layer();
      ++mi;
    }
    if (p == to) break;
    out.append_moment(src.moment(p));
  }
}

// Moments [s, s + floor(depth*mu)).
inline Circuit truncate_fraction(const Circuit& c, double mu, std::size_t s) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::domain_error("mu must lie in (0, 1]");
  const std::size_t d = c.depth();
  const auto len = std::size_t(std::floor(double(d) * mu + 1e-12));
  const auto smax = std::size_t(std::floor(double(d) * (1.0 - mu) + 1e-12));
  if (s > smax) throw std::out_of_range("window start outside [0, floor(d(1-mu))]");
  Circuit out(c.qubit_count());
  copy_moments(out, c, s, s + len);
  return out;
}

inline Circuit concat(const Circuit& a, const Circuit& b) {
  if (a.qubit_count() != b.qubit_count()) throw std::invalid_argument("qubit-count mismatch in concat");
  Circuit out(a.qubit_count());
  copy_moments(out, a, 0, a.depth());
  copy_moments(out, b, 0, b.depth());
  return out;
}

// Gates in reverse order, each inverted. Layer marks are dropped.
inline Circuit inverse(const Circuit& c) {
  Circuit out(c.qubit_count());
  for (std::size_t i = c.depth(); i-- > 0;)
    for (auto& g : c.moment(i)) out.append(inverse(g));
  return out;
}

// Copy of c on n qubits with qubit q renamed to map[q].
inline Circuit relabel(const Circuit& c, const std::vector<unsigned>& map, std::size_t n) {
  if (map.size() != c.qubit_count()) throw std::invalid_argument("relabel map has wrong size");
  Circuit out(n);
  for (auto& m : c.moments())
    for (Gate g : m) {
      for (auto& t : g.targets) t = map[t];
      for (auto& k : g.controls) k.qubit = map[k.qubit];
      out.append(g);
    }
  return out;
}

// Appends every gate of src to out with an extra control.
inline void append_controlled(Circuit& out, const Circuit& src, Control ctl) {
  for (auto& m : src.moments())
    for (Gate g : m) {
      g.controls.push_back(ctl);
      out.append(g);
    }
}

// Single moment U with U p U^dagger diagonal and of the same sign: H maps X to
// Z, Rx(pi/2) maps Y to Z.
inline Circuit basis_change_layer(const PauliString& p) {
  Circuit out(p.size());
  std::vector<Gate> layer;
  for (unsigned q = 0; q < p.size(); ++q) {
    const char c = p.at(q);
    if (c == 'X') layer.push_back(gates::h(q));
    if (c == 'Y') layer.push_back(gates::rx(q, PI / 2));
  }
  if (!layer.empty()) out.append_moment(std::move(layer));
  return out;
}

// Image of p after a basis change: same sign, X/Y replaced by Z.
inline PauliString diagonalized(const PauliString& p) {
  PauliString d(p.size());
  for (std::size_t q = 0; q < p.size(); ++q) d.set_z(q, p.x(q) || p.z(q));
  d.set_negative(p.negative());
  return d;
}

}  // namespace qusquare
