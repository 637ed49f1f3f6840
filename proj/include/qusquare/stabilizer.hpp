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
#include <stdexcept>
#include <utility>
#include <vector>

#include "qusquare/backend.hpp"
#include "qusquare/circuit.hpp"
#include "qusquare/noise.hpp"
#include "qusquare/pauli.hpp"

namespace qusquare {

// Primitive Clifford steps that every supported gate lowers to.
struct Prim {
  enum Op { H, S, Sdg, X, Y, Z, CX, CZ, SWAP } op;
  unsigned a, b;
};

namespace detail {

inline int quarter_turns(double angle) {
  const double k = std::round(angle / (PI / 2));
  if (std::abs(angle - k * PI / 2) > 1e-9)
    throw UnsupportedGate("rotation angle is not a multiple of pi/2");
  return int(((long long)k % 4 + 4) % 4);
}

inline void lower_rotation(GateKind axis, unsigned q, double angle, std::vector<Prim>& out) {
  const int k = quarter_turns(angle);
  if (k == 0) return;
  if (axis == GateKind::Rz) {
    out.push_back({k == 1 ? Prim::S : k == 2 ? Prim::Z : Prim::Sdg, q, 0});
  } else if (axis == GateKind::Rx) {
    if (k == 2) {
      out.push_back({Prim::X, q, 0});
    } else {
      out.push_back({Prim::H, q, 0});
      out.push_back({k == 1 ? Prim::S : Prim::Sdg, q, 0});
      out.push_back({Prim::H, q, 0});
    }
  } else {
    if (k == 2) {
      out.push_back({Prim::Y, q, 0});
    } else if (k == 1) {
      out.push_back({Prim::Z, q, 0});
      out.push_back({Prim::H, q, 0});
    } else {
      out.push_back({Prim::H, q, 0});
      out.push_back({Prim::Z, q, 0});
    }
  }
}

}  // namespace detail

// Lowers g to primitive Clifford steps in time order. Rotations are accepted
// when every angle is a multiple of pi/2; controlled variants are rejected.
inline std::vector<Prim> lower_clifford(const Gate& g) {
  if (!g.controls.empty()) throw UnsupportedGate(std::string("controlled ") + gate_name(g.kind) + " is not Clifford");
  std::vector<Prim> out;
  const unsigned a = g.targets[0];
  const unsigned b = g.targets.size() > 1 ? g.targets[1] : 0;
  switch (g.kind) {
    case GateKind::H: out.push_back({Prim::H, a, 0}); break;
    case GateKind::S: out.push_back({Prim::S, a, 0}); break;
    case GateKind::Sdg: out.push_back({Prim::Sdg, a, 0}); break;
    case GateKind::X: out.push_back({Prim::X, a, 0}); break;
    case GateKind::Y: out.push_back({Prim::Y, a, 0}); break;
    case GateKind::Z: out.push_back({Prim::Z, a, 0}); break;
    case GateKind::CX: out.push_back({Prim::CX, a, b}); break;
    case GateKind::CZ: out.push_back({Prim::CZ, a, b}); break;
    case GateKind::SWAP: out.push_back({Prim::SWAP, a, b}); break;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: detail::lower_rotation(g.kind, a, g.params[0], out); break;
    case GateKind::U:
      detail::lower_rotation(GateKind::Rz, a, g.params[2], out);
      detail::lower_rotation(GateKind::Ry, a, g.params[1], out);
      detail::lower_rotation(GateKind::Rz, a, g.params[0], out);
      break;
  }
  return out;
}

namespace detail {

// Conjugation rules P -> G P G^dagger on packed words (one bit per row).
template <class W>
inline void apply_prim_words(const Prim& p, W* xa, W* za, W* xb, W* zb, W& s) {
  switch (p.op) {
    case Prim::H:
      s ^= *xa & *za;
      std::swap(*xa, *za);
      break;
    case Prim::S:
      s ^= *xa & *za;
      *za ^= *xa;
      break;
    case Prim::Sdg:
      s ^= *xa & ~*za;
      *za ^= *xa;
      break;
    case Prim::X: s ^= *za; break;
    case Prim::Y: s ^= *xa ^ *za; break;
    case Prim::Z: s ^= *xa; break;
    case Prim::CX:
      s ^= *xa & *zb & ~(*xb ^ *za);
      *xb ^= *xa;
      *za ^= *zb;
      break;
    case Prim::CZ:
      s ^= *xa & *xb & (*za ^ *zb);
      *za ^= *xb;
      *zb ^= *xa;
      break;
    case Prim::SWAP:
      std::swap(*xa, *xb);
      std::swap(*za, *zb);
      break;
  }
}

inline void apply_prim(PauliString& p, const Prim& g) {
  std::uint64_t xa = p.x(g.a), za = p.z(g.a), xb = 0, zb = 0, s = 0;
  const bool two = g.op == Prim::CX || g.op == Prim::CZ || g.op == Prim::SWAP;
  if (two) {
    xb = p.x(g.b);
    zb = p.z(g.b);
  }
  apply_prim_words<std::uint64_t>(g, &xa, &za, &xb, &zb, s);
  p.set_x(g.a, xa & 1u);
  p.set_z(g.a, za & 1u);
  if (two) {
    p.set_x(g.b, xb & 1u);
    p.set_z(g.b, zb & 1u);
  }
  if (s & 1u) p.flip_sign();
}

}  // namespace detail

// p <- G p G^dagger
inline void conjugate_gate(PauliString& p, const Gate& g) {
  for (auto& pr : lower_clifford(g)) detail::apply_prim(p, pr);
}

// p <- G^dagger p G
inline void conjugate_gate_inverse(PauliString& p, const Gate& g) { conjugate_gate(p, inverse(g)); }

// U(c) p U(c)^dagger
inline PauliString conjugate_pauli(const Circuit& c, PauliString p) {
  if (p.size() != c.qubit_count()) throw std::invalid_argument("Pauli size does not match circuit");
  for (auto& m : c.moments())
    for (auto& g : m) conjugate_gate(p, g);
  return p;
}

// U(c)^dagger p U(c)
inline PauliString conjugate_pauli_inverse(const Circuit& c, PauliString p) {
  if (p.size() != c.qubit_count()) throw std::invalid_argument("Pauli size does not match circuit");
  for (std::size_t i = c.depth(); i-- > 0;)
    for (auto& g : c.moment(i)) conjugate_gate_inverse(p, g);
  return p;
}

// Clifford action as images of X_i (rows 0..n-1) and Z_i (rows n..2n-1).
// Storage is column-major so a gate touches only the words of its columns.
class StabilizerTableau {
 public:
  explicit StabilizerTableau(std::size_t n) : n_(n), x_(n, BitVec(2 * n)), z_(n, BitVec(2 * n)), s_(2 * n) {
    for (std::size_t i = 0; i < n; ++i) {
      x_[i].set(i, true);
      z_[i].set(n + i, true);
    }
  }

  static StabilizerTableau from_circuit(const Circuit& c) {
    StabilizerTableau t(c.qubit_count());
    for (auto& m : c.moments())
      for (auto& g : m) t.apply(g);
    return t;
  }

  std::size_t qubit_count() const { return n_; }

  void apply(const Gate& g) {
    for (auto& p : lower_clifford(g)) apply(p);
  }

  void apply(const Prim& p) {
    auto& sw = s_.words();
    const bool two = p.op == Prim::CX || p.op == Prim::CZ || p.op == Prim::SWAP;
    auto& xa = x_[p.a].words();
    auto& za = z_[p.a].words();
    std::uint64_t dummy_x = 0, dummy_z = 0;
    for (std::size_t w = 0; w < sw.size(); ++w) {
      std::uint64_t* xb = two ? &x_[p.b].words()[w] : &dummy_x;
      std::uint64_t* zb = two ? &z_[p.b].words()[w] : &dummy_z;
      detail::apply_prim_words<std::uint64_t>(p, &xa[w], &za[w], xb, zb, sw[w]);
    }
  }

  PauliString row(std::size_t r) const {
    PauliString p(n_);
    for (std::size_t q = 0; q < n_; ++q) {
      p.set_x(q, x_[q].get(r));
      p.set_z(q, z_[q].get(r));
    }
    p.set_negative(s_.get(r));
    return p;
  }
  PauliString x_image(std::size_t i) const { return row(i); }
  PauliString z_image(std::size_t i) const { return row(n_ + i); }

  // U q U^dagger for an arbitrary Pauli q.
  PauliString image(const PauliString& q) const {
    PhasedPauli acc(n_);
    acc.i_pow = q.negative() ? 2 : 0;
    for (std::size_t k = 0; k < n_; ++k) {
      if (q.x(k) && q.z(k)) acc.i_pow += 1;
      if (q.x(k)) acc.mul(x_image(k));
      if (q.z(k)) acc.mul(z_image(k));
    }
    acc.i_pow %= 4;
    return acc.hermitian();
  }

  // Images of X_i mutually commute, images of Z_i mutually commute and
  // X_i, Z_j anticommute exactly when i == j.
  bool is_symplectic() const {
    std::vector<PauliString> rows;
    for (std::size_t r = 0; r < 2 * n_; ++r) rows.push_back(row(r));
    for (std::size_t a = 0; a < 2 * n_; ++a)
      for (std::size_t b = a + 1; b < 2 * n_; ++b) {
        const bool should_anti = (b == a + n_) && a < n_;
        if (rows[a].commutes(rows[b]) == should_anti) return false;
      }
    return true;
  }

  bool operator==(const StabilizerTableau& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && s_ == o.s_;
  }

  std::size_t hash() const {
    std::uint64_t h = n_;
    for (auto& c : x_)
      for (auto w : c.words()) h = mix64(h ^ w);
    for (auto& c : z_)
      for (auto w : c.words()) h = mix64(h ^ (w + 1));
    for (auto w : s_.words()) h = mix64(h ^ (w + 2));
    return std::size_t(h);
  }

 private:
  std::size_t n_;
  std::vector<BitVec> x_, z_;
  BitVec s_;
};

struct TableauHash {
  std::size_t operator()(const StabilizerTableau& t) const { return t.hash(); }
};

namespace detail {

inline PauliString random_pauli(std::size_t n, Rng& rng) {
  PauliString p(n);
  for (std::size_t q = 0; q < n; ++q) {
    const auto v = rng.below(4);
    p.set_x(q, v & 1u);
    p.set_z(q, v & 2u);
  }
  return p;
}

// Gates V (time order, local qubits) with V p1 V^dag = +-X_0 and
// V p2 V^dag = +-Z_0, for anticommuting p1, p2.
inline std::vector<Gate> sweep_pair(PauliString p1, PauliString p2) {
  const unsigned m = unsigned(p1.size());
  std::vector<Gate> out;
  auto emit = [&](const Gate& g) {
    conjugate_gate(p1, g);
    conjugate_gate(p2, g);
    out.push_back(g);
  };
  for (unsigned q = 0; q < m; ++q)
    if (p1.z(q)) emit(p1.x(q) ? gates::s(q) : gates::h(q));
  std::vector<unsigned> xs;
  for (unsigned q = 0; q < m; ++q)
    if (p1.x(q)) xs.push_back(q);
  for (std::size_t i = 1; i < xs.size(); ++i) emit(gates::cx(xs[0], xs[i]));
  if (xs[0] != 0) emit(gates::swap(0, xs[0]));
  emit(gates::h(0));
  // p1 is now +-Z_0, so p2 carries an X or Y on qubit 0
  if (p2.z(0)) emit(gates::s(0));
  for (unsigned q = 1; q < m; ++q)
    if (p2.z(q)) emit(p2.x(q) ? gates::s(q) : gates::h(q));
  for (unsigned q = 1; q < m; ++q)
    if (p2.x(q)) emit(gates::cx(0, q));
  emit(gates::h(0));
  return out;
}

}  // namespace detail

// Uniformly random n-qubit Clifford (up to global phase). For each qubit j the
// images of X_j, Z_j are drawn as a uniform anticommuting pair with uniform
// signs on qubits j..n-1, and the remaining action is sampled recursively.
inline Circuit random_clifford(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("random_clifford needs n >= 1");
  std::vector<std::vector<Gate>> blocks(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = n - j;
    PauliString p1(m), p2(m);
    do p1 = detail::random_pauli(m, rng);
    while (p1.is_identity_up_to_sign());
    do p2 = detail::random_pauli(m, rng);
    while (p2.commutes(p1));
    auto v = detail::sweep_pair(p1, p2);
    auto& blk = blocks[j];
    const auto flip = rng.below(4);
    if (flip == 1) blk.push_back(gates::x(0));
    if (flip == 2) blk.push_back(gates::y(0));
    if (flip == 3) blk.push_back(gates::z(0));
    for (auto it = v.rbegin(); it != v.rend(); ++it) blk.push_back(inverse(*it));
    for (auto& g : blk)
      for (auto& t : g.targets) t += unsigned(j);
  }
  Circuit c(n);
  for (std::size_t j = n; j-- > 0;)
    for (auto& g : blocks[j]) c.append(g);
  return c;
}

// Single-moment circuit preparing a uniformly random product stabilizer state
// with p|psi> = |psi>.
inline Circuit stabilizer_product_state_prep(const PauliString& p, Rng& rng) {
  if (p.is_identity_up_to_sign()) throw std::domain_error("cannot prepare an eigenstate of +-identity");
  const std::size_t n = p.size();
  std::vector<unsigned> active;
  for (unsigned q = 0; q < n; ++q)
    if (p.x(q) || p.z(q)) active.push_back(q);
  // eigenvalue per active qubit, product equal to the sign of p
  std::vector<int> ev(n, 1);
  int prod = 1;
  for (std::size_t i = 0; i + 1 < active.size(); ++i) {
    ev[active[i]] = rng.below(2) ? -1 : 1;
    prod *= ev[active[i]];
  }
  ev[active.back()] = prod * p.sign();

  std::vector<Gate> layer;
  auto prepare = [&](unsigned q, char axis, int e) {
    if (axis == 'Z' && e < 0) layer.push_back(gates::x(q));
    if (axis == 'X') layer.push_back(e > 0 ? gates::h(q) : gates::ry(q, -PI / 2));
    if (axis == 'Y') layer.push_back(gates::rx(q, e > 0 ? -PI / 2 : PI / 2));
  };
  for (unsigned q = 0; q < n; ++q) {
    const char c = p.at(q);
    if (c != 'I') {
      prepare(q, c, ev[q]);
    } else {
      const auto r = rng.below(6);
      prepare(q, "ZXY"[r / 2], (r & 1u) ? -1 : 1);
    }
  }
  Circuit out(n);
  out.append_moment(std::move(layer));
  return out;
}

// Ideal expectation of a Pauli observable on U(c)|0...0>: +-1 or 0.
inline int stabilizer_expectation(const Circuit& c, const PauliString& obs) {
  const PauliString back = conjugate_pauli_inverse(c, obs);
  if (back.xs().any()) return 0;
  return back.sign();
}

// Probability that a single shot of the diagonal observable is flipped by
// Pauli errors or readout errors, together with the ideal value.
struct PauliShotModel {
  int ideal = 0;
  double flip = 0.0;
};

inline PauliShotModel pauli_shot_model(const Circuit& c, const PauliString& obs, const NoiseModel& noise) {
  if (!obs.is_diagonal()) throw std::invalid_argument("observable must be a Z/I Pauli");
  if (obs.size() != c.qubit_count()) throw std::invalid_argument("observable size does not match circuit");
  std::vector<std::vector<ErrorSite>> sites(c.depth() + 1);
  if (noise.has_gate_noise())
    for_each_error_site(noise, c, [&](std::size_t p, ErrorSite s) { sites[p].push_back(std::move(s)); });
  double keep = 1.0;
  PauliString o = obs;
  for (std::size_t p = c.depth() + 1; p-- > 0;) {
    for (auto& s : sites[p]) keep *= 1.0 - 2.0 * anticommute_probability(noise, s, o);
    if (p > 0)
      for (auto& g : c.moment(p - 1)) conjugate_gate_inverse(o, g);
  }
  for (std::size_t q = 0; q < obs.size(); ++q)
    if (obs.z(q)) keep *= 1.0 - 2.0 * noise.readout(q);
  PauliShotModel m;
  m.ideal = o.xs().any() ? 0 : o.sign();
  m.flip = 0.5 * (1.0 - keep);
  return m;
}

// Samples of the diagonal observable's eigenvalue. Independent Pauli errors
// act on a stabilizer measurement only through their commutation with the
// back-propagated observable, so each shot is the ideal value times an exact
// Bernoulli sign; an undetermined observable gives fair coin flips.
inline std::vector<int> run_pauli_measurement(const Circuit& c, const PauliString& obs, const NoiseModel& noise,
                                              std::size_t shots, Rng& rng) {
  const auto m = pauli_shot_model(c, obs, noise);
  std::vector<int> out(shots);
  for (auto& v : out) {
    if (m.ideal == 0)
      v = rng.below(2) ? 1 : -1;
    else
      v = rng.bernoulli(m.flip) ? -m.ideal : m.ideal;
  }
  return out;
}

class StabilizerBackend : public Backend {
 public:
  explicit StabilizerBackend(NoiseModel nm = {}) : noise_(std::move(nm)) {}
  std::string name() const override { return "stabilizer"; }
  const NoiseModel& noise() const override { return noise_; }
  std::vector<int> measure_pauli(const Circuit& c, const PauliString& obs, std::size_t shots,
                                 Rng& rng) const override {
    return run_pauli_measurement(c, obs, noise_, shots, rng);
  }

 private:
  NoiseModel noise_;
};

}  // namespace qusquare
