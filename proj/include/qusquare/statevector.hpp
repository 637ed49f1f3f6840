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
#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qusquare/backend.hpp"
#include "qusquare/circuit.hpp"
#include "qusquare/noise.hpp"

namespace qusquare {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 rx_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
}
inline Mat2 ry_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
}
inline Mat2 rz_matrix(double t) { return {std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2)}; }

// 2x2 matrix acting on the (last) target of a single-target or CX/CZ gate.
inline Mat2 target_matrix(const Gate& g) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0, 1);
  switch (g.kind) {
    case GateKind::H: return {r, r, r, -r};
    case GateKind::S: return {1, 0, 0, i};
    case GateKind::Sdg: return {1, 0, 0, -i};
    case GateKind::X:
    case GateKind::CX: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -i, i, 0};
    case GateKind::Z:
    case GateKind::CZ: return {1, 0, 0, -1};
    case GateKind::Rx: return rx_matrix(g.params[0]);
    case GateKind::Ry: return ry_matrix(g.params[0]);
    case GateKind::Rz: return rz_matrix(g.params[0]);
    case GateKind::U:
      return mat_mul(rz_matrix(g.params[0]), mat_mul(ry_matrix(g.params[1]), rz_matrix(g.params[2])));
    case GateKind::SWAP: break;
  }
  throw std::logic_error("gate has no single-target matrix");
}

class StateVector {
 public:
  explicit StateVector(std::size_t n) : n_(n), a_(std::size_t(1) << n, cplx(0, 0)) {
    if (n > 30) throw std::length_error("statevector limited to 30 qubits");
    a_[0] = 1.0;
  }

  std::size_t qubit_count() const { return n_; }
  std::size_t dim() const { return a_.size(); }
  std::vector<cplx>& amplitudes() { return a_; }
  const std::vector<cplx>& amplitudes() const { return a_; }
  cplx operator[](std::size_t i) const { return a_[i]; }

  double norm2() const {
    double s = 0;
    for (auto& v : a_) s += std::norm(v);
    return s;
  }

  void apply(const Gate& g) {
    g.validate(n_);
    std::uint64_t cmask = 0, cval = 0;
    for (auto& c : g.controls) {
      cmask |= std::uint64_t(1) << c.qubit;
      if (c.bit) cval |= std::uint64_t(1) << c.qubit;
    }
    if (g.kind == GateKind::SWAP) {
      const std::uint64_t ba = std::uint64_t(1) << g.targets[0], bb = std::uint64_t(1) << g.targets[1];
      for (std::uint64_t i = 0; i < a_.size(); ++i)
        if ((i & ba) && !(i & bb) && (i & cmask) == cval) std::swap(a_[i], a_[(i ^ ba) | bb]);
      return;
    }
    unsigned t = g.targets[0];
    if (g.kind == GateKind::CX || g.kind == GateKind::CZ) {
      cmask |= std::uint64_t(1) << g.targets[0];
      cval |= std::uint64_t(1) << g.targets[0];
      t = g.targets[1];
    }
    apply_matrix(target_matrix(g), t, cmask, cval);
  }

  void apply_matrix(const Mat2& m, unsigned t, std::uint64_t cmask = 0, std::uint64_t cval = 0) {
    const std::uint64_t tb = std::uint64_t(1) << t;
    for (std::uint64_t i = 0; i < a_.size(); ++i) {
      if ((i & tb) || (i & cmask) != cval) continue;
      const cplx x0 = a_[i], x1 = a_[i | tb];
      a_[i] = m[0] * x0 + m[1] * x1;
      a_[i | tb] = m[2] * x0 + m[3] * x1;
    }
  }

  // Applies a Pauli operator, sign included.
  void apply(const PauliString& p) {
    std::uint64_t xm = 0, zm = 0;
    int ycount = 0;
    for (std::size_t q = 0; q < n_; ++q) {
      if (p.x(q)) xm |= std::uint64_t(1) << q;
      if (p.z(q)) zm |= std::uint64_t(1) << q;
      if (p.x(q) && p.z(q)) ++ycount;
    }
    // Y = i X Z: the operator is i^ycount X^x Z^z
    static const cplx ipow[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
    const cplx phase = ipow[ycount % 4] * double(p.sign());
    std::vector<cplx> out(a_.size());
    for (std::uint64_t i = 0; i < a_.size(); ++i) {
      const double zs = (std::popcount(i & zm) & 1) ? -1.0 : 1.0;
      out[i ^ xm] = phase * zs * a_[i];
    }
    a_.swap(out);
  }

  double expectation(const PauliString& p) const {
    StateVector t = *this;
    t.apply(p);
    cplx s = 0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += std::conj(a_[i]) * t.a_[i];
    return s.real();
  }

  // Exact <Z_q>.
  double z_expectation(unsigned q) const {
    double s = 0;
    for (std::uint64_t i = 0; i < a_.size(); ++i) s += ((i >> q) & 1u) ? -std::norm(a_[i]) : std::norm(a_[i]);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) p[i] = std::norm(a_[i]);
    return p;
  }

 private:
  std::size_t n_;
  std::vector<cplx> a_;
};

inline StateVector apply_gate(StateVector s, const Gate& g) {
  s.apply(g);
  return s;
}

inline void run_circuit(StateVector& s, const Circuit& c) {
  for (auto& m : c.moments())
    for (auto& g : m) s.apply(g);
}

inline StateVector simulate(const Circuit& c) {
  StateVector s(c.qubit_count());
  run_circuit(s, c);
  return s;
}

// Exact <psi|P|psi> for the noiseless output of c.
inline double expectation(const Circuit& c, const PauliString& p) { return simulate(c).expectation(p); }

// Dense complex matrix, row-major.
struct CMatrix {
  std::size_t dim = 0;
  std::vector<cplx> a;
  cplx& operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  cplx operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

inline CMatrix dense_unitary(const Circuit& c) {
  if (c.qubit_count() > 12) throw std::length_error("dense_unitary is limited to 12 qubits");
  const std::size_t dim = std::size_t(1) << c.qubit_count();
  CMatrix u{dim, std::vector<cplx>(dim * dim)};
  for (std::size_t col = 0; col < dim; ++col) {
    StateVector s(c.qubit_count());
    s.amplitudes()[0] = 0;
    s.amplitudes()[col] = 1;
    run_circuit(s, c);
    for (std::size_t r = 0; r < dim; ++r) u(r, col) = s[r];
  }
  return u;
}

namespace detail {

struct Sampler {
  std::vector<double> cdf;
  explicit Sampler(const StateVector& s) : cdf(s.dim()) {
    double acc = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
      acc += std::norm(s[i]);
      cdf[i] = acc;
    }
  }
  std::uint64_t draw(Rng& rng) const {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return std::uint64_t(it - cdf.begin());
  }
};

inline std::uint64_t readout(std::uint64_t bits, const NoiseModel& nm, std::size_t n, Rng& rng) {
  if (!nm.has_readout_noise()) return bits;
  for (std::size_t q = 0; q < n; ++q)
    if (rng.bernoulli(nm.readout(q))) bits ^= std::uint64_t(1) << q;
  return bits;
}

}  // namespace detail

// Noisy computational-basis samples; bit q of each value is qubit q. With
// gate noise every trajectory draws its own Pauli errors and contributes
// `shots_per_trajectory` samples (1 gives independent shots).
inline std::vector<std::uint64_t> sample_bitstrings(const Circuit& c, const NoiseModel& noise, std::size_t shots,
                                                    Rng& rng, std::size_t shots_per_trajectory = 1) {
  const std::size_t n = c.qubit_count();
  if (n > 63) throw std::length_error("bitstring sampling limited to 63 qubits");
  std::vector<std::uint64_t> out(shots);
  const StateVector ideal = simulate(c);
  const Rng base = rng.fork(0x5eed);
  rng();
  if (!noise.has_gate_noise()) {
    detail::Sampler smp(ideal);
    Rng r = base;
    for (auto& b : out) b = detail::readout(smp.draw(r), noise, n, r);
    return out;
  }
  std::vector<std::pair<std::size_t, ErrorSite>> sites;
  for_each_error_site(noise, c, [&](std::size_t p, ErrorSite s) { sites.emplace_back(p, std::move(s)); });
  const std::size_t spt = std::max<std::size_t>(1, shots_per_trajectory);
  const std::size_t ntraj = (shots + spt - 1) / spt;
  std::optional<detail::Sampler> ideal_sampler;
  ideal_sampler.emplace(ideal);
  parallel_for(ntraj, [&](std::size_t t) {
    Rng r = base.fork(t);
    std::vector<std::pair<std::size_t, PauliString>> errs;
    PauliString e;
    for (auto& [p, s] : sites)
      if (sample_error(noise, s, n, r, e)) errs.emplace_back(p, e);
    const std::size_t lo = t * spt, hi = std::min(shots, lo + spt);
    if (errs.empty()) {
      for (std::size_t k = lo; k < hi; ++k) out[k] = detail::readout(ideal_sampler->draw(r), noise, n, r);
      return;
    }
    StateVector s(n);
    std::size_t ei = 0;
    for (std::size_t p = 0; p <= c.depth(); ++p) {
      if (p > 0)
        for (auto& g : c.moment(p - 1)) s.apply(g);
      while (ei < errs.size() && errs[ei].first == p) s.apply(errs[ei++].second);
    }
    detail::Sampler smp(s);
    for (std::size_t k = lo; k < hi; ++k) out[k] = detail::readout(smp.draw(r), noise, n, r);
  });
  return out;
}

inline int diagonal_eigenvalue(const PauliString& obs, std::uint64_t bits) {
  std::uint64_t zm = 0;
  for (std::size_t q = 0; q < obs.size(); ++q)
    if (obs.z(q)) zm |= std::uint64_t(1) << q;
  const int par = std::popcount(bits & zm) & 1;
  return obs.sign() * (par ? -1 : 1);
}

class StatevectorBackend : public Backend {
 public:
  explicit StatevectorBackend(NoiseModel nm = {}, std::size_t shots_per_trajectory = 1)
      : noise_(std::move(nm)), spt_(shots_per_trajectory) {}
  std::string name() const override { return "statevector"; }
  const NoiseModel& noise() const override { return noise_; }
  std::size_t shots_per_trajectory() const { return spt_; }

  std::vector<std::uint64_t> sample(const Circuit& c, std::size_t shots, Rng& rng) const override {
    return sample_bitstrings(c, noise_, shots, rng, spt_);
  }

  std::vector<int> measure_pauli(const Circuit& c, const PauliString& obs, std::size_t shots,
                                 Rng& rng) const override {
    if (!obs.is_diagonal()) throw std::invalid_argument("observable must be a Z/I Pauli");
    auto bits = sample(c, shots, rng);
    std::vector<int> out(shots);
    for (std::size_t i = 0; i < shots; ++i) out[i] = diagonal_eigenvalue(obs, bits[i]);
    return out;
  }

 private:
  NoiseModel noise_;
  std::size_t spt_;
};

}  // namespace qusquare
