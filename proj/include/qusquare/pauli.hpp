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

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qusquare/common.hpp"

namespace qusquare {

// Packed bit vector used for Pauli x/z parts and tableau columns.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t(1) << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

  std::vector<std::uint64_t>& words() { return w_; }
  const std::vector<std::uint64_t>& words() const { return w_; }

  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::size_t(std::popcount(w));
    return c;
  }
  BitVec& operator^=(const BitVec& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  bool operator==(const BitVec& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

inline std::size_t parity_and(const BitVec& a, const BitVec& b) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) acc ^= a.words()[i] & b.words()[i];
  return std::size_t(std::popcount(acc) & 1);
}

// Signed Hermitian Pauli operator. Qubit i carries X iff x_i, Z iff z_i and
// Y iff both.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n) : x_(n), z_(n) {}

  static PauliString single(std::size_t n, std::size_t q, char p, bool negative = false) {
    PauliString s(n);
    s.set(q, p);
    s.neg_ = negative;
    return s;
  }

  // Parses "+XIZY", "-ZZ" or an unsigned "XYZ".
  static PauliString parse(const std::string& text) {
    std::size_t off = 0;
    bool neg = false;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
      neg = text[0] == '-';
      off = 1;
    }
    PauliString s(text.size() - off);
    for (std::size_t i = off; i < text.size(); ++i) {
      const char c = text[i];
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        throw std::invalid_argument("bad Pauli character in '" + text + "'");
      s.set(i - off, c);
    }
    s.neg_ = neg;
    return s;
  }

  std::string str() const {
    std::string out(1, neg_ ? '-' : '+');
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
    return out;
  }

  std::size_t size() const { return x_.size(); }
  bool negative() const { return neg_; }
  int sign() const { return neg_ ? -1 : 1; }
  void set_negative(bool v) { neg_ = v; }
  void flip_sign() { neg_ = !neg_; }

  bool x(std::size_t q) const { return x_.get(q); }
  bool z(std::size_t q) const { return z_.get(q); }
  void set_x(std::size_t q, bool v) { x_.set(q, v); }
  void set_z(std::size_t q, bool v) { z_.set(q, v); }
  BitVec& xs() { return x_; }
  BitVec& zs() { return z_; }
  const BitVec& xs() const { return x_; }
  const BitVec& zs() const { return z_; }

  char at(std::size_t q) const {
    const bool a = x(q), b = z(q);
    return a ? (b ? 'Y' : 'X') : (b ? 'Z' : 'I');
  }
  void set(std::size_t q, char p) {
    set_x(q, p == 'X' || p == 'Y');
    set_z(q, p == 'Z' || p == 'Y');
  }

  bool is_identity_up_to_sign() const { return !x_.any() && !z_.any(); }
  bool is_identity() const { return !neg_ && is_identity_up_to_sign(); }
  bool is_diagonal() const { return !x_.any(); }

  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_.words().size(); ++i)
      w += std::size_t(std::popcount(x_.words()[i] | z_.words()[i]));
    return w;
  }

  bool commutes(const PauliString& o) const {
    return ((parity_and(x_, o.z_) ^ parity_and(z_, o.x_)) & 1u) == 0;
  }

  // True when the restriction to `qubits` is not the identity.
  bool acts_on_any(const std::vector<unsigned>& qubits) const {
    for (auto q : qubits)
      if (x(q) || z(q)) return true;
    return false;
  }

  bool same_operator(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }
  bool operator==(const PauliString& o) const { return neg_ == o.neg_ && same_operator(o); }

  std::size_t hash() const {
    std::uint64_t h = neg_ ? 0x51ed27ULL : 0;
    for (auto w : x_.words()) h = mix64(h ^ w);
    for (auto w : z_.words()) h = mix64(h ^ (w * 3));
    return std::size_t(h);
  }

 private:
  BitVec x_, z_;
  bool neg_ = false;
};

// Product of Paulis tracked with an explicit power of i, so that non-Hermitian
// intermediate products (e.g. X*Z) are represented exactly.
struct PhasedPauli {
  PauliString op;
  int i_pow = 0;  // overall factor i^i_pow; op's own sign is kept positive

  explicit PhasedPauli(std::size_t n) : op(n) {}
  explicit PhasedPauli(const PauliString& p) : op(p), i_pow(p.negative() ? 2 : 0) {
    op.set_negative(false);
  }

  // this <- this * rhs
  void mul(const PauliString& rhs) {
    int acc = rhs.negative() ? 2 : 0;
    for (std::size_t q = 0; q < op.size(); ++q) {
      const int x1 = op.x(q), z1 = op.z(q), x2 = rhs.x(q), z2 = rhs.z(q);
      // exponent of i produced by sigma(x1,z1) * sigma(x2,z2) with Y = iXZ
      int g = 0;
      if (x1 && z1)
        g = z2 - x2;
      else if (x1)
        g = z2 * (2 * x2 - 1);
      else if (z1)
        g = x2 * (1 - 2 * z2);
      acc += g;
      op.set_x(q, x1 ^ x2);
      op.set_z(q, z1 ^ z2);
    }
    i_pow = ((i_pow + acc) % 4 + 4) % 4;
  }

  // Hermitian view; throws if the accumulated phase is imaginary.
  PauliString hermitian() const {
    if (i_pow % 2) throw std::logic_error("Pauli product is not Hermitian");
    PauliString out = op;
    out.set_negative(i_pow == 2);
    return out;
  }
};

struct PauliHash {
  std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

}  // namespace qusquare
