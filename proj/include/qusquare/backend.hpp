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

#include <cstdint>
#include <string>
#include <vector>

#include "qusquare/circuit.hpp"
#include "qusquare/noise.hpp"

namespace qusquare {

// Execution target. A backend owns the noise it applies, like a device owns
// its error rates; hardware clients would implement the same interface.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual const NoiseModel& noise() const = 0;

  // `shots` eigenvalues (+1/-1) of a Z/I observable measured after c.
  virtual std::vector<int> measure_pauli(const Circuit& c, const PauliString& obs, std::size_t shots,
                                         Rng& rng) const = 0;

  // Computational-basis samples, bit q of each value is qubit q.
  virtual std::vector<std::uint64_t> sample(const Circuit&, std::size_t, Rng&) const {
    throw UnsupportedGate(name() + " backend cannot return bitstrings");
  }
};

}  // namespace qusquare
