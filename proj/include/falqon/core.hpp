// Copyright 2026 The falqon-factor Authors
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

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace falqon {

inline constexpr const char* kVersion = "1.0.0";

using Complex = std::complex<double>;
using Index = std::uint64_t;  // computational-basis index
using Mask = std::uint64_t;   // qubit subset, same bit layout as Index

inline constexpr double kPi = 3.14159265358979323846;

/// Absolute tolerance for ground-set membership.
inline constexpr double kDegeneracyTol = 1e-9;

/// Largest register accepted by brute-force enumeration.
inline constexpr int kEnumerationGuard = 24;
/// Largest register for which a 2^n diagonal is materialized.
inline constexpr int kDiagonalGuard = 28;
/// Largest register for dense-matrix verification oracles.
inline constexpr int kDenseGuard = 12;

// Error hierarchy. Every error carries a short message suitable for a CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied input violates a precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Requested register exceeds an enumeration or materialization guard.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

class CatalogMiss : public Error {
 public:
  using Error::Error;
};

class UnsupportedVariant : public Error {
 public:
  using Error::Error;
};

/// No nonnegative solution for a pulse schedule.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or data file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Qubits are numbered 0..n-1 internally; qubit 0 is printed as "qubit 1" and
// is the most significant bit of a basis label, so |011> has qubit 0 in |0>.
// Qubit q therefore lives at bit (n - 1 - q) of an Index or Mask.
constexpr int qubit_bit(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

constexpr Mask qubit_mask(int n_qubits, int qubit) {
  return Mask{1} << qubit_bit(n_qubits, qubit);
}

constexpr bool qubit_value(Index index, int n_qubits, int qubit) {
  return ((index >> qubit_bit(n_qubits, qubit)) & 1u) != 0;
}

constexpr int parity(Mask m) { return std::popcount(m) & 1; }

/// Basis label with qubit 0 first, e.g. "011".
inline std::string bitstring(Index index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if (qubit_value(index, n_qubits, q)) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

inline Index parse_bitstring(const std::string& s) {
  Index out = 0;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw InvalidInput("bad basis label: " + s);
    out = (out << 1) | static_cast<Index>(ch == '1');
  }
  return out;
}

constexpr Index dimension(int n_qubits) { return Index{1} << n_qubits; }

}  // namespace falqon
