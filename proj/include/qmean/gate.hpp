// Copyright 2026 The qmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace qmean {

using Amplitude = std::complex<double>;

/// Tolerance for unitarity and normalization checks.
inline constexpr double kUnitaryTolerance = 1e-10;

/**
 * A dense unitary acting on `arity` qubits.
 *
 * Entries are row-major over a 2^arity basis. When the gate is applied to a
 * target list, targets[0] is the least-significant bit of that basis index.
 * Construction rejects non-unitary matrices.
 */
class GateMatrix {
  public:
    GateMatrix(std::size_t arity, std::vector<Amplitude> entries);

    static GateMatrix identity(std::size_t arity = 1);
    static GateMatrix hadamard();
    static GateMatrix pauli_x();
    static GateMatrix pauli_y();
    static GateMatrix pauli_z();
    /// U_theta|0> = cos(theta)|0> + sin(theta)|1>, U_theta|1> = -sin(theta)|0> + cos(theta)|1>.
    static GateMatrix rotation(double theta);
    /// diag(1, e^{i phi}).
    static GateMatrix phase(double phi);
    static GateMatrix swap();

    std::size_t arity() const { return arity_; }
    std::size_t dimension() const { return std::size_t{1} << arity_; }
    const std::vector<Amplitude> &entries() const { return entries_; }
    Amplitude operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dimension() + col];
    }

    GateMatrix adjoint() const;
    GateMatrix operator*(const GateMatrix &rhs) const;

    /// Max element-wise deviation of M M^dagger from I.
    double unitarity_error() const;

  private:
    struct Unchecked {};
    GateMatrix(std::size_t arity, std::vector<Amplitude> entries, Unchecked);

    std::size_t arity_;
    std::vector<Amplitude> entries_;
};

}  // namespace qmean
