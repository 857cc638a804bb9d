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

/**
 * @file
 * Dense statevector simulator.
 *
 * Qubit ordering: qubit q is bit q of the basis-state index, so qubit 0 is the
 * least-significant bit. A register written |i) with bits i_{n-1} ... i_0
 * therefore has i_0 on qubit 0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "qmean/gate.hpp"
#include "qmean/rng.hpp"

namespace qmean {

using Qubit = std::size_t;

/// Largest register the dense simulator accepts.
inline constexpr std::size_t kMaxQubits = 24;

/// Assignment of bits to a subset of qubits. Matches a basis index i when
/// (i & mask) == value.
struct BitPattern {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;

    static BitPattern of(std::initializer_list<std::pair<Qubit, int>> bits);
    static BitPattern of(std::span<const Qubit> qubits, std::span<const int> bits);
    /// All listed qubits equal to `bit`.
    static BitPattern uniform(std::span<const Qubit> qubits, int bit);

    bool matches(std::uint64_t basis) const { return (basis & mask) == value; }
    BitPattern merged(const BitPattern &other) const;
    bool operator==(const BitPattern &) const = default;
};

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits);

    /// Takes ownership of amplitudes; size must be a power of two and the
    /// vector normalized within kUnitaryTolerance.
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);
    /// Computational basis state |index).
    static StateVector basis(std::size_t n_qubits, std::uint64_t index);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }
    Amplitude amplitude(std::uint64_t basis) const { return amplitudes_.at(basis); }
    double norm_squared() const;

    /**
     * Applies `gate` to `targets`, conditioned on every qubit in `controls`
     * being |1>. Targets and controls must be distinct and in range, and the
     * gate arity must equal targets.size().
     */
    StateVector &apply_gate(const GateMatrix &gate, std::span<const Qubit> targets,
                            std::span<const Qubit> controls = {});
    StateVector &apply_gate(const GateMatrix &gate, std::initializer_list<Qubit> targets,
                            std::initializer_list<Qubit> controls = {});

    /// U_theta on one qubit (see GateMatrix::rotation).
    StateVector &apply_rotation(double theta, Qubit target, std::span<const Qubit> controls = {});

    /**
     * Uniformly controlled rotation: for every basis value s of `select`
     * (select[0] least significant) applies U_{angles[s]} to `target`.
     * angles.size() must be 2^select.size().
     */
    StateVector &apply_multiplexed_rotation(Qubit target, std::span<const Qubit> select,
                                            std::span<const double> angles,
                                            std::span<const Qubit> controls = {});

    /// Negates every amplitude matching `pattern` (and the controls).
    StateVector &flip_sign_where(const BitPattern &pattern, std::span<const Qubit> controls = {});
    /// Negates every amplitude NOT matching `pattern`, among basis states whose
    /// controls are all |1>.
    StateVector &flip_sign_except(const BitPattern &pattern, std::span<const Qubit> controls = {});

    /// Total probability of basis states consistent with `pattern`.
    double probability(const BitPattern &pattern) const;
    /// Marginal distribution over the values of `qubits` (qubits[0] least significant).
    std::vector<double> marginal(std::span<const Qubit> qubits) const;

    /// Projective measurement in the computational basis; collapses and
    /// renormalizes. Consumes exactly one uniform draw from rng.
    std::vector<int> measure(std::span<const Qubit> qubits, Rng &rng);

    void renormalize();

  private:
    explicit StateVector(std::vector<Amplitude> amplitudes, std::size_t n_qubits);

    void check_qubit(Qubit q) const;
    std::uint64_t control_mask(std::span<const Qubit> controls, std::uint64_t exclude) const;

    std::size_t n_qubits_;
    std::vector<Amplitude> amplitudes_;
};

struct MeasurementOutcome {
    std::vector<Qubit> qubit_indices;
    std::vector<int> observed_bits;
    StateVector post_state;
};

/// Copying measurement: returns bits plus the collapsed post-measurement state.
MeasurementOutcome measure(const StateVector &state, std::span<const Qubit> qubits, Rng &rng);

/// Probability of the partial bit pattern; never samples.
double expectation_of_basis_state(const StateVector &state, const BitPattern &pattern);

/// Largest |a_i - b_i| after removing the best single global phase from b.
double distance_up_to_global_phase(std::span<const Amplitude> a, std::span<const Amplitude> b);

}  // namespace qmean
