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
 * Building blocks of the mean estimators: oracles, quantum coins, amplitude
 * amplification and the quantum Fourier transform.
 *
 * Register layout used throughout (qubit 0 least significant):
 *
 *     [0, n)          input register |i), n = log2 N
 *     n               target qubit
 *     [n+1, n+1+r)    AA history register |m) (QSS only), r = log2 P
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qmean/circuit.hpp"
#include "qmean/statevector.hpp"

namespace qmean {

enum class Encoding {
    /// Q_F: |0>|i) -> (sqrt(1-F(i))|0> + sqrt(F(i))|1>)|i)
    sqrt_amplitude,
    /// Q_{F,E}: |0>|i) -> (sqrt(1-(F(i)-E)^2)|0> + (F(i)-E)|1>)|i)
    linear_amplitude,
};

/// Tabulated integrand F over N = 2^n bins, with its encoding into a target amplitude.
class OracleSpec {
  public:
    static OracleSpec sqrt_amplitude(std::vector<double> values);
    static OracleSpec linear_amplitude(std::vector<double> values, double offset = 0.0);
    /// N = 1 oracle that writes `f` directly (no input register).
    static OracleSpec direct_value(double f, Encoding encoding, double offset = 0.0);

    /// Same integrand, different encoding/offset.
    OracleSpec with_encoding(Encoding encoding, double offset = 0.0) const;

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    std::size_t n_input_qubits() const { return n_input_; }
    double offset() const { return offset_; }
    Encoding encoding() const { return encoding_; }
    /// f = (1/N) sum F(i).
    double mean() const;

    /// Amplitude written onto target |1> for input i.
    double amplitude(std::size_t i) const;
    /// Rotation angles asin(amplitude(i)), indexed by input value.
    std::vector<double> angles() const;

  private:
    OracleSpec(std::vector<double> values, Encoding encoding, double offset);

    std::vector<double> values_;
    std::size_t n_input_ = 0;
    Encoding encoding_;
    double offset_;
};

struct QubitLayout {
    std::size_t n_input = 0;
    std::size_t n_register = 0;

    Qubit input(std::size_t i) const { return i; }
    Qubit target() const { return n_input; }
    Qubit reg(std::size_t j) const { return n_input + 1 + j; }
    std::size_t total() const { return n_input + 1 + n_register; }
    std::vector<Qubit> inputs() const;
    std::vector<Qubit> registers() const;
    /// Target plus inputs.
    std::vector<Qubit> work() const;
};

enum class AAVariant {
    /// G_F = -Q_F (I x H) R_{|0>|0)} (I x H) Q_F^{-1} Z; amplifies target |1>.
    qss,
    /// G_{F,E} = (I x H) Q (I x H) R_{|0>|0)} (I x H) Q^{-1} (I x H) R_{|1>|0)};
    /// amplifies |1>|0).
    qcoin,
};

struct AAOperator {
    OracleSpec oracle;
    AAVariant variant;
};

/// Circuit for Q_F (H on inputs and register, then the oracle). Requires
/// sqrt-amplitude encoding with zero offset. One query.
Circuit qss_preparation_circuit(const OracleSpec &oracle, std::size_t n_register = 0);

/// Circuit for the quantum coin (H on inputs, Q_{F,E}, H on inputs). Requires
/// linear-amplitude encoding. One query.
Circuit coin_preparation_circuit(const OracleSpec &oracle);

/**
 * Appends `repetitions` applications of the AA operator, each conditioned on
 * `controls`. The sign of G is exact (not just up to global phase) so that
 * controlled powers of G leave the correct relative phase on the controls.
 * Two queries per repetition.
 */
void append_aa(Circuit &circuit, const AAOperator &op, const QubitLayout &layout,
               std::size_t repetitions, const std::vector<Qubit> &controls = {});

/// Forward QFT on `qubits` (qubits[0] least significant):
/// b_j = P^{-1/2} sum_k exp(-2 pi i j k / P) a_k.
void append_qft(Circuit &circuit, const std::vector<Qubit> &qubits);

/// Coin circuit for one QCoin scaling step: preparation then m AA repetitions.
Circuit coin_circuit(const OracleSpec &linear_oracle, std::size_t aa_repetitions);

/**
 * Full QSS circuit with register size log2 P: preparation, controlled
 * G^(2^j) from register qubit j, target measurement, QFT on the register and
 * register measurement. Measured bits come out as [target, reg_0 .. reg_{r-1}].
 */
Circuit qss_circuit(const OracleSpec &oracle, std::size_t P);

/// Same as qss_circuit without the two measurements.
Circuit qss_unitary_circuit(const OracleSpec &oracle, std::size_t P);

/// Gate sequence for 2|0..0><0..0| - I up to global phase: X on all, a
/// multi-controlled Z, X on all. Realizes I - 2|0..0><0..0|.
Circuit reflection_about_zero(std::size_t n_qubits);

/// State after Q_F(H x I) on |0>|0): P(target = 1) = mean(F).
StateVector prepare_qss_state(const OracleSpec &oracle, QueryLedger *ledger = nullptr);

/// Quantum coin: amplitude of |1>|0) equals (1/N) sum (F(i) - E).
StateVector prepare_coin(const OracleSpec &oracle, QueryLedger *ledger = nullptr);

/// Applies AA `repetitions` times on the target+input qubits of `state`.
void apply_aa(StateVector &state, const AAOperator &op, std::size_t repetitions,
              QueryLedger &ledger);

/// In-place forward QFT on the listed qubits.
void qft(StateVector &state, const std::vector<Qubit> &qubits);

/// Pattern of the coin's "head" outcome |1>|0).
BitPattern coin_head_pattern(std::size_t n_input);

}  // namespace qmean
