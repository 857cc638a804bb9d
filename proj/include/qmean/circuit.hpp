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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qmean/gate.hpp"
#include "qmean/rng.hpp"
#include "qmean/statevector.hpp"

namespace qmean {

/// Counts oracle invocations. One application of an oracle or its inverse is
/// one query.
class QueryLedger {
  public:
    void add(std::uint64_t queries) { count_ += queries; }
    std::uint64_t count() const { return count_; }

  private:
    std::uint64_t count_ = 0;
};

enum class OpKind {
    gate,            // dense GateMatrix on targets
    oracle,          // multiplexed rotation on targets[0] selected by `select`
    oracle_inverse,  // same with negated angles
    flip_where,      // negate amplitudes matching `pattern`
    flip_except,     // negate amplitudes not matching `pattern`
    measure,         // computational-basis measurement of targets
    annotation,      // no-op; carries a label for dumps
};

struct Operation {
    OpKind kind = OpKind::gate;
    std::string name;
    std::vector<Qubit> targets;
    std::vector<Qubit> controls;
    double angle = 0.0;
    std::optional<GateMatrix> matrix;  // kind == gate
    std::vector<Qubit> select;         // kind == oracle / oracle_inverse
    std::size_t oracle_table = 0;      // index into Circuit::oracle_angles()
    BitPattern pattern;                // kind == flip_where / flip_except

    /// Every qubit the operation acts on or is conditioned on.
    std::vector<Qubit> touched() const;
};

/**
 * Linear gate-level circuit over a fixed register.
 *
 * Oracles are stored as rotation-angle tables shared between the oracle and
 * its inverse. The circuit knows its query count, so whoever executes it
 * charges the ledger.
 */
class Circuit {
  public:
    explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {}

    std::size_t n_qubits() const { return n_qubits_; }
    const std::vector<Operation> &operations() const { return ops_; }
    const std::vector<double> &oracle_angles(std::size_t table) const { return tables_.at(table); }

    Circuit &gate(std::string name, const GateMatrix &m, std::vector<Qubit> targets,
                  std::vector<Qubit> controls = {}, double angle = 0.0);
    Circuit &h(Qubit q, std::vector<Qubit> controls = {});
    Circuit &x(Qubit q, std::vector<Qubit> controls = {});
    Circuit &z(Qubit q, std::vector<Qubit> controls = {});
    /// Phase gate diag(1, e^{i phi}).
    Circuit &phase(Qubit q, double phi, std::vector<Qubit> controls = {});
    Circuit &swap(Qubit a, Qubit b, std::vector<Qubit> controls = {});

    std::size_t add_oracle_table(std::vector<double> angles);
    Circuit &oracle(std::string name, std::size_t table, Qubit target, std::vector<Qubit> select,
                    std::vector<Qubit> controls = {}, bool inverse = false);

    Circuit &flip_where(std::string name, const BitPattern &pattern, std::vector<Qubit> qubits,
                        std::vector<Qubit> controls = {});
    Circuit &flip_except(std::string name, const BitPattern &pattern, std::vector<Qubit> qubits,
                         std::vector<Qubit> controls = {});

    Circuit &measure(std::vector<Qubit> qubits);
    Circuit &annotate(std::string label);

    /// Appends another circuit on the same register (its oracle tables are copied).
    Circuit &append(const Circuit &other);

    /// Oracle + inverse-oracle operations.
    std::uint64_t query_count() const;
    std::size_t gate_count() const;
    /// Unitary operations touching more than one qubit.
    std::size_t multi_qubit_gate_count() const;
    bool has_measurements() const;

  private:
    void check(const std::vector<Qubit> &qs) const;

    std::size_t n_qubits_;
    std::vector<Operation> ops_;
    std::vector<std::vector<double>> tables_;
};

/// Observer for circuit execution; the noise module injects errors through it.
class ExecutionHooks {
  public:
    virtual ~ExecutionHooks() = default;
    virtual void after_operation(const Operation &op, StateVector &state, Rng &rng) const = 0;
    virtual void after_measurement(std::vector<int> &bits, Rng &rng) const = 0;
};

/// Applies one non-measurement operation.
void apply_operation(const Circuit &circuit, const Operation &op, StateVector &state);

/**
 * Runs `circuit` on `state`, charging `ledger` (if any) for every oracle call.
 * Returns the measured bits in program order.
 */
std::vector<int> execute(const Circuit &circuit, StateVector &state, Rng &rng,
                         QueryLedger *ledger = nullptr, const ExecutionHooks *hooks = nullptr);

/// Dense matrix of a measurement-free circuit (column c is the image of |c)).
/// Intended for small registers in tests and checks.
std::vector<Amplitude> circuit_unitary(const Circuit &circuit);

/**
 * Plain-text gate listing: one operation per line,
 *   <name> <targets> <controls> <angle>
 * with comma-separated qubit lists, "-" for an empty list, and the angle in
 * radians. Annotations become lines starting with '#'.
 */
void dump_circuit(const Circuit &circuit, std::ostream &out);
std::string dump_circuit(const Circuit &circuit);

}  // namespace qmean
