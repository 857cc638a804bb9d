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

#include "qmean/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qmean {

std::vector<Qubit> Operation::touched() const {
    std::vector<Qubit> out = targets;
    out.insert(out.end(), select.begin(), select.end());
    out.insert(out.end(), controls.begin(), controls.end());
    return out;
}

void Circuit::check(const std::vector<Qubit> &qs) const {
    for (Qubit q : qs) {
        if (q >= n_qubits_) {
            throw std::out_of_range("Circuit: qubit " + std::to_string(q) + " out of range");
        }
    }
}

Circuit &Circuit::gate(std::string name, const GateMatrix &m, std::vector<Qubit> targets,
                       std::vector<Qubit> controls, double angle) {
    if (m.arity() != targets.size()) {
        throw std::invalid_argument("Circuit: gate arity does not match target count");
    }
    check(targets);
    check(controls);
    Operation op;
    op.kind = OpKind::gate;
    op.name = std::move(name);
    op.targets = std::move(targets);
    op.controls = std::move(controls);
    op.angle = angle;
    op.matrix = m;
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::h(Qubit q, std::vector<Qubit> controls) {
    return gate("H", GateMatrix::hadamard(), {q}, std::move(controls));
}

Circuit &Circuit::x(Qubit q, std::vector<Qubit> controls) {
    return gate("X", GateMatrix::pauli_x(), {q}, std::move(controls));
}

Circuit &Circuit::z(Qubit q, std::vector<Qubit> controls) {
    return gate("Z", GateMatrix::pauli_z(), {q}, std::move(controls));
}

Circuit &Circuit::phase(Qubit q, double phi, std::vector<Qubit> controls) {
    return gate("P", GateMatrix::phase(phi), {q}, std::move(controls), phi);
}

Circuit &Circuit::swap(Qubit a, Qubit b, std::vector<Qubit> controls) {
    return gate("SWAP", GateMatrix::swap(), {a, b}, std::move(controls));
}

std::size_t Circuit::add_oracle_table(std::vector<double> angles) {
    tables_.push_back(std::move(angles));
    return tables_.size() - 1;
}

Circuit &Circuit::oracle(std::string name, std::size_t table, Qubit target,
                         std::vector<Qubit> select, std::vector<Qubit> controls, bool inverse) {
    if (table >= tables_.size()) {
        throw std::out_of_range("Circuit: unknown oracle table");
    }
    if (tables_[table].size() != (std::size_t{1} << select.size())) {
        throw std::invalid_argument("Circuit: oracle table size does not match select register");
    }
    check({target});
    check(select);
    check(controls);
    Operation op;
    op.kind = inverse ? OpKind::oracle_inverse : OpKind::oracle;
    op.name = std::move(name);
    op.targets = {target};
    op.select = std::move(select);
    op.controls = std::move(controls);
    op.oracle_table = table;
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::flip_where(std::string name, const BitPattern &pattern, std::vector<Qubit> qubits,
                             std::vector<Qubit> controls) {
    check(qubits);
    check(controls);
    Operation op;
    op.kind = OpKind::flip_where;
    op.name = std::move(name);
    op.targets = std::move(qubits);
    op.controls = std::move(controls);
    op.pattern = pattern;
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::flip_except(std::string name, const BitPattern &pattern,
                              std::vector<Qubit> qubits, std::vector<Qubit> controls) {
    check(qubits);
    check(controls);
    Operation op;
    op.kind = OpKind::flip_except;
    op.name = std::move(name);
    op.targets = std::move(qubits);
    op.controls = std::move(controls);
    op.pattern = pattern;
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::measure(std::vector<Qubit> qubits) {
    check(qubits);
    Operation op;
    op.kind = OpKind::measure;
    op.name = "M";
    op.targets = std::move(qubits);
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::annotate(std::string label) {
    Operation op;
    op.kind = OpKind::annotation;
    op.name = std::move(label);
    ops_.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::append(const Circuit &other) {
    if (other.n_qubits_ != n_qubits_) {
        throw std::invalid_argument("Circuit: cannot append a circuit on a different register");
    }
    const std::size_t base = tables_.size();
    tables_.insert(tables_.end(), other.tables_.begin(), other.tables_.end());
    for (Operation op : other.ops_) {
        if (op.kind == OpKind::oracle || op.kind == OpKind::oracle_inverse) {
            op.oracle_table += base;
        }
        ops_.push_back(std::move(op));
    }
    return *this;
}

std::uint64_t Circuit::query_count() const {
    return static_cast<std::uint64_t>(std::count_if(ops_.begin(), ops_.end(), [](const auto &op) {
        return op.kind == OpKind::oracle || op.kind == OpKind::oracle_inverse;
    }));
}

std::size_t Circuit::gate_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const auto &op) {
        return op.kind != OpKind::measure && op.kind != OpKind::annotation;
    }));
}

std::size_t Circuit::multi_qubit_gate_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const auto &op) {
        return op.kind != OpKind::measure && op.kind != OpKind::annotation &&
               op.touched().size() > 1;
    }));
}

bool Circuit::has_measurements() const {
    return std::any_of(ops_.begin(), ops_.end(),
                       [](const auto &op) { return op.kind == OpKind::measure; });
}

void apply_operation(const Circuit &circuit, const Operation &op, StateVector &state) {
    switch (op.kind) {
    case OpKind::gate:
        state.apply_gate(*op.matrix, op.targets, op.controls);
        break;
    case OpKind::oracle:
        state.apply_multiplexed_rotation(op.targets[0], op.select,
                                         circuit.oracle_angles(op.oracle_table), op.controls);
        break;
    case OpKind::oracle_inverse: {
        std::vector<double> neg = circuit.oracle_angles(op.oracle_table);
        for (double &a : neg) a = -a;
        state.apply_multiplexed_rotation(op.targets[0], op.select, neg, op.controls);
        break;
    }
    case OpKind::flip_where:
        state.flip_sign_where(op.pattern, op.controls);
        break;
    case OpKind::flip_except:
        state.flip_sign_except(op.pattern, op.controls);
        break;
    case OpKind::measure:
        throw std::logic_error("apply_operation: measurement needs a random source");
    case OpKind::annotation:
        break;
    }
}

std::vector<int> execute(const Circuit &circuit, StateVector &state, Rng &rng, QueryLedger *ledger,
                         const ExecutionHooks *hooks) {
    if (state.n_qubits() != circuit.n_qubits()) {
        throw std::invalid_argument("execute: state and circuit registers differ");
    }
    std::vector<int> out;
    for (const Operation &op : circuit.operations()) {
        if (op.kind == OpKind::annotation) continue;
        if (op.kind == OpKind::measure) {
            std::vector<int> bits = state.measure(op.targets, rng);
            if (hooks) hooks->after_measurement(bits, rng);
            out.insert(out.end(), bits.begin(), bits.end());
            continue;
        }
        apply_operation(circuit, op, state);
        if (ledger && (op.kind == OpKind::oracle || op.kind == OpKind::oracle_inverse)) {
            ledger->add(1);
        }
        if (hooks) hooks->after_operation(op, state, rng);
    }
    return out;
}

std::vector<Amplitude> circuit_unitary(const Circuit &circuit) {
    if (circuit.has_measurements()) {
        throw std::invalid_argument("circuit_unitary: circuit contains measurements");
    }
    const std::size_t dim = std::size_t{1} << circuit.n_qubits();
    std::vector<Amplitude> u(dim * dim);
    for (std::size_t c = 0; c < dim; ++c) {
        StateVector s = StateVector::basis(circuit.n_qubits(), c);
        for (const Operation &op : circuit.operations()) apply_operation(circuit, op, s);
        const auto amps = s.amplitudes();
        for (std::size_t r = 0; r < dim; ++r) u[r * dim + c] = amps[r];
    }
    return u;
}

namespace {

std::string join(const std::vector<Qubit> &qs) {
    if (qs.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(qs[i]);
    }
    return s;
}

}  // namespace

void dump_circuit(const Circuit &circuit, std::ostream &out) {
    for (const Operation &op : circuit.operations()) {
        if (op.kind == OpKind::annotation) {
            out << "# " << op.name << '\n';
            continue;
        }
        // Oracle select qubits behave as controls of the multiplexed rotation.
        std::vector<Qubit> controls = op.select;
        controls.insert(controls.end(), op.controls.begin(), op.controls.end());
        char angle[32];
        std::snprintf(angle, sizeof angle, "%.12g", op.angle);
        out << op.name << ' ' << join(op.targets) << ' ' << join(controls) << ' ' << angle << '\n';
    }
}

std::string dump_circuit(const Circuit &circuit) {
    std::ostringstream os;
    dump_circuit(circuit, os);
    return os.str();
}

}  // namespace qmean
