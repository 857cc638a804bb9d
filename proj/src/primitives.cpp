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

#include "qmean/primitives.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qmean {

OracleSpec::OracleSpec(std::vector<double> values, Encoding encoding, double offset)
    : values_(std::move(values)), encoding_(encoding), offset_(offset) {
    if (values_.empty() || !std::has_single_bit(values_.size())) {
        throw std::invalid_argument("OracleSpec: N must be a power of two");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("OracleSpec: every F(i) must lie in [0, 1]");
        }
    }
    if (!(offset_ >= 0.0 && offset_ < 1.0)) {
        throw std::invalid_argument("OracleSpec: offset E must lie in [0, 1)");
    }
    if (encoding_ == Encoding::sqrt_amplitude && offset_ != 0.0) {
        throw std::invalid_argument("OracleSpec: sqrt-amplitude encoding takes no offset");
    }
    n_input_ = static_cast<std::size_t>(std::countr_zero(values_.size()));
}

OracleSpec OracleSpec::sqrt_amplitude(std::vector<double> values) {
    return OracleSpec(std::move(values), Encoding::sqrt_amplitude, 0.0);
}

OracleSpec OracleSpec::linear_amplitude(std::vector<double> values, double offset) {
    return OracleSpec(std::move(values), Encoding::linear_amplitude, offset);
}

OracleSpec OracleSpec::direct_value(double f, Encoding encoding, double offset) {
    return OracleSpec({f}, encoding, offset);
}

OracleSpec OracleSpec::with_encoding(Encoding encoding, double offset) const {
    return OracleSpec(values_, encoding, offset);
}

double OracleSpec::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

double OracleSpec::amplitude(std::size_t i) const {
    const double v = values_.at(i);
    return encoding_ == Encoding::sqrt_amplitude ? std::sqrt(v) : v - offset_;
}

std::vector<double> OracleSpec::angles() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::asin(amplitude(i));
    return out;
}

std::vector<Qubit> QubitLayout::inputs() const {
    std::vector<Qubit> q(n_input);
    std::iota(q.begin(), q.end(), Qubit{0});
    return q;
}

std::vector<Qubit> QubitLayout::registers() const {
    std::vector<Qubit> q(n_register);
    std::iota(q.begin(), q.end(), n_input + 1);
    return q;
}

std::vector<Qubit> QubitLayout::work() const {
    std::vector<Qubit> q(n_input + 1);
    std::iota(q.begin(), q.end(), Qubit{0});
    return q;
}

BitPattern coin_head_pattern(std::size_t n_input) {
    // target (bit n) = 1, every input bit = 0
    const std::uint64_t mask = (std::uint64_t{1} << (n_input + 1)) - 1;
    return BitPattern{mask, std::uint64_t{1} << n_input};
}

namespace {

const char *oracle_name(const OracleSpec &o) {
    return o.encoding() == Encoding::sqrt_amplitude ? "QF" : "QFE";
}

std::string inverse_name(const OracleSpec &o) { return std::string(oracle_name(o)) + "_inv"; }

void hadamard_inputs(Circuit &c, const QubitLayout &layout, const std::vector<Qubit> &controls) {
    for (Qubit q : layout.inputs()) c.h(q, controls);
}

// Negates amplitudes matching `pattern` over the work qubits; a lone
// target-only flip is an ordinary Z.
void flip_where(Circuit &c, const char *name, const BitPattern &pattern, const QubitLayout &layout,
                const std::vector<Qubit> &controls) {
    if (pattern.mask == (std::uint64_t{1} << layout.target()) && pattern.value == pattern.mask) {
        c.z(layout.target(), controls);
    } else {
        c.flip_where(name, pattern, layout.work(), controls);
    }
}

// 2|0..0><0..0| - I over the work qubits, exact sign.
void reflect_zero(Circuit &c, const QubitLayout &layout, const std::vector<Qubit> &controls) {
    const auto work = layout.work();
    const BitPattern zero = BitPattern::uniform(work, 0);
    if (layout.n_input == 0) {
        c.z(layout.target(), controls);  // 2|0><0| - I = Z
    } else {
        c.flip_except("R0", zero, work, controls);
    }
}

}  // namespace

Circuit qss_preparation_circuit(const OracleSpec &oracle, std::size_t n_register) {
    if (oracle.encoding() != Encoding::sqrt_amplitude) {
        throw std::invalid_argument("qss_preparation_circuit: oracle must be sqrt-amplitude encoded");
    }
    const QubitLayout layout{oracle.n_input_qubits(), n_register};
    Circuit c(layout.total());
    c.annotate("prepare");
    for (Qubit q : layout.registers()) c.h(q);
    hadamard_inputs(c, layout, {});
    const auto table = c.add_oracle_table(oracle.angles());
    c.oracle(oracle_name(oracle), table, layout.target(), layout.inputs());
    return c;
}

Circuit coin_preparation_circuit(const OracleSpec &oracle) {
    if (oracle.encoding() != Encoding::linear_amplitude) {
        throw std::invalid_argument("coin_preparation_circuit: oracle must be linear-amplitude encoded");
    }
    const QubitLayout layout{oracle.n_input_qubits(), 0};
    Circuit c(layout.total());
    c.annotate("coin");
    hadamard_inputs(c, layout, {});
    const auto table = c.add_oracle_table(oracle.angles());
    c.oracle(oracle_name(oracle), table, layout.target(), layout.inputs());
    hadamard_inputs(c, layout, {});
    return c;
}

void append_aa(Circuit &c, const AAOperator &op, const QubitLayout &layout,
               std::size_t repetitions, const std::vector<Qubit> &controls) {
    if (repetitions == 0) return;
    const OracleSpec &oracle = op.oracle;
    if (oracle.n_input_qubits() != layout.n_input) {
        throw std::invalid_argument("append_aa: oracle size does not match layout");
    }
    if (op.variant == AAVariant::qss && oracle.encoding() != Encoding::sqrt_amplitude) {
        throw std::invalid_argument("append_aa: QSS amplification needs a sqrt-amplitude oracle");
    }
    if (op.variant == AAVariant::qcoin && oracle.encoding() != Encoding::linear_amplitude) {
        throw std::invalid_argument("append_aa: coin amplification needs a linear-amplitude oracle");
    }
    const auto table = c.add_oracle_table(oracle.angles());
    const Qubit target = layout.target();
    const auto inputs = layout.inputs();
    const BitPattern target_one = BitPattern::of({{target, 1}});
    const BitPattern head = coin_head_pattern(layout.n_input);

    // Operators are listed in execution order, i.e. right to left in G.
    for (std::size_t r = 0; r < repetitions; ++r) {
        if (op.variant == AAVariant::qss) {
            flip_where(c, "Rf", target_one, layout, controls);
            c.oracle(inverse_name(oracle), table, target, inputs, controls, true);
            hadamard_inputs(c, layout, controls);
            reflect_zero(c, layout, controls);
            hadamard_inputs(c, layout, controls);
            c.oracle(oracle_name(oracle), table, target, inputs, controls);
        } else {
            flip_where(c, "R1", head, layout, controls);
            hadamard_inputs(c, layout, controls);
            c.oracle(inverse_name(oracle), table, target, inputs, controls, true);
            hadamard_inputs(c, layout, controls);
            reflect_zero(c, layout, controls);
            hadamard_inputs(c, layout, controls);
            c.oracle(oracle_name(oracle), table, target, inputs, controls);
            hadamard_inputs(c, layout, controls);
        }
    }
}

void append_qft(Circuit &c, const std::vector<Qubit> &qubits) {
    const std::size_t n = qubits.size();
    // Most significant qubit first; it ends up holding the least significant
    // output bit, which the final swaps undo.
    for (std::size_t b = n; b-- > 0;) {
        c.h(qubits[b]);
        for (std::size_t ctl = b; ctl-- > 0;) {
            const double angle = -std::numbers::pi / static_cast<double>(std::uint64_t{1} << (b - ctl));
            c.phase(qubits[b], angle, {qubits[ctl]});
        }
    }
    for (std::size_t i = 0; i < n / 2; ++i) c.swap(qubits[i], qubits[n - 1 - i]);
}

Circuit coin_circuit(const OracleSpec &linear_oracle, std::size_t aa_repetitions) {
    Circuit c = coin_preparation_circuit(linear_oracle);
    if (aa_repetitions > 0) {
        c.annotate("amplify x" + std::to_string(aa_repetitions));
        append_aa(c, AAOperator{linear_oracle, AAVariant::qcoin},
                  QubitLayout{linear_oracle.n_input_qubits(), 0}, aa_repetitions);
    }
    return c;
}

namespace {

std::size_t register_size(std::size_t P) {
    if (P < 2 || !std::has_single_bit(P)) {
        throw std::invalid_argument("QSS: P must be a power of two >= 2");
    }
    return static_cast<std::size_t>(std::countr_zero(P));
}

}  // namespace

Circuit qss_unitary_circuit(const OracleSpec &oracle, std::size_t P) {
    const std::size_t r = register_size(P);
    const QubitLayout layout{oracle.n_input_qubits(), r};
    Circuit c = qss_preparation_circuit(oracle, r);
    const AAOperator op{oracle, AAVariant::qss};
    for (std::size_t j = 0; j < r; ++j) {
        const std::size_t reps = std::size_t{1} << j;
        c.annotate("controlled G^" + std::to_string(reps) + " on register qubit " +
                   std::to_string(layout.reg(j)));
        append_aa(c, op, layout, reps, {layout.reg(j)});
    }
    return c;
}

Circuit qss_circuit(const OracleSpec &oracle, std::size_t P) {
    Circuit c = qss_unitary_circuit(oracle, P);
    const QubitLayout layout{oracle.n_input_qubits(), register_size(P)};
    c.measure({layout.target()});
    c.annotate("qft");
    append_qft(c, layout.registers());
    c.measure(layout.registers());
    return c;
}

Circuit reflection_about_zero(std::size_t n_qubits) {
    if (n_qubits == 0) {
        throw std::invalid_argument("reflection_about_zero: need at least one qubit");
    }
    Circuit c(n_qubits);
    for (Qubit q = 0; q < n_qubits; ++q) c.x(q);
    std::vector<Qubit> controls;
    for (Qubit q = 0; q + 1 < n_qubits; ++q) controls.push_back(q);
    c.z(n_qubits - 1, controls);
    for (Qubit q = 0; q < n_qubits; ++q) c.x(q);
    return c;
}

StateVector prepare_qss_state(const OracleSpec &oracle, QueryLedger *ledger) {
    const Circuit c = qss_preparation_circuit(oracle);
    StateVector s(c.n_qubits());
    Rng unused(0);
    execute(c, s, unused, ledger);
    return s;
}

StateVector prepare_coin(const OracleSpec &oracle, QueryLedger *ledger) {
    const Circuit c = coin_preparation_circuit(oracle);
    StateVector s(c.n_qubits());
    Rng unused(0);
    execute(c, s, unused, ledger);
    return s;
}

void apply_aa(StateVector &state, const AAOperator &op, std::size_t repetitions,
              QueryLedger &ledger) {
    const QubitLayout layout{op.oracle.n_input_qubits(), 0};
    if (state.n_qubits() < layout.total()) {
        throw std::invalid_argument("apply_aa: state is smaller than the oracle register");
    }
    Circuit c(state.n_qubits());
    append_aa(c, op, layout, repetitions);
    Rng unused(0);
    execute(c, state, unused, &ledger);
}

void qft(StateVector &state, const std::vector<Qubit> &qubits) {
    Circuit c(state.n_qubits());
    append_qft(c, qubits);
    Rng unused(0);
    execute(c, state, unused);
}

}  // namespace qmean
