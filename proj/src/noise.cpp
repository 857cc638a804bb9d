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

#include "qmean/noise.hpp"

#include <cstdio>
#include <random>
#include <stdexcept>

namespace qmean {

namespace {

void check_probability(double p, const char *name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string("noise model: ") + name + " must lie in [0, 1]");
    }
}

}  // namespace

void NoiseModel::validate() const {
    check_probability(readout_flip_prob, "readout_flip_prob");
    if (readout_flip_prob_1to0) check_probability(*readout_flip_prob_1to0, "readout_flip_prob_1to0");
    check_probability(gate_error_1q, "gate_error_1q");
    check_probability(gate_error_mq, "gate_error_mq");
}

bool NoiseModel::is_noiseless() const {
    return !has_gate_errors() && flip_0to1() == 0.0 && flip_1to0() == 0.0;
}

NoiseModel NoiseModel::hardware_like() {
    NoiseModel m;
    m.readout_flip_prob = 0.05;
    m.readout_flip_prob_1to0 = 0.10;
    m.gate_error_1q = 0.0125;
    m.gate_error_mq = 0.05;
    return m;
}

NoiseModel NoiseModel::preset(std::string_view name) {
    if (name == "none") return none();
    if (name == "hardware") return hardware_like();
    throw std::invalid_argument("unknown noise preset '" + std::string(name) + "'");
}

std::string NoiseModel::describe() const {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "readout_flip_prob=%g readout_flip_prob_1to0=%g gate_error_1q=%g gate_error_mq=%g",
                  flip_0to1(), flip_1to0(), gate_error_1q, gate_error_mq);
    return buf;
}

NoiseHooks::NoiseHooks(NoiseModel model) : model_(model) { model_.validate(); }

void NoiseHooks::after_operation(const Operation &op, StateVector &state, Rng &rng) const {
    if (op.kind == OpKind::annotation || op.kind == OpKind::measure) return;
    const std::vector<Qubit> touched = op.touched();
    const double p = touched.size() > 1 ? model_.gate_error_mq : model_.gate_error_1q;
    if (p <= 0.0 || uniform01(rng) >= p) return;
    std::uniform_int_distribution<int> pauli(0, 2);
    for (Qubit q : touched) {
        switch (pauli(rng)) {
        case 0:
            state.apply_gate(GateMatrix::pauli_x(), {q});
            break;
        case 1:
            state.apply_gate(GateMatrix::pauli_y(), {q});
            break;
        default:
            state.apply_gate(GateMatrix::pauli_z(), {q});
            break;
        }
    }
}

void NoiseHooks::after_measurement(std::vector<int> &bits, Rng &rng) const {
    apply_readout_error(bits, model_, rng);
}

void apply_readout_error(std::vector<int> &bits, const NoiseModel &model, Rng &rng) {
    for (int &b : bits) {
        const double p = b ? model.flip_1to0() : model.flip_0to1();
        if (p > 0.0 && uniform01(rng) < p) b ^= 1;
    }
}

MeasurementOutcome noisy_execute(const Circuit &circuit, const NoiseModel &model,
                                 std::uint64_t seed, QueryLedger *ledger) {
    const NoiseHooks hooks(model);
    Rng rng(seed);
    StateVector state(circuit.n_qubits());
    MeasurementOutcome out{{}, {}, StateVector(circuit.n_qubits())};
    out.observed_bits = execute(circuit, state, rng, ledger, &hooks);
    for (const Operation &op : circuit.operations()) {
        if (op.kind == OpKind::measure) {
            out.qubit_indices.insert(out.qubit_indices.end(), op.targets.begin(), op.targets.end());
        }
    }
    if (!circuit.has_measurements()) {
        for (Qubit q = 0; q < circuit.n_qubits(); ++q) out.qubit_indices.push_back(q);
        out.observed_bits = state.measure(out.qubit_indices, rng);
        hooks.after_measurement(out.observed_bits, rng);
    }
    out.post_state = std::move(state);
    return out;
}

NoisyBackend::NoisyBackend(NoiseModel model) : model_(model), hooks_(model) {}

std::uint64_t NoisyBackend::count_hits(const Circuit &circuit, const std::vector<Qubit> &measured,
                                       const std::vector<int> &expected, std::uint64_t shots,
                                       Rng &rng, QueryLedger &ledger) const {
    if (model_.is_noiseless()) {
        return exact_backend().count_hits(circuit, measured, expected, shots, rng, ledger);
    }
    if (circuit.has_measurements()) {
        throw std::invalid_argument("count_hits: circuit must be measurement-free");
    }
    const StateVector initial(circuit.n_qubits());
    StateVector state = initial;
    std::vector<int> bits;
    std::uint64_t hits = 0;

    if (!model_.has_gate_errors()) {
        // Every shot sees the same pre-measurement state; only the
        // measurement and readout are random.
        QueryLedger per_shot;
        execute(circuit, state, rng, &per_shot);
        ledger.add(per_shot.count() * shots);
        const std::vector<double> dist = state.marginal(measured);
        double total = 0.0;
        for (double p : dist) total += p;
        for (std::uint64_t s = 0; s < shots; ++s) {
            const double r = uniform01(rng) * total;
            std::size_t outcome = 0;
            double acc = 0.0;
            for (std::size_t v = 0; v < dist.size(); ++v) {
                if (dist[v] <= 0.0) continue;
                acc += dist[v];
                outcome = v;
                if (r < acc) break;
            }
            bits.assign(measured.size(), 0);
            for (std::size_t j = 0; j < measured.size(); ++j) bits[j] = static_cast<int>((outcome >> j) & 1);
            apply_readout_error(bits, model_, rng);
            hits += bits == expected;
        }
        return hits;
    }

    for (std::uint64_t s = 0; s < shots; ++s) {
        state = initial;
        execute(circuit, state, rng, &ledger, &hooks_);
        bits = state.measure(measured, rng);
        apply_readout_error(bits, model_, rng);
        hits += bits == expected;
    }
    return hits;
}

std::vector<int> NoisyBackend::run_once(const Circuit &circuit, Rng &rng,
                                        QueryLedger &ledger) const {
    StateVector state(circuit.n_qubits());
    return execute(circuit, state, rng, &ledger, model_.is_noiseless() ? nullptr : &hooks_);
}

Circuit simplified_coin_circuit(double f, double offset, std::size_t aa_repetitions) {
    return coin_circuit(OracleSpec::direct_value(f, Encoding::linear_amplitude, offset),
                        aa_repetitions);
}

Circuit simplified_qss_circuit(double f, std::size_t P) {
    return qss_circuit(OracleSpec::direct_value(f, Encoding::sqrt_amplitude), P);
}

}  // namespace qmean
