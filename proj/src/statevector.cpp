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

#include "qmean/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmean {

namespace {

std::uint64_t bit(Qubit q) { return std::uint64_t{1} << q; }

}  // namespace

BitPattern BitPattern::of(std::initializer_list<std::pair<Qubit, int>> bits) {
    BitPattern p;
    for (const auto &[q, b] : bits) {
        if (p.mask & bit(q)) {
            throw std::invalid_argument("BitPattern: qubit " + std::to_string(q) + " listed twice");
        }
        p.mask |= bit(q);
        if (b) p.value |= bit(q);
    }
    return p;
}

BitPattern BitPattern::of(std::span<const Qubit> qubits, std::span<const int> bits) {
    if (qubits.size() != bits.size()) {
        throw std::invalid_argument("BitPattern: qubit and bit lists differ in length");
    }
    BitPattern p;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (p.mask & bit(qubits[i])) {
            throw std::invalid_argument("BitPattern: qubit listed twice");
        }
        p.mask |= bit(qubits[i]);
        if (bits[i]) p.value |= bit(qubits[i]);
    }
    return p;
}

BitPattern BitPattern::uniform(std::span<const Qubit> qubits, int b) {
    std::vector<int> bits(qubits.size(), b);
    return of(qubits, bits);
}

BitPattern BitPattern::merged(const BitPattern &other) const {
    if ((mask & other.mask & (value ^ other.value)) != 0) {
        throw std::invalid_argument("BitPattern: contradictory patterns");
    }
    return BitPattern{mask | other.mask, value | other.value};
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("StateVector: too many qubits for a dense simulation");
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, Amplitude{});
    amplitudes_[0] = 1.0;
}

StateVector::StateVector(std::vector<Amplitude> amplitudes, std::size_t n_qubits)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    if (amplitudes.empty() || !std::has_single_bit(amplitudes.size())) {
        throw std::invalid_argument("StateVector: amplitude count must be a power of two");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(amplitudes.size()));
    if (n > kMaxQubits) {
        throw std::invalid_argument("StateVector: too many qubits for a dense simulation");
    }
    StateVector s(std::move(amplitudes), n);
    if (std::abs(s.norm_squared() - 1.0) > kUnitaryTolerance) {
        throw std::invalid_argument("StateVector: amplitudes are not normalized");
    }
    return s;
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dimension()) {
        throw std::out_of_range("StateVector: basis index out of range");
    }
    s.amplitudes_[0] = 0.0;
    s.amplitudes_[index] = 1.0;
    return s;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const auto &a : amplitudes_) acc += std::norm(a);
    return acc;
}

void StateVector::check_qubit(Qubit q) const {
    if (q >= n_qubits_) {
        throw std::out_of_range("StateVector: qubit index " + std::to_string(q) +
                                " out of range for " + std::to_string(n_qubits_) + " qubits");
    }
}

std::uint64_t StateVector::control_mask(std::span<const Qubit> controls,
                                        std::uint64_t exclude) const {
    std::uint64_t mask = 0;
    for (Qubit c : controls) {
        check_qubit(c);
        if ((mask | exclude) & bit(c)) {
            throw std::invalid_argument("StateVector: overlapping target/control qubits");
        }
        mask |= bit(c);
    }
    return mask;
}

StateVector &StateVector::apply_gate(const GateMatrix &gate, std::span<const Qubit> targets,
                                     std::span<const Qubit> controls) {
    if (gate.arity() != targets.size()) {
        throw std::invalid_argument("StateVector: gate arity does not match target count");
    }
    std::uint64_t tmask = 0;
    for (Qubit t : targets) {
        check_qubit(t);
        if (tmask & bit(t)) {
            throw std::invalid_argument("StateVector: repeated target qubit");
        }
        tmask |= bit(t);
    }
    const std::uint64_t cmask = control_mask(controls, tmask);
    const std::size_t gdim = gate.dimension();
    const auto &m = gate.entries();

    if (gdim == 2) {
        const std::uint64_t off = tmask;
        const Amplitude m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & tmask) || (i & cmask) != cmask) continue;
            const Amplitude a0 = amplitudes_[i];
            const Amplitude a1 = amplitudes_[i | off];
            amplitudes_[i] = m00 * a0 + m01 * a1;
            amplitudes_[i | off] = m10 * a0 + m11 * a1;
        }
        return *this;
    }

    std::vector<std::uint64_t> offsets(gdim, 0);
    for (std::size_t s = 0; s < gdim; ++s) {
        for (std::size_t b = 0; b < targets.size(); ++b) {
            if (s & (std::size_t{1} << b)) offsets[s] |= bit(targets[b]);
        }
    }
    std::vector<Amplitude> in(gdim);
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i & tmask) || (i & cmask) != cmask) continue;
        for (std::size_t s = 0; s < gdim; ++s) in[s] = amplitudes_[i | offsets[s]];
        for (std::size_t r = 0; r < gdim; ++r) {
            Amplitude acc = 0.0;
            for (std::size_t c = 0; c < gdim; ++c) acc += m[r * gdim + c] * in[c];
            amplitudes_[i | offsets[r]] = acc;
        }
    }
    return *this;
}

StateVector &StateVector::apply_gate(const GateMatrix &gate, std::initializer_list<Qubit> targets,
                                     std::initializer_list<Qubit> controls) {
    return apply_gate(gate, std::span<const Qubit>(targets.begin(), targets.size()),
                      std::span<const Qubit>(controls.begin(), controls.size()));
}

StateVector &StateVector::apply_rotation(double theta, Qubit target,
                                         std::span<const Qubit> controls) {
    const Qubit t[] = {target};
    return apply_gate(GateMatrix::rotation(theta), t, controls);
}

StateVector &StateVector::apply_multiplexed_rotation(Qubit target, std::span<const Qubit> select,
                                                     std::span<const double> angles,
                                                     std::span<const Qubit> controls) {
    check_qubit(target);
    if (angles.size() != (std::size_t{1} << select.size())) {
        throw std::invalid_argument("StateVector: multiplexor needs 2^select angles");
    }
    std::uint64_t smask = 0;
    for (Qubit q : select) {
        check_qubit(q);
        if ((smask | bit(target)) & bit(q)) {
            throw std::invalid_argument("StateVector: overlapping select/target qubits");
        }
        smask |= bit(q);
    }
    const std::uint64_t cmask = control_mask(controls, smask | bit(target));

    std::vector<double> cs(angles.size()), sn(angles.size());
    for (std::size_t k = 0; k < angles.size(); ++k) {
        cs[k] = std::cos(angles[k]);
        sn[k] = std::sin(angles[k]);
    }
    const std::uint64_t tbit = bit(target);
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i & tbit) || (i & cmask) != cmask) continue;
        std::size_t sel = 0;
        for (std::size_t b = 0; b < select.size(); ++b) {
            if (i & bit(select[b])) sel |= std::size_t{1} << b;
        }
        const Amplitude a0 = amplitudes_[i];
        const Amplitude a1 = amplitudes_[i | tbit];
        amplitudes_[i] = cs[sel] * a0 - sn[sel] * a1;
        amplitudes_[i | tbit] = sn[sel] * a0 + cs[sel] * a1;
    }
    return *this;
}

StateVector &StateVector::flip_sign_where(const BitPattern &pattern,
                                          std::span<const Qubit> controls) {
    if (pattern.mask >> n_qubits_) {
        throw std::out_of_range("StateVector: pattern references qubits out of range");
    }
    const std::uint64_t cmask = control_mask(controls, pattern.mask);
    const BitPattern full = pattern.merged(BitPattern{cmask, cmask});
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        if (full.matches(i)) amplitudes_[i] = -amplitudes_[i];
    }
    return *this;
}

StateVector &StateVector::flip_sign_except(const BitPattern &pattern,
                                           std::span<const Qubit> controls) {
    if (pattern.mask >> n_qubits_) {
        throw std::out_of_range("StateVector: pattern references qubits out of range");
    }
    const std::uint64_t cmask = control_mask(controls, pattern.mask);
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i & cmask) == cmask && !pattern.matches(i)) amplitudes_[i] = -amplitudes_[i];
    }
    return *this;
}

double StateVector::probability(const BitPattern &pattern) const {
    if (pattern.mask >> n_qubits_) {
        throw std::out_of_range("StateVector: pattern references qubits out of range");
    }
    double acc = 0.0;
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        if (pattern.matches(i)) acc += std::norm(amplitudes_[i]);
    }
    return std::clamp(acc, 0.0, 1.0);
}

std::vector<double> StateVector::marginal(std::span<const Qubit> qubits) const {
    std::uint64_t seen = 0;
    for (Qubit q : qubits) {
        check_qubit(q);
        if (seen & bit(q)) throw std::invalid_argument("StateVector: repeated qubit in marginal");
        seen |= bit(q);
    }
    std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        std::size_t v = 0;
        for (std::size_t b = 0; b < qubits.size(); ++b) {
            if (i & bit(qubits[b])) v |= std::size_t{1} << b;
        }
        probs[v] += std::norm(amplitudes_[i]);
    }
    return probs;
}

std::vector<int> StateVector::measure(std::span<const Qubit> qubits, Rng &rng) {
    const std::vector<double> probs = marginal(qubits);
    double total = 0.0;
    for (double p : probs) total += p;

    // Only outcomes with non-zero mass can be selected.
    const double r = uniform01(rng) * total;
    std::size_t outcome = probs.size();
    double cum = 0.0;
    for (std::size_t v = 0; v < probs.size(); ++v) {
        if (probs[v] <= 0.0) continue;
        cum += probs[v];
        outcome = v;
        if (r < cum) break;
    }
    if (outcome == probs.size()) {
        throw std::logic_error("StateVector: measuring a zero state");
    }

    std::vector<int> bits(qubits.size());
    std::uint64_t mask = 0, value = 0;
    for (std::size_t b = 0; b < qubits.size(); ++b) {
        bits[b] = static_cast<int>((outcome >> b) & 1U);
        mask |= bit(qubits[b]);
        if (bits[b]) value |= bit(qubits[b]);
    }
    const double scale = 1.0 / std::sqrt(probs[outcome]);
    for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
        amplitudes_[i] = ((i & mask) == value) ? amplitudes_[i] * scale : Amplitude{};
    }
    renormalize();
    return bits;
}

void StateVector::renormalize() {
    const double n2 = norm_squared();
    if (n2 <= 0.0) {
        throw std::logic_error("StateVector: cannot renormalize a zero state");
    }
    const double scale = 1.0 / std::sqrt(n2);
    for (auto &a : amplitudes_) a *= scale;
}

MeasurementOutcome measure(const StateVector &state, std::span<const Qubit> qubits, Rng &rng) {
    StateVector post = state;
    std::vector<int> bits = post.measure(qubits, rng);
    return MeasurementOutcome{{qubits.begin(), qubits.end()}, std::move(bits), std::move(post)};
}

double expectation_of_basis_state(const StateVector &state, const BitPattern &pattern) {
    return state.probability(pattern);
}

double distance_up_to_global_phase(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance_up_to_global_phase: size mismatch");
    }
    Amplitude overlap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(b[i]) * a[i];
    const Amplitude phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Amplitude{1.0};
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - phase * b[i]));
    }
    return worst;
}

}  // namespace qmean
