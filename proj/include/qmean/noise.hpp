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
 * Stochastic Pauli noise and readout errors layered on circuit execution.
 *
 * After every operation, with probability gate_error_1q (one touched qubit)
 * or gate_error_mq (several), an independent uniformly random X, Y or Z hits
 * each touched qubit. Each measured bit is then reported flipped with the
 * readout probability for its value. Zero probabilities draw no random
 * numbers, so a zero model reproduces noiseless runs exactly.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmean/circuit.hpp"
#include "qmean/estimators.hpp"
#include "qmean/primitives.hpp"
#include "qmean/statevector.hpp"

namespace qmean {

struct NoiseModel {
    /// P(read 1 | 0), and P(read 0 | 1) unless the asymmetric value is set.
    double readout_flip_prob = 0.0;
    std::optional<double> readout_flip_prob_1to0;
    double gate_error_1q = 0.0;
    double gate_error_mq = 0.0;

    double flip_0to1() const { return readout_flip_prob; }
    double flip_1to0() const { return readout_flip_prob_1to0.value_or(readout_flip_prob); }

    /// Throws std::invalid_argument unless every probability lies in [0, 1].
    void validate() const;
    bool has_gate_errors() const { return gate_error_1q > 0.0 || gate_error_mq > 0.0; }
    bool is_noiseless() const;

    static NoiseModel none() { return {}; }
    /// readout 0.05 (0->1) / 0.10 (1->0), 1q 0.0125, mq 0.05.
    static NoiseModel hardware_like();
    /// "none" or "hardware"; throws std::invalid_argument otherwise.
    static NoiseModel preset(std::string_view name);

    std::string describe() const;
};

class NoiseHooks final : public ExecutionHooks {
  public:
    explicit NoiseHooks(NoiseModel model);
    void after_operation(const Operation &op, StateVector &state, Rng &rng) const override;
    void after_measurement(std::vector<int> &bits, Rng &rng) const override;

  private:
    NoiseModel model_;
};

/// Applies readout flips to already measured bits.
void apply_readout_error(std::vector<int> &bits, const NoiseModel &model, Rng &rng);

/**
 * Runs `circuit` from |0..0> under `model`. A circuit without measurements
 * is measured on every qubit at the end. The post state is the collapsed
 * state before readout flips.
 */
MeasurementOutcome noisy_execute(const Circuit &circuit, const NoiseModel &model,
                                 std::uint64_t seed, QueryLedger *ledger = nullptr);

/// Shot backend that simulates each shot as one noisy trajectory. With a
/// noiseless model it is identical to the exact backend.
class NoisyBackend final : public ShotBackend {
  public:
    explicit NoisyBackend(NoiseModel model);

    const NoiseModel &model() const { return model_; }

    std::uint64_t count_hits(const Circuit &circuit, const std::vector<Qubit> &measured,
                             const std::vector<int> &expected, std::uint64_t shots, Rng &rng,
                             QueryLedger &ledger) const override;
    std::vector<int> run_once(const Circuit &circuit, Rng &rng, QueryLedger &ledger) const override;

  private:
    NoiseModel model_;
    NoiseHooks hooks_;
};

/// One-qubit coin Q|0> = sqrt(1-(f-E)^2)|0> + (f-E)|1> followed by m
/// repetitions of G = Q Z Q^-1 Z.
Circuit simplified_coin_circuit(double f, double offset, std::size_t aa_repetitions);

/// QSS on the one-qubit oracle Q|0> = sqrt(1-f)|0> + sqrt(f)|1> with log2 P
/// register qubits.
Circuit simplified_qss_circuit(double f, std::size_t P);

}  // namespace qmean
