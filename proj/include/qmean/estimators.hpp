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
 * Mean estimators: classical Monte Carlo on a quantum coin, quantum
 * supersampling (QSS) and the quantum coin method (QCoin).
 *
 * All three draw their measurements through a ShotBackend so the same code
 * path serves noiseless and noisy runs. Every oracle call is charged to a
 * QueryLedger and the reported query count is read back from it.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qmean/circuit.hpp"
#include "qmean/primitives.hpp"
#include "qmean/rng.hpp"

namespace qmean {

enum class Algorithm { monte_carlo, qss, qcoin };

std::string_view to_string(Algorithm a);
/// Accepts "monte-carlo" (or "mc"), "qss", "qcoin". Throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);

/// Source of measurement outcomes for a circuit started in |0..0>.
class ShotBackend {
  public:
    virtual ~ShotBackend() = default;

    /**
     * Runs a measurement-free `circuit` `shots` times, measuring `measured`
     * at the end of each shot, and returns how many shots read `expected`.
     * Charges the ledger for every shot.
     */
    virtual std::uint64_t count_hits(const Circuit &circuit, const std::vector<Qubit> &measured,
                                     const std::vector<int> &expected, std::uint64_t shots,
                                     Rng &rng, QueryLedger &ledger) const = 0;

    /// Runs a circuit that contains its own measurements once.
    virtual std::vector<int> run_once(const Circuit &circuit, Rng &rng,
                                      QueryLedger &ledger) const = 0;
};

/// Noiseless backend. The state is simulated once per call and the hit
/// count is drawn from the exact binomial distribution.
class ExactBackend final : public ShotBackend {
  public:
    std::uint64_t count_hits(const Circuit &circuit, const std::vector<Qubit> &measured,
                             const std::vector<int> &expected, std::uint64_t shots, Rng &rng,
                             QueryLedger &ledger) const override;
    std::vector<int> run_once(const Circuit &circuit, Rng &rng, QueryLedger &ledger) const override;
};

const ShotBackend &exact_backend();

/// Draws Binomial(shots, p) with p snapped to 0 or 1 within 1e-12.
std::uint64_t draw_binomial(std::uint64_t shots, double p, Rng &rng);

struct StepTrace {
    std::size_t step = 0;
    double lower = 0.0;  ///< E- after the step
    double upper = 1.0;  ///< E+ after the step
    double fraction = 0.0;  ///< observed head fraction (QSS: t / P)
    double value = 0.0;     ///< f_i
    std::uint64_t trials = 0;
    std::uint64_t aa_repetitions = 0;
};

struct Estimate {
    Algorithm algorithm = Algorithm::monte_carlo;
    double value = 0.0;
    std::uint64_t queries_used = 0;
    std::uint64_t seed = 0;
    std::vector<StepTrace> trace;
};

enum class AmplitudeReading {
    sqrt_fraction,  ///< amp = sqrt(head fraction)
    raw_fraction,   ///< amp = head fraction, as written in the pseudocode
};

enum class AngleDivisor {
    exact,         ///< divide the recovered angle by 2m + 1
    power_of_two,  ///< divide by 2^i, as written in the pseudocode
};

struct QCoinOptions {
    AmplitudeReading reading = AmplitudeReading::sqrt_fraction;
    AngleDivisor divisor = AngleDivisor::exact;
    /// Step i runs at level i + level_offset: delta = sin(pi / 2^(level+1)),
    /// m = 2^(level-1). Non-zero offsets give the single-step scaling runs.
    std::size_t level_offset = 0;
    /// Trials for step i; when empty every step uses the L argument.
    std::function<std::uint64_t(std::size_t step)> schedule;
};

/// Monte Carlo: `trials` target measurements of the Q_F state, one query each.
Estimate estimate_monte_carlo(const OracleSpec &oracle, std::uint64_t trials, std::uint64_t seed,
                              const ShotBackend &backend = exact_backend());

/// QSS with AA resolution P (power of two >= 2): f' = sin^2(t pi / P), 2P - 1 queries.
Estimate estimate_qss(const OracleSpec &oracle, std::size_t P, std::uint64_t seed,
                      const ShotBackend &backend = exact_backend());

/// QCoin with k shifting-scaling steps of L trials each.
Estimate estimate_qcoin(const OracleSpec &oracle, std::size_t k, std::uint64_t L,
                        std::uint64_t seed, const ShotBackend &backend = exact_backend(),
                        const QCoinOptions &options = {});

/// QCoin with the largest constant L that fits `budget` (at least 1).
Estimate estimate_qcoin_budget(const OracleSpec &oracle, std::size_t k, std::uint64_t budget,
                               std::uint64_t seed, const ShotBackend &backend = exact_backend(),
                               const QCoinOptions &options = {});

/// AA repetitions used at step i >= 1 (level = i + offset): 2^(level-1).
std::uint64_t qcoin_aa_repetitions(std::size_t level);
/// Hypothetical error at a level: sin(pi / 2^(level+1)).
double qcoin_delta(std::size_t level);

std::uint64_t mc_queries(std::uint64_t trials);
std::uint64_t qss_queries(std::size_t P);
/// L (k - 1 + 2^(k+1)): L for step 0 plus L (1 + 2^i) for step i.
std::uint64_t qcoin_queries(std::size_t k, std::uint64_t L);
/// Same with a level offset and per-step trials.
std::uint64_t qcoin_queries(std::size_t k, const std::vector<std::uint64_t> &trials,
                            std::size_t level_offset = 0);
/// max(1, floor(budget / qcoin_queries(k, 1))).
std::uint64_t qcoin_trials_for_budget(std::size_t k, std::uint64_t budget);

/// Calibrated mean errors indexed by [budget][k]; NaN marks infeasible entries.
struct OptimalKTable {
    std::vector<std::uint64_t> budgets;  ///< ascending
    std::vector<std::size_t> ks;         ///< ascending
    std::vector<std::vector<double>> error;
};

/**
 * Minimum-error k for `budget`, looked up in the row of the largest
 * calibrated budget not above it. Ties go to the smaller k. Budgets below the
 * first row get the smallest calibrated k; budgets too small for a single
 * k = 1 schedule get 0.
 */
std::size_t select_optimal_k(std::uint64_t budget, const OptimalKTable &table);

/// Flat record for CSV emission.
struct EstimateRecord {
    std::string algorithm;
    double f_true = 0.0;
    double f_est = 0.0;
    std::uint64_t queries = 0;
    std::uint64_t seed = 0;
    std::string trace;  ///< "step:lower:upper:fraction:value" joined by ';'

    static std::string csv_header();
    std::string csv_row() const;
};

EstimateRecord to_record(const Estimate &estimate, double f_true);

}  // namespace qmean
