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

#include "qmean/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qmean {

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::monte_carlo:
        return "monte-carlo";
    case Algorithm::qss:
        return "qss";
    case Algorithm::qcoin:
        return "qcoin";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "monte-carlo" || name == "mc") return Algorithm::monte_carlo;
    if (name == "qss") return Algorithm::qss;
    if (name == "qcoin") return Algorithm::qcoin;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::uint64_t draw_binomial(std::uint64_t shots, double p, Rng &rng) {
    if (shots == 0 || p <= 1e-12) return 0;
    if (p >= 1.0 - 1e-12) return shots;
    std::binomial_distribution<std::uint64_t> dist(shots, p);
    return dist(rng);
}

std::uint64_t ExactBackend::count_hits(const Circuit &circuit, const std::vector<Qubit> &measured,
                                       const std::vector<int> &expected, std::uint64_t shots,
                                       Rng &rng, QueryLedger &ledger) const {
    if (circuit.has_measurements()) {
        throw std::invalid_argument("count_hits: circuit must be measurement-free");
    }
    StateVector state(circuit.n_qubits());
    QueryLedger per_shot;
    execute(circuit, state, rng, &per_shot);
    ledger.add(per_shot.count() * shots);
    return draw_binomial(shots, state.probability(BitPattern::of(measured, expected)), rng);
}

std::vector<int> ExactBackend::run_once(const Circuit &circuit, Rng &rng,
                                        QueryLedger &ledger) const {
    StateVector state(circuit.n_qubits());
    return execute(circuit, state, rng, &ledger);
}

const ShotBackend &exact_backend() {
    static const ExactBackend backend;
    return backend;
}

std::uint64_t qcoin_aa_repetitions(std::size_t level) {
    if (level == 0) return 0;
    return std::uint64_t{1} << (level - 1);
}

double qcoin_delta(std::size_t level) {
    return std::sin(std::numbers::pi / std::ldexp(1.0, static_cast<int>(level) + 1));
}

std::uint64_t mc_queries(std::uint64_t trials) { return trials; }

std::uint64_t qss_queries(std::size_t P) { return 2 * static_cast<std::uint64_t>(P) - 1; }

std::uint64_t qcoin_queries(std::size_t k, std::uint64_t L) {
    return L * (static_cast<std::uint64_t>(k) - 1 + (std::uint64_t{1} << (k + 1)));
}

std::uint64_t qcoin_queries(std::size_t k, const std::vector<std::uint64_t> &trials,
                            std::size_t level_offset) {
    if (trials.size() != k + 1) {
        throw std::invalid_argument("qcoin_queries: need one trial count per step");
    }
    std::uint64_t total = trials[0];
    for (std::size_t i = 1; i <= k; ++i) {
        total += trials[i] * (1 + 2 * qcoin_aa_repetitions(i + level_offset));
    }
    return total;
}

std::uint64_t qcoin_trials_for_budget(std::size_t k, std::uint64_t budget) {
    return std::max<std::uint64_t>(1, budget / qcoin_queries(k, 1));
}

namespace {

OracleSpec as_sqrt(const OracleSpec &oracle) {
    if (oracle.encoding() == Encoding::sqrt_amplitude) return oracle;
    return oracle.with_encoding(Encoding::sqrt_amplitude);
}

// Step-0 coin: measure the target of Q_F(H x I)|0>|0), P(1) = f.
std::uint64_t direct_coin_hits(const OracleSpec &sqrt_oracle, std::uint64_t trials,
                               const ShotBackend &backend, Rng &rng, QueryLedger &ledger) {
    const Circuit c = qss_preparation_circuit(sqrt_oracle);
    const QubitLayout layout{sqrt_oracle.n_input_qubits(), 0};
    return backend.count_hits(c, {layout.target()}, {1}, trials, rng, ledger);
}

}  // namespace

Estimate estimate_monte_carlo(const OracleSpec &oracle, std::uint64_t trials, std::uint64_t seed,
                              const ShotBackend &backend) {
    if (trials == 0) throw std::invalid_argument("estimate_monte_carlo: trials must be >= 1");
    Rng rng(seed);
    QueryLedger ledger;
    const std::uint64_t hits = direct_coin_hits(as_sqrt(oracle), trials, backend, rng, ledger);
    const double f = static_cast<double>(hits) / static_cast<double>(trials);
    Estimate e;
    e.algorithm = Algorithm::monte_carlo;
    e.value = f;
    e.queries_used = ledger.count();
    e.seed = seed;
    e.trace.push_back({0, 0.0, 1.0, f, f, trials, 0});
    return e;
}

Estimate estimate_qss(const OracleSpec &oracle, std::size_t P, std::uint64_t seed,
                      const ShotBackend &backend) {
    const Circuit c = qss_circuit(as_sqrt(oracle), P);
    Rng rng(seed);
    QueryLedger ledger;
    const std::vector<int> bits = backend.run_once(c, rng, ledger);
    // bits = [target, reg_0, ..., reg_{r-1}]
    std::uint64_t t = 0;
    for (std::size_t j = 1; j < bits.size(); ++j) t |= static_cast<std::uint64_t>(bits[j]) << (j - 1);
    const double s = std::sin(static_cast<double>(t) * std::numbers::pi / static_cast<double>(P));
    Estimate e;
    e.algorithm = Algorithm::qss;
    e.value = std::clamp(s * s, 0.0, 1.0);
    e.queries_used = ledger.count();
    e.seed = seed;
    e.trace.push_back({0, e.value, e.value, static_cast<double>(t) / static_cast<double>(P),
                       e.value, 1, P - 1});
    return e;
}

Estimate estimate_qcoin(const OracleSpec &oracle, std::size_t k, std::uint64_t L,
                        std::uint64_t seed, const ShotBackend &backend,
                        const QCoinOptions &options) {
    auto trials_at = [&](std::size_t step) {
        const std::uint64_t n = options.schedule ? options.schedule(step) : L;
        if (n == 0) throw std::invalid_argument("estimate_qcoin: every step needs L >= 1");
        return n;
    };
    if (k + options.level_offset > 40) {
        throw std::invalid_argument("estimate_qcoin: scaling level too large");
    }

    Rng rng(seed);
    QueryLedger ledger;
    Estimate e;
    e.algorithm = Algorithm::qcoin;
    e.seed = seed;

    const std::uint64_t L0 = trials_at(0);
    const std::uint64_t hits0 = direct_coin_hits(as_sqrt(oracle), L0, backend, rng, ledger);
    double f = static_cast<double>(hits0) / static_cast<double>(L0);
    double lower = 0.0;
    double upper = 1.0;
    e.trace.push_back({0, lower, upper, f, f, L0, 0});

    const QubitLayout layout{oracle.n_input_qubits(), 0};
    const std::vector<Qubit> measured = layout.work();
    std::vector<int> head(measured.size(), 0);
    head[layout.target()] = 1;

    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t level = i + options.level_offset;
        const double delta = qcoin_delta(level);
        lower = std::max(f - delta / 2, lower);
        upper = std::min(f + delta / 2, upper);
        const std::uint64_t m = qcoin_aa_repetitions(level);

        const OracleSpec shifted = oracle.with_encoding(Encoding::linear_amplitude, lower);
        const Circuit c = coin_circuit(shifted, m);
        const std::uint64_t Li = trials_at(i);
        const std::uint64_t hits = backend.count_hits(c, measured, head, Li, rng, ledger);
        const double fraction = static_cast<double>(hits) / static_cast<double>(Li);

        double amp = options.reading == AmplitudeReading::sqrt_fraction ? std::sqrt(fraction)
                                                                         : fraction;
        amp = std::clamp(amp, 0.0, 1.0);
        const double divisor = options.divisor == AngleDivisor::exact
                                   ? static_cast<double>(2 * m + 1)
                                   : std::ldexp(1.0, static_cast<int>(level));
        f = std::clamp(lower + std::sin(std::asin(amp) / divisor), lower, upper);
        e.trace.push_back({i, lower, upper, fraction, f, Li, m});
    }

    e.value = std::clamp(f, 0.0, 1.0);
    e.queries_used = ledger.count();
    return e;
}

Estimate estimate_qcoin_budget(const OracleSpec &oracle, std::size_t k, std::uint64_t budget,
                               std::uint64_t seed, const ShotBackend &backend,
                               const QCoinOptions &options) {
    return estimate_qcoin(oracle, k, qcoin_trials_for_budget(k, budget), seed, backend, options);
}

std::size_t select_optimal_k(std::uint64_t budget, const OptimalKTable &table) {
    if (table.ks.empty()) throw std::invalid_argument("select_optimal_k: empty table");
    if (table.error.size() != table.budgets.size()) {
        throw std::invalid_argument("select_optimal_k: table shape mismatch");
    }
    if (budget < qcoin_queries(1, 1)) return 0;
    if (table.budgets.empty() || budget < table.budgets.front()) return table.ks.front();

    const auto row_it = std::upper_bound(table.budgets.begin(), table.budgets.end(), budget) - 1;
    const auto &row = table.error[static_cast<std::size_t>(row_it - table.budgets.begin())];
    if (row.size() != table.ks.size()) {
        throw std::invalid_argument("select_optimal_k: table shape mismatch");
    }
    std::size_t best = table.ks.front();
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < table.ks.size(); ++j) {
        const double err = row[j];
        if (std::isnan(err) || qcoin_queries(table.ks[j], 1) > budget) continue;
        if (err < best_err) {
            best_err = err;
            best = table.ks[j];
        }
    }
    return best;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string EstimateRecord::csv_header() { return "algorithm,f_true,f_est,queries,seed,trace"; }

std::string EstimateRecord::csv_row() const {
    return algorithm + ',' + fmt(f_true) + ',' + fmt(f_est) + ',' + std::to_string(queries) + ',' +
           std::to_string(seed) + ',' + trace;
}

EstimateRecord to_record(const Estimate &estimate, double f_true) {
    EstimateRecord r;
    r.algorithm = std::string(to_string(estimate.algorithm));
    r.f_true = f_true;
    r.f_est = estimate.value;
    r.queries = estimate.queries_used;
    r.seed = estimate.seed;
    for (std::size_t i = 0; i < estimate.trace.size(); ++i) {
        const StepTrace &s = estimate.trace[i];
        if (i) r.trace += ';';
        r.trace += std::to_string(s.step) + ':' + fmt(s.lower) + ':' + fmt(s.upper) + ':' +
                   fmt(s.fraction) + ':' + fmt(s.value);
    }
    return r;
}

}  // namespace qmean
