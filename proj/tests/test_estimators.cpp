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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace qmean;

namespace {

OracleSpec direct(double f) { return OracleSpec::direct_value(f, Encoding::sqrt_amplitude); }

bool on_qss_grid(double v, std::size_t P) {
    for (std::size_t t = 0; t < P; ++t) {
        const double s = std::sin(static_cast<double>(t) * std::numbers::pi / static_cast<double>(P));
        if (std::abs(v - s * s) < 1e-12) return true;
    }
    return false;
}

}  // namespace

TEST(MonteCarlo, ConstantIntegrands) {
    for (std::uint64_t trials : {1u, 7u, 1000u}) {
        EXPECT_EQ(estimate_monte_carlo(OracleSpec::sqrt_amplitude({1, 1, 1, 1}), trials, 3).value, 1.0);
        EXPECT_EQ(estimate_monte_carlo(OracleSpec::sqrt_amplitude({0, 0, 0, 0}), trials, 3).value, 0.0);
    }
}

TEST(MonteCarlo, OneQueryPerTrial) {
    const auto e = estimate_monte_carlo(OracleSpec::sqrt_amplitude({0.1, 0.5}), 1234, 1);
    EXPECT_EQ(e.queries_used, 1234u);
    EXPECT_EQ(e.queries_used, mc_queries(1234));
    EXPECT_THROW(estimate_monte_carlo(direct(0.5), 0, 1), std::invalid_argument);
}

TEST(MonteCarlo, ErrorMatchesBinomialSpread) {
    // E|X/n - p| ~ sqrt(2/pi) sqrt(p(1-p)/n) for large n.
    const std::uint64_t trials = 3000;
    const int reps = 300;
    double err = 0.0;
    for (int r = 0; r < reps; ++r) {
        err += std::abs(estimate_monte_carlo(direct(0.5), trials, derive_seed(17, r)).value - 0.5);
    }
    err /= reps;
    const double expected = std::sqrt(2.0 / std::numbers::pi) * 0.5 / std::sqrt(double(trials));
    EXPECT_NEAR(err, expected, 0.2 * expected);
}

TEST(MonteCarlo, SameSeedSameEstimate) {
    const auto o = OracleSpec::sqrt_amplitude({0.2, 0.9, 0.4, 0.3});
    EXPECT_EQ(estimate_monte_carlo(o, 500, 9).value, estimate_monte_carlo(o, 500, 9).value);
}

TEST(Qss, QueryCount) {
    EXPECT_EQ(estimate_qss(direct(0.3), 128, 1).queries_used, 255u);
    for (std::size_t P : {2u, 4u, 8u, 32u}) {
        EXPECT_EQ(estimate_qss(OracleSpec::sqrt_amplitude({0.1, 0.7}), P, 1).queries_used,
                  qss_queries(P));
    }
}

TEST(Qss, ZeroMean) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_EQ(estimate_qss(OracleSpec::sqrt_amplitude({0, 0}), 16, seed).value, 0.0);
    }
}

TEST(Qss, GridValuesAreRecovered) {
    const std::size_t P = 16;
    const double s = std::sin(3 * std::numbers::pi / P);
    const double f = s * s;
    int exact = 0;
    for (int r = 0; r < 300; ++r) exact += std::abs(estimate_qss(direct(f), P, derive_seed(4, r)).value - f) < 1e-12;
    EXPECT_GE(exact, 240);
}

TEST(Qss, EstimatesLieOnGrid) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < 60; ++r) {
        const auto o = OracleSpec::sqrt_amplitude({u(gen), u(gen), u(gen), u(gen)});
        const std::size_t P = std::size_t{1} << (1 + r % 5);
        EXPECT_TRUE(on_qss_grid(estimate_qss(o, P, r).value, P));
    }
}

TEST(QCoin, ZeroIntegrand) {
    for (std::size_t k = 0; k <= 5; ++k) {
        for (std::uint64_t L : {1u, 10u, 100u}) {
            const auto e = estimate_qcoin(OracleSpec::sqrt_amplitude({0, 0, 0, 0}), k, L, 5);
            EXPECT_EQ(e.value, 0.0) << k << ' ' << L;
        }
    }
}

TEST(QCoin, FullIntegrandKeepsNonzeroError) {
    double err = 0.0;
    for (int r = 0; r < 100; ++r) err += 1.0 - estimate_qcoin(direct(1.0), 3, 2000, derive_seed(6, r)).value;
    EXPECT_GT(err / 100, 1e-6);
    EXPECT_EQ(estimate_monte_carlo(direct(1.0), 2000, 1).value, 1.0);
}

TEST(QCoin, KZeroIsMonteCarlo) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto o = OracleSpec::sqrt_amplitude({u(gen), u(gen)});
        const auto q = estimate_qcoin(o, 0, 37, seed);
        const auto m = estimate_monte_carlo(o, 37, seed);
        EXPECT_EQ(q.value, m.value);
        EXPECT_EQ(q.queries_used, m.queries_used);
    }
}

TEST(QCoin, QueryAccountingMatchesClosedForm) {
    const auto o = OracleSpec::sqrt_amplitude({0.3, 0.6, 0.2, 0.9});
    for (std::size_t k = 0; k <= 6; ++k) {
        for (std::uint64_t L = 1; L <= 4; ++L) {
            EXPECT_EQ(estimate_qcoin(o, k, L, 1).queries_used, qcoin_queries(k, L));
        }
    }
    EXPECT_EQ(qcoin_queries(0, 10), 10u);
    EXPECT_EQ(qcoin_queries(1, 10), 10u + 30u);
    EXPECT_EQ(qcoin_queries(3, 1), 1u + 3u + 5u + 9u);

    QCoinOptions opt;
    opt.level_offset = 2;
    opt.schedule = [](std::size_t step) { return std::uint64_t{5 + step}; };
    const auto e = estimate_qcoin(o, 2, 1, 3, exact_backend(), opt);
    EXPECT_EQ(e.queries_used, qcoin_queries(2, {5, 6, 7}, 2));
    EXPECT_EQ(e.queries_used, 5u + 6u * 9u + 7u * 17u);
}

TEST(QCoin, BudgetRounding) {
    EXPECT_EQ(qcoin_trials_for_budget(3, 240), 13u);
    EXPECT_EQ(qcoin_trials_for_budget(3, 10), 1u);
    const auto e = estimate_qcoin_budget(direct(0.4), 3, 240, 1);
    EXPECT_EQ(e.queries_used, 234u);
    EXPECT_LE(e.queries_used, 240u);
}

TEST(QCoin, TraceIsNestedAndConsistent) {
    const auto e = estimate_qcoin(direct(0.37), 5, 200, 11);
    ASSERT_EQ(e.trace.size(), 6u);
    for (std::size_t i = 1; i < e.trace.size(); ++i) {
        const auto &s = e.trace[i];
        EXPECT_LE(e.trace[i - 1].lower, s.lower);
        EXPECT_GE(e.trace[i - 1].upper, s.upper);
        EXPECT_LE(s.lower, s.value);
        EXPECT_LE(s.value, s.upper);
        EXPECT_LE(s.upper - s.lower, qcoin_delta(i) + 1e-15);
        EXPECT_EQ(s.aa_repetitions, qcoin_aa_repetitions(i));
    }
    EXPECT_EQ(e.value, e.trace.back().value);
}

TEST(QCoin, IntervalContainsTruthMostOfTheTime) {
    int inside = 0;
    const int runs = 1000;
    for (int r = 0; r < runs; ++r) {
        const auto e = estimate_qcoin(direct(0.5), 3, 50, derive_seed(31, r));
        inside += e.trace.back().lower <= 0.5 && 0.5 <= e.trace.back().upper;
    }
    EXPECT_GE(inside, 900);
}

TEST(QCoin, CompatibilityFlagsStayInRange) {
    for (auto reading : {AmplitudeReading::sqrt_fraction, AmplitudeReading::raw_fraction}) {
        for (auto divisor : {AngleDivisor::exact, AngleDivisor::power_of_two}) {
            QCoinOptions opt;
            opt.reading = reading;
            opt.divisor = divisor;
            for (int r = 0; r < 20; ++r) {
                const auto e = estimate_qcoin(direct(0.6), 4, 30, r, exact_backend(), opt);
                EXPECT_GE(e.value, 0.0);
                EXPECT_LE(e.value, 1.0);
            }
        }
    }
}

TEST(QCoin, ExactVariantIsMoreAccurateThanPseudocodeVariant) {
    QCoinOptions pseudo;
    pseudo.reading = AmplitudeReading::raw_fraction;
    pseudo.divisor = AngleDivisor::power_of_two;
    double exact_err = 0.0, pseudo_err = 0.0;
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < 400; ++r) {
        const double f = u(gen);
        exact_err += std::abs(estimate_qcoin(direct(f), 4, 200, r).value - f);
        pseudo_err += std::abs(estimate_qcoin(direct(f), 4, 200, r, exact_backend(), pseudo).value - f);
    }
    EXPECT_LT(exact_err, pseudo_err);
}

TEST(QCoin, InputRegisterMatchesDirectValue) {
    // The coin statistics only depend on the mean, so a wide oracle and the
    // direct-value oracle give the same error distribution.
    const auto wide = OracleSpec::sqrt_amplitude({0.1, 0.3, 0.5, 0.7, 0.2, 0.4, 0.6, 0.8});
    const auto narrow = direct(wide.mean());
    double a = 0.0, b = 0.0;
    const int runs = 400;
    for (int r = 0; r < runs; ++r) {
        a += std::abs(estimate_qcoin(wide, 3, 40, derive_seed(12, r)).value - wide.mean());
        b += std::abs(estimate_qcoin(narrow, 3, 40, derive_seed(13, r)).value - wide.mean());
    }
    EXPECT_NEAR(a / runs, b / runs, 0.25 * (b / runs));
}

TEST(OptimalK, SelectionRules) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    OptimalKTable t;
    t.budgets = {100, 1000, 10000};
    t.ks = {0, 1, 2, 3, 4};
    t.error = {
        {0.03, 0.02, 0.02, 0.04, nan},
        {0.01, 0.008, 0.007, 0.006, 0.006},
        {0.003, 0.002, 0.002, 0.001, 0.0009},
    };
    EXPECT_EQ(select_optimal_k(3, t), 0u);
    EXPECT_EQ(select_optimal_k(50, t), 0u);
    EXPECT_EQ(select_optimal_k(100, t), 1u);  // tie between k=1 and k=2
    EXPECT_EQ(select_optimal_k(999, t), 1u);
    EXPECT_EQ(select_optimal_k(1000, t), 3u);  // tie between k=3 and k=4
    EXPECT_EQ(select_optimal_k(50000, t), 4u);

    std::size_t prev = 0;
    for (std::uint64_t b = 1; b < 100000; b = b * 3 / 2 + 1) {
        const std::size_t k = select_optimal_k(b, t);
        EXPECT_GE(k, prev);
        prev = k;
    }
}

TEST(OptimalK, SkipsInfeasibleK) {
    OptimalKTable t;
    t.budgets = {10};
    t.ks = {0, 3};
    t.error = {{0.1, 0.001}};
    // k = 3 needs 18 queries even with L = 1.
    EXPECT_EQ(select_optimal_k(10, t), 0u);
}

TEST(Record, FlatSerialization) {
    const auto e = estimate_qcoin(direct(0.25), 1, 10, 77);
    const auto r = to_record(e, 0.25);
    EXPECT_EQ(r.algorithm, "qcoin");
    EXPECT_EQ(r.queries, 40u);
    EXPECT_EQ(r.seed, 77u);
    EXPECT_EQ(EstimateRecord::csv_header(), "algorithm,f_true,f_est,queries,seed,trace");
    const std::string row = r.csv_row();
    EXPECT_EQ(row.rfind("qcoin,0.25,", 0), 0u);
    EXPECT_EQ(std::count(r.trace.begin(), r.trace.end(), ';'), 1);
}

TEST(Algorithm, Names) {
    EXPECT_EQ(parse_algorithm("mc"), Algorithm::monte_carlo);
    EXPECT_EQ(parse_algorithm(to_string(Algorithm::qcoin)), Algorithm::qcoin);
    EXPECT_EQ(parse_algorithm(to_string(Algorithm::qss)), Algorithm::qss);
    EXPECT_THROW(parse_algorithm("qpe"), std::invalid_argument);
}
