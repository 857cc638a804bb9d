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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../test_util.hpp"
#include "qmean/circuit.hpp"
#include "qmean/estimators.hpp"
#include "qmean/harness.hpp"
#include "qmean/noise.hpp"
#include "qmean/primitives.hpp"
#include "qmean/statevector.hpp"

using namespace qmean;
namespace t = qmean::testing;

namespace {

// --- tolerances ------------------------------------------------------------

constexpr double kMcSlope = -0.50, kMcSlopeTol = 0.05;
constexpr std::size_t kMcReps = 3000;
constexpr double kMcRuntimeSeconds = 60.0;

constexpr double kQssSlope = -0.85, kQssSlopeTol = 0.10;
constexpr std::size_t kQssPoints = 200;

constexpr std::size_t kGridP = 16;
constexpr std::size_t kGridRuns = 300;
constexpr double kGridMinProbability = 0.8;
constexpr double kGridErrorRatio = 10.0;

constexpr std::size_t kCalibrationReps = 1000;
constexpr std::size_t kEvaluationReps = 3000;
constexpr double kParityFactor = 2.0;

constexpr double kScalingSlope = -2.0 / 3.0, kScalingSlopeTol = 0.10;
constexpr std::size_t kScalingReps = 2000;

constexpr double kAngleTol = 1e-8;
constexpr double kDftTol = 1e-8;
constexpr std::size_t kDftStates = 100;

constexpr std::size_t kNoiseRuns = 300;
constexpr double kPlateauTol = 0.20;
constexpr double kNoiseGainFactor = 2.0;
constexpr double kNoiseImprovementSe = 2.0;

constexpr std::size_t kImageSeeds = 20;

constexpr double kPropertyTol = 1e-10;

// --- reporting ---------------------------------------------------------------

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double mean_of(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double std_error_of(const std::vector<double> &v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double slope_for(const ConvergenceResult &r, Algorithm a, std::size_t k = 0) {
    for (const auto &s : r.slopes)
        if (s.algorithm == a && (a != Algorithm::qcoin || s.k == k)) return s.slope;
    return std::nan("");
}

// --- criteria ----------------------------------------------------------------

Outcome mc_convergence() {
    SweepSpec spec;
    spec.algorithms = {Algorithm::monte_carlo};
    spec.budgets = {100, 1000, 10000, 100000};
    spec.repetitions = kMcReps;
    spec.seed_base = 101;
    spec.jobs = 0;
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_convergence_sweep(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double slope = slope_for(r, Algorithm::monte_carlo);
    return {std::abs(slope - kMcSlope) <= kMcSlopeTol && secs < kMcRuntimeSeconds,
            "slope " + fmt("%.4f", slope) + " over 1e2..1e5, " + std::to_string(kMcReps) +
                " reps, " + fmt("%.2f", secs) + " s"};
}

Outcome qss_convergence() {
    std::vector<double> queries, errors;
    for (std::size_t P = 8; P <= 256; P *= 2) {
        queries.push_back(double(qss_queries(P)));
        errors.push_back(qss_mean_exact_error(P, kQssPoints, QssRoute::statevector));
    }
    const double slope = fit_loglog_slope(queries, errors);
    return {std::abs(slope - kQssSlope) <= kQssSlopeTol,
            "slope " + fmt("%.4f", slope) + " for P = 8..256, exact over " +
                std::to_string(kQssPoints) + " f values"};
}

Outcome qss_query_count() {
    const std::size_t P = 128;
    std::vector<double> values(64);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = double(i) / 63.0;
    const auto wide = OracleSpec::sqrt_amplitude(values);
    const std::uint64_t circuit_q = qss_circuit(wide, P).query_count();
    const std::uint64_t run_q = estimate_qss(OracleSpec::direct_value(0.3, Encoding::sqrt_amplitude), P, 7).queries_used;
    const std::uint64_t closed = qss_queries(P);
    return {circuit_q == 255 && run_q == 255 && closed == 255,
            "circuit " + std::to_string(circuit_q) + ", ledger " + std::to_string(run_q) +
                ", closed form " + std::to_string(closed)};
}

Outcome qss_grid() {
    const double pi = std::numbers::pi;
    auto grid = [&](std::size_t j) { return std::pow(std::sin(double(j) * pi / double(kGridP)), 2); };
    auto sampled_error = [&](double f, std::uint64_t salt, std::size_t *exact_hits) {
        const auto o = OracleSpec::direct_value(f, Encoding::sqrt_amplitude);
        double total = 0.0;
        for (std::size_t r = 0; r < kGridRuns; ++r) {
            const double e = std::abs(estimate_qss(o, kGridP, derive_seed(202, salt, r)).value - f);
            total += e;
            if (exact_hits && e < 1e-9) ++*exact_hits;
        }
        return total / double(kGridRuns);
    };
    double worst_prob = 1.0, worst_ratio = INFINITY;
    for (std::size_t j = 0; j <= kGridP / 2; ++j) {
        std::size_t hits = 0;
        const double on = sampled_error(grid(j), j, &hits);
        worst_prob = std::min(worst_prob, double(hits) / double(kGridRuns));
        double off = INFINITY;
        if (j > 0) off = std::min(off, sampled_error(0.5 * (grid(j - 1) + grid(j)), 100 + j, nullptr));
        if (j < kGridP / 2) off = std::min(off, sampled_error(0.5 * (grid(j) + grid(j + 1)), 200 + j, nullptr));
        // A zero on-grid error satisfies the ratio whenever off-grid error is positive.
        const double ratio = on > 0.0 ? off / on : (off > 0.0 ? INFINITY : 0.0);
        worst_ratio = std::min(worst_ratio, ratio);
    }
    return {worst_prob >= kGridMinProbability && worst_ratio >= kGridErrorRatio,
            "P = 16: min exact-hit rate " + fmt("%.3f", worst_prob) + ", min off/on error ratio " +
                (std::isinf(worst_ratio) ? std::string("inf") : fmt("%.3g", worst_ratio))};
}

Outcome qcoin_parity() {
    SweepSpec cal;
    cal.algorithms = {Algorithm::qcoin};
    cal.qcoin_ks = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    cal.budgets = {100, 1000, 10000, 100000};
    cal.repetitions = kCalibrationReps;
    cal.seed_base = 303;
    cal.jobs = 0;
    const auto table = run_convergence_sweep(cal).optimal_k;

    std::vector<double> qss_q, qss_e;
    for (std::size_t P = 8; P <= 8192; P *= 2) {
        qss_q.push_back(double(qss_queries(P)));
        qss_e.push_back(qss_mean_exact_error(P, kQssPoints));
    }

    bool ok = true;
    std::ostringstream detail;
    for (std::uint64_t budget : {std::uint64_t{1000}, std::uint64_t{10000}}) {
        const std::size_t k = select_optimal_k(budget, table);
        std::vector<double> err(kEvaluationReps);
        std::vector<std::uint64_t> used(kEvaluationReps);
        parallel_for(kEvaluationReps, 0, [&](std::size_t r) {
            const std::uint64_t seed = derive_seed(404, budget, r);
            Rng rng(derive_seed(seed, 0));
            const double f = uniform01(rng);
            const auto e = estimate_qcoin_budget(OracleSpec::direct_value(f, Encoding::sqrt_amplitude), k,
                                                 budget, seed);
            err[r] = std::abs(e.value - f);
            used[r] = e.queries_used;
        });
        const double q = double(used.front());
        const double qcoin_err = mean_of(err);
        const double qss_err = interpolate_loglog(qss_q, qss_e, q);
        const double ratio = qcoin_err / qss_err;
        ok = ok && ratio <= kParityFactor && ratio >= 1.0 / kParityFactor;
        detail << "budget " << budget << ": k=" << k << ", " << used.front() << " queries, qcoin "
               << fmt("%.3e", qcoin_err) << " vs qss " << fmt("%.3e", qss_err) << " (x"
               << fmt("%.2f", ratio) << "); ";
    }
    std::string s = detail.str();
    s.resize(s.size() - 2);
    return {ok, s};
}

Outcome single_step_scaling() {
    const auto r = run_single_step_scaling({1, 2, 3, 4, 5, 6, 7, 8}, kScalingReps, 505, 9.0, 0);
    return {std::abs(r.slope - kScalingSlope) <= kScalingSlopeTol,
            "k = 1, L = 9/delta^2, levels 1..8: slope " + fmt("%.4f", r.slope)};
}

Outcome aa_angle_law() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t n = 0; n <= 4; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> v(std::size_t{1} << n);
            for (auto &x : v) x = u(rng);
            const auto qss = OracleSpec::sqrt_amplitude(v);
            const double theta = std::asin(std::sqrt(qss.mean()));
            const double offset = 0.05;
            const auto lin = OracleSpec::linear_amplitude(v, offset);
            const double phi = std::asin(lin.mean() - offset);
            for (std::size_t m = 0; m <= 8; ++m) {
                QueryLedger ledger;
                StateVector a = prepare_qss_state(qss);
                apply_aa(a, AAOperator{qss, AAVariant::qss}, m, ledger);
                // Every amplitude is real and the marked component has norm sin((2m+1) theta).
                const double marked = std::sqrt(a.probability(BitPattern::of({{n, 1}})));
                worst = std::max(worst, std::abs(marked - std::abs(std::sin((2.0 * m + 1) * theta))));

                StateVector b = prepare_coin(lin);
                apply_aa(b, AAOperator{lin, AAVariant::qcoin}, m, ledger);
                const auto head = b.amplitude(coin_head_pattern(n).value);
                worst = std::max(worst, std::abs(head - std::complex<double>(std::sin((2.0 * m + 1) * phi))));
            }
        }
    }
    return {worst <= kAngleTol, "max deviation " + fmt("%.2e", worst) + " over both variants, m = 0..8"};
}

Outcome qft_vs_dft() {
    std::mt19937_64 rng(707);
    double worst = 0.0;
    for (std::size_t i = 0; i < kDftStates; ++i) {
        const std::size_t r = 2 + i % 5;
        const auto a = t::random_state(r, rng);
        StateVector s = StateVector::from_amplitudes(a);
        std::vector<Qubit> qs(r);
        std::iota(qs.begin(), qs.end(), Qubit{0});
        qft(s, qs);
        const std::vector<t::C> got(s.amplitudes().begin(), s.amplitudes().end());
        worst = std::max(worst, t::max_abs_diff(got, t::dft(a)));
    }
    return {worst <= kDftTol, std::to_string(kDftStates) + " states on 2..6 qubits, max deviation " +
                                  fmt("%.2e", worst)};
}

Outcome noise_plateau() {
    SweepSpec spec;
    spec.algorithms = {Algorithm::monte_carlo, Algorithm::qcoin};
    spec.qcoin_ks = {5, 6, 7};
    spec.f_values = {0.5};
    spec.budgets = {100, 1000, 10000, 100000};
    spec.repetitions = kNoiseRuns;
    spec.noise = NoiseModel::hardware_like();
    spec.seed_base = 808;
    spec.jobs = 0;
    spec.keep_trials = true;
    const auto r = run_convergence_sweep(spec);

    // errors[(algorithm, k, budget)][repetition]
    std::map<std::tuple<int, std::size_t, std::uint64_t>, std::vector<double>> errors;
    for (const auto &row : r.trials) {
        auto &v = errors[{int(row.algorithm), row.k, row.budget}];
        v.resize(kNoiseRuns);
        v[row.repetition] = std::abs(row.f_est - row.f_true);
    }
    const auto &mc4 = errors[{int(Algorithm::monte_carlo), 0, 10000}];
    const auto &mc5 = errors[{int(Algorithm::monte_carlo), 0, 100000}];
    const auto &k5 = errors[{int(Algorithm::qcoin), 5, 100000}];
    const double plateau = mean_of(mc5);
    const double drift = std::abs(plateau / mean_of(mc4) - 1.0);
    const double gain = plateau / mean_of(k5);

    bool ok = drift <= kPlateauTol && gain >= kNoiseGainFactor;
    std::ostringstream detail;
    detail << "mc 1e4 " << fmt("%.4f", mean_of(mc4)) << ", 1e5 " << fmt("%.4f", plateau) << " (drift "
           << fmt("%.1f", 100 * drift) << "%); qcoin k=5 " << fmt("%.4f", mean_of(k5)) << " (x"
           << fmt("%.2f", gain) << " below mc)";
    for (std::size_t k : {6, 7}) {
        const auto &other = errors[{int(Algorithm::qcoin), k, 100000}];
        std::vector<double> diff(kNoiseRuns);
        for (std::size_t i = 0; i < kNoiseRuns; ++i) diff[i] = k5[i] - other[i];
        const double improvement = mean_of(diff), se = std_error_of(diff);
        ok = ok && improvement <= kNoiseImprovementSe * se;
        detail << "; k=" << k << " gain over k=5 " << fmt("%.4f", improvement) << " (SE "
               << fmt("%.4f", se) << ")";
    }
    return {ok, detail.str()};
}

Outcome supersample_gradient() {
    const GrayImage source = synthetic_teaser_image();
    std::vector<Region> gradient;
    for (const auto &reg : default_regions(40, 24))
        if (reg.name == "gradient") gradient.push_back(reg);
    std::vector<double> mc, qc;
    std::size_t wins = 0;
    for (std::size_t s = 0; s < kImageSeeds; ++s) {
        SupersampleJob job;
        job.source = source;
        job.budget = 240;
        job.seed = derive_seed(909, s);
        job.regions = gradient;
        job.jobs = 0;
        job.algorithm = Algorithm::monte_carlo;
        mc.push_back(run_supersample(job).regions.at(0).mae);
        job.algorithm = Algorithm::qcoin;
        job.k = 3;
        qc.push_back(run_supersample(job).regions.at(0).mae);
        if (qc.back() < mc.back()) ++wins;
    }
    const double mq = median_of(qc), mm = median_of(mc);
    return {mq < mm, "gradient MAE median qcoin " + fmt("%.4f", mq) + " vs mc " + fmt("%.4f", mm) +
                         ", qcoin lower in " + std::to_string(wins) + "/" + std::to_string(kImageSeeds)};
}

// Dense Q on (inputs, target): a rotation of the target per input value.
t::Dense dense_oracle(const OracleSpec &o) {
    const std::size_t n = o.n_input_qubits();
    t::Dense q(2 * o.size());
    const auto angles = o.angles();
    for (std::size_t i = 0; i < o.size(); ++i) {
        const auto r = t::rot(angles[i]);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) q(i | (a << n), i | (b << n)) = r(a, b);
    }
    return q;
}

t::Dense adjoint(const t::Dense &u) {
    t::Dense out(u.dim);
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c) out(r, c) = std::conj(u(c, r));
    return out;
}

double identity_error(const t::Dense &u) {
    return t::max_abs_diff((u * adjoint(u)).a, t::Dense::identity(u.dim).a);
}

Outcome properties() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::string> failures;
    auto check = [&](bool ok, const std::string &what) {
        if (!ok) failures.push_back(what);
    };

    // Norm preservation under random gate sequences.
    double norm_err = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) {
        StateVector s = StateVector::from_amplitudes(t::random_state(n, rng));
        for (int g = 0; g < 200; ++g) {
            const Qubit a = Qubit(rng() % n);
            switch (rng() % 4) {
                case 0: s.apply_gate(GateMatrix::hadamard(), {a}); break;
                case 1: s.apply_gate(GateMatrix::rotation(6.0 * u(rng)), {a}); break;
                case 2: s.apply_gate(GateMatrix::phase(6.0 * u(rng)), {a}); break;
                default:
                    if (n > 1) {
                        const Qubit b = Qubit((a + 1 + rng() % (n - 1)) % n);
                        s.apply_gate(GateMatrix::rotation(6.0 * u(rng)), {a}, {b});
                    }
            }
            norm_err = std::max(norm_err, std::abs(s.norm_squared() - 1.0));
        }
    }
    check(norm_err <= kPropertyTol, "norm");

    // Unitarity of named gates and of whole AA / QSS circuits.
    double unit_err = 0.0;
    for (const auto &g : {GateMatrix::hadamard(), GateMatrix::pauli_x(), GateMatrix::pauli_y(),
                          GateMatrix::pauli_z(), GateMatrix::rotation(0.7), GateMatrix::phase(1.1),
                          GateMatrix::swap()})
        unit_err = std::max(unit_err, g.unitarity_error());
    {
        const auto o = OracleSpec::sqrt_amplitude({0.1, 0.7, 0.4, 0.9});
        const Circuit c = qss_unitary_circuit(o, 4);
        const std::size_t dim = std::size_t{1} << c.n_qubits();
        unit_err = std::max(unit_err, identity_error(t::Dense::from(dim, circuit_unitary(c))));
    }
    check(unit_err <= kPropertyTol, "unitarity");

    // AA operators against their defining matrix products.
    double aa_err = 0.0;
    for (std::size_t n = 0; n <= 3; ++n) {
        const std::size_t dim = std::size_t{2} << n;
        std::vector<double> v(std::size_t{1} << n);
        for (auto &x : v) x = u(rng);
        std::vector<t::Dense> hs(n + 1, t::Dense::identity(2));
        for (std::size_t q = 0; q < n; ++q) hs[q] = t::hadamard();
        const t::Dense H = t::tensor_of(hs);
        t::Dense R0 = t::Dense::identity(dim);
        R0(0, 0) = -1.0;
        {
            const auto o = OracleSpec::sqrt_amplitude(v);
            const auto Q = dense_oracle(o);
            const auto Z = t::single(n + 1, n, t::pauli_z());
            const auto expected = t::scaled(Q * H * R0 * H * adjoint(Q) * Z, -1.0);
            Circuit c(n + 1);
            append_aa(c, AAOperator{o, AAVariant::qss}, QubitLayout{n, 0}, 1);
            aa_err = std::max(aa_err, t::max_abs_diff(t::Dense::from(dim, circuit_unitary(c)).a, expected.a));
        }
        {
            const auto o = OracleSpec::linear_amplitude(v, 0.02);
            const auto Q = dense_oracle(o);
            t::Dense R1 = t::Dense::identity(dim);
            R1(std::size_t{1} << n, std::size_t{1} << n) = -1.0;
            const auto expected = H * Q * H * R0 * H * adjoint(Q) * H * R1;
            Circuit c(n + 1);
            append_aa(c, AAOperator{o, AAVariant::qcoin}, QubitLayout{n, 0}, 1);
            const auto got = t::Dense::from(dim, circuit_unitary(c));
            aa_err = std::max(aa_err, std::min(t::max_abs_diff(got.a, expected.a),
                                               t::max_abs_diff(got.a, t::scaled(expected, -1.0).a)));
        }
    }
    check(aa_err <= kPropertyTol, "aa-matrix");

    // QCoin with k = 0 is Monte Carlo.
    bool k0 = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto o = OracleSpec::sqrt_amplitude({u(rng), u(rng), u(rng), u(rng)});
        const auto q = estimate_qcoin(o, 0, 53, seed);
        const auto m = estimate_monte_carlo(o, 53, seed);
        k0 = k0 && q.value == m.value && q.queries_used == m.queries_used;
    }
    check(k0, "k0-equals-mc");

    // Query ledgers against the closed forms.
    bool ledger = true;
    const auto o = OracleSpec::sqrt_amplitude({0.3, 0.6, 0.2, 0.9});
    for (std::uint64_t L = 1; L <= 5; ++L) {
        ledger = ledger && estimate_monte_carlo(o, L * 17, L).queries_used == L * 17;
        for (std::size_t k = 0; k <= 6; ++k)
            ledger = ledger && estimate_qcoin(o, k, L, L).queries_used == L * (k - 1 + (std::uint64_t{1} << (k + 1)));
    }
    for (std::size_t P = 2; P <= 64; P *= 2)
        ledger = ledger && estimate_qss(o, P, 3).queries_used == 2 * P - 1 &&
                 qss_circuit(o, P).query_count() == 2 * P - 1;
    check(ledger, "ledger");

    std::string detail = "norm " + fmt("%.1e", norm_err) + ", unitarity " + fmt("%.1e", unit_err) +
                         ", aa-matrix " + fmt("%.1e", aa_err) + ", k0-equals-mc " + (k0 ? "ok" : "bad") +
                         ", ledger " + (ledger ? "ok" : "bad");
    return {failures.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"mc-convergence", mc_convergence},
        {"qss-convergence", qss_convergence},
        {"qss-query-count", qss_query_count},
        {"qss-grid-exactness", qss_grid},
        {"qcoin-qss-parity", qcoin_parity},
        {"single-step-scaling", single_step_scaling},
        {"aa-angle-law", aa_angle_law},
        {"qft-matches-dft", qft_vs_dft},
        {"noise-plateau", noise_plateau},
        {"supersample-gradient", supersample_gradient},
        {"property-suite", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
