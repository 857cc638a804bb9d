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

#include "qmean/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qmean/config.hpp"

namespace qmean {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t log2_exact(std::uint64_t v) {
    std::size_t n = 0;
    while ((std::uint64_t{1} << n) < v) ++n;
    return n;
}

OracleSpec direct(double f) { return OracleSpec::direct_value(f, Encoding::sqrt_amplitude); }

double grid_value(std::uint64_t t, std::size_t P) {
    const double s = std::sin(static_cast<double>(t) * kPi / static_cast<double>(P));
    return s * s;
}

// Backend for a sweep: the shared exact backend or a noisy one owned here.
class BackendHolder {
  public:
    explicit BackendHolder(const NoiseModel &noise) {
        if (!noise.is_noiseless()) noisy_ = std::make_unique<NoisyBackend>(noise);
    }
    const ShotBackend &get() const {
        return noisy_ ? static_cast<const ShotBackend &>(*noisy_) : exact_backend();
    }

  private:
    std::unique_ptr<NoisyBackend> noisy_;
};

struct Stats {
    double mean = 0.0;
    double std_error = 0.0;
};

Stats stats_of(const std::vector<double> &v) {
    Stats s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return s;
}

void check_queries(const Estimate &e, std::uint64_t expected) {
    if (e.queries_used != expected) {
        throw std::logic_error("query ledger " + std::to_string(e.queries_used) +
                               " disagrees with closed form " + std::to_string(expected));
    }
}

// One estimator configuration evaluated over repetitions.
struct SweepJob {
    Algorithm algorithm;
    std::size_t k = 0;
    std::size_t P = 0;
    std::uint64_t budget = 0;
    std::uint64_t queries = 0;
    std::size_t f_index = 0;
    std::size_t budget_index = 0;
};

double run_one(const SweepJob &job, double f, std::uint64_t seed, const ShotBackend &backend) {
    switch (job.algorithm) {
        case Algorithm::monte_carlo: {
            const Estimate e = estimate_monte_carlo(direct(f), job.budget, seed, backend);
            check_queries(e, job.queries);
            return e.value;
        }
        case Algorithm::qss: {
            const Estimate e = estimate_qss(direct(f), job.P, seed, backend);
            check_queries(e, job.queries);
            return e.value;
        }
        case Algorithm::qcoin: {
            const Estimate e = estimate_qcoin_budget(direct(f), job.k, job.budget, seed, backend);
            check_queries(e, job.queries);
            return e.value;
        }
    }
    return kNaN;
}

// Jobs for the sampled algorithms at one budget, in sweep order.
void push_budget_jobs(const SweepSpec &spec, std::uint64_t budget, std::size_t budget_index,
                      std::size_t f_index, bool sample_qss, std::vector<SweepJob> &jobs) {
    for (Algorithm a : spec.algorithms) {
        SweepJob j{a};
        j.budget = budget;
        j.budget_index = budget_index;
        j.f_index = f_index;
        if (a == Algorithm::monte_carlo) {
            j.queries = mc_queries(budget);
            jobs.push_back(j);
        } else if (a == Algorithm::qss) {
            if (!sample_qss) continue;
            j.P = qss_resolution_for_budget(budget);
            if (j.P == 0) continue;
            j.queries = qss_queries(j.P);
            jobs.push_back(j);
        } else {
            for (std::size_t k : spec.qcoin_ks) {
                if (qcoin_queries(k, 1) > budget) continue;
                j.k = k;
                j.queries = qcoin_queries(k, qcoin_trials_for_budget(k, budget));
                jobs.push_back(j);
            }
        }
    }
}

PointRow point_of(const SweepJob &job) {
    PointRow p;
    p.algorithm = job.algorithm;
    p.k = job.k;
    p.P = job.P;
    p.budget = job.budget;
    p.queries = job.queries;
    return p;
}

std::string opt_field(bool present, std::size_t v) { return present ? std::to_string(v) : ""; }

}  // namespace

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)> &fn) {
    if (count == 0) return;
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, count);
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::size_t failed_index = count;
    std::exception_ptr error;
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs - 1);
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// --- QSS outcome distributions -------------------------------------------

std::vector<double> qss_outcome_distribution(const OracleSpec &oracle, std::size_t P) {
    if (!is_power_of_two(P) || P < 2) throw std::invalid_argument("QSS resolution must be a power of two >= 2");
    const OracleSpec o = oracle.encoding() == Encoding::sqrt_amplitude && oracle.offset() == 0.0
                             ? oracle
                             : oracle.with_encoding(Encoding::sqrt_amplitude);
    const Circuit c = qss_unitary_circuit(o, P);
    StateVector s(c.n_qubits());
    Rng unused(0);
    execute(c, s, unused);
    // The target measurement commutes with the register QFT, so it is
    // traced out instead.
    const QubitLayout layout{o.n_input_qubits(), log2_exact(P)};
    qft(s, layout.registers());
    return s.marginal(layout.registers());
}

std::vector<double> qss_outcome_distribution(double f, std::size_t P, QssRoute route) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("f must lie in [0, 1]");
    if (!is_power_of_two(P) || P < 2) throw std::invalid_argument("QSS resolution must be a power of two >= 2");
    if (route == QssRoute::automatic) route = P <= 512 ? QssRoute::statevector : QssRoute::analytic;
    if (route == QssRoute::statevector) return qss_outcome_distribution(direct(f), P);

    // The register ends in an equal mix of the two eigenphases +-2 theta of
    // G; each contributes a Fejer kernel |S(x)|^2 / P^2 centered on it.
    const double theta = std::asin(std::sqrt(f));
    const double Pd = static_cast<double>(P);
    auto kernel = [&](double x) {
        const double den = std::sin(x / 2.0);
        if (std::abs(den) < 1e-12) return Pd * Pd;
        const double num = std::sin(Pd * x / 2.0);
        return num * num / (den * den);
    };
    std::vector<double> p(P);
    double total = 0.0;
    for (std::size_t t = 0; t < P; ++t) {
        const double phase = 2.0 * kPi * static_cast<double>(t) / Pd;
        p[t] = (kernel(2.0 * theta - phase) + kernel(-2.0 * theta - phase)) / (2.0 * Pd * Pd);
        total += p[t];
    }
    for (double &v : p) v /= total;
    return p;
}

double qss_exact_error(double f, std::size_t P, QssRoute route) {
    const std::vector<double> p = qss_outcome_distribution(f, P, route);
    double err = 0.0;
    for (std::size_t t = 0; t < P; ++t) err += p[t] * std::abs(grid_value(t, P) - f);
    return err;
}

double qss_mean_exact_error(std::size_t P, std::size_t points, QssRoute route) {
    if (points == 0) throw std::invalid_argument("need at least one f point");
    double sum = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        sum += qss_exact_error((static_cast<double>(j) + 0.5) / static_cast<double>(points), P, route);
    }
    return sum / static_cast<double>(points);
}

std::size_t qss_resolution_for_budget(std::uint64_t budget) {
    if (budget < 3) return 0;
    std::size_t P = 2;
    while (2 * (2 * static_cast<std::uint64_t>(P)) - 1 <= budget) P *= 2;
    return P;
}

// --- Sweeps ---------------------------------------------------------------

void SweepSpec::validate(bool convergence) const {
    if (algorithms.empty()) throw std::invalid_argument("sweep needs at least one algorithm");
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
        if (std::count(algorithms.begin(), algorithms.begin() + static_cast<std::ptrdiff_t>(i), algorithms[i])) {
            throw std::invalid_argument("algorithms must not repeat");
        }
    }
    if (repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
    if (budgets.empty()) throw std::invalid_argument("sweep needs at least one budget");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        if (budgets[i] == 0) throw std::invalid_argument("budgets must be positive");
        if (i > 0 && budgets[i] <= budgets[i - 1]) {
            throw std::invalid_argument("budgets must be strictly ascending");
        }
    }
    for (double f : f_values) {
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("f values must lie in [0, 1]");
    }
    const bool has_qcoin = std::count(algorithms.begin(), algorithms.end(), Algorithm::qcoin) > 0;
    if (has_qcoin && qcoin_ks.empty()) throw std::invalid_argument("qcoin needs at least one k");
    for (std::size_t i = 0; i < qcoin_ks.size(); ++i) {
        if (qcoin_ks[i] > 30) throw std::invalid_argument("k must be <= 30");
        if (i > 0 && qcoin_ks[i] <= qcoin_ks[i - 1]) throw std::invalid_argument("k values must be strictly ascending");
    }
    for (std::size_t P : qss_resolutions) {
        if (!is_power_of_two(P) || P < 2) throw std::invalid_argument("QSS resolutions must be powers of two >= 2");
    }
    noise.validate();
    if (convergence) {
        if (budgets.size() < 4) throw std::invalid_argument("convergence sweeps need >= 4 budgets");
        if (static_cast<double>(budgets.back()) < 100.0 * static_cast<double>(budgets.front())) {
            throw std::invalid_argument("convergence budgets must span >= 2 decades");
        }
        if (qss_exact_points == 0) throw std::invalid_argument("qss_exact_points must be >= 1");
    } else if (f_values.empty()) {
        throw std::invalid_argument("value sweeps need an f grid");
    }
}

ValueSweepResult run_value_sweep(const SweepSpec &spec) {
    spec.validate(false);
    const BackendHolder backend(spec.noise);
    const bool exact_qss = spec.noise.is_noiseless();

    std::vector<SweepJob> jobs;
    std::vector<SweepJob> exact_jobs;
    for (std::size_t i = 0; i < spec.f_values.size(); ++i) {
        for (std::size_t b = 0; b < spec.budgets.size(); ++b) {
            push_budget_jobs(spec, spec.budgets[b], b, i, !exact_qss, jobs);
            if (exact_qss && std::count(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::qss)) {
                SweepJob j{Algorithm::qss};
                j.budget = spec.budgets[b];
                j.P = qss_resolution_for_budget(j.budget);
                if (j.P == 0) continue;
                j.queries = qss_queries(j.P);
                j.f_index = i;
                j.budget_index = b;
                exact_jobs.push_back(j);
            }
        }
    }

    const std::size_t reps = spec.repetitions;
    std::vector<TrialRow> trials(jobs.size() * reps);
    parallel_for(trials.size(), spec.jobs, [&](std::size_t idx) {
        const SweepJob &job = jobs[idx / reps];
        const std::size_t r = idx % reps;
        const double f = spec.f_values[job.f_index];
        const std::uint64_t seed =
            derive_seed(derive_seed(spec.seed_base, job.f_index, job.budget_index + 1), r);
        TrialRow &row = trials[idx];
        row = {job.algorithm, job.k, job.P, job.budget, r, f, run_one(job, f, seed, backend.get()),
               job.queries, seed};
    });
    std::vector<double> exact_errors(exact_jobs.size());
    parallel_for(exact_jobs.size(), spec.jobs, [&](std::size_t idx) {
        exact_errors[idx] = qss_exact_error(spec.f_values[exact_jobs[idx].f_index], exact_jobs[idx].P);
    });

    ValueSweepResult result;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        std::vector<double> errs(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            const TrialRow &t = trials[j * reps + r];
            errs[r] = std::abs(t.f_est - t.f_true);
        }
        const Stats s = stats_of(errs);
        PointRow p = point_of(jobs[j]);
        p.f = spec.f_values[jobs[j].f_index];
        p.mean_abs_error = s.mean;
        p.std_error = s.std_error;
        p.samples = reps;
        result.points.push_back(p);
    }
    for (std::size_t j = 0; j < exact_jobs.size(); ++j) {
        PointRow p = point_of(exact_jobs[j]);
        p.f = spec.f_values[exact_jobs[j].f_index];
        p.mean_abs_error = exact_errors[j];
        p.samples = 1;
        p.exact = true;
        result.points.push_back(p);
    }
    // Deterministic order: f, budget, algorithm as listed, k.
    auto algo_rank = [&](Algorithm a) {
        return std::find(spec.algorithms.begin(), spec.algorithms.end(), a) - spec.algorithms.begin();
    };
    std::stable_sort(result.points.begin(), result.points.end(), [&](const PointRow &a, const PointRow &b) {
        if (a.f != b.f) return a.f < b.f;
        if (a.budget != b.budget) return a.budget < b.budget;
        if (a.algorithm != b.algorithm) return algo_rank(a.algorithm) < algo_rank(b.algorithm);
        return a.k < b.k;
    });
    if (spec.keep_trials) result.trials = std::move(trials);
    return result;
}

ConvergenceResult run_convergence_sweep(const SweepSpec &spec) {
    spec.validate(true);
    const BackendHolder backend(spec.noise);
    const bool has_qss = std::count(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::qss) > 0;
    const bool exact_qss = has_qss && spec.noise.is_noiseless();

    std::vector<std::size_t> resolutions = spec.qss_resolutions;
    if (resolutions.empty()) {
        for (std::uint64_t b : spec.budgets) {
            const std::size_t P = qss_resolution_for_budget(b);
            if (P != 0 && (resolutions.empty() || resolutions.back() != P)) resolutions.push_back(P);
        }
    }

    std::vector<SweepJob> jobs;
    for (Algorithm a : spec.algorithms) {
        if (a == Algorithm::qss) {
            if (exact_qss) continue;
            for (std::size_t i = 0; i < resolutions.size(); ++i) {
                SweepJob j{a};
                j.P = resolutions[i];
                j.budget = j.queries = qss_queries(j.P);
                j.budget_index = i;
                jobs.push_back(j);
            }
            continue;
        }
        SweepSpec single = spec;
        single.algorithms = {a};
        for (std::size_t b = 0; b < spec.budgets.size(); ++b) {
            push_budget_jobs(single, spec.budgets[b], b, 0, false, jobs);
        }
    }

    const std::size_t reps = spec.repetitions;
    auto f_for = [&](std::size_t r) {
        if (!spec.f_values.empty()) return spec.f_values[r % spec.f_values.size()];
        Rng g(derive_seed(spec.seed_base, 0, r));
        return uniform01(g);
    };
    std::vector<TrialRow> trials(jobs.size() * reps);
    parallel_for(trials.size(), spec.jobs, [&](std::size_t idx) {
        const SweepJob &job = jobs[idx / reps];
        const std::size_t r = idx % reps;
        const double f = f_for(r);
        const std::uint64_t seed = derive_seed(spec.seed_base, job.budget_index + 1, r);
        trials[idx] = {job.algorithm, job.k, job.P, job.budget, r, f, run_one(job, f, seed, backend.get()),
                       job.queries, seed};
    });

    std::vector<double> exact_errors;
    if (exact_qss) {
        const std::size_t n_f = spec.qss_exact_points;
        std::vector<double> per_f(resolutions.size() * n_f);
        parallel_for(per_f.size(), spec.jobs, [&](std::size_t idx) {
            const double f = (static_cast<double>(idx % n_f) + 0.5) / static_cast<double>(n_f);
            per_f[idx] = qss_exact_error(f, resolutions[idx / n_f]);
        });
        for (std::size_t i = 0; i < resolutions.size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n_f; ++j) sum += per_f[i * n_f + j];
            exact_errors.push_back(sum / static_cast<double>(n_f));
        }
    }

    ConvergenceResult result;
    std::size_t job_cursor = 0;
    for (Algorithm a : spec.algorithms) {
        if (a == Algorithm::qss && exact_qss) {
            for (std::size_t i = 0; i < resolutions.size(); ++i) {
                PointRow p;
                p.algorithm = a;
                p.P = resolutions[i];
                p.budget = p.queries = qss_queries(p.P);
                p.mean_abs_error = exact_errors[i];
                p.samples = spec.qss_exact_points;
                p.exact = true;
                result.points.push_back(p);
            }
            continue;
        }
        for (; job_cursor < jobs.size() && jobs[job_cursor].algorithm == a; ++job_cursor) {
            std::vector<double> errs(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                const TrialRow &t = trials[job_cursor * reps + r];
                errs[r] = std::abs(t.f_est - t.f_true);
            }
            const Stats s = stats_of(errs);
            PointRow p = point_of(jobs[job_cursor]);
            p.mean_abs_error = s.mean;
            p.std_error = s.std_error;
            p.samples = reps;
            result.points.push_back(p);
        }
    }
    // One contiguous curve per (algorithm, k), ascending in queries.
    std::stable_sort(result.points.begin(), result.points.end(), [&](const PointRow &x, const PointRow &y) {
        const auto rx = std::find(spec.algorithms.begin(), spec.algorithms.end(), x.algorithm);
        const auto ry = std::find(spec.algorithms.begin(), spec.algorithms.end(), y.algorithm);
        if (rx != ry) return rx < ry;
        if (x.k != y.k) return x.k < y.k;
        return x.queries < y.queries;
    });

    // Slopes per curve.
    for (std::size_t i = 0; i < result.points.size();) {
        std::size_t j = i;
        std::vector<double> xs, ys;
        while (j < result.points.size() && result.points[j].algorithm == result.points[i].algorithm &&
               result.points[j].k == result.points[i].k) {
            xs.push_back(static_cast<double>(result.points[j].queries));
            ys.push_back(result.points[j].mean_abs_error);
            ++j;
        }
        SlopeRow s{result.points[i].algorithm, result.points[i].k, fit_loglog_slope(xs, ys), xs.size()};
        result.slopes.push_back(s);
        i = j;
    }

    if (std::count(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::qcoin)) {
        OptimalKTable &t = result.optimal_k;
        t.budgets = spec.budgets;
        t.ks = spec.qcoin_ks;
        t.error.assign(t.budgets.size(), std::vector<double>(t.ks.size(), kNaN));
        for (const PointRow &p : result.points) {
            if (p.algorithm != Algorithm::qcoin) continue;
            const auto b = std::find(t.budgets.begin(), t.budgets.end(), p.budget) - t.budgets.begin();
            const auto k = std::find(t.ks.begin(), t.ks.end(), p.k) - t.ks.begin();
            t.error[b][k] = p.mean_abs_error;
        }
    }
    if (spec.keep_trials) result.trials = std::move(trials);
    return result;
}

double fit_loglog_slope(std::vector<double> x, std::vector<double> y, bool skip_smallest) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_slope: size mismatch");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            pts.emplace_back(std::log10(x[i]), std::log10(y[i]));
        }
    }
    std::sort(pts.begin(), pts.end());
    if (skip_smallest && !pts.empty()) pts.erase(pts.begin());
    if (pts.size() < 2) return kNaN;
    double mx = 0.0, my = 0.0;
    for (const auto &[a, b] : pts) {
        mx += a;
        my += b;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto &[a, b] : pts) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    return sxx > 0.0 ? sxy / sxx : kNaN;
}

double interpolate_loglog(const std::vector<double> &x, const std::vector<double> &y, double at) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("interpolate_loglog: need >= 2 points");
    if (at < x.front() || at > x.back()) throw std::invalid_argument("interpolate_loglog: query outside range");
    std::size_t i = 1;
    while (i + 1 < x.size() && x[i] < at) ++i;
    const double lx0 = std::log10(x[i - 1]), lx1 = std::log10(x[i]);
    const double ly0 = std::log10(y[i - 1]), ly1 = std::log10(y[i]);
    const double w = lx1 == lx0 ? 0.0 : (std::log10(at) - lx0) / (lx1 - lx0);
    return std::pow(10.0, ly0 + w * (ly1 - ly0));
}

// --- Single-step QCoin scaling -------------------------------------------

ScalingResult run_single_step_scaling(const std::vector<std::size_t> &levels, std::size_t repetitions,
                                      std::uint64_t seed_base, double trials_factor, std::size_t jobs,
                                      const NoiseModel &noise) {
    if (levels.empty() || repetitions == 0) throw std::invalid_argument("scaling needs levels and repetitions");
    if (!(trials_factor > 0.0)) throw std::invalid_argument("trials factor must be positive");
    for (std::size_t l : levels) {
        if (l == 0 || l > 30) throw std::invalid_argument("scaling levels must lie in [1, 30]");
    }
    noise.validate();
    const BackendHolder backend(noise);

    std::vector<std::uint64_t> L(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double d = qcoin_delta(levels[i]);
        L[i] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(trials_factor / (d * d))));
    }
    std::vector<double> errs(levels.size() * repetitions);
    parallel_for(errs.size(), jobs, [&](std::size_t idx) {
        const std::size_t i = idx / repetitions;
        const std::size_t r = idx % repetitions;
        Rng g(derive_seed(seed_base, 0, r));
        const double f = uniform01(g);
        QCoinOptions opt;
        opt.level_offset = levels[i] - 1;
        const Estimate e = estimate_qcoin(direct(f), 1, L[i], derive_seed(seed_base, levels[i], r),
                                          backend.get(), opt);
        check_queries(e, qcoin_queries(1, {L[i], L[i]}, opt.level_offset));
        errs[idx] = std::abs(e.value - f);
    });

    ScalingResult result;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto first = errs.begin() + static_cast<std::ptrdiff_t>(i * repetitions);
        const Stats s = stats_of(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(repetitions)));
        ScalingRow row;
        row.level = levels[i];
        row.delta = qcoin_delta(levels[i]);
        row.trials = L[i];
        row.queries = qcoin_queries(1, {L[i], L[i]}, levels[i] - 1);
        row.mean_abs_error = s.mean;
        row.std_error = s.std_error;
        row.samples = repetitions;
        result.rows.push_back(row);
        xs.push_back(static_cast<double>(row.queries));
        ys.push_back(row.mean_abs_error);
    }
    result.slope = fit_loglog_slope(xs, ys);
    return result;
}

// --- CSV ------------------------------------------------------------------

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_trials_csv(std::ostream &out, const std::vector<TrialRow> &rows) {
    out << "algorithm,k,P,budget,repetition,f_true,f_est,queries,seed\n";
    for (const TrialRow &r : rows) {
        out << to_string(r.algorithm) << ',' << opt_field(r.algorithm == Algorithm::qcoin, r.k) << ','
            << opt_field(r.algorithm == Algorithm::qss, r.P) << ',' << r.budget << ',' << r.repetition
            << ',' << format_number(r.f_true) << ',' << format_number(r.f_est) << ',' << r.queries << ','
            << r.seed << '\n';
    }
}

namespace {

void write_point(std::ostream &out, const PointRow &p, bool with_f) {
    out << to_string(p.algorithm) << ',' << opt_field(p.algorithm == Algorithm::qcoin, p.k) << ','
        << opt_field(p.algorithm == Algorithm::qss, p.P) << ',';
    if (with_f) out << format_number(p.f) << ',';
    out << p.budget << ',' << p.queries << ',' << format_number(p.mean_abs_error) << ','
        << format_number(p.std_error) << ',' << p.samples << ',' << (p.exact ? "exact" : "sampled") << '\n';
}

}  // namespace

void write_value_csv(std::ostream &out, const std::vector<PointRow> &rows) {
    out << "algorithm,k,P,f,budget,queries,mean_abs_error,std_error,samples,method\n";
    for (const PointRow &p : rows) write_point(out, p, true);
}

void write_convergence_csv(std::ostream &out, const std::vector<PointRow> &rows) {
    out << "algorithm,k,P,budget,queries,mean_abs_error,std_error,samples,method\n";
    for (const PointRow &p : rows) write_point(out, p, false);
}

void write_slopes_csv(std::ostream &out, const std::vector<SlopeRow> &rows) {
    out << "algorithm,k,slope,points\n";
    for (const SlopeRow &s : rows) {
        out << to_string(s.algorithm) << ',' << opt_field(s.algorithm == Algorithm::qcoin, s.k) << ','
            << format_number(s.slope) << ',' << s.points << '\n';
    }
}

void write_scaling_csv(std::ostream &out, const std::vector<ScalingRow> &rows) {
    out << "level,delta,trials,queries,mean_abs_error,std_error,samples\n";
    for (const ScalingRow &r : rows) {
        out << r.level << ',' << format_number(r.delta) << ',' << r.trials << ',' << r.queries << ','
            << format_number(r.mean_abs_error) << ',' << format_number(r.std_error) << ',' << r.samples
            << '\n';
    }
}

void write_optimal_k_csv(std::ostream &out, const OptimalKTable &table) {
    out << "budget,k,mean_abs_error,optimal\n";
    for (std::size_t b = 0; b < table.budgets.size(); ++b) {
        const std::size_t best = select_optimal_k(table.budgets[b], table);
        for (std::size_t k = 0; k < table.ks.size(); ++k) {
            out << table.budgets[b] << ',' << table.ks[k] << ',' << format_number(table.error[b][k]) << ','
                << (table.ks[k] == best ? 1 : 0) << '\n';
        }
    }
}

OptimalKTable read_optimal_k_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("budget,k,mean_abs_error", 0) != 0) {
        throw ConfigError("optimal-k table: missing header");
    }
    std::vector<std::tuple<std::uint64_t, std::size_t, double>> cells;
    std::set<std::uint64_t> budgets;
    std::set<std::size_t> ks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_list(line);
        if (fields.size() < 3) throw ConfigError("optimal-k table line " + std::to_string(line_no) + ": too few fields");
        const std::uint64_t b = parse_uint(fields[0], "budget");
        const std::size_t k = parse_uint(fields[1], "k");
        const double e = fields[2] == "nan" ? kNaN : parse_double(fields[2], "mean_abs_error");
        cells.emplace_back(b, k, e);
        budgets.insert(b);
        ks.insert(k);
    }
    OptimalKTable t;
    t.budgets.assign(budgets.begin(), budgets.end());
    t.ks.assign(ks.begin(), ks.end());
    t.error.assign(t.budgets.size(), std::vector<double>(t.ks.size(), kNaN));
    for (const auto &[b, k, e] : cells) {
        const auto bi = std::find(t.budgets.begin(), t.budgets.end(), b) - t.budgets.begin();
        const auto ki = std::find(t.ks.begin(), t.ks.end(), k) - t.ks.begin();
        t.error[bi][ki] = e;
    }
    if (t.budgets.empty()) throw ConfigError("optimal-k table: no rows");
    return t;
}

// --- Supersampling --------------------------------------------------------

GrayImage synthetic_teaser_image(std::size_t pixels_wide, std::size_t pixels_high) {
    if (pixels_wide < 10 || pixels_high < 2) {
        throw std::invalid_argument("synthetic image needs at least 10 x 2 pixels");
    }
    const std::size_t B = kSubpixelBlock;
    const std::size_t W = pixels_wide * B;
    const std::size_t H = pixels_high * B;
    const std::size_t top = (pixels_high / 2) * B;
    const std::size_t split = (pixels_wide / 2) * B;
    GrayImage img(W, H);

    const double cx = static_cast<double>(split) / 2.0;
    const double cy = static_cast<double>(top) / 2.0;
    const double radius = 0.4 * static_cast<double>(std::min(split, top));
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            double v;
            if (y >= top) {
                const std::size_t band = std::min<std::size_t>(4, (x / B) * 5 / pixels_wide);
                v = 0.25 * static_cast<double>(band);
            } else if (x >= split) {
                v = (static_cast<double>(x - split) + 0.5) / static_cast<double>(W - split);
            } else {
                const double dx = static_cast<double>(x) + 0.5 - cx;
                const double dy = static_cast<double>(y) + 0.5 - cy;
                v = dx * dx + dy * dy <= radius * radius ? 1.0 : 0.25;
            }
            img.at(x, y) = v;
        }
    }
    return img;
}

std::vector<Region> default_regions(std::size_t pixels_wide, std::size_t pixels_high) {
    std::vector<Region> regions;
    const std::size_t top = pixels_high / 2;
    const char *names[5] = {"band_0", "band_25", "band_50", "band_75", "band_100"};
    for (std::size_t b = 0; b < 5; ++b) {
        // Same column-to-band map as synthetic_teaser_image.
        std::size_t x0 = pixels_wide, x1 = 0;
        for (std::size_t x = 0; x < pixels_wide; ++x) {
            if (std::min<std::size_t>(4, x * 5 / pixels_wide) == b) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x + 1);
            }
        }
        regions.push_back({names[b], x0, top, x1 - x0, pixels_high - top});
    }
    regions.push_back({"gradient", pixels_wide / 2, 0, pixels_wide - pixels_wide / 2, top});
    return regions;
}

void SupersampleJob::validate() const {
    const std::size_t B = kSubpixelBlock;
    if (source.width == 0 || source.height == 0 || source.pixels.size() != source.width * source.height) {
        throw std::invalid_argument("source image is empty or inconsistent");
    }
    if (source.width % B != 0 || source.height % B != 0) {
        throw std::invalid_argument("source image dimensions must be divisible by 8");
    }
    for (double v : source.pixels) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("source pixel values must lie in [0, 1]");
    }
    if (budget == 0) throw std::invalid_argument("budget must be >= 1");
    if (algorithm == Algorithm::qcoin && k > 30) throw std::invalid_argument("k must be <= 30");
    if (algorithm == Algorithm::qss) {
        if (P != 0 && (!is_power_of_two(P) || P < 2)) throw std::invalid_argument("P must be a power of two >= 2");
        if (P == 0 && qss_resolution_for_budget(budget) == 0) throw std::invalid_argument("budget too small for QSS");
    }
    const std::size_t pw = source.width / B, ph = source.height / B;
    for (const Region &r : regions) {
        if (r.width == 0 || r.height == 0 || r.x + r.width > pw || r.y + r.height > ph) {
            throw std::invalid_argument("region '" + r.name + "' lies outside the " + std::to_string(pw) + "x" +
                                        std::to_string(ph) + " output image");
        }
    }
    noise.validate();
}

SupersampleResult run_supersample(const SupersampleJob &job) {
    job.validate();
    const std::size_t B = kSubpixelBlock;
    const std::size_t pw = job.source.width / B, ph = job.source.height / B;
    const BackendHolder backend(job.noise);
    const std::size_t P = job.algorithm == Algorithm::qss
                              ? (job.P != 0 ? job.P : qss_resolution_for_budget(job.budget))
                              : 0;

    SupersampleResult result;
    result.ideal = GrayImage(pw, ph);
    result.estimate = GrayImage(pw, ph);
    result.pixel_seeds.resize(pw * ph);
    switch (job.algorithm) {
        case Algorithm::monte_carlo: result.queries_per_pixel = mc_queries(job.budget); break;
        case Algorithm::qss: result.queries_per_pixel = qss_queries(P); break;
        case Algorithm::qcoin:
            result.queries_per_pixel = qcoin_queries(job.k, qcoin_trials_for_budget(job.k, job.budget));
            break;
    }

    parallel_for(pw * ph, job.jobs, [&](std::size_t idx) {
        const std::size_t px = idx % pw, py = idx / pw;
        std::vector<double> sub(B * B);
        for (std::size_t sy = 0; sy < B; ++sy) {
            for (std::size_t sx = 0; sx < B; ++sx) sub[sy * B + sx] = job.source.at(px * B + sx, py * B + sy);
        }
        const OracleSpec oracle = OracleSpec::sqrt_amplitude(std::move(sub));
        const std::uint64_t seed = derive_seed(job.seed, py, px);
        double value = 0.0;
        switch (job.algorithm) {
            case Algorithm::monte_carlo: {
                const Estimate e = estimate_monte_carlo(oracle, job.budget, seed, backend.get());
                check_queries(e, result.queries_per_pixel);
                value = e.value;
                break;
            }
            case Algorithm::qcoin: {
                const Estimate e = estimate_qcoin_budget(oracle, job.k, job.budget, seed, backend.get());
                check_queries(e, result.queries_per_pixel);
                value = e.value;
                break;
            }
            case Algorithm::qss: {
                if (job.noise.is_noiseless()) {
                    const std::vector<double> dist = qss_outcome_distribution(oracle.mean(), P);
                    Rng rng(seed);
                    const double u = uniform01(rng);
                    double acc = 0.0;
                    std::size_t t = 0, last = 0;
                    for (; t < P; ++t) {
                        if (dist[t] <= 0.0) continue;
                        last = t;
                        acc += dist[t];
                        if (u < acc) break;
                    }
                    value = grid_value(t < P ? t : last, P);
                } else {
                    const Estimate e = estimate_qss(oracle, P, seed, backend.get());
                    check_queries(e, result.queries_per_pixel);
                    value = e.value;
                }
                break;
            }
        }
        result.ideal.at(px, py) = oracle.mean();
        result.estimate.at(px, py) = value;
        result.pixel_seeds[idx] = seed;
    });

    for (const Region &r : job.regions) {
        double sum = 0.0;
        for (std::size_t y = r.y; y < r.y + r.height; ++y) {
            for (std::size_t x = r.x; x < r.x + r.width; ++x) {
                sum += std::abs(result.estimate.at(x, y) - result.ideal.at(x, y));
            }
        }
        const std::size_t n = r.width * r.height;
        result.regions.push_back({r, sum / static_cast<double>(n), n});
    }
    return result;
}

void write_regions_csv(std::ostream &out, const SupersampleResult &result) {
    out << "region,x,y,width,height,pixels,mae\n";
    for (const RegionError &e : result.regions) {
        out << e.region.name << ',' << e.region.x << ',' << e.region.y << ',' << e.region.width << ','
            << e.region.height << ',' << e.pixels << ',' << format_number(e.mae) << '\n';
    }
}

void write_pixels_csv(std::ostream &out, const SupersampleResult &result) {
    out << "x,y,ideal,estimate,queries,seed\n";
    const std::size_t w = result.ideal.width;
    for (std::size_t i = 0; i < result.ideal.pixels.size(); ++i) {
        out << i % w << ',' << i / w << ',' << format_number(result.ideal.pixels[i]) << ','
            << format_number(result.estimate.pixels[i]) << ',' << result.queries_per_pixel << ','
            << result.pixel_seeds[i] << '\n';
    }
}

// --- Resources ------------------------------------------------------------

namespace {

CircuitResources measure_circuit(Algorithm a, const Circuit &c, std::size_t aa, std::size_t reg) {
    CircuitResources r;
    r.algorithm = a;
    r.aa_repetitions = aa;
    r.qubits = c.n_qubits();
    r.qubits_without_target = c.n_qubits() - 1;
    r.register_qubits = reg;
    r.queries = c.query_count();
    r.gate_count = c.gate_count();
    r.multi_qubit_gate_count = c.multi_qubit_gate_count();
    std::set<std::pair<Qubit, Qubit>> edges;
    for (const Operation &op : c.operations()) {
        if (op.kind == OpKind::annotation || op.kind == OpKind::measure) continue;
        std::vector<Qubit> q = op.touched();
        std::sort(q.begin(), q.end());
        q.erase(std::unique(q.begin(), q.end()), q.end());
        for (std::size_t i = 0; i < q.size(); ++i) {
            for (std::size_t j = i + 1; j < q.size(); ++j) edges.emplace(q[i], q[j]);
        }
    }
    r.edges.assign(edges.begin(), edges.end());
    return r;
}

void write_resources(std::ostream &out, const std::string &prefix, const CircuitResources &r) {
    out << prefix << ".aa_repetitions = " << r.aa_repetitions << '\n'
        << prefix << ".qubits = " << r.qubits << '\n'
        << prefix << ".qubits_without_target = " << r.qubits_without_target << '\n'
        << prefix << ".register_qubits = " << r.register_qubits << '\n'
        << prefix << ".queries = " << r.queries << '\n'
        << prefix << ".gates = " << r.gate_count << '\n'
        << prefix << ".multi_qubit_gates = " << r.multi_qubit_gate_count << '\n'
        << prefix << ".connectivity_edges = " << r.edges.size() << '\n'
        << prefix << ".edges =";
    for (const auto &[a, b] : r.edges) out << ' ' << a << '-' << b;
    out << '\n';
}

}  // namespace

std::string ResourceReport::to_text() const {
    std::ostringstream out;
    out << "N = " << N << '\n'
        << "P = " << P << '\n'
        << "log2_N = " << log2_exact(N) << '\n'
        << "log2_P = " << log2_exact(P) << '\n';
    write_resources(out, "qss", qss);
    write_resources(out, "qcoin", qcoin);
    return out.str();
}

ResourceReport report_resources(std::size_t N, std::size_t P) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    if (!is_power_of_two(P) || P < 2) throw std::invalid_argument("P must be a power of two >= 2");
    if (log2_exact(N) + log2_exact(P) + 1 > kMaxQubits) {
        throw std::invalid_argument("log N + log P + 1 exceeds the simulator register limit");
    }
    const std::vector<double> values(N, 0.5);
    ResourceReport report;
    report.N = N;
    report.P = P;
    report.qss = measure_circuit(Algorithm::qss, qss_unitary_circuit(OracleSpec::sqrt_amplitude(values), P),
                                 P - 1, log2_exact(P));
    report.qcoin = measure_circuit(Algorithm::qcoin,
                                   coin_circuit(OracleSpec::linear_amplitude(values), P - 1), P - 1, 0);
    return report;
}

}  // namespace qmean
