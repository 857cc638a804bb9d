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
 * Experiment suites: error-versus-value and error-versus-queries sweeps,
 * single-step QCoin scaling, image supersampling and resource reports.
 *
 * Every sweep point is a set of independent jobs keyed by (point,
 * repetition). Seeds derive from the key, so results do not depend on the
 * number of worker threads.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qmean/estimators.hpp"
#include "qmean/image.hpp"
#include "qmean/noise.hpp"

namespace qmean {

/// Runs fn(0) .. fn(count - 1) on up to `jobs` threads (0 means one per
/// hardware thread). If any call throws, the exception of the lowest index
/// is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)> &fn);

// --- QSS outcome distributions -------------------------------------------

enum class QssRoute {
    automatic,    ///< statevector up to P = 512, analytic above
    statevector,  ///< simulate the QSS circuit on a one-bin oracle
    analytic,     ///< closed-form Fejer-kernel distribution
};

/// P(t) for the register reading t of noiseless QSS. It depends on the
/// oracle only through its mean.
std::vector<double> qss_outcome_distribution(double f, std::size_t P,
                                             QssRoute route = QssRoute::automatic);
/// Same, simulated on an arbitrary oracle.
std::vector<double> qss_outcome_distribution(const OracleSpec &oracle, std::size_t P);

/// E|sin^2(t pi / P) - f| under the outcome distribution.
double qss_exact_error(double f, std::size_t P, QssRoute route = QssRoute::automatic);
/// qss_exact_error averaged over f = (j + 1/2) / points, j < points.
double qss_mean_exact_error(std::size_t P, std::size_t points = 200,
                            QssRoute route = QssRoute::automatic);
/// Largest power of two P >= 2 with 2P - 1 <= budget; 0 if none.
std::size_t qss_resolution_for_budget(std::uint64_t budget);

// --- Sweeps ---------------------------------------------------------------

struct SweepSpec {
    std::vector<Algorithm> algorithms;
    std::vector<std::size_t> qcoin_ks;
    /// Value sweeps: the f grid. Convergence sweeps: repetition r uses
    /// f_values[r % size]; empty draws f uniformly per repetition.
    std::vector<double> f_values;
    std::vector<std::uint64_t> budgets;  ///< ascending
    /// Convergence sweeps only: explicit QSS resolutions instead of the
    /// largest P fitting each budget.
    std::vector<std::size_t> qss_resolutions;
    std::size_t repetitions = 1;
    NoiseModel noise;
    std::uint64_t seed_base = 0;
    /// f points averaged for the noiseless QSS convergence error.
    std::size_t qss_exact_points = 200;
    std::size_t jobs = 1;
    bool keep_trials = false;

    /// Throws std::invalid_argument.
    void validate(bool convergence) const;
};

struct TrialRow {
    Algorithm algorithm = Algorithm::monte_carlo;
    std::size_t k = 0;  ///< QCoin only
    std::size_t P = 0;  ///< QSS only
    std::uint64_t budget = 0;
    std::size_t repetition = 0;
    double f_true = 0.0;
    double f_est = 0.0;
    std::uint64_t queries = 0;
    std::uint64_t seed = 0;
};

struct PointRow {
    Algorithm algorithm = Algorithm::monte_carlo;
    std::size_t k = 0;
    std::size_t P = 0;
    double f = 0.0;  ///< value sweeps only
    std::uint64_t budget = 0;
    std::uint64_t queries = 0;
    double mean_abs_error = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    bool exact = false;  ///< from the outcome distribution rather than sampled
};

struct SlopeRow {
    Algorithm algorithm = Algorithm::monte_carlo;
    std::size_t k = 0;
    double slope = 0.0;
    std::size_t points = 0;
};

struct ValueSweepResult {
    std::vector<PointRow> points;
    std::vector<TrialRow> trials;
};

struct ConvergenceResult {
    std::vector<PointRow> points;
    std::vector<TrialRow> trials;
    std::vector<SlopeRow> slopes;
    OptimalKTable optimal_k;  ///< empty unless QCoin ran
};

/// Mean |f_est - f| for each (f, budget, algorithm[, k]).
ValueSweepResult run_value_sweep(const SweepSpec &spec);

/// Mean |f_est - f| for each (budget, algorithm[, k]) plus log-log slopes
/// and the QCoin error table used to select k.
ConvergenceResult run_convergence_sweep(const SweepSpec &spec);

/**
 * Least-squares slope of log10(y) against log10(x). Points are sorted by x;
 * the smallest is dropped when `skip_smallest`. Non-positive values are
 * ignored. NaN when fewer than two points remain.
 */
double fit_loglog_slope(std::vector<double> x, std::vector<double> y, bool skip_smallest = true);

/// Linear interpolation of log10(y) in log10(x); x ascending, query inside the range.
double interpolate_loglog(const std::vector<double> &x, const std::vector<double> &y, double at);

// --- Single-step QCoin scaling -------------------------------------------

struct ScalingRow {
    std::size_t level = 0;
    double delta = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t queries = 0;
    double mean_abs_error = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope = 0.0;
};

/// QCoin with k = 1 at scaling level j for each listed level: both steps use
/// L = round(trials_factor / delta^2), delta = sin(pi / 2^(j+1)), f uniform.
ScalingResult run_single_step_scaling(const std::vector<std::size_t> &levels,
                                      std::size_t repetitions, std::uint64_t seed_base,
                                      double trials_factor = 9.0, std::size_t jobs = 1,
                                      const NoiseModel &noise = {});

// --- CSV ------------------------------------------------------------------

/// %.10g
std::string format_number(double v);

void write_trials_csv(std::ostream &out, const std::vector<TrialRow> &rows);
void write_value_csv(std::ostream &out, const std::vector<PointRow> &rows);
void write_convergence_csv(std::ostream &out, const std::vector<PointRow> &rows);
void write_slopes_csv(std::ostream &out, const std::vector<SlopeRow> &rows);
void write_scaling_csv(std::ostream &out, const std::vector<ScalingRow> &rows);

/// Columns budget,k,mean_abs_error,optimal; NaN marks infeasible entries.
void write_optimal_k_csv(std::ostream &out, const OptimalKTable &table);
/// Inverse of write_optimal_k_csv. Throws ConfigError on malformed input.
OptimalKTable read_optimal_k_csv(std::istream &in);

// --- Supersampling --------------------------------------------------------

inline constexpr std::size_t kSubpixelBlock = 8;

/// Pixel rectangle in output-pixel coordinates.
struct Region {
    std::string name;
    std::size_t x = 0, y = 0, width = 0, height = 0;
};

/**
 * Source image at subpixel resolution (8 x 8 subpixels per output pixel).
 * Top left: a disk of value 1 on 0.25. Top right: horizontal gradient from 0
 * to 1. Bottom: five bands of value 0, 0.25, 0.5, 0.75 and 1.
 */
GrayImage synthetic_teaser_image(std::size_t pixels_wide = 40, std::size_t pixels_high = 24);

/// Regions matching synthetic_teaser_image: band_0 .. band_100 and gradient.
std::vector<Region> default_regions(std::size_t pixels_wide, std::size_t pixels_high);

struct SupersampleJob {
    GrayImage source;  ///< subpixel resolution; dimensions divisible by 8
    Algorithm algorithm = Algorithm::qcoin;
    std::uint64_t budget = 240;
    std::size_t k = 3;  ///< QCoin
    std::size_t P = 0;  ///< QSS; 0 picks the largest P fitting the budget
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::vector<Region> regions;
    std::size_t jobs = 1;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct RegionError {
    Region region;
    double mae = 0.0;
    std::size_t pixels = 0;
};

struct SupersampleResult {
    GrayImage ideal;     ///< per-pixel mean of the 64 subpixels
    GrayImage estimate;
    std::vector<RegionError> regions;
    std::uint64_t queries_per_pixel = 0;
    std::vector<std::uint64_t> pixel_seeds;
};

/**
 * Estimates every output pixel from an N = 64 oracle over its subpixels.
 * Noiseless QSS draws the register reading from its exact outcome
 * distribution; every other combination runs the estimator itself.
 */
SupersampleResult run_supersample(const SupersampleJob &job);

void write_regions_csv(std::ostream &out, const SupersampleResult &result);
void write_pixels_csv(std::ostream &out, const SupersampleResult &result);

// --- Resources ------------------------------------------------------------

struct CircuitResources {
    Algorithm algorithm = Algorithm::qss;
    std::size_t aa_repetitions = 0;
    std::size_t qubits = 0;                 ///< including the target qubit
    std::size_t qubits_without_target = 0;  ///< log N + log P (QSS), log N (QCoin)
    std::size_t register_qubits = 0;
    std::uint64_t queries = 0;
    std::size_t gate_count = 0;
    std::size_t multi_qubit_gate_count = 0;
    /// Qubit pairs that share a multi-qubit operation, ascending.
    std::vector<std::pair<Qubit, Qubit>> edges;
};

/// QSS with resolution P next to one QCoin coin circuit of equal query
/// count (m = P - 1 AA repetitions).
struct ResourceReport {
    std::size_t N = 0;
    std::size_t P = 0;
    CircuitResources qss;
    CircuitResources qcoin;

    std::string to_text() const;
};

/// Throws std::invalid_argument unless N >= 1 and P >= 2 are powers of two.
ResourceReport report_resources(std::size_t N, std::size_t P);

}  // namespace qmean
