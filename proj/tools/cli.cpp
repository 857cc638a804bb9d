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

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmean/config.hpp"
#include "qmean/harness.hpp"

namespace qmean::cli {

namespace fs = std::filesystem;

namespace {

struct Flag {
    const char *name;
    const char *key;
    const char *help;
};

// Files are staged in memory and written only after the run succeeds, so a
// failed invocation leaves nothing behind.
class Artifacts {
  public:
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

    void commit(const fs::path &dir) const {
        std::vector<fs::path> staged;
        auto cleanup = [&] {
            std::error_code ec;
            for (const auto &p : staged) fs::remove(p, ec);
        };
        for (const auto &[name, content] : files_) {
            const fs::path tmp = dir / (name + ".tmp");
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            staged.push_back(tmp);
            if (!out) {
                cleanup();
                throw IoError("cannot write '" + (dir / name).string() + "'");
            }
        }
        for (std::size_t i = 0; i < files_.size(); ++i) {
            std::error_code ec;
            fs::rename(staged[i], dir / files_[i].first, ec);
            if (ec) {
                cleanup();
                throw IoError("cannot write '" + (dir / files_[i].first).string() + "': " + ec.message());
            }
        }
    }

  private:
    std::vector<std::pair<std::string, std::string>> files_;
};

void ensure_writable(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
    const fs::path probe = dir / ".qmean-write-probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

struct Subcommand {
    const char *name;
    const char *help;
    std::vector<Flag> flags;
    std::vector<const char *> boolean_flags;  // keys set to "true" by a bare flag
    bool accepts_regions = false;
    // Calls `ready` once its inputs are validated, before any real work.
    std::function<void(const Config &, Artifacts &, std::ostream &, const std::function<void()> &ready)> body;
};

template <typename T>
std::string str(const T &writer_arg, void (*writer)(std::ostream &, const T &)) {
    std::ostringstream ss;
    writer(ss, writer_arg);
    return ss.str();
}

NoiseModel noise_from(const Config &c) {
    NoiseModel m = NoiseModel::preset(c.get_string("noise", "none"));
    if (c.has("noise.readout_flip_prob")) m.readout_flip_prob = c.get_double("noise.readout_flip_prob");
    if (c.has("noise.readout_flip_prob_1to0")) {
        m.readout_flip_prob_1to0 = c.get_double("noise.readout_flip_prob_1to0");
    }
    if (c.has("noise.gate_error_1q")) m.gate_error_1q = c.get_double("noise.gate_error_1q");
    if (c.has("noise.gate_error_mq")) m.gate_error_mq = c.get_double("noise.gate_error_mq");
    m.validate();
    return m;
}

std::vector<Algorithm> algorithms_from(const Config &c, const std::string &fallback) {
    std::vector<Algorithm> out;
    for (const auto &name : split_list(c.get_string("algorithms", fallback))) out.push_back(parse_algorithm(name));
    return out;
}

std::vector<std::size_t> sizes_from(const Config &c, const std::string &key, const std::string &fallback) {
    std::vector<std::size_t> out;
    for (const auto &item : split_list(c.get_string(key, fallback))) out.push_back(parse_uint(item, key));
    return out;
}

OptimalKTable load_calibration(const Config &c) {
    const std::string path = c.get_string("calibration");
    std::ifstream in(path);
    if (!in) throw IoError("cannot read calibration table '" + path + "'");
    return read_optimal_k_csv(in);
}

// "k = auto" picks the calibrated optimum for the budget.
std::size_t k_from(const Config &c, std::uint64_t budget) {
    if (c.get_string("k") == "auto") {
        if (!c.has("calibration")) throw std::invalid_argument("k = auto needs a calibration table");
        return select_optimal_k(budget, load_calibration(c));
    }
    return c.get_uint("k");
}

OracleSpec oracle_from(const Config &c) {
    if (c.has("values")) return OracleSpec::sqrt_amplitude(c.get_double_list("values"));
    return OracleSpec::direct_value(c.get_double("f"), Encoding::sqrt_amplitude);
}

std::size_t power_of_two_from(const Config &c, const std::string &key) {
    const std::uint64_t v = c.get_uint(key);
    if (v < 2 || (v & (v - 1)) != 0) throw std::invalid_argument(key + " must be a power of two >= 2");
    return v;
}

// --- subcommands ----------------------------------------------------------

void run_estimate(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    const Algorithm algo = parse_algorithm(c.get_string("algorithm"));
    const OracleSpec oracle = oracle_from(c);
    const std::uint64_t seed = c.get_uint("seed");
    const NoiseModel noise = noise_from(c);
    std::unique_ptr<NoisyBackend> noisy;
    if (!noise.is_noiseless()) noisy = std::make_unique<NoisyBackend>(noise);
    const ShotBackend &backend = noisy ? static_cast<const ShotBackend &>(*noisy) : exact_backend();

    std::uint64_t budget = 0, L = 0;
    std::size_t P = 0, k = 0;
    switch (algo) {
        case Algorithm::monte_carlo:
            budget = c.get_uint("budget");
            if (budget == 0) throw std::invalid_argument("budget must be >= 1");
            break;
        case Algorithm::qss:
            P = c.has("P") ? power_of_two_from(c, "P") : qss_resolution_for_budget(c.get_uint("budget"));
            if (P == 0) throw std::invalid_argument("budget too small for QSS");
            break;
        case Algorithm::qcoin:
            if (c.has("L")) {
                L = c.get_uint("L");
                if (L == 0) throw std::invalid_argument("L must be >= 1");
            } else {
                budget = c.get_uint("budget");
            }
            k = k_from(c, budget);
            if (k > 30) throw std::invalid_argument("k must be <= 30");
            break;
    }
    ready();

    Estimate e;
    switch (algo) {
        case Algorithm::monte_carlo: e = estimate_monte_carlo(oracle, budget, seed, backend); break;
        case Algorithm::qss: e = estimate_qss(oracle, P, seed, backend); break;
        case Algorithm::qcoin:
            e = L != 0 ? estimate_qcoin(oracle, k, L, seed, backend)
                       : estimate_qcoin_budget(oracle, k, budget, seed, backend);
            break;
    }
    const EstimateRecord rec = to_record(e, oracle.mean());
    out << rec.csv_row() << '\n';
    files.add("estimate.csv", EstimateRecord::csv_header() + "\n" + rec.csv_row() + "\n");
}

std::vector<double> f_grid_from(const Config &c) {
    if (c.has("f_values")) return c.get_double_list("f_values");
    const std::uint64_t steps = c.get_uint("f_steps", 20);
    if (steps == 0) throw std::invalid_argument("f_steps must be >= 1");
    std::vector<double> f;
    for (std::uint64_t j = 0; j <= steps; ++j) f.push_back(static_cast<double>(j) / static_cast<double>(steps));
    return f;
}

void run_sweep_value(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    SweepSpec s;
    s.algorithms = algorithms_from(c, "mc,qss,qcoin");
    s.qcoin_ks = sizes_from(c, "ks", "3");
    s.f_values = f_grid_from(c);
    s.budgets = c.get_uint_list("budgets");
    s.repetitions = c.get_uint("repetitions", 100);
    s.noise = noise_from(c);
    s.seed_base = c.get_uint("seed");
    s.jobs = c.get_uint("jobs", 1);
    s.keep_trials = c.get_bool("trials", false);
    s.validate(false);
    ready();

    const ValueSweepResult r = run_value_sweep(s);
    files.add("value.csv", str(r.points, write_value_csv));
    if (s.keep_trials) files.add("trials.csv", str(r.trials, write_trials_csv));
    out << "value sweep: " << r.points.size() << " points\n";
}

void run_sweep_convergence(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    SweepSpec s;
    s.algorithms = algorithms_from(c, "mc,qss,qcoin");
    s.qcoin_ks = sizes_from(c, "ks", "1,2,3,4,5,6,7,8");
    if (c.has("f_values")) s.f_values = c.get_double_list("f_values");
    s.budgets = c.get_uint_list("budgets");
    if (c.has("qss_P")) s.qss_resolutions = sizes_from(c, "qss_P", "");
    s.qss_exact_points = c.get_uint("qss_points", 200);
    s.repetitions = c.get_uint("repetitions", 3000);
    s.noise = noise_from(c);
    s.seed_base = c.get_uint("seed");
    s.jobs = c.get_uint("jobs", 1);
    s.keep_trials = c.get_bool("trials", false);
    s.validate(true);

    std::vector<std::size_t> levels;
    std::uint64_t scaling_reps = 0;
    double scaling_factor = 0.0;
    if (c.has("scaling_levels")) {
        levels = sizes_from(c, "scaling_levels", "");
        scaling_reps = c.get_uint("scaling_repetitions", s.repetitions);
        scaling_factor = c.get_double("scaling_factor", 9.0);
        for (std::size_t l : levels) {
            if (l == 0 || l > 30) throw std::invalid_argument("scaling levels must lie in [1, 30]");
        }
        if (levels.empty() || scaling_reps == 0 || !(scaling_factor > 0.0)) {
            throw std::invalid_argument("scaling needs levels, repetitions >= 1 and a positive factor");
        }
    }

    ready();
    const ConvergenceResult r = run_convergence_sweep(s);
    files.add("convergence.csv", str(r.points, write_convergence_csv));
    files.add("slopes.csv", str(r.slopes, write_slopes_csv));
    if (!r.optimal_k.budgets.empty()) files.add("optimal_k.csv", str(r.optimal_k, write_optimal_k_csv));
    if (s.keep_trials) files.add("trials.csv", str(r.trials, write_trials_csv));
    for (const SlopeRow &sl : r.slopes) {
        out << "slope " << to_string(sl.algorithm);
        if (sl.algorithm == Algorithm::qcoin) out << " k=" << sl.k;
        out << ' ' << format_number(sl.slope) << '\n';
    }
    if (!levels.empty()) {
        const ScalingResult sr = run_single_step_scaling(levels, scaling_reps, s.seed_base, scaling_factor, s.jobs,
                                                         s.noise);
        files.add("scaling.csv", str(sr.rows, write_scaling_csv));
        out << "slope qcoin k=1 single-step " << format_number(sr.slope) << '\n';
    }
}

std::pair<std::size_t, std::size_t> parse_dimensions(const std::string &text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw ConfigError("synthetic: expected WxH, got '" + text + "'");
    return {parse_uint(text.substr(0, x), "synthetic width"), parse_uint(text.substr(x + 1), "synthetic height")};
}

void run_supersample_cmd(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    SupersampleJob job;
    job.algorithm = parse_algorithm(c.get_string("algorithm", "qcoin"));
    job.budget = c.get_uint("budget", 240);
    if (job.algorithm == Algorithm::qcoin) job.k = c.has("k") ? k_from(c, job.budget) : 3;
    if (job.algorithm == Algorithm::qss && c.has("P")) job.P = power_of_two_from(c, "P");
    job.noise = noise_from(c);
    job.seed = c.get_uint("seed");
    job.jobs = c.get_uint("jobs", 1);

    const bool synthetic = !c.has("image");
    if (synthetic) {
        const auto [w, h] = parse_dimensions(c.get_string("synthetic", "40x24"));
        job.source = synthetic_teaser_image(w, h);
    } else {
        job.source = load_pgm(c.get_string("image"));
    }
    const std::size_t pw = job.source.width / kSubpixelBlock, ph = job.source.height / kSubpixelBlock;
    for (const auto &[name, value] : c.with_prefix("region.")) {
        const auto v = c.get_uint_list("region." + name);
        if (v.size() != 4) throw ConfigError("region." + name + ": expected x, y, width, height");
        job.regions.push_back({name, v[0], v[1], v[2], v[3]});
    }
    if (job.regions.empty()) {
        job.regions = synthetic ? default_regions(pw, ph) : std::vector<Region>{{"all", 0, 0, pw, ph}};
    }
    job.validate();
    ready();

    const SupersampleResult r = run_supersample(job);
    auto pgm = [](const GrayImage &img) {
        std::ostringstream ss;
        write_pgm(ss, img);
        return ss.str();
    };
    files.add("estimate.pgm", pgm(r.estimate));
    files.add("ideal.pgm", pgm(r.ideal));
    if (synthetic) files.add("source.pgm", pgm(job.source));
    files.add("regions.csv", str(r, write_regions_csv));
    files.add("pixels.csv", str(r, write_pixels_csv));
    out << to_string(job.algorithm) << ": " << r.queries_per_pixel << " queries per pixel\n";
    for (const RegionError &e : r.regions) out << "mae " << e.region.name << ' ' << format_number(e.mae) << '\n';
}

void run_dump_circuit(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    const Algorithm algo = parse_algorithm(c.get_string("algorithm"));
    std::vector<double> values;
    if (c.has("values")) {
        values = c.get_double_list("values");
    } else {
        const std::uint64_t n = c.get_uint("n_input", 0);
        if (n > 16) throw std::invalid_argument("n_input must be <= 16");
        values.assign(std::size_t{1} << n, c.get_double("f", 0.5));
    }
    const OracleSpec oracle = OracleSpec::sqrt_amplitude(values);
    Circuit circuit(1);
    switch (algo) {
        case Algorithm::qss: circuit = qss_circuit(oracle, power_of_two_from(c, "P")); break;
        case Algorithm::qcoin:
            circuit = coin_circuit(oracle.with_encoding(Encoding::linear_amplitude, c.get_double("offset", 0.0)),
                                   c.get_uint("m", 1));
            break;
        case Algorithm::monte_carlo: {
            circuit = qss_preparation_circuit(oracle);
            circuit.measure({oracle.n_input_qubits()});
            break;
        }
    }
    ready();
    const std::string listing = dump_circuit(circuit);
    out << listing;
    files.add("circuit.txt", listing);
}

void run_resources(const Config &c, Artifacts &files, std::ostream &out, const std::function<void()> &ready) {
    const std::uint64_t N = c.get_uint("N");
    if (N == 0 || (N & (N - 1)) != 0) throw std::invalid_argument("N must be a power of two");
    const ResourceReport r = report_resources(N, power_of_two_from(c, "P"));
    ready();
    const std::string text = r.to_text();
    out << text;
    files.add("resources.txt", text);
}

std::vector<Subcommand> subcommands() {
    const Flag noise{"--noise", "noise", "Noise preset: none or hardware"};
    const Flag calibration{"--calibration", "calibration", "optimal_k.csv used when k = auto"};
    return {
        {"estimate",
         "Run one estimator and print its record",
         {{"--algorithm", "algorithm", "monte-carlo (mc), qss or qcoin"},
          {"--f", "f", "Target mean of a one-bin oracle"},
          {"--values", "values", "Comma-separated integrand values (power-of-two count)"},
          {"--k", "k", "QCoin shifting-scaling steps, or auto"},
          {"--L", "L", "QCoin trials per step"},
          {"--budget", "budget", "Query budget (MC trials; QCoin and QSS sizing)"},
          {"--P", "P", "QSS resolution"},
          noise,
          calibration},
         {},
         false,
         run_estimate},
        {"sweep-value",
         "Mean absolute error against the target mean",
         {{"--algorithms", "algorithms", "Comma-separated algorithms"},
          {"--ks", "ks", "QCoin k values"},
          {"--f-values", "f_values", "Explicit f grid"},
          {"--f-steps", "f_steps", "Uniform f grid with this many intervals"},
          {"--budgets", "budgets", "Ascending query budgets"},
          {"--repetitions", "repetitions", "Runs per point"},
          noise},
         {"trials"},
         false,
         run_sweep_value},
        {"sweep-convergence",
         "Mean absolute error against queries, slopes and the optimal-k table",
         {{"--algorithms", "algorithms", "Comma-separated algorithms"},
          {"--ks", "ks", "QCoin k values"},
          {"--budgets", "budgets", "Ascending query budgets"},
          {"--qss-P", "qss_P", "QSS resolutions (default: largest fitting each budget)"},
          {"--qss-points", "qss_points", "f points for the exact QSS error"},
          {"--repetitions", "repetitions", "Runs per point"},
          {"--f-values", "f_values", "Fixed f values cycled over repetitions"},
          {"--scaling-levels", "scaling_levels", "Levels for the k = 1 scaling run"},
          {"--scaling-repetitions", "scaling_repetitions", "Runs per scaling level"},
          {"--scaling-factor", "scaling_factor", "L = factor / delta^2 in the scaling run"},
          noise},
         {"trials"},
         false,
         run_sweep_convergence},
        {"supersample",
         "Estimate every pixel of an image from its 8x8 subpixels",
         {{"--image", "image", "Binary PGM at subpixel resolution"},
          {"--synthetic", "synthetic", "Synthetic test image size in pixels, WxH"},
          {"--algorithm", "algorithm", "monte-carlo (mc), qss or qcoin"},
          {"--budget", "budget", "Queries per pixel"},
          {"--k", "k", "QCoin steps, or auto"},
          {"--P", "P", "QSS resolution"},
          noise,
          calibration},
         {},
         true,
         run_supersample_cmd},
        {"dump-circuit",
         "Print the gate listing of a circuit",
         {{"--algorithm", "algorithm", "qss, qcoin or monte-carlo (mc)"},
          {"--n-input", "n_input", "Input qubits (N = 2^n)"},
          {"--values", "values", "Integrand values instead of a constant"},
          {"--f", "f", "Constant integrand value"},
          {"--P", "P", "QSS resolution"},
          {"--m", "m", "QCoin AA repetitions"},
          {"--offset", "offset", "QCoin coin offset"}},
         {},
         false,
         run_dump_circuit},
        {"resources",
         "Qubit, gate and connectivity counts for QSS and QCoin",
         {{"--N", "N", "Input size"}, {"--P", "P", "QSS resolution"}},
         {},
         false,
         run_resources},
    };
}

void check_keys(const Config &c, const Subcommand &sub) {
    std::set<std::string> allowed{"seed", "jobs"};
    for (const Flag &f : sub.flags) allowed.insert(f.key);
    for (const char *b : sub.boolean_flags) allowed.insert(b);
    for (const auto &[key, value] : c.entries()) {
        if (allowed.count(key)) continue;
        if (key.rfind("noise.", 0) == 0) continue;
        if (sub.accepts_regions && key.rfind("region.", 0) == 0) continue;
        throw ConfigError(std::string("unknown key '") + key + "' for " + sub.name);
    }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qmean: quantum mean estimation experiments"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    const std::vector<Subcommand> subs = subcommands();
    std::string config_path, out_dir;
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;
    std::vector<std::pair<CLI::App *, const Subcommand *>> apps;

    for (const Subcommand &sub : subs) {
        CLI::App *s = app.add_subcommand(sub.name, sub.help);
        s->add_option("--config", config_path, "Configuration file (key = value lines)");
        s->add_option("--out", out_dir, "Output directory for artifacts");
        s->add_option("--set", sets, "Extra key=value overrides")->take_all();
        s->add_option_function<std::string>(
            "--seed", [&](const std::string &v) { overrides["seed"] = v; }, "Seed (overrides the config)");
        s->add_option_function<std::string>(
            "--jobs", [&](const std::string &v) { overrides["jobs"] = v; }, "Worker threads (0 = all cores)");
        for (const Flag &f : sub.flags) {
            const std::string key = f.key;
            s->add_option_function<std::string>(
                f.name, [&overrides, key](const std::string &v) { overrides[key] = v; }, f.help);
        }
        for (const char *b : sub.boolean_flags) {
            const std::string key = b;
            s->add_flag_callback("--" + key, [&overrides, key] { overrides[key] = "true"; },
                                 "Also write per-trial rows");
        }
        apps.emplace_back(s, &sub);
    }

    try {
        std::vector<const char *> argv;
        for (const auto &a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    const Subcommand *chosen = nullptr;
    for (const auto &[a, sub] : apps) {
        if (a->parsed()) chosen = sub;
    }

    try {
        Config config = config_path.empty() ? Config{} : Config::load(config_path);
        for (const std::string &kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto &[k, v] : overrides) config.set(k, v);
        check_keys(config, *chosen);

        Artifacts files;
        chosen->body(config, files, out, [&] {
            if (!out_dir.empty()) ensure_writable(out_dir);
        });
        if (!out_dir.empty()) {
            files.add("effective.cfg", config.to_text());
            files.commit(out_dir);
        }
        return kOk;
    } catch (const ConfigError &e) {
        err << "qmean: config error: " << e.what() << '\n';
        return kParseError;
    } catch (const IoError &e) {
        err << "qmean: I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const ImageError &e) {
        err << "qmean: I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::invalid_argument &e) {
        err << "qmean: invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception &e) {
        err << "qmean: internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace qmean::cli
