# Copyright 2026 The qmean Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import cmath
import math

import pytest

import qmean


def test_estimators_and_query_counts():
    values = [0.1, 0.3, 0.5, 0.7]
    mc = qmean.estimate_monte_carlo(values, trials=1000, seed=1)
    assert mc.algorithm == qmean.Algorithm.monte_carlo
    assert mc.queries_used == 1000
    assert abs(mc.value - 0.4) < 0.1

    qss = qmean.estimate_qss(values, P=16, seed=1)
    assert qss.queries_used == qmean.qss_queries(16) == 31

    qc = qmean.estimate_qcoin(values, k=3, L=20, seed=1)
    assert qc.queries_used == qmean.qcoin_queries(3, 20) == 20 * (2 + 16)
    assert len(qc.trace) == 4

    budget = qmean.estimate_qcoin_budget(values, k=3, budget=240, seed=1)
    assert budget.queries_used == 234


def test_k0_matches_monte_carlo():
    for seed in range(10):
        a = qmean.estimate_qcoin([0.2, 0.9], k=0, L=41, seed=seed)
        b = qmean.estimate_monte_carlo([0.2, 0.9], trials=41, seed=seed)
        assert a.value == b.value


def test_noise_model_shifts_monte_carlo():
    noise = qmean.NoiseModel.preset("hardware")
    assert not noise.is_noiseless()
    assert noise.readout_flip_prob_1to0 == pytest.approx(0.10)
    est = qmean.estimate_monte_carlo([1.0], trials=20000, seed=5, noise=noise)
    assert est.value == pytest.approx(0.9, abs=0.01)
    with pytest.raises(ValueError):
        qmean.NoiseModel(readout_flip_prob=1.5)


def test_qft_matches_dft():
    amps = [complex(i + 1, -i) for i in range(8)]
    norm = math.sqrt(sum(abs(a) ** 2 for a in amps))
    amps = [a / norm for a in amps]
    got = qmean.qft(amps)
    for j in range(8):
        ref = sum(cmath.exp(-2j * math.pi * j * k / 8) * amps[k] for k in range(8)) / math.sqrt(8)
        assert abs(got[j] - ref) < 1e-12


def test_qss_distribution_routes_agree():
    a = qmean.qss_outcome_distribution(0.37, 32, qmean.QssRoute.statevector)
    b = qmean.qss_outcome_distribution(0.37, 32, qmean.QssRoute.analytic)
    assert sum(a) == pytest.approx(1.0)
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-10
    assert qmean.qss_exact_error(0.5, 16) < 1e-12


def test_convergence_sweep_and_csv():
    spec = qmean.SweepSpec()
    spec.algorithms = [qmean.Algorithm.monte_carlo, qmean.Algorithm.qcoin]
    spec.qcoin_ks = [1, 2]
    spec.budgets = [100, 1000, 10000, 100000]
    spec.repetitions = 200
    spec.seed_base = 9
    result = qmean.run_convergence_sweep(spec)
    slopes = {(s.algorithm, s.k): s.slope for s in result.slopes}
    assert slopes[(qmean.Algorithm.monte_carlo, 0)] == pytest.approx(-0.5, abs=0.15)
    assert result.convergence_csv().startswith("algorithm,k,P,budget,queries")
    table = qmean.OptimalKTable.from_csv(result.optimal_k.to_csv())
    assert table.ks == [1, 2]
    assert qmean.select_optimal_k(1000, table) in (1, 2)


def test_value_sweep():
    spec = qmean.SweepSpec()
    spec.algorithms = [qmean.Algorithm.qss]
    spec.f_values = [0.0, 0.5, 1.0]
    spec.budgets = [31]
    spec.repetitions = 5
    result = qmean.run_value_sweep(spec)
    assert len(result.points) == 3
    assert all(p.mean_abs_error < 1e-12 for p in result.points)


def test_supersample_and_resources():
    job = qmean.SupersampleJob()
    job.source = qmean.synthetic_teaser_image(10, 4)
    job.regions = qmean.default_regions(10, 4)
    job.seed = 3
    result = qmean.run_supersample(job)
    assert result.queries_per_pixel == 234
    assert (result.estimate.width, result.estimate.height) == (10, 4)
    assert {r.region.name for r in result.regions} >= {"gradient", "band_0"}

    report = qmean.report_resources(1024, 32)
    assert report.qss.qubits == 16
    assert report.qcoin.qubits == 11
    assert "qss.qubits = 16" in report.to_text()
    with pytest.raises(ValueError):
        qmean.report_resources(3, 32)
