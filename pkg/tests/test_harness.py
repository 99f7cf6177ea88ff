import math
from dataclasses import dataclass

import numpy as np
import pytest
from scipy.stats import norm

from hyperclique import harness
from hyperclique.harness import (
    DetectorConfig,
    PhaseGridSpec,
    calibrate_threshold,
    clique_law_experiment,
    clique_law_value,
    estimate_risk,
    gamma_of,
    phase_grid,
    rows_to_csv,
    rows_to_svg,
    wilson_half_width,
)


@dataclass(frozen=True)
class Constant:
    value: float
    name: str = "constant"

    def statistic(self, graph, stream):
        return self.value


@dataclass(frozen=True)
class Broken:
    name: str = "broken"

    def statistic(self, graph, stream):
        raise ZeroDivisionError("boom")


def test_constant_detector_calibration():
    table = calibrate_threshold(Constant(3.5), 10, 3, 0.05, 200)
    assert table.threshold == 3.5
    risk = estimate_risk(Constant(3.5), table.threshold, 10, 3, 5, 50)
    assert risk.type_I == 0.0


def test_order_statistic_choice():
    assert harness.order_statistic_index(0.05, 200) == 190
    table = calibrate_threshold(DetectorConfig("edgecount"), 12, 3, 0.05, 200, master_seed=4)
    assert table.threshold == table.null_stats[189]
    assert np.all(np.diff(table.null_stats) >= 0)


def test_calibration_needs_enough_trials():
    with pytest.raises(ValueError):
        calibrate_threshold(Constant(0.0), 10, 3, 0.05, 100)
    with pytest.raises(ValueError):
        calibrate_threshold(Constant(0.0), 10, 3, 1.5, 100)


def test_edgecount_threshold_near_gaussian_quantile():
    table = calibrate_threshold(DetectorConfig("edgecount"), 20, 3, 0.05, 2000, master_seed=0)
    assert 1.45 <= table.threshold <= 1.85
    assert abs(table.threshold - norm.ppf(0.95)) < 0.2


def test_calibration_deterministic():
    a = calibrate_threshold(DetectorConfig("spectral"), 15, 3, 0.1, 100, master_seed=9)
    b = calibrate_threshold(DetectorConfig("spectral"), 15, 3, 0.1, 100, master_seed=9)
    assert np.array_equal(a.null_stats, b.null_stats)


def test_constant_risks():
    never = estimate_risk(Constant(0.0), 0.0, 10, 3, 5, 30)
    always = estimate_risk(Constant(1.0), 0.0, 10, 3, 5, 30)
    assert (never.type_I, never.type_II) == (0.0, 1.0)
    assert (always.type_I, always.type_II) == (1.0, 0.0)
    assert never.risk == always.risk == 1.0


def test_edgecount_risk_large_clique():
    # mean shift C(25,3)/2 over sd sqrt(C(30,3))/2 is about 36 null sds
    assert math.comb(25, 3) / math.sqrt(math.comb(30, 3)) > 35
    config = DetectorConfig("edgecount")
    thr = calibrate_threshold(config, 30, 3, 0.05, 200, master_seed=1).threshold
    est = estimate_risk(config, thr, 30, 3, 25, 100, master_seed=1)
    assert est.type_II == 0.0
    assert est.type_I <= 0.05 + 3 * math.sqrt(0.05 * 0.95 / 100)


def test_risk_errors_carry_context():
    with pytest.raises(ZeroDivisionError, match="H0"):
        estimate_risk(Broken(), 0.0, 10, 3, 5, 5)


def test_wilson_half_width():
    assert 0.03 <= wilson_half_width(0, 100) <= 0.05
    assert wilson_half_width(50, 100) == pytest.approx(0.0960, abs=1e-3)
    assert wilson_half_width(100, 100) == pytest.approx(wilson_half_width(0, 100))


def test_gamma_axis():
    assert gamma_of(49, 7) == 1.0
    assert gamma_of(100, 1) == 0.0


def test_kappa_from_gamma():
    spec = PhaseGridSpec(d=3, n_list=(49, 64), detectors=(DetectorConfig("edgecount"),), gammas=(0.5, 1.0))
    assert spec.kappa_list(49) == (2, 7)
    assert spec.kappa_list(64) == (2, 8)
    with pytest.raises(ValueError):
        PhaseGridSpec(d=3, n_list=(10,), detectors=(), gammas=(-1.0,))
    with pytest.raises(ValueError):
        PhaseGridSpec(d=3, n_list=(10,), detectors=(), kappas={10: (11,)})


def test_single_cell_matches_direct_calls():
    config = DetectorConfig("edgecount")
    spec = PhaseGridSpec(d=3, n_list=(14,), detectors=(config,), kappas={14: (6,)},
                         trials=40, calibration_trials=200, master_seed=5)
    (row,) = phase_grid(spec)
    thr = calibrate_threshold(config, 14, 3, 0.05, 200, 5).threshold
    risk = estimate_risk(config, thr, 14, 3, 6, 40, 5)
    assert row.threshold == thr
    assert (row.type_I, row.type_II, row.ci_I, row.ci_II) == (risk.type_I, risk.type_II, risk.ci_I, risk.ci_II)


def test_grid_completeness_and_error_rows():
    spec = PhaseGridSpec(
        d=3, n_list=(2, 12), detectors=(DetectorConfig("edgecount"), DetectorConfig("spectral")),
        kappas={2: (1, 2), 12: (3, 5, 8)}, trials=10, calibration_trials=200,
    )
    rows = phase_grid(spec, timing=False)
    assert len(rows) == 2 * (2 + 3)
    assert [(r.detector, r.n, r.kappa) for r in rows] == sorted((r.detector, r.n, r.kappa) for r in rows)
    # C(2, 3) = 0 slots: the edge count is undefined, the spectral statistic is 0
    bad = [r for r in rows if r.n == 2 and r.detector == "edgecount"]
    assert [r.status for r in bad] == ["error:ValueError"] * 2
    assert all(r.status == "ok" for r in rows if r not in bad)


def test_spectral_risk_decreases_with_kappa():
    spec = PhaseGridSpec(d=3, n_list=(50,), detectors=(DetectorConfig("spectral"),),
                         kappas={50: (5, 15, 25, 35)}, trials=100, calibration_trials=200, master_seed=2)
    rows = phase_grid(spec)
    risk = {r.kappa: r.risk for r in rows}
    assert risk[35] <= risk[5]
    assert rows[-1].solved


def test_csv_format():
    spec = PhaseGridSpec(d=3, n_list=(12,), detectors=(DetectorConfig("edgecount"),),
                         kappas={12: (4,)}, trials=10, calibration_trials=200)
    text = rows_to_csv(phase_grid(spec, timing=False))
    lines = text.split("\n")
    assert lines[0] == harness.CSV_HEADER
    fields = lines[1].split(",")
    assert fields[:4] == ["edgecount", "12", "3", "4"]
    assert fields[-2:] == ["0", "ok"]
    assert text.endswith("\n") and "\r" not in text
    parsed = harness.read_csv_rows(text)
    assert float(parsed[0]["gamma"]) == pytest.approx(float(format(math.log(4) / math.log(math.sqrt(12)), ".6g")))


def test_svg_heatmap():
    spec = PhaseGridSpec(d=3, n_list=(10, 12), detectors=(DetectorConfig("edgecount"),),
                         gammas=(1.0, 1.5), trials=5, calibration_trials=200)
    svg = rows_to_svg(phase_grid(spec))
    assert svg.startswith("<svg") and svg.count("<rect") == 4


def test_workers_do_not_change_results():
    spec = PhaseGridSpec(d=3, n_list=(12,), detectors=(DetectorConfig("spectral"),),
                         kappas={12: (4, 8)}, trials=12, calibration_trials=200, master_seed=3)
    a = rows_to_csv(phase_grid(spec, workers=1, timing=False))
    b = rows_to_csv(phase_grid(spec, workers=3, timing=False))
    assert a == b


def test_clique_law_values():
    assert clique_law_value(64, 3) == pytest.approx(6.0)
    assert clique_law_value(16, 2) == pytest.approx(8.0)


def test_clique_law_ratio():
    rows = clique_law_experiment(3, [32, 64], trials=20, master_seed=0)
    for row in rows:
        assert row.status == "ok"
        assert abs(row.ratio - 1) <= 0.2


def test_clique_law_infeasible_marker():
    (row,) = clique_law_experiment(3, [30], trials=2, max_nodes=5)
    assert row.status == "infeasible" and math.isnan(row.mean_size)
